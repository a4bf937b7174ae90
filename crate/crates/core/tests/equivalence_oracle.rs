use proptest::prelude::*;

use bnsearch::equivalence::{dag_to_cpdag, is_consistent_extension, pdag_to_dag};
use bnsearch::graph::{Dag, Pdag};
use bnsearch::netgen::random_dag;
use bnsearch::oracle;
use bnsearch::Error;

#[test]
fn extension_sound_and_complete_on_all_small_pdags() {
    for n in 1..=4 {
        let mut admitted = 0;
        for p in oracle::all_acyclic_pdags(n) {
            match pdag_to_dag(&p) {
                Ok(g) => {
                    assert!(is_consistent_extension(&g, &p).unwrap(), "{p:?} -> {g:?}");
                    admitted += 1;
                }
                Err(Error::NoExtension) => {
                    assert!(oracle::brute_force_extension(&p).is_none(), "missed extension of {p:?}");
                }
                Err(e) => panic!("unexpected error {e}"),
            }
        }
        assert!(admitted > 0);
    }
}

#[test]
fn every_extension_lies_in_the_class() {
    for p in oracle::all_acyclic_pdags(3) {
        let exts = oracle::all_extensions(&p);
        for g in &exts {
            assert_eq!(bnsearch::skeleton(g), bnsearch::skeleton(&p));
            assert_eq!(bnsearch::v_structures(g), bnsearch::v_structures(&p));
        }
    }
}

fn pdag_strategy(n: usize) -> impl Strategy<Value = Pdag> {
    let pairs = n * (n - 1) / 2;
    prop::collection::vec(0u8..4, pairs).prop_map(move |codes| {
        let mut directed = Vec::new();
        let mut undirected = Vec::new();
        let mut k = 0;
        for a in 0..n {
            for b in a + 1..n {
                match codes[k] {
                    1 => directed.push((a, b)),
                    2 => directed.push((b, a)),
                    3 => undirected.push((a, b)),
                    _ => {}
                }
                k += 1;
            }
        }
        Pdag::new(n, &directed, &undirected).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn five_node_extension_matches_brute_force(p in pdag_strategy(5)) {
        prop_assume!(!p.has_directed_cycle());
        match pdag_to_dag(&p) {
            Ok(g) => prop_assert!(is_consistent_extension(&g, &p).unwrap()),
            Err(_) => prop_assert!(oracle::brute_force_extension(&p).is_none()),
        }
    }

    #[test]
    fn completion_matches_enumeration(seed in 0u64..10_000, n in 5usize..=6) {
        let g = random_dag(n, 0.45, 4, seed);
        prop_assume!(g.edge_count() <= 12);
        let c = dag_to_cpdag(&g);
        prop_assert_eq!(c.pdag(), &oracle::class_pdag(&g));
        prop_assert!(is_consistent_extension(&g, c.pdag()).unwrap());
        prop_assert_eq!(dag_to_cpdag(c.witness()), c);
    }
}

#[test]
fn completion_is_deterministic_on_larger_graphs() {
    for seed in 0..50 {
        let g: Dag = random_dag(15, 0.3, 4, seed);
        let c = dag_to_cpdag(&g);
        assert!(is_consistent_extension(&g, c.pdag()).unwrap());
        assert_eq!(pdag_to_dag(c.pdag()).unwrap(), *c.witness());
    }
}
