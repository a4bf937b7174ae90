//! Conversions between DAGs, pdags and completed pdags.
//!
//! A [`CompletedPdag`] is the canonical representative of an equivalence
//! class: compelled edges are directed, reversible edges are undirected.
//! Two completed pdags are equal exactly when their classes are equal.

use std::collections::HashSet;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};
use crate::graph::{skeleton, v_structures, Dag, MixedGraph, Pair, Pdag};

/// Skeleton edge limit for [`enumerate_class`] (2^20 orientations).
pub const MAX_ENUMERATION_EDGES: usize = 20;

/// Canonical representation of one equivalence class, carrying one
/// consistent extension used for scoring.
#[derive(Clone)]
pub struct CompletedPdag {
    pdag: Pdag,
    witness: Dag,
}

impl CompletedPdag {
    pub fn from_dag(g: &Dag) -> Self {
        dag_to_cpdag(g)
    }

    pub fn empty(n: usize) -> Self {
        Self { pdag: Pdag::empty(n), witness: Dag::empty(n) }
    }

    /// Completes an arbitrary pdag: extend it, then re-derive the canonical
    /// form of the extension's class.
    pub fn complete(p: &Pdag) -> Result<Self> {
        if p.has_directed_cycle() {
            return Err(Error::NoExtension);
        }
        Ok(dag_to_cpdag(&pdag_to_dag(p)?))
    }

    pub fn n(&self) -> usize {
        self.pdag.n()
    }

    pub fn pdag(&self) -> &Pdag {
        &self.pdag
    }

    /// The stored consistent extension.
    pub fn witness(&self) -> &Dag {
        &self.witness
    }

    pub fn directed_edges(&self) -> Vec<(usize, usize)> {
        self.pdag.directed_edges()
    }

    pub fn undirected_edges(&self) -> Vec<Pair> {
        self.pdag.undirected_edges()
    }

    pub fn edge_count(&self) -> usize {
        self.pdag.edge_count()
    }
}

impl PartialEq for CompletedPdag {
    fn eq(&self, other: &Self) -> bool {
        self.pdag == other.pdag
    }
}

impl Eq for CompletedPdag {}

impl Hash for CompletedPdag {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.pdag.hash(state);
    }
}

impl std::fmt::Debug for CompletedPdag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "CompletedPdag(n={}, directed={:?}, undirected={:?})",
            self.n(),
            self.directed_edges(),
            self.undirected_edges()
        )
    }
}

/// Same skeleton, same v-structures, and every directed edge of `p` kept
/// with its orientation.
pub fn is_consistent_extension(g: &Dag, p: &Pdag) -> Result<bool> {
    if g.n() != p.n() {
        return Err(Error::NodeCountMismatch(g.n(), p.n()));
    }
    if p.directed_edges().iter().any(|&(a, b)| !g.has_edge(a, b)) {
        return Ok(false);
    }
    Ok(skeleton(g) == skeleton(p) && v_structures(g) == v_structures(p))
}

/// Finds a consistent extension of `p` by repeatedly peeling a sink whose
/// undirected neighbours are adjacent to all its other neighbours, orienting
/// those undirected edges into it. The lowest-index eligible node is always
/// taken, so the result is deterministic.
pub fn pdag_to_dag(p: &Pdag) -> Result<Dag> {
    let n = p.n();
    let neighbours: Vec<Vec<usize>> =
        (0..n).map(|v| (0..n).filter(|&u| p.is_adjacent(u, v)).collect()).collect();
    let mut alive = vec![true; n];
    let mut remaining_edges = p.edge_count();
    let mut out = Dag::empty(n);
    for (a, b) in p.directed_edges() {
        out.insert_unchecked(a, b);
    }

    for _ in 0..n {
        if remaining_edges == 0 {
            break;
        }
        let eligible = (0..n).filter(|&x| alive[x]).find(|&x| {
            let live: Vec<usize> = neighbours[x].iter().copied().filter(|&u| alive[u]).collect();
            if live.iter().any(|&c| p.has_directed(x, c)) {
                return false;
            }
            live.iter().filter(|&&y| p.has_undirected(x, y)).all(|&y| {
                live.iter().all(|&w| w == y || p.is_adjacent(y, w))
            })
        });
        let Some(x) = eligible else {
            return Err(Error::NoExtension);
        };
        for &y in &neighbours[x] {
            if alive[y] {
                if p.has_undirected(x, y) {
                    out.insert_unchecked(y, x);
                }
                remaining_edges -= 1;
            }
        }
        alive[x] = false;
    }
    if remaining_edges != 0 || out.topological_order().is_none() {
        return Err(Error::NoExtension);
    }
    Ok(out)
}

/// Completed pdag for the class of `g`: start from the pattern (skeleton with
/// only v-structure edges directed) and orient further edges with the
/// standard propagation rules until nothing changes.
pub fn dag_to_cpdag(g: &Dag) -> CompletedPdag {
    let n = g.n();
    let mut p = Pdag::empty(n);
    for (a, b) in skeleton(g) {
        p.set_undirected(a, b);
    }
    for (x, y, z) in v_structures(g) {
        p.set_directed(x, y);
        p.set_directed(z, y);
    }
    orient_to_fixpoint(&mut p);
    let witness = pdag_to_dag(&p).expect("completed pdag of a dag always admits an extension");
    CompletedPdag { pdag: p, witness }
}

fn orient_to_fixpoint(p: &mut Pdag) {
    let n = p.n();
    loop {
        let mut changed = false;
        for (a, b) in p.undirected_edges() {
            if should_orient(p, a, b) {
                p.set_directed(a, b);
                changed = true;
            } else if should_orient(p, b, a) {
                p.set_directed(b, a);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    debug_assert!(!p.has_directed_cycle(), "orientation rules created a cycle in {p:?} ({n} nodes)");
}

/// Whether the undirected edge `a - b` is forced to `a -> b`.
fn should_orient(p: &Pdag, a: usize, b: usize) -> bool {
    let n = p.n();
    for c in 0..n {
        if c == a || c == b {
            continue;
        }
        // c -> a - b with c, b non-adjacent: b -> a would be a new v-structure
        if p.has_directed(c, a) && !p.is_adjacent(c, b) {
            return true;
        }
        // a -> c -> b: b -> a would close a cycle
        if p.has_directed(a, c) && p.has_directed(c, b) {
            return true;
        }
    }
    // a - c -> b <- d - a with c, d non-adjacent
    let spokes: Vec<usize> = (0..n)
        .filter(|&c| c != b && p.has_undirected(a, c) && p.has_directed(c, b))
        .collect();
    for (i, &c) in spokes.iter().enumerate() {
        for &d in &spokes[i + 1..] {
            if !p.is_adjacent(c, d) {
                return true;
            }
        }
    }
    false
}

/// Every DAG equivalent to `g`, found by trying all orientations of its
/// skeleton. Refuses skeletons larger than [`MAX_ENUMERATION_EDGES`].
pub fn enumerate_class(g: &Dag) -> Result<Vec<Dag>> {
    let pairs: Vec<Pair> = skeleton(g).into_iter().collect();
    if pairs.len() > MAX_ENUMERATION_EDGES {
        return Err(Error::EnumerationTooLarge { edges: pairs.len(), limit: MAX_ENUMERATION_EDGES });
    }
    let target = v_structures(g);
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        let mut h = Dag::empty(g.n());
        for (bit, &(a, b)) in pairs.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                h.insert_unchecked(b, a);
            } else {
                h.insert_unchecked(a, b);
            }
        }
        if h.topological_order().is_some() && v_structures(&h) == target {
            out.push(h);
        }
    }
    Ok(out)
}

/// Identical directed and undirected edge sets, which for completed pdags
/// means identical classes.
pub fn cpdag_equal(a: &CompletedPdag, b: &CompletedPdag) -> Result<bool> {
    if a.n() != b.n() {
        return Err(Error::NodeCountMismatch(a.n(), b.n()));
    }
    Ok(a == b)
}

/// Distinct completed pdags over all DAGs on `n` nodes.
pub fn all_classes(n: usize) -> Vec<CompletedPdag> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for g in crate::graph::all_dags(n) {
        let c = dag_to_cpdag(&g);
        if seen.insert(c.clone()) {
            out.push(c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::all_dags;
    use crate::oracle;

    fn dag(n: usize, e: &[(usize, usize)]) -> Dag {
        Dag::new(n, e).unwrap()
    }

    #[test]
    fn consistent_extension_examples() {
        let g = dag(2, &[(0, 1)]);
        let p = Pdag::new(2, &[], &[(0, 1)]).unwrap();
        assert!(is_consistent_extension(&g, &p).unwrap());

        let g = dag(3, &[(0, 1), (2, 1)]);
        let p = Pdag::new(3, &[(0, 1)], &[(1, 2)]).unwrap();
        assert!(!is_consistent_extension(&g, &p).unwrap());

        assert!(is_consistent_extension(&g, &g.to_pdag()).unwrap());
        assert!(matches!(
            is_consistent_extension(&Dag::empty(2), &Pdag::empty(3)),
            Err(Error::NodeCountMismatch(2, 3))
        ));
    }

    #[test]
    fn class_members_need_not_be_extensions() {
        let p = Pdag::new(2, &[(0, 1)], &[]).unwrap();
        let forward = dag(2, &[(0, 1)]);
        let backward = dag(2, &[(1, 0)]);
        assert!(is_consistent_extension(&forward, &p).unwrap());
        assert!(!is_consistent_extension(&backward, &p).unwrap());
        // same skeleton and v-structures, so backward is still in Class(p)
        assert_eq!(skeleton(&backward), skeleton(&p));
        assert_eq!(v_structures(&backward), v_structures(&p));
    }

    #[test]
    fn pdag_to_dag_examples() {
        let p = Pdag::new(2, &[], &[(0, 1)]).unwrap();
        let g = pdag_to_dag(&p).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(is_consistent_extension(&g, &p).unwrap());

        let cycle = Pdag::new(4, &[], &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        assert!(matches!(pdag_to_dag(&cycle), Err(Error::NoExtension)));
        assert!(oracle::brute_force_extension(&cycle).is_none());

        let p = Pdag::new(4, &[(0, 2), (1, 2), (2, 3)], &[]).unwrap();
        assert_eq!(pdag_to_dag(&p).unwrap(), dag(4, &[(0, 2), (1, 2), (2, 3)]));
    }

    #[test]
    fn pdag_to_dag_rejects_directed_cycles() {
        let p = Pdag::new(3, &[(0, 1), (1, 2), (2, 0)], &[]).unwrap();
        assert!(matches!(pdag_to_dag(&p), Err(Error::NoExtension)));
    }

    #[test]
    fn dag_to_cpdag_examples() {
        let chain = dag_to_cpdag(&dag(3, &[(0, 1), (1, 2)]));
        assert!(chain.directed_edges().is_empty());
        assert_eq!(chain.undirected_edges(), vec![(0, 1), (1, 2)]);

        let collider = dag_to_cpdag(&dag(3, &[(0, 1), (2, 1)]));
        assert_eq!(collider.directed_edges(), vec![(0, 1), (2, 1)]);
        assert!(collider.undirected_edges().is_empty());

        let tail = dag_to_cpdag(&dag(4, &[(0, 2), (1, 2), (2, 3)]));
        assert_eq!(tail.directed_edges(), vec![(0, 2), (1, 2), (2, 3)]);
    }

    #[test]
    fn enumerate_class_examples() {
        assert_eq!(enumerate_class(&dag(3, &[(0, 1), (1, 2)])).unwrap().len(), 3);
        assert_eq!(enumerate_class(&dag(3, &[(0, 1), (2, 1)])).unwrap().len(), 1);
        let empty = Dag::empty(5);
        assert_eq!(enumerate_class(&empty).unwrap(), vec![empty]);
    }

    #[test]
    fn enumerate_class_guards_size() {
        let edges: Vec<_> = (0..8).flat_map(|a| (a + 1..8).map(move |b| (a, b))).collect();
        let big = dag(8, &edges);
        assert!(matches!(enumerate_class(&big), Err(Error::EnumerationTooLarge { edges: 28, .. })));
    }

    #[test]
    fn cpdag_equal_examples() {
        let a = dag_to_cpdag(&dag(2, &[(0, 1)]));
        let b = dag_to_cpdag(&dag(2, &[(1, 0)]));
        assert!(cpdag_equal(&a, &b).unwrap());
        let chain = dag_to_cpdag(&dag(3, &[(0, 1), (1, 2)]));
        let collider = dag_to_cpdag(&dag(3, &[(0, 1), (2, 1)]));
        assert!(!cpdag_equal(&chain, &collider).unwrap());
        assert!(cpdag_equal(&chain, &chain).unwrap());
        assert!(cpdag_equal(&a, &chain).is_err());
    }

    #[test]
    fn oracle_agreement_up_to_four_nodes() {
        for n in 1..=4 {
            for g in all_dags(n) {
                let c = dag_to_cpdag(&g);
                assert_eq!(c.pdag(), &oracle::class_pdag(&g), "{g:?}");
                assert!(is_consistent_extension(c.witness(), c.pdag()).unwrap());
                let again = dag_to_cpdag(&pdag_to_dag(c.pdag()).unwrap());
                assert_eq!(again, c);
            }
        }
    }

    #[test]
    fn canonical_for_three_nodes() {
        let dags = all_dags(3);
        for a in &dags {
            for b in &dags {
                assert_eq!(
                    crate::graph::dags_equivalent(a, b).unwrap(),
                    cpdag_equal(&dag_to_cpdag(a), &dag_to_cpdag(b)).unwrap()
                );
            }
        }
    }

    #[test]
    fn class_counts() {
        assert_eq!(all_classes(2).len(), 2);
        assert_eq!(all_classes(3).len(), 11);
    }
}
