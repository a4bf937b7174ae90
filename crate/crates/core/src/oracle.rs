//! Brute-force reference implementations used to check the fast paths.
//! Exponential in the number of edges; meant for graphs of a handful of nodes.

use crate::equivalence::{enumerate_class, is_consistent_extension};
use crate::graph::{Dag, Pdag};

/// Pdag whose directed edges are exactly those with the same orientation in
/// every member of `g`'s class, found by enumerating the class.
pub fn class_pdag(g: &Dag) -> Pdag {
    let members = enumerate_class(g).expect("class small enough to enumerate");
    let mut p = Pdag::empty(g.n());
    for (a, b) in g.edges() {
        if members.iter().all(|h| h.has_edge(a, b)) {
            p.set_directed(a, b);
        } else {
            p.set_undirected(a, b);
        }
    }
    p
}

/// Some consistent extension of `p`, by trying every orientation of its
/// undirected edges.
pub fn brute_force_extension(p: &Pdag) -> Option<Dag> {
    all_extensions(p).into_iter().next()
}

/// Every consistent extension of `p`.
pub fn all_extensions(p: &Pdag) -> Vec<Dag> {
    let undirected = p.undirected_edges();
    assert!(undirected.len() <= 20, "too many undirected edges to enumerate");
    let mut base = Dag::empty(p.n());
    for (a, b) in p.directed_edges() {
        base.insert_unchecked(a, b);
    }
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << undirected.len()) {
        let mut g = base.clone();
        for (bit, &(a, b)) in undirected.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                g.insert_unchecked(b, a);
            } else {
                g.insert_unchecked(a, b);
            }
        }
        if g.topological_order().is_some() && is_consistent_extension(&g, p).unwrap_or(false) {
            out.push(g);
        }
    }
    out
}

/// Every well-formed pdag on `n` nodes (each pair absent, undirected, or
/// directed either way) without a directed cycle, from `4^(n(n-1)/2)` candidates.
pub fn all_acyclic_pdags(n: usize) -> Vec<Pdag> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let total = 4usize.pow(pairs.len() as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let mut p = Pdag::empty(n);
        for &(a, b) in &pairs {
            match c % 4 {
                1 => p.set_directed(a, b),
                2 => p.set_directed(b, a),
                3 => p.set_undirected(a, b),
                _ => {}
            }
            c /= 4;
        }
        if !p.has_directed_cycle() {
            out.push(p);
        }
    }
    out
}
