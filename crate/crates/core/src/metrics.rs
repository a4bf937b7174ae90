//! Structural difference between equivalence classes.

use crate::equivalence::CompletedPdag;
use crate::error::{Error, Result};
use crate::graph::MixedGraph;

/// Edge status of one unordered pair `(a, b)`, `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeMark {
    Absent,
    Undirected,
    /// `a -> b`
    Forward,
    /// `b -> a`
    Backward,
}

pub fn edge_mark(p: &CompletedPdag, a: usize, b: usize) -> EdgeMark {
    debug_assert!(a < b);
    let g = p.pdag();
    if g.has_arc(a, b) {
        EdgeMark::Forward
    } else if g.has_arc(b, a) {
        EdgeMark::Backward
    } else if g.has_undirected(a, b) {
        EdgeMark::Undirected
    } else {
        EdgeMark::Absent
    }
}

/// Number of node pairs whose edge status differs. Every kind of mismatch
/// counts once.
pub fn structural_difference(p1: &CompletedPdag, p2: &CompletedPdag) -> Result<usize> {
    if p1.n() != p2.n() {
        return Err(Error::NodeCountMismatch(p1.n(), p2.n()));
    }
    let n = p1.n();
    let mut diff = 0;
    for a in 0..n {
        for b in a + 1..n {
            if edge_mark(p1, a, b) != edge_mark(p2, a, b) {
                diff += 1;
            }
        }
    }
    Ok(diff)
}
