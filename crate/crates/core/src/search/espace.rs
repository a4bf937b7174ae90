//! Operators over completed pdags.
//!
//! An operator edits the completed pdag directly; the edited pdag must have
//! no directed cycle and must admit a consistent extension, whose completed
//! pdag becomes the new state.

use std::fmt;

use crate::equivalence::{dag_to_cpdag, pdag_to_dag, CompletedPdag};
use crate::error::{Error, Result};
use crate::graph::{MixedGraph, Pdag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EOperator {
    /// Remove `a - b` (`a < b`).
    DeleteUndirected(usize, usize),
    /// Remove `from -> to`.
    DeleteDirected(usize, usize),
    /// Turn `from -> to` into `to -> from`.
    ReverseDirected(usize, usize),
    /// Add `a - b` between non-adjacent `a < b`.
    InsertUndirected(usize, usize),
    /// Add `from -> to` between non-adjacent nodes.
    InsertDirected(usize, usize),
    /// Make `x -> y <- z` with `x < z` non-adjacent.
    InsertVStructure(usize, usize, usize),
}

impl EOperator {
    pub fn describe(&self, names: &[String]) -> String {
        use EOperator::*;
        match *self {
            DeleteUndirected(a, b) => format!("delete-undirected:{}--{}", names[a], names[b]),
            DeleteDirected(a, b) => format!("delete-directed:{}->{}", names[a], names[b]),
            ReverseDirected(a, b) => format!("reverse-directed:{}->{}", names[a], names[b]),
            InsertUndirected(a, b) => format!("insert-undirected:{}--{}", names[a], names[b]),
            InsertDirected(a, b) => format!("insert-directed:{}->{}", names[a], names[b]),
            InsertVStructure(x, y, z) => {
                format!("insert-vstructure:{}->{}<-{}", names[x], names[y], names[z])
            }
        }
    }
}

impl fmt::Display for EOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Whether `(x, y, z)` names a v-structure insertion that changes `p`.
fn vstructure_allowed(p: &Pdag, x: usize, y: usize, z: usize) -> bool {
    if x == y || z == y || x == z || p.is_adjacent(x, z) {
        return false;
    }
    if !p.is_adjacent(x, y) && !p.is_adjacent(z, y) {
        return false;
    }
    // an edge pointing away from y is a reversal, not an insertion
    if p.has_directed(y, x) || p.has_directed(y, z) {
        return false;
    }
    // both arcs already present: nothing to insert
    !(p.has_directed(x, y) && p.has_directed(z, y))
}

/// Syntactic candidates before the extension check, in operator order.
pub fn e_candidates(c: &CompletedPdag) -> Vec<EOperator> {
    let p = c.pdag();
    let n = p.n();
    let mut out = Vec::new();
    for (a, b) in p.undirected_edges() {
        out.push(EOperator::DeleteUndirected(a, b));
    }
    for (a, b) in p.directed_edges() {
        out.push(EOperator::DeleteDirected(a, b));
        out.push(EOperator::ReverseDirected(a, b));
    }
    for a in 0..n {
        for b in a + 1..n {
            if !p.is_adjacent(a, b) {
                out.push(EOperator::InsertUndirected(a, b));
                out.push(EOperator::InsertDirected(a, b));
                out.push(EOperator::InsertDirected(b, a));
            }
        }
    }
    for x in 0..n {
        for z in x + 1..n {
            for y in 0..n {
                if vstructure_allowed(p, x, y, z) {
                    out.push(EOperator::InsertVStructure(x, y, z));
                }
            }
        }
    }
    out.sort();
    out
}

/// The edited pdag, before any legality check beyond the operator's own
/// preconditions.
pub fn edit_pdag(c: &CompletedPdag, op: &EOperator) -> Result<Pdag> {
    use EOperator::*;
    let mut p = c.pdag().clone();
    let n = p.n();
    let illegal = || Error::IllegalOperator(op.to_string());
    let in_range = |v: usize| v < n;
    match *op {
        DeleteUndirected(a, b) => {
            if !(in_range(a) && in_range(b) && p.has_undirected(a, b)) {
                return Err(illegal());
            }
            p.remove_edge(a, b);
        }
        DeleteDirected(a, b) => {
            if !(in_range(a) && in_range(b) && p.has_directed(a, b)) {
                return Err(illegal());
            }
            p.remove_edge(a, b);
        }
        ReverseDirected(a, b) => {
            if !(in_range(a) && in_range(b) && p.has_directed(a, b)) {
                return Err(illegal());
            }
            p.set_directed(b, a);
        }
        InsertUndirected(a, b) => {
            if !(in_range(a) && in_range(b) && a != b && !p.is_adjacent(a, b)) {
                return Err(illegal());
            }
            p.set_undirected(a, b);
        }
        InsertDirected(a, b) => {
            if !(in_range(a) && in_range(b) && a != b && !p.is_adjacent(a, b)) {
                return Err(illegal());
            }
            p.set_directed(a, b);
        }
        InsertVStructure(x, y, z) => {
            if !([x, y, z].into_iter().all(in_range) && vstructure_allowed(&p, x, y, z)) {
                return Err(illegal());
            }
            p.set_directed(x, y);
            p.set_directed(z, y);
        }
    }
    Ok(p)
}

/// Applies `op`: edit, reject directed cycles, extend, complete.
pub fn apply_e(c: &CompletedPdag, op: &EOperator) -> Result<CompletedPdag> {
    let p = edit_pdag(c, op)?;
    if p.has_directed_cycle() {
        return Err(Error::IllegalOperator(op.to_string()));
    }
    let g = pdag_to_dag(&p).map_err(|_| Error::IllegalOperator(op.to_string()))?;
    Ok(dag_to_cpdag(&g))
}

/// The rough per-step operator count `n(n-1) + 2e(n-2)`.
pub fn estimated_operator_count(n: usize, edges: usize) -> f64 {
    let n = n as f64;
    n * (n - 1.0) + 2.0 * edges as f64 * (n - 2.0)
}
