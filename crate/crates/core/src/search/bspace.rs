//! Operators over individual DAGs: add, delete or reverse one edge.

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{Dag, MixedGraph};
use crate::scoring::Scorer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BKind {
    Add,
    Delete,
    Reverse,
}

/// Edge edit on a DAG. For `Add` the edge `from -> to` is created; for
/// `Delete` and `Reverse` it must already exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BOperator {
    pub kind: BKind,
    pub from: usize,
    pub to: usize,
}

impl BOperator {
    pub fn add(from: usize, to: usize) -> Self {
        Self { kind: BKind::Add, from, to }
    }

    pub fn delete(from: usize, to: usize) -> Self {
        Self { kind: BKind::Delete, from, to }
    }

    pub fn reverse(from: usize, to: usize) -> Self {
        Self { kind: BKind::Reverse, from, to }
    }

    pub fn describe(&self, names: &[String]) -> String {
        let (a, b) = (&names[self.from], &names[self.to]);
        match self.kind {
            BKind::Add => format!("add:{a}->{b}"),
            BKind::Delete => format!("delete:{a}->{b}"),
            BKind::Reverse => format!("reverse:{a}->{b}"),
        }
    }
}

impl fmt::Display for BOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}({}->{})", self.kind, self.from, self.to)
    }
}

fn is_legal(g: &Dag, op: &BOperator) -> bool {
    let (x, y) = (op.from, op.to);
    if x == y || x >= g.n() || y >= g.n() {
        return false;
    }
    match op.kind {
        BKind::Add => !g.is_adjacent(x, y) && !g.has_path(y, x, false),
        BKind::Delete => g.has_edge(x, y),
        BKind::Reverse => g.has_edge(x, y) && !g.has_path(x, y, true),
    }
}

/// Every operator whose result is still acyclic, in operator order.
pub fn b_neighbors(g: &Dag) -> Vec<BOperator> {
    let n = g.n();
    let mut out = Vec::new();
    for kind in [BKind::Add, BKind::Delete, BKind::Reverse] {
        for x in 0..n {
            for y in 0..n {
                let op = BOperator { kind, from: x, to: y };
                if is_legal(g, &op) {
                    out.push(op);
                }
            }
        }
    }
    out
}

pub fn apply_b(g: &Dag, op: &BOperator) -> Result<Dag> {
    if !is_legal(g, op) {
        return Err(Error::IllegalOperator(op.to_string()));
    }
    let mut out = g.clone();
    match op.kind {
        BKind::Add => out.insert_unchecked(op.from, op.to),
        BKind::Delete => out.remove_unchecked(op.from, op.to),
        BKind::Reverse => {
            out.remove_unchecked(op.from, op.to);
            out.insert_unchecked(op.to, op.from);
        }
    }
    Ok(out)
}

/// Score change from applying a legal `op`; only the families whose parent
/// sets change are rescored.
pub(crate) fn b_delta(g: &Dag, op: &BOperator, scorer: &Scorer<'_>) -> f64 {
    let (x, y) = (op.from, op.to);
    let family_change = |node: usize, add: Option<usize>, remove: Option<usize>| {
        let old = g.parents(node);
        let mut new: Vec<usize> = old.iter().copied().filter(|&p| Some(p) != remove).collect();
        new.extend(add);
        scorer.local(node, &new) - scorer.local(node, &old)
    };
    match op.kind {
        BKind::Add => family_change(y, Some(x), None),
        BKind::Delete => family_change(y, None, Some(x)),
        BKind::Reverse => family_change(y, None, Some(x)) + family_change(x, Some(y), None),
    }
}
