//! Graph types for structure search: [`Dag`] for B-space states and [`Pdag`]
//! for partially directed graphs, plus the structural predicates
//! (acyclicity, skeleton, v-structures, equivalence) shared by both.
//!
//! Nodes are dense indices `0..n`. Names only appear at I/O boundaries
//! through [`VariableTable`].

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};

/// Unordered node pair, stored with the smaller index first.
pub type Pair = (usize, usize);

/// V-structure `(x, y, z)` meaning `x -> y <- z`, stored with `x < z`.
pub type Triple = (usize, usize, usize);

/// Ordered variable names with their state counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableTable {
    names: Vec<String>,
    arities: Vec<usize>,
    index: HashMap<String, usize>,
}

impl VariableTable {
    pub fn new(names: Vec<String>, arities: Vec<usize>) -> Result<Self> {
        if names.len() != arities.len() {
            return Err(Error::InvalidConfig(format!(
                "{} names but {} arities",
                names.len(),
                arities.len()
            )));
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() || name.chars().any(char::is_whitespace) {
                return Err(Error::InvalidConfig(format!("invalid variable name {name:?}")));
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::InvalidConfig(format!("duplicate variable name `{name}`")));
            }
        }
        if let Some(i) = arities.iter().position(|&a| a == 0) {
            return Err(Error::InvalidConfig(format!("variable `{}` has arity 0", names[i])));
        }
        Ok(Self { names, arities, index })
    }

    /// `n` variables named `x0, x1, ...`, all with the same arity.
    pub fn uniform(n: usize, arity: usize) -> Self {
        let names = (0..n).map(|i| format!("x{i}")).collect();
        Self::new(names, vec![arity; n]).expect("generated names are unique")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn arities(&self) -> &[usize] {
        &self.arities
    }

    pub fn arity(&self, i: usize) -> usize {
        self.arities[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }
}

/// Read access shared by [`Dag`] and [`Pdag`].
pub trait MixedGraph {
    fn node_count(&self) -> usize;
    /// `true` iff the directed edge `from -> to` is present.
    fn has_arc(&self, from: usize, to: usize) -> bool;
    /// `true` iff any edge (directed either way or undirected) joins `a` and `b`.
    fn is_adjacent(&self, a: usize, b: usize) -> bool;
}

/// Square boolean matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
struct Matrix {
    n: usize,
    bits: Vec<bool>,
}

impl Matrix {
    fn new(n: usize) -> Self {
        Self { n, bits: vec![false; n * n] }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.n + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: bool) {
        self.bits[i * self.n + j] = v;
    }
}

fn check_index(i: usize, n: usize) -> Result<()> {
    if i >= n {
        Err(Error::NodeOutOfRange { index: i, n })
    } else {
        Ok(())
    }
}

/// Directed acyclic graph. Acyclicity is checked on construction.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dag {
    arcs: Matrix,
}

impl Dag {
    pub fn empty(n: usize) -> Self {
        Self { arcs: Matrix::new(n) }
    }

    /// Builds a DAG from `(parent, child)` pairs, rejecting self-loops,
    /// duplicate edges and directed cycles.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut arcs = Matrix::new(n);
        for &(a, b) in edges {
            check_index(a, n)?;
            check_index(b, n)?;
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            if arcs.get(a, b) {
                return Err(Error::DuplicateEdge(a, b));
            }
            arcs.set(a, b, true);
        }
        let dag = Self { arcs };
        if dag.topological_order().is_none() {
            return Err(Error::Cycle);
        }
        Ok(dag)
    }

    pub fn n(&self) -> usize {
        self.arcs.n
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.arcs.get(from, to)
    }

    /// Edges in lexicographic `(parent, child)` order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.arcs.get(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.arcs.bits.iter().filter(|&&b| b).count()
    }

    /// Parents of `node` in ascending index order.
    pub fn parents(&self, node: usize) -> Vec<usize> {
        (0..self.n()).filter(|&p| self.arcs.get(p, node)).collect()
    }

    pub fn children(&self, node: usize) -> Vec<usize> {
        (0..self.n()).filter(|&c| self.arcs.get(node, c)).collect()
    }

    pub fn in_degree(&self, node: usize) -> usize {
        (0..self.n()).filter(|&p| self.arcs.get(p, node)).count()
    }

    /// Kahn's algorithm, always releasing the lowest-index ready node.
    /// `None` if the edge set contains a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        topo_order(self.n(), |i, j| self.arcs.get(i, j))
    }

    /// `true` iff a directed path `from ~> to` exists, optionally ignoring
    /// the single edge `from -> to`.
    pub fn has_path(&self, from: usize, to: usize, skip_direct: bool) -> bool {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut stack = Vec::new();
        for c in 0..n {
            if self.arcs.get(from, c) && !(skip_direct && c == to) {
                stack.push(c);
                seen[c] = true;
            }
        }
        while let Some(v) = stack.pop() {
            if v == to {
                return true;
            }
            for c in 0..n {
                if self.arcs.get(v, c) && !seen[c] {
                    seen[c] = true;
                    stack.push(c);
                }
            }
        }
        false
    }

    /// This DAG read as a pdag with every edge directed.
    pub fn to_pdag(&self) -> Pdag {
        Pdag { dir: self.arcs.clone(), und: Matrix::new(self.n()) }
    }

    pub(crate) fn insert_unchecked(&mut self, from: usize, to: usize) {
        self.arcs.set(from, to, true);
    }

    pub(crate) fn remove_unchecked(&mut self, from: usize, to: usize) {
        self.arcs.set(from, to, false);
    }
}

impl MixedGraph for Dag {
    fn node_count(&self) -> usize {
        self.n()
    }

    fn has_arc(&self, from: usize, to: usize) -> bool {
        self.arcs.get(from, to)
    }

    fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.arcs.get(a, b) || self.arcs.get(b, a)
    }
}

impl fmt::Debug for Dag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dag(n={}, {:?})", self.n(), self.edges())
    }
}

/// Partially directed graph. Each node pair carries at most one edge;
/// directed cycles are allowed here and detected by
/// [`Pdag::has_directed_cycle`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Pdag {
    dir: Matrix,
    und: Matrix,
}

impl Pdag {
    pub fn empty(n: usize) -> Self {
        Self { dir: Matrix::new(n), und: Matrix::new(n) }
    }

    pub fn new(n: usize, directed: &[(usize, usize)], undirected: &[(usize, usize)]) -> Result<Self> {
        let mut p = Self::empty(n);
        for &(a, b) in directed.iter().chain(undirected) {
            check_index(a, n)?;
            check_index(b, n)?;
            if a == b {
                return Err(Error::SelfLoop(a));
            }
        }
        for &(a, b) in directed {
            if p.is_adjacent(a, b) {
                return Err(Error::DuplicateEdge(a.min(b), a.max(b)));
            }
            p.dir.set(a, b, true);
        }
        for &(a, b) in undirected {
            if p.is_adjacent(a, b) {
                return Err(Error::DuplicateEdge(a.min(b), a.max(b)));
            }
            p.und.set(a, b, true);
            p.und.set(b, a, true);
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.dir.n
    }

    pub fn has_directed(&self, from: usize, to: usize) -> bool {
        self.dir.get(from, to)
    }

    pub fn has_undirected(&self, a: usize, b: usize) -> bool {
        self.und.get(a, b)
    }

    /// Directed edges in lexicographic order.
    pub fn directed_edges(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.dir.get(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Undirected edges as `(a, b)` with `a < b`, in lexicographic order.
    pub fn undirected_edges(&self) -> Vec<Pair> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.und.get(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.dir.bits.iter().filter(|&&b| b).count() + self.und.bits.iter().filter(|&&b| b).count() / 2
    }

    /// `true` iff the directed edges alone contain a cycle.
    pub fn has_directed_cycle(&self) -> bool {
        topo_order(self.n(), |i, j| self.dir.get(i, j)).is_none()
    }

    /// Interprets a pdag without undirected edges as a DAG.
    pub fn to_dag(&self) -> Option<Dag> {
        if self.und.bits.iter().any(|&b| b) || self.has_directed_cycle() {
            return None;
        }
        Some(Dag { arcs: self.dir.clone() })
    }

    pub(crate) fn remove_edge(&mut self, a: usize, b: usize) {
        self.dir.set(a, b, false);
        self.dir.set(b, a, false);
        self.und.set(a, b, false);
        self.und.set(b, a, false);
    }

    /// Replaces whatever joins `from` and `to` with `from -> to`.
    pub(crate) fn set_directed(&mut self, from: usize, to: usize) {
        self.remove_edge(from, to);
        self.dir.set(from, to, true);
    }

    pub(crate) fn set_undirected(&mut self, a: usize, b: usize) {
        self.remove_edge(a, b);
        self.und.set(a, b, true);
        self.und.set(b, a, true);
    }
}

impl MixedGraph for Pdag {
    fn node_count(&self) -> usize {
        self.n()
    }

    fn has_arc(&self, from: usize, to: usize) -> bool {
        self.dir.get(from, to)
    }

    fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.dir.get(a, b) || self.dir.get(b, a) || self.und.get(a, b)
    }
}

impl fmt::Debug for Pdag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Pdag(n={}, directed={:?}, undirected={:?})",
            self.n(),
            self.directed_edges(),
            self.undirected_edges()
        )
    }
}

fn topo_order(n: usize, arc: impl Fn(usize, usize) -> bool) -> Option<Vec<usize>> {
    let mut indeg: Vec<usize> = (0..n).map(|j| (0..n).filter(|&i| arc(i, j)).count()).collect();
    let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = ready.pop_first() {
        order.push(v);
        for c in 0..n {
            if arc(v, c) {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    ready.insert(c);
                }
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// `true` iff the `(parent, child)` edge list over `n` nodes has no
/// directed cycle.
pub fn is_acyclic(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut m = Matrix::new(n);
    for &(a, b) in edges {
        m.set(a, b, true);
    }
    topo_order(n, |i, j| m.get(i, j)).is_some()
}

pub fn skeleton<G: MixedGraph + ?Sized>(g: &G) -> BTreeSet<Pair> {
    let n = g.node_count();
    let mut out = BTreeSet::new();
    for a in 0..n {
        for b in a + 1..n {
            if g.is_adjacent(a, b) {
                out.insert((a, b));
            }
        }
    }
    out
}

/// All `x -> y <- z` with `x`, `z` non-adjacent, reported once as `(x, y, z)`
/// with `x < z`. Only directed edges count as arcs.
pub fn v_structures<G: MixedGraph + ?Sized>(g: &G) -> BTreeSet<Triple> {
    let n = g.node_count();
    let mut out = BTreeSet::new();
    for y in 0..n {
        let parents: Vec<usize> = (0..n).filter(|&p| g.has_arc(p, y)).collect();
        for (i, &x) in parents.iter().enumerate() {
            for &z in &parents[i + 1..] {
                if !g.is_adjacent(x, z) {
                    out.insert((x, y, z));
                }
            }
        }
    }
    out
}

/// Same skeleton and same v-structures.
pub fn dags_equivalent(a: &Dag, b: &Dag) -> Result<bool> {
    if a.n() != b.n() {
        return Err(Error::NodeCountMismatch(a.n(), b.n()));
    }
    Ok(skeleton(a) == skeleton(b) && v_structures(a) == v_structures(b))
}

/// Every labelled DAG on `n` nodes, in a fixed order. Practical for `n <= 4`
/// (543 graphs); `n = 5` gives 29281.
pub fn all_dags(n: usize) -> Vec<Dag> {
    let pairs: Vec<Pair> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let mut out = Vec::new();
    // each pair is absent, a -> b, or b -> a
    let total = 3usize.pow(pairs.len() as u32);
    for code in 0..total {
        let mut c = code;
        let mut dag = Dag::empty(n);
        for &(a, b) in &pairs {
            match c % 3 {
                1 => dag.insert_unchecked(a, b),
                2 => dag.insert_unchecked(b, a),
                _ => {}
            }
            c /= 3;
        }
        if dag.topological_order().is_some() {
            out.push(dag);
        }
    }
    out
}
