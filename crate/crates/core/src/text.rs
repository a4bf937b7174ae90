//! Line-oriented graph format:
//!
//! ```text
//! # comment
//! node a
//! node b
//! node c
//! a -> b
//! b -- c
//! ```
//!
//! `node` lines fix the index order. A DAG file has no `--` lines.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{Dag, Pdag};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphFile {
    pub names: Vec<String>,
    pub pdag: Pdag,
}

impl GraphFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut names: Vec<String> = Vec::new();
        let mut directed = Vec::new();
        let mut undirected = Vec::new();
        let mut edge_lines = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = body.split_whitespace().collect();
            match toks.as_slice() {
                ["node", name] => {
                    if names.iter().any(|n| n == name) {
                        return Err(Error::parse(line, format!("duplicate node `{name}`")));
                    }
                    names.push(name.to_string());
                }
                [a, op @ ("->" | "--"), b] => edge_lines.push((line, a.to_string(), *op == "->", b.to_string())),
                _ => return Err(Error::parse(line, format!("unrecognised line {body:?}"))),
            }
        }
        let index = |name: &str, line: usize| {
            names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::parse(line, format!("undeclared node `{name}`")))
        };
        for (line, a, is_directed, b) in edge_lines {
            let pair = (index(&a, line)?, index(&b, line)?);
            if is_directed {
                directed.push(pair);
            } else {
                undirected.push(pair);
            }
        }
        let pdag = Pdag::new(names.len(), &directed, &undirected)?;
        Ok(Self { names, pdag })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// The graph as a DAG; fails if it has undirected edges or a cycle.
    pub fn to_dag(&self) -> Result<Dag> {
        if !self.pdag.undirected_edges().is_empty() {
            return Err(Error::InvalidConfig("a DAG file may not contain `--` edges".into()));
        }
        self.pdag.to_dag().ok_or(Error::Cycle)
    }

    /// Same graph with nodes reordered to follow `order`, which must name
    /// exactly the same set of nodes.
    pub fn reorder(&self, order: &[String]) -> Result<Self> {
        let mut sorted_a = self.names.clone();
        let mut sorted_b = order.to_vec();
        sorted_a.sort();
        sorted_b.sort();
        if sorted_a != sorted_b {
            return Err(Error::VariableMismatch(format!("{:?} vs {:?}", self.names, order)));
        }
        let map: Vec<usize> = self
            .names
            .iter()
            .map(|n| order.iter().position(|m| m == n).expect("checked above"))
            .collect();
        let directed: Vec<_> = self.pdag.directed_edges().into_iter().map(|(a, b)| (map[a], map[b])).collect();
        let undirected: Vec<_> = self.pdag.undirected_edges().into_iter().map(|(a, b)| (map[a], map[b])).collect();
        Ok(Self { names: order.to_vec(), pdag: Pdag::new(order.len(), &directed, &undirected)? })
    }
}

pub fn write_pdag(names: &[String], p: &Pdag) -> String {
    let mut s = String::new();
    for n in names {
        let _ = writeln!(s, "node {n}");
    }
    for (a, b) in p.directed_edges() {
        let _ = writeln!(s, "{} -> {}", names[a], names[b]);
    }
    for (a, b) in p.undirected_edges() {
        let _ = writeln!(s, "{} -- {}", names[a], names[b]);
    }
    s
}

pub fn write_dag(names: &[String], g: &Dag) -> String {
    write_pdag(names, &g.to_pdag())
}
