//! BDeu scoring: the score-equivalent Bayesian Dirichlet marginal likelihood
//! with an empty prior network and a single equivalent sample size.
//!
//! For a node with `r` states and `q` parent configurations the local score is
//!
//! ```text
//! sum_j [ lnG(a_j) - lnG(a_j + N_j) ] + sum_jk [ lnG(a_jk + N_jk) - lnG(a_jk) ]
//! ```
//!
//! with `a_jk = ess / (r q)` and `a_j = ess / q`. Scores are natural logs and
//! the structure prior is uniform, so it does not appear.

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::RwLock;

use statrs::function::gamma::ln_gamma;

use crate::equivalence::CompletedPdag;
use crate::error::{Error, Result};
use crate::graph::{Dag, VariableTable};

/// Complete discrete data, stored column by column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    vars: VariableTable,
    columns: Vec<Vec<u16>>,
    len: usize,
}

impl Dataset {
    /// Builds a dataset from rows of state indices, checking every value
    /// against its variable's arity.
    pub fn new(vars: VariableTable, cases: &[Vec<usize>]) -> Result<Self> {
        let n = vars.len();
        let mut columns = vec![Vec::with_capacity(cases.len()); n];
        for (c, case) in cases.iter().enumerate() {
            if case.len() != n {
                return Err(Error::InvalidData(format!(
                    "case {c} has {} values, expected {n}",
                    case.len()
                )));
            }
            for (v, &x) in case.iter().enumerate() {
                if x >= vars.arity(v) {
                    return Err(Error::InvalidData(format!(
                        "case {c}: value {x} out of range for `{}` (arity {})",
                        vars.name(v),
                        vars.arity(v)
                    )));
                }
                columns[v].push(x as u16);
            }
        }
        Ok(Self { vars, columns, len: cases.len() })
    }

    pub fn empty(vars: VariableTable) -> Self {
        let columns = vec![Vec::new(); vars.len()];
        Self { vars, columns, len: 0 }
    }

    pub fn vars(&self) -> &VariableTable {
        &self.vars
    }

    pub fn n_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn n_cases(&self) -> usize {
        self.len
    }

    pub fn value(&self, case: usize, var: usize) -> usize {
        self.columns[var][case] as usize
    }

    pub fn case(&self, i: usize) -> Vec<usize> {
        self.columns.iter().map(|col| col[i] as usize).collect()
    }

    /// Reads the CSV format: a header of variable names, then one row of
    /// 0-based state indices per case. Arities come from `vars` when given
    /// (names must match the header), otherwise from the largest observed
    /// value, with a floor of 2.
    pub fn read_csv<R: Read>(reader: R, vars: Option<&VariableTable>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let header: Vec<String> = rdr.headers()?.iter().map(|s| s.trim().to_string()).collect();
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|s| {
                    s.trim().parse::<usize>().map_err(|_| {
                        Error::parse(i + 2, format!("expected a state index, found {s:?}"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            if row.len() != header.len() {
                return Err(Error::parse(i + 2, format!("{} fields, header has {}", row.len(), header.len())));
            }
            rows.push(row);
        }
        let table = match vars {
            Some(v) => {
                if v.names() != header.as_slice() {
                    return Err(Error::VariableMismatch(
                        "CSV header does not match the network's variables".into(),
                    ));
                }
                v.clone()
            }
            None => {
                let arities = (0..header.len())
                    .map(|v| rows.iter().map(|r| r[v] + 1).max().unwrap_or(0).max(2))
                    .collect();
                VariableTable::new(header, arities)?
            }
        };
        Self::new(table, &rows)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(self.vars.names())?;
        for i in 0..self.len {
            w.write_record(self.case(i).iter().map(|x| x.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>, vars: Option<&VariableTable>) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?, vars)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::io::BufWriter::new(std::fs::File::create(path)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoringConfig {
    ess: f64,
}

impl ScoringConfig {
    pub const DEFAULT_ESS: f64 = 8.0;

    pub fn new(ess: f64) -> Result<Self> {
        if !(ess > 0.0 && ess.is_finite()) {
            return Err(Error::InvalidEss(ess));
        }
        Ok(Self { ess })
    }

    pub fn ess(&self) -> f64 {
        self.ess
    }
}

impl Default for ScoringConfig {
    fn default() -> Self {
        Self { ess: Self::DEFAULT_ESS }
    }
}

/// Counts `N_jk` for one node and an ordered parent list. Only observed
/// parent configurations are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SufficientStats {
    pub node: usize,
    pub parents: Vec<usize>,
    child_arity: usize,
    counts: BTreeMap<u64, Vec<u32>>,
}

impl SufficientStats {
    pub fn count(&self, config: u64, state: usize) -> u32 {
        self.counts.get(&config).map_or(0, |row| row[state])
    }

    pub fn row_sum(&self, config: u64) -> u32 {
        self.counts.get(&config).map_or(0, |row| row.iter().sum())
    }

    /// Observed configurations with their count rows, in configuration order.
    pub fn rows(&self) -> impl Iterator<Item = (u64, &[u32])> {
        self.counts.iter().map(|(&j, row)| (j, row.as_slice()))
    }

    pub fn total(&self) -> u64 {
        self.counts.values().flatten().map(|&c| c as u64).sum()
    }

    pub fn child_arity(&self) -> usize {
        self.child_arity
    }
}

/// Number of joint configurations of `parents`.
pub fn parent_configs(vars: &VariableTable, parents: &[usize]) -> u64 {
    parents
        .iter()
        .try_fold(1u64, |q, &p| q.checked_mul(vars.arity(p) as u64))
        .expect("parent configuration count overflows u64")
}

/// Mixed-radix parent configuration index, first parent most significant.
pub fn config_index(d: &Dataset, case: usize, parents: &[usize]) -> u64 {
    parents
        .iter()
        .fold(0u64, |j, &p| j * d.vars().arity(p) as u64 + d.value(case, p) as u64)
}

pub fn sufficient_stats(d: &Dataset, node: usize, parents: &[usize]) -> SufficientStats {
    debug_assert!(!parents.contains(&node));
    let r = d.vars().arity(node);
    let mut counts: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for case in 0..d.n_cases() {
        let j = config_index(d, case, parents);
        counts.entry(j).or_insert_with(|| vec![0; r])[d.value(case, node)] += 1;
    }
    SufficientStats { node, parents: parents.to_vec(), child_arity: r, counts }
}

/// BDeu log score of one family. Unobserved parent configurations
/// contribute nothing, so only the stored rows are visited.
pub fn bdeu_local(stats: &SufficientStats, cfg: &ScoringConfig, child_arity: usize, parent_configs: u64) -> f64 {
    let q = parent_configs as f64;
    let a_j = cfg.ess / q;
    let a_jk = a_j / child_arity as f64;
    let ln_a_j = ln_gamma(a_j);
    let ln_a_jk = ln_gamma(a_jk);
    let mut score = 0.0;
    for (_, row) in stats.rows() {
        let n_j: u32 = row.iter().sum();
        score += ln_a_j - ln_gamma(a_j + n_j as f64);
        for &n_jk in row {
            if n_jk > 0 {
                score += ln_gamma(a_jk + n_jk as f64) - ln_a_jk;
            }
        }
    }
    score
}

/// Local scores keyed by `(node, sorted parent set)`. Safe to share across
/// threads; concurrent inserts of the same key store the same value.
#[derive(Debug, Default)]
pub struct ScoreCache {
    map: RwLock<HashMap<(usize, Vec<usize>), f64>>,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl ScoreCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, node: usize, parents: &[usize]) -> Option<f64> {
        let key = (node, sorted(parents));
        let hit = self.map.read().expect("score cache poisoned").get(&key).copied();
        match hit {
            Some(_) => self.hits.fetch_add(1, Ordering::Relaxed),
            None => self.misses.fetch_add(1, Ordering::Relaxed),
        };
        hit
    }

    pub fn insert(&self, node: usize, parents: &[usize], score: f64) {
        self.map
            .write()
            .expect("score cache poisoned")
            .insert((node, sorted(parents)), score);
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("score cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> u64 {
        self.misses.load(Ordering::Relaxed)
    }
}

fn sorted(parents: &[usize]) -> Vec<usize> {
    let mut p = parents.to_vec();
    p.sort_unstable();
    p
}

/// Local score of `node` given `parents`, through `cache` when supplied.
/// Parents are sorted before counting so the value is independent of the
/// order they are listed in.
pub fn local_score(
    d: &Dataset,
    cfg: &ScoringConfig,
    node: usize,
    parents: &[usize],
    cache: Option<&ScoreCache>,
) -> f64 {
    if let Some(s) = cache.and_then(|c| c.get(node, parents)) {
        return s;
    }
    let parents = sorted(parents);
    let stats = sufficient_stats(d, node, &parents);
    let s = bdeu_local(&stats, cfg, d.vars().arity(node), parent_configs(d.vars(), &parents));
    if let Some(c) = cache {
        c.insert(node, &parents, s);
    }
    s
}

pub fn bdeu_total(g: &Dag, d: &Dataset, cfg: &ScoringConfig, cache: Option<&ScoreCache>) -> f64 {
    assert_eq!(g.n(), d.n_vars(), "graph and dataset disagree on variable count");
    (0..g.n()).map(|v| local_score(d, cfg, v, &g.parents(v), cache)).sum()
}

/// Score of an equivalence class, via its stored consistent extension.
pub fn score_cpdag(p: &CompletedPdag, d: &Dataset, cfg: &ScoringConfig, cache: Option<&ScoreCache>) -> f64 {
    bdeu_total(p.witness(), d, cfg, cache)
}

/// Dataset, configuration and cache bundled for search.
#[derive(Debug)]
pub struct Scorer<'a> {
    data: &'a Dataset,
    cfg: ScoringConfig,
    cache: ScoreCache,
}

impl<'a> Scorer<'a> {
    pub fn new(data: &'a Dataset, cfg: ScoringConfig) -> Self {
        Self { data, cfg, cache: ScoreCache::new() }
    }

    pub fn data(&self) -> &Dataset {
        self.data
    }

    pub fn config(&self) -> &ScoringConfig {
        &self.cfg
    }

    pub fn cache(&self) -> &ScoreCache {
        &self.cache
    }

    pub fn local(&self, node: usize, parents: &[usize]) -> f64 {
        local_score(self.data, &self.cfg, node, parents, Some(&self.cache))
    }

    pub fn total(&self, g: &Dag) -> f64 {
        bdeu_total(g, self.data, &self.cfg, Some(&self.cache))
    }

    /// From-scratch score without touching the cache.
    pub fn total_uncached(&self, g: &Dag) -> f64 {
        bdeu_total(g, self.data, &self.cfg, None)
    }
}
