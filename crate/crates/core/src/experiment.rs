//! Replicated comparison of the search spaces on random gold standards.
//!
//! For every `(nodes, cases)` setting: generate `golds` random binary
//! networks, sample `databases` datasets from each, learn with every
//! configured space, and compare each learned class with the gold class.
//!
//! Seeds derive from the base seed: the gold network for setting `s`,
//! replicate `g` uses `derive_seed(base, [s, g, 0])`, and database `d` of
//! that gold standard uses `derive_seed(base, [s, g, 1, d])`.

use std::fmt::Write as _;
use std::time::Instant;

use crate::equivalence::dag_to_cpdag;
use crate::error::{Error, Result};
use crate::metrics::structural_difference;
use crate::netgen::{derive_seed, forward_sample, random_network};
use crate::par::{self, Parallelism};
use crate::scoring::ScoringConfig;
use crate::search::{greedy, SearchConfig, Space};

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub nodes: Vec<usize>,
    pub cases: Vec<usize>,
    pub golds: usize,
    pub databases: usize,
    /// Must contain `B` and `E`; `Hybrid` adds extra columns.
    pub spaces: Vec<Space>,
    pub ess: f64,
    pub seed: u64,
    pub edge_prob: f64,
    pub max_parents: usize,
    /// Wall-clock timing; when off, time columns read `NA` and the report
    /// is byte-for-byte reproducible.
    pub timing: bool,
    /// Fan-out across replications.
    pub parallelism: Parallelism,
    pub search: SearchConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            nodes: vec![10],
            cases: vec![500],
            golds: 3,
            databases: 3,
            spaces: vec![Space::E, Space::B],
            ess: ScoringConfig::DEFAULT_ESS,
            seed: 0,
            edge_prob: 0.3,
            max_parents: 4,
            timing: true,
            parallelism: Parallelism::Parallel,
            search: SearchConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.nodes.is_empty() || self.nodes.contains(&0) {
            return bad("node counts must be non-empty and at least 1");
        }
        if self.cases.is_empty() || self.cases.contains(&0) {
            return bad("case counts must be non-empty and at least 1");
        }
        if self.golds == 0 || self.databases == 0 {
            return bad("need at least one gold standard and one database");
        }
        if !(self.spaces.contains(&Space::B) && self.spaces.contains(&Space::E)) {
            return bad("spaces must include both b and e");
        }
        if !(0.0..=1.0).contains(&self.edge_prob) {
            return bad("edge probability must lie in [0, 1]");
        }
        ScoringConfig::new(self.ess)?;
        Ok(())
    }

    fn has_hybrid(&self) -> bool {
        self.spaces.contains(&Space::Hybrid)
    }
}

/// One learning run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub nodes: usize,
    pub cases: usize,
    pub gold: usize,
    pub database: usize,
    pub space: Space,
    pub score: f64,
    pub struct_diff: usize,
    pub seconds: Option<f64>,
    pub steps: usize,
}

/// Means over one setting's runs for a single space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceSummary {
    pub score: f64,
    pub struct_diff: f64,
    pub seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub nodes: usize,
    pub cases: usize,
    pub runs: usize,
    pub e: SpaceSummary,
    pub b: SpaceSummary,
    pub hybrid: Option<SpaceSummary>,
}

impl ExperimentRow {
    /// E-space score minus B-space score; positive favours E-space.
    pub fn score_diff(&self) -> f64 {
        self.e.score - self.b.score
    }

    /// B-space structural difference minus E-space's; positive favours E-space.
    pub fn struct_diff(&self) -> f64 {
        self.b.struct_diff - self.e.struct_diff
    }

    /// E-space time over B-space time.
    pub fn time_ratio(&self) -> Option<f64> {
        match (self.e.seconds, self.b.seconds) {
            (Some(e), Some(b)) if b > 0.0 => Some(e / b),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub rows: Vec<ExperimentRow>,
    pub runs: Vec<RunRecord>,
    hybrid: bool,
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let scoring = ScoringConfig::new(cfg.ess)?;
    let settings: Vec<(usize, usize)> =
        cfg.nodes.iter().flat_map(|&n| cfg.cases.iter().map(move |&m| (n, m))).collect();

    let mut jobs = Vec::new();
    for (s, &(n, m)) in settings.iter().enumerate() {
        for g in 0..cfg.golds {
            for d in 0..cfg.databases {
                jobs.push((s, n, m, g, d));
            }
        }
    }

    let per_job: Vec<Vec<RunRecord>> = par::map(cfg.parallelism, &jobs, |&(s, n, m, g, d)| {
        let gold = random_network(n, cfg.edge_prob, cfg.max_parents, derive_seed(cfg.seed, &[s as u64, g as u64, 0]));
        let gold_class = dag_to_cpdag(gold.dag());
        let data = forward_sample(&gold, m, derive_seed(cfg.seed, &[s as u64, g as u64, 1, d as u64]));
        cfg.spaces
            .iter()
            .map(|&space| {
                let start = Instant::now();
                let result = greedy(space, &data, scoring, &cfg.search);
                let elapsed = start.elapsed().as_secs_f64();
                let learned = result.state.to_cpdag();
                RunRecord {
                    nodes: n,
                    cases: m,
                    gold: g,
                    database: d,
                    space,
                    score: result.score,
                    struct_diff: structural_difference(&learned, &gold_class).expect("same node count"),
                    seconds: cfg.timing.then_some(elapsed),
                    steps: result.steps(),
                }
            })
            .collect()
    });
    let runs: Vec<RunRecord> = per_job.into_iter().flatten().collect();

    let rows = settings
        .iter()
        .map(|&(n, m)| {
            let of = |space: Space| -> Vec<&RunRecord> {
                runs.iter().filter(|r| r.nodes == n && r.cases == m && r.space == space).collect()
            };
            let e = summarize(&of(Space::E));
            let b = summarize(&of(Space::B));
            let hybrid = cfg.has_hybrid().then(|| summarize(&of(Space::Hybrid)));
            ExperimentRow { nodes: n, cases: m, runs: cfg.golds * cfg.databases, e, b, hybrid }
        })
        .collect();
    Ok(ExperimentReport { rows, runs, hybrid: cfg.has_hybrid() })
}

fn summarize(runs: &[&RunRecord]) -> SpaceSummary {
    let k = runs.len() as f64;
    let score = runs.iter().map(|r| r.score).sum::<f64>() / k;
    let struct_diff = runs.iter().map(|r| r.struct_diff as f64).sum::<f64>() / k;
    let seconds = runs
        .iter()
        .map(|r| r.seconds)
        .sum::<Option<f64>>()
        .map(|t| t / k);
    SpaceSummary { score, struct_diff, seconds }
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), |v| format!("{v:.3}"))
}

impl ExperimentReport {
    /// Setting, E score, B score, score diff, E struct, B struct, struct
    /// diff, E time, B time, time ratio; hybrid columns last when present.
    pub fn rows_tsv(&self) -> String {
        let mut s = String::from(
            "nodes\tcases\truns\te_score\tb_score\tscore_diff\te_struct\tb_struct\tstruct_diff\te_time\tb_time\ttime_ratio",
        );
        if self.hybrid {
            s.push_str("\th_score\th_struct\th_time");
        }
        s.push('\n');
        for r in &self.rows {
            let _ = write!(
                s,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.nodes,
                r.cases,
                r.runs,
                r.e.score,
                r.b.score,
                r.score_diff(),
                r.e.struct_diff,
                r.b.struct_diff,
                r.struct_diff(),
                opt(r.e.seconds),
                opt(r.b.seconds),
                r.time_ratio().map_or_else(|| "NA".to_string(), |v| format!("{v:.4}")),
            );
            if let Some(h) = &r.hybrid {
                let _ = write!(s, "\t{}\t{}\t{}", h.score, h.struct_diff, opt(h.seconds));
            }
            s.push('\n');
        }
        s
    }

    /// One line per learning run.
    pub fn runs_tsv(&self) -> String {
        let mut s = String::from("nodes\tcases\tgold\tdatabase\tspace\tscore\tstruct_diff\ttime\tsteps\n");
        for r in &self.runs {
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.nodes,
                r.cases,
                r.gold,
                r.database,
                r.space,
                r.score,
                r.struct_diff,
                r.seconds.map_or_else(|| "NA".to_string(), |v| format!("{v:.6}")),
                r.steps
            );
        }
        s
    }
}
