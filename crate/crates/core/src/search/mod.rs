//! Greedy hill-climbing in DAG space (B-space), equivalence-class space
//! (E-space), and a hybrid that climbs in B-space and uses single E-space
//! steps to leave local maxima.
//!
//! Every search starts from the empty graph, scores all legal neighbours of
//! the current state, and moves to the best one while it improves the score.
//! Neighbour scoring fans out through [`crate::par`]; selection is a
//! deterministic reduce over `(delta, rank)`, so results do not depend on
//! thread scheduling.

mod bspace;
mod espace;

use std::fmt::Write as _;

pub use bspace::{apply_b, b_neighbors, BKind, BOperator};
pub use espace::{apply_e, e_candidates, edit_pdag, estimated_operator_count, EOperator};

use crate::equivalence::{dag_to_cpdag, CompletedPdag};
use crate::graph::{Dag, VariableTable};
use crate::netgen::derive_seed;
use crate::par::{self, Parallelism};
use crate::scoring::{Dataset, Scorer, ScoringConfig};

/// Scores closer than `SCORE_TOLERANCE * max(1, |score|)` count as equal:
/// such neighbours do not count as improvements and tie for selection.
pub const SCORE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    B,
    E,
    Hybrid,
}

impl std::str::FromStr for Space {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "b" => Ok(Space::B),
            "e" => Ok(Space::E),
            "hybrid" | "h" => Ok(Space::Hybrid),
            other => Err(format!("unknown search space `{other}` (expected b, e or hybrid)")),
        }
    }
}

impl std::fmt::Display for Space {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Space::B => "b",
            Space::E => "e",
            Space::Hybrid => "hybrid",
        })
    }
}

/// How equally good neighbours are ranked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Lowest operator in the fixed operator order wins.
    #[default]
    Ordinal,
    /// A seeded pseudo-random rank, redrawn every step.
    Seeded(u64),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SearchConfig {
    pub parallelism: Parallelism,
    pub tie_break: TieBreak,
    /// Check after every step that the incremental score matches a
    /// from-scratch rescoring; panics on mismatch.
    pub verify_scores: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    B(BOperator),
    E(EOperator),
}

impl Move {
    pub fn describe(&self, names: &[String]) -> String {
        match self {
            Move::B(op) => op.describe(names),
            Move::E(op) => op.describe(names),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub op: Move,
    pub delta: f64,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Dag(Dag),
    Cpdag(CompletedPdag),
}

impl State {
    pub fn to_cpdag(&self) -> CompletedPdag {
        match self {
            State::Dag(g) => dag_to_cpdag(g),
            State::Cpdag(c) => c.clone(),
        }
    }

    /// A DAG in the state's class.
    pub fn dag(&self) -> &Dag {
        match self {
            State::Dag(g) => g,
            State::Cpdag(c) => c.witness(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Operators generated across all steps.
    pub candidates: u64,
    /// Candidates rejected as illegal (E-space only).
    pub illegal: u64,
    /// Neighbours scored.
    pub evaluated: u64,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub state: State,
    pub score: f64,
    pub initial_score: f64,
    pub trace: Vec<Step>,
    pub stats: SearchStats,
}

impl SearchResult {
    pub fn steps(&self) -> usize {
        self.trace.len()
    }

    /// One `step <i> <operator> <delta> <score>` line per move.
    pub fn trace_text(&self, vars: &VariableTable) -> String {
        let mut s = String::new();
        for (i, step) in self.trace.iter().enumerate() {
            let _ = writeln!(s, "step {} {} {} {}", i + 1, step.op.describe(vars.names()), step.delta, step.score);
        }
        s
    }
}

fn tolerance(score: f64) -> f64 {
    SCORE_TOLERANCE * score.abs().max(1.0)
}

/// Picks the best improving candidate. `deltas[i]` is `None` for illegal
/// candidates. Candidates within tolerance of the best delta tie and the
/// lowest rank among them wins.
fn select(deltas: &[Option<f64>], score: f64, tie: TieBreak, step: usize) -> Option<(usize, f64)> {
    let tol = tolerance(score);
    let best = deltas.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(best > tol) {
        return None;
    }
    let rank = |i: usize| match tie {
        TieBreak::Ordinal => i as u64,
        TieBreak::Seeded(seed) => derive_seed(seed, &[step as u64, i as u64]),
    };
    deltas
        .iter()
        .enumerate()
        .filter_map(|(i, d)| d.filter(|&d| d >= best - tol).map(|d| (i, d)))
        .min_by_key(|&(i, _)| rank(i))
}

fn verify(scorer: &Scorer<'_>, g: &Dag, incremental: f64) {
    let scratch = scorer.total_uncached(g);
    assert!(
        (incremental - scratch).abs() <= SCORE_TOLERANCE * scratch.abs().max(1.0),
        "incremental score {incremental} disagrees with rescoring {scratch}"
    );
}

/// Climbs in B-space from `start` to a local maximum, appending moves to
/// `trace`. Returns the final DAG and its score.
fn climb_b(
    scorer: &Scorer<'_>,
    start: Dag,
    cfg: &SearchConfig,
    trace: &mut Vec<Step>,
    stats: &mut SearchStats,
) -> (Dag, f64) {
    let mut g = start;
    let mut score = scorer.total(&g);
    loop {
        let ops = b_neighbors(&g);
        stats.candidates += ops.len() as u64;
        stats.evaluated += ops.len() as u64;
        let deltas = par::map(cfg.parallelism, &ops, |op| Some(bspace::b_delta(&g, op, scorer)));
        let Some((i, delta)) = select(&deltas, score, cfg.tie_break, trace.len()) else {
            return (g, score);
        };
        g = apply_b(&g, &ops[i]).expect("selected operator is legal");
        let next = scorer.total(&g);
        if cfg.verify_scores {
            verify(scorer, &g, score + delta);
        }
        trace.push(Step { op: Move::B(ops[i]), delta: next - score, score: next });
        score = next;
    }
}

/// Score change of every E-space candidate, computed from the families of
/// the result's witness that differ from the current witness.
fn e_deltas(
    scorer: &Scorer<'_>,
    c: &CompletedPdag,
    ops: &[EOperator],
    cfg: &SearchConfig,
) -> Vec<Option<f64>> {
    let current = c.witness();
    let n = current.n();
    let old_parents: Vec<Vec<usize>> = (0..n).map(|v| current.parents(v)).collect();
    par::map(cfg.parallelism, ops, |op| {
        let next = apply_e(c, op).ok()?;
        let w = next.witness();
        let mut delta = 0.0;
        for (v, old) in old_parents.iter().enumerate() {
            let new = w.parents(v);
            if &new != old {
                delta += scorer.local(v, &new) - scorer.local(v, old);
            }
        }
        Some(delta)
    })
}

/// One E-space step from `c`, if any neighbour improves `score`.
fn step_e(
    scorer: &Scorer<'_>,
    c: &CompletedPdag,
    score: f64,
    cfg: &SearchConfig,
    step: usize,
    stats: &mut SearchStats,
) -> Option<(EOperator, CompletedPdag, f64)> {
    let ops = e_candidates(c);
    let deltas = e_deltas(scorer, c, &ops, cfg);
    stats.candidates += ops.len() as u64;
    let legal = deltas.iter().filter(|d| d.is_some()).count() as u64;
    stats.evaluated += legal;
    stats.illegal += ops.len() as u64 - legal;
    let (i, delta) = select(&deltas, score, cfg.tie_break, step)?;
    let next = apply_e(c, &ops[i]).expect("selected operator is legal");
    if cfg.verify_scores {
        verify(scorer, next.witness(), score + delta);
    }
    Some((ops[i], next, delta))
}

fn climb_e(scorer: &Scorer<'_>, start: CompletedPdag, cfg: &SearchConfig) -> SearchResult {
    let mut c = start;
    let mut score = scorer.total(c.witness());
    let initial_score = score;
    let mut trace = Vec::new();
    let mut stats = SearchStats::default();
    while let Some((op, next, _)) = step_e(scorer, &c, score, cfg, trace.len(), &mut stats) {
        let next_score = scorer.total(next.witness());
        trace.push(Step { op: Move::E(op), delta: next_score - score, score: next_score });
        c = next;
        score = next_score;
    }
    SearchResult { state: State::Cpdag(c), score, initial_score, trace, stats }
}

/// Greedy search in B-space or E-space from the empty graph. `Space::Hybrid`
/// is forwarded to [`hybrid_greedy`].
pub fn greedy(space: Space, data: &Dataset, scoring: ScoringConfig, cfg: &SearchConfig) -> SearchResult {
    let scorer = Scorer::new(data, scoring);
    let n = data.n_vars();
    match space {
        Space::B => {
            let mut trace = Vec::new();
            let mut stats = SearchStats::default();
            let initial_score = scorer.total(&Dag::empty(n));
            let (g, score) = climb_b(&scorer, Dag::empty(n), cfg, &mut trace, &mut stats);
            SearchResult { state: State::Dag(g), score, initial_score, trace, stats }
        }
        Space::E => climb_e(&scorer, CompletedPdag::empty(n), cfg),
        Space::Hybrid => hybrid_with(&scorer, cfg),
    }
}

/// B-space greedy to a local maximum, then at most one improving E-space
/// step from its class, then back to B-space from that step's extension;
/// stops when the E-space step finds nothing better.
pub fn hybrid_greedy(data: &Dataset, scoring: ScoringConfig, cfg: &SearchConfig) -> SearchResult {
    hybrid_with(&Scorer::new(data, scoring), cfg)
}

fn hybrid_with(scorer: &Scorer<'_>, cfg: &SearchConfig) -> SearchResult {
    let n = scorer.data().n_vars();
    let mut trace = Vec::new();
    let mut stats = SearchStats::default();
    let initial_score = scorer.total(&Dag::empty(n));
    let mut g = Dag::empty(n);
    loop {
        let (local_max, score) = climb_b(scorer, g, cfg, &mut trace, &mut stats);
        let c = dag_to_cpdag(&local_max);
        match step_e(scorer, &c, score, cfg, trace.len(), &mut stats) {
            Some((op, next, _)) => {
                let next_score = scorer.total(next.witness());
                trace.push(Step { op: Move::E(op), delta: next_score - score, score: next_score });
                g = next.witness().clone();
            }
            None => {
                return SearchResult { state: State::Cpdag(c), score, initial_score, trace, stats };
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgen::{forward_sample, BayesianNetwork, Cpt};

    fn collider_data(cases: usize, seed: u64) -> Dataset {
        let vars = VariableTable::uniform(3, 2);
        let dag = Dag::new(3, &[(0, 1), (2, 1)]).unwrap();
        let cpts = vec![
            Cpt { node: 0, parents: vec![], rows: vec![vec![0.5, 0.5]] },
            Cpt {
                node: 1,
                parents: vec![0, 2],
                rows: vec![vec![0.95, 0.05], vec![0.4, 0.6], vec![0.4, 0.6], vec![0.05, 0.95]],
            },
            Cpt { node: 2, parents: vec![], rows: vec![vec![0.5, 0.5]] },
        ];
        forward_sample(&BayesianNetwork::new(vars, dag, cpts).unwrap(), cases, seed)
    }

    fn verified() -> SearchConfig {
        SearchConfig { verify_scores: true, ..Default::default() }
    }

    #[test]
    fn empty_data_stays_empty() {
        let d = Dataset::empty(VariableTable::uniform(4, 2));
        for space in [Space::B, Space::E, Space::Hybrid] {
            let r = greedy(space, &d, ScoringConfig::default(), &verified());
            assert_eq!(r.score, 0.0);
            assert_eq!(r.steps(), 0);
            assert_eq!(r.state.dag().edge_count(), 0);
        }
    }

    #[test]
    fn single_variable() {
        let d = Dataset::new(VariableTable::uniform(1, 2), &[vec![0], vec![1]]).unwrap();
        let r = greedy(Space::E, &d, ScoringConfig::default(), &verified());
        assert_eq!(r.steps(), 0);
        assert_eq!(r.stats.candidates, 0);
    }

    #[test]
    fn e_space_recovers_collider() {
        let d = collider_data(2000, 4);
        let r = greedy(Space::E, &d, ScoringConfig::default(), &verified());
        let c = r.state.to_cpdag();
        assert_eq!(c.directed_edges(), vec![(0, 1), (2, 1)]);
        let best = crate::graph::all_dags(3)
            .iter()
            .map(|g| crate::scoring::bdeu_total(g, &d, &ScoringConfig::default(), None))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((r.score - best).abs() <= 1e-9 * best.abs());
    }

    #[test]
    fn trace_is_monotone_and_sums() {
        let bn = crate::netgen::random_network(7, 0.4, 4, 3);
        let d = forward_sample(&bn, 300, 4);
        for space in [Space::B, Space::E, Space::Hybrid] {
            let r = greedy(space, &d, ScoringConfig::default(), &verified());
            let mut prev = r.initial_score;
            let mut sum = 0.0;
            for s in &r.trace {
                assert!(s.score > prev);
                sum += s.delta;
                prev = s.score;
            }
            assert!((r.initial_score + sum - r.score).abs() < 1e-6);
            let scratch = crate::scoring::bdeu_total(r.state.dag(), &d, &ScoringConfig::default(), None);
            assert!((scratch - r.score).abs() <= 1e-9 * scratch.abs());
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let bn = crate::netgen::random_network(8, 0.3, 4, 9);
        let d = forward_sample(&bn, 400, 10);
        for space in [Space::B, Space::E] {
            let seq = SearchConfig { parallelism: Parallelism::Sequential, ..Default::default() };
            let par = SearchConfig { parallelism: Parallelism::Parallel, ..Default::default() };
            let a = greedy(space, &d, ScoringConfig::default(), &seq);
            let b = greedy(space, &d, ScoringConfig::default(), &par);
            assert_eq!(a.trace, b.trace);
            assert_eq!(a.state, b.state);
        }
    }

    #[test]
    fn seeded_tie_break_is_deterministic() {
        let bn = crate::netgen::random_network(6, 0.4, 4, 1);
        let d = forward_sample(&bn, 200, 2);
        let cfg = SearchConfig { tie_break: TieBreak::Seeded(42), ..Default::default() };
        let a = greedy(Space::E, &d, ScoringConfig::default(), &cfg);
        let b = greedy(Space::E, &d, ScoringConfig::default(), &cfg);
        assert_eq!(a.trace, b.trace);
    }

    #[test]
    fn hybrid_never_below_b_space() {
        for seed in 0..5 {
            let bn = crate::netgen::random_network(8, 0.3, 4, seed);
            let d = forward_sample(&bn, 300, seed + 100);
            let b = greedy(Space::B, &d, ScoringConfig::default(), &SearchConfig::default());
            let h = hybrid_greedy(&d, ScoringConfig::default(), &SearchConfig::default());
            assert!(h.score >= b.score - tolerance(b.score));
        }
    }

    #[test]
    fn trace_text_format() {
        let d = collider_data(500, 1);
        let r = greedy(Space::B, &d, ScoringConfig::default(), &SearchConfig::default());
        let text = r.trace_text(d.vars());
        let first = text.lines().next().unwrap();
        let fields: Vec<&str> = first.split(' ').collect();
        assert_eq!(fields.len(), 5);
        assert_eq!(fields[0], "step");
        assert_eq!(fields[1], "1");
        assert!(fields[2].starts_with("add:"));
        assert!(fields[3].parse::<f64>().unwrap() > 0.0);
    }

    #[test]
    fn space_parsing() {
        assert_eq!("E".parse::<Space>().unwrap(), Space::E);
        assert_eq!("hybrid".parse::<Space>().unwrap(), Space::Hybrid);
        assert!("x".parse::<Space>().is_err());
    }
}
