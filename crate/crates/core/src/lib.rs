//! Bayesian network structure learning by greedy search over DAGs (B-space)
//! and over equivalence classes represented as completed pdags (E-space),
//! scored with BDeu.
//!
//! Module map:
//! - [`graph`]: DAG and pdag types, skeletons, v-structures, equivalence.
//! - [`equivalence`]: consistent extensions and completed pdags.
//! - [`scoring`]: datasets, sufficient statistics, BDeu, score cache.
//! - [`netgen`]: random gold standards, parameters, forward sampling.
//! - [`search`]: operators and greedy / hybrid search.
//! - [`metrics`]: structural difference between classes.
//! - [`experiment`]: replicated B-space vs E-space comparisons.
//!
//! With the default `parallel` feature, neighbour scoring and experiment
//! replications run on rayon; see [`par`].

pub mod equivalence;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod metrics;
pub mod netgen;
pub mod oracle;
pub mod par;
pub mod scoring;
pub mod search;
pub mod text;

pub use equivalence::{
    cpdag_equal, dag_to_cpdag, enumerate_class, is_consistent_extension, pdag_to_dag, CompletedPdag,
};
pub use error::{Error, Result};
pub use graph::{dags_equivalent, is_acyclic, skeleton, v_structures, Dag, MixedGraph, Pdag, VariableTable};
pub use metrics::structural_difference;
pub use netgen::{forward_sample, load_network, random_dag, random_parameters, BayesianNetwork, Cpt};
pub use par::Parallelism;
pub use scoring::{bdeu_local, bdeu_total, score_cpdag, sufficient_stats, Dataset, ScoreCache, ScoringConfig};
pub use search::{greedy, hybrid_greedy, SearchConfig, SearchResult, Space, State};
