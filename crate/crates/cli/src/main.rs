use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use bnsearch::experiment::{run_experiment, ExperimentConfig};
use bnsearch::netgen::{forward_sample, load_network, random_network};
use bnsearch::search::{greedy, SearchConfig, Space, State, TieBreak};
use bnsearch::text::{write_dag, write_pdag, GraphFile};
use bnsearch::{dag_to_cpdag, structural_difference, CompletedPdag, Dataset, Parallelism, ScoringConfig};

#[derive(Parser)]
#[command(name = "bnsearch", version, about = "Greedy Bayesian network structure search in DAG and equivalence-class space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random binary gold-standard network.
    Generate(GenerateArgs),
    /// Draw cases from a network by forward sampling.
    Sample(SampleArgs),
    /// Learn a structure from a dataset.
    Learn(LearnArgs),
    /// Print the structural difference between two structures.
    Compare(CompareArgs),
    /// Run the replicated B-space vs E-space comparison.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    nodes: usize,
    #[arg(long, default_value_t = 0.3)]
    edge_prob: f64,
    #[arg(long, default_value_t = 4)]
    max_parents: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    network: PathBuf,
    #[arg(long)]
    cases: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct LearnArgs {
    #[arg(long)]
    data: PathBuf,
    /// Take variable arities from this network instead of inferring them.
    #[arg(long)]
    network: Option<PathBuf>,
    #[arg(long, default_value = "e")]
    space: Space,
    #[arg(long, default_value_t = ScoringConfig::DEFAULT_ESS)]
    ess: f64,
    /// Break score ties with a seeded random rank instead of operator order.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    /// Write the step trace to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Score neighbours on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct CompareArgs {
    /// Structure file (`->` and `--` edges).
    a: PathBuf,
    /// Second structure file.
    b: Option<PathBuf>,
    /// Compare against the class of this network instead.
    #[arg(long, conflicts_with = "b")]
    gold: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    nodes: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    cases: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    golds: usize,
    #[arg(long, default_value_t = 3)]
    databases: usize,
    #[arg(long, value_delimiter = ',', default_value = "e,b")]
    space: Vec<Space>,
    #[arg(long, default_value_t = ScoringConfig::DEFAULT_ESS)]
    ess: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.3)]
    edge_prob: f64,
    #[arg(long, default_value_t = 4)]
    max_parents: usize,
    /// Per-setting report.
    #[arg(long)]
    out: PathBuf,
    /// Per-run log; defaults to `<out>.runs.tsv`.
    #[arg(long)]
    runs: Option<PathBuf>,
    /// Leave wall-clock columns as NA so reruns are byte-identical.
    #[arg(long)]
    no_timing: bool,
    #[arg(long)]
    sequential: bool,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(a) => generate(a),
        Command::Sample(a) => sample(a),
        Command::Learn(a) => learn(a),
        Command::Compare(a) => compare(a),
        Command::Experiment(a) => experiment(a),
    }
}

fn generate(a: GenerateArgs) -> Result<()> {
    if a.nodes == 0 {
        bail!("--nodes must be at least 1");
    }
    if !(0.0..=1.0).contains(&a.edge_prob) {
        bail!("--edge-prob must lie in [0, 1]");
    }
    let bn = random_network(a.nodes, a.edge_prob, a.max_parents, a.seed);
    bn.save(&a.out).with_context(|| format!("writing {}", a.out.display()))?;
    println!("nodes {} edges {}", bn.vars().len(), bn.dag().edge_count());
    Ok(())
}

fn sample(a: SampleArgs) -> Result<()> {
    let bn = load_network(&a.network).with_context(|| format!("reading {}", a.network.display()))?;
    let data = forward_sample(&bn, a.cases, a.seed);
    data.save(&a.out).with_context(|| format!("writing {}", a.out.display()))?;
    println!("cases {}", data.n_cases());
    Ok(())
}

fn learn(a: LearnArgs) -> Result<()> {
    let vars = match &a.network {
        Some(p) => Some(load_network(p).with_context(|| format!("reading {}", p.display()))?.vars().clone()),
        None => None,
    };
    let data = Dataset::load(&a.data, vars.as_ref()).with_context(|| format!("reading {}", a.data.display()))?;
    let scoring = ScoringConfig::new(a.ess)?;
    let cfg = SearchConfig {
        parallelism: if a.sequential { Parallelism::Sequential } else { Parallelism::Parallel },
        tie_break: a.seed.map_or(TieBreak::Ordinal, TieBreak::Seeded),
        verify_scores: false,
    };
    let result = greedy(a.space, &data, scoring, &cfg);
    let names = data.vars().names();
    let text = match &result.state {
        State::Dag(g) => write_dag(names, g),
        State::Cpdag(c) => write_pdag(names, c.pdag()),
    };
    fs::write(&a.out, text).with_context(|| format!("writing {}", a.out.display()))?;
    if let Some(path) = &a.trace {
        fs::write(path, result.trace_text(data.vars())).with_context(|| format!("writing {}", path.display()))?;
    }
    println!("score {}", result.score);
    println!("steps {}", result.steps());
    Ok(())
}

/// Loads a structure file and returns its class, with nodes in `order` when
/// given.
fn load_class(path: &Path, order: Option<&[String]>) -> Result<(Vec<String>, CompletedPdag)> {
    let mut file = GraphFile::load(path).with_context(|| format!("reading {}", path.display()))?;
    if let Some(order) = order {
        file = file.reorder(order).with_context(|| format!("variables of {}", path.display()))?;
    }
    let class = CompletedPdag::complete(&file.pdag).with_context(|| format!("{} is not a valid class", path.display()))?;
    Ok((file.names, class))
}

fn compare(a: CompareArgs) -> Result<()> {
    let (names, first) = load_class(&a.a, None)?;
    let second = match (&a.b, &a.gold) {
        (Some(b), None) => load_class(b, Some(&names))?.1,
        (None, Some(gold)) => {
            let bn = load_network(gold).with_context(|| format!("reading {}", gold.display()))?;
            let gold_file = GraphFile { names: bn.vars().names().to_vec(), pdag: bn.dag().to_pdag() };
            let reordered = gold_file.reorder(&names).context("gold network variables")?;
            let dag = reordered.to_dag()?;
            dag_to_cpdag(&dag)
        }
        _ => bail!("give a second structure file or --gold <network>"),
    };
    println!("{}", structural_difference(&first, &second)?);
    Ok(())
}

fn experiment(a: ExperimentArgs) -> Result<()> {
    let cfg = ExperimentConfig {
        nodes: a.nodes,
        cases: a.cases,
        golds: a.golds,
        databases: a.databases,
        spaces: a.space,
        ess: a.ess,
        seed: a.seed,
        edge_prob: a.edge_prob,
        max_parents: a.max_parents,
        timing: !a.no_timing,
        parallelism: if a.sequential { Parallelism::Sequential } else { Parallelism::Parallel },
        search: SearchConfig {
            parallelism: if a.sequential { Parallelism::Sequential } else { Parallelism::Parallel },
            ..Default::default()
        },
    };
    let report = run_experiment(&cfg)?;
    let runs_path = a.runs.unwrap_or_else(|| {
        let mut p = a.out.clone().into_os_string();
        p.push(".runs.tsv");
        PathBuf::from(p)
    });
    let rows = report.rows_tsv();
    fs::write(&a.out, &rows).with_context(|| format!("writing {}", a.out.display()))?;
    fs::write(&runs_path, report.runs_tsv()).with_context(|| format!("writing {}", runs_path.display()))?;
    print!("{rows}");
    Ok(())
}
