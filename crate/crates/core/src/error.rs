use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node index {index} out of range for a graph with {n} nodes")]
    NodeOutOfRange { index: usize, n: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("more than one edge between nodes {0} and {1}")]
    DuplicateEdge(usize, usize),
    #[error("edge set contains a directed cycle")]
    Cycle,
    #[error("node count mismatch: {0} vs {1}")]
    NodeCountMismatch(usize, usize),
    #[error("pdag admits no consistent extension")]
    NoExtension,
    #[error("operator {0} is not legal in the current state")]
    IllegalOperator(String),
    #[error("class enumeration over {edges} edges exceeds the limit of {limit}")]
    EnumerationTooLarge { edges: usize, limit: usize },
    #[error("equivalent sample size must be positive and finite, got {0}")]
    InvalidEss(f64),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("cpt row {config} of `{node}` sums to {sum}, expected 1")]
    RowSum { node: String, config: usize, sum: f64 },
    #[error("invalid dataset: {0}")]
    InvalidData(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("variable sets differ: {0}")]
    VariableMismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
