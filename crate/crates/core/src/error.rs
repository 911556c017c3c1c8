use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),
    #[error("edge row {row} references unknown node `{id}`")]
    UnknownEndpoint { row: usize, id: String },
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("node `{0}` cannot be paired with itself")]
    SameNode(String),
    #[error("edge `{emitter}` -> `{receiver}` is not in the graph")]
    MissingEdge { emitter: String, receiver: String },
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("input is empty")]
    EmptyInput,
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("column `{0}` is constant")]
    ConstantColumn(String),
    #[error("negative value {value} in {context}")]
    NegativeValue { context: &'static str, value: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("cell ({row}, {col}) is outside a {rows}x{cols} grid")]
    CellOutOfBounds { row: usize, col: usize, rows: usize, cols: usize },
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("cannot form {k} clusters from {n} vectors")]
    TooManyClusters { k: usize, n: usize },
    #[error("mixture fit failed for every candidate cluster count")]
    AllFitsFailed,
    #[error("no pagerank score for node `{0}`")]
    MissingScore(String),
    #[error("no attributes for node `{0}`")]
    MissingAttributes(String),
    #[error("node `{0}` has no cluster")]
    Unclustered(String),
    #[error("reciprocity target {0} cannot be reached")]
    InfeasibleReciprocity(f64),
    #[error("no usable in-degree tail: {samples} samples, {distinct} distinct values")]
    NoTail { samples: usize, distinct: usize },
}
