use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown element id `{0}`")]
    UnknownElement(String),

    #[error("unknown schema `{0}`")]
    UnknownSchema(String),

    #[error("invalid range: lo {lo} > hi {hi}")]
    Range { lo: f64, hi: f64 },

    #[error("syntax error at {line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },

    #[error("duplicate table `{name}` at {line}:{col}")]
    DuplicateTable { name: String, line: usize, col: usize },

    #[error("xml error: {0}")]
    Xml(String),

    #[error("unsupported format version `{found}` (expected `{expected}`)")]
    Version { found: String, expected: String },

    #[error("structural validation failed: {}", .0.join("; "))]
    Structure(Vec<String>),

    #[error("unknown voter `{0}`")]
    UnknownVoter(String),

    #[error("pair budget exceeded: {pairs} pairs > budget {budget}")]
    PairBudget { pairs: u64, budget: u64 },

    #[error("element `{element}` is already assigned to concept `{concept}`")]
    ConceptConflict { element: String, concept: String },

    #[error("unknown concept `{0}`")]
    UnknownConcept(String),

    #[error("illegal decision transition {from} -> {to} for pair ({left}, {right})")]
    IllegalTransition {
        left: String,
        right: String,
        from: String,
        to: String,
    },

    #[error("no match matrix contains the pair ({left}, {right})")]
    UnknownPair { left: String, right: String },

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("missing pairwise matches for: {}", .0.iter().map(|(a, b)| format!("{a}~{b}")).collect::<Vec<_>>().join(", "))]
    MissingPairs(Vec<(String, String)>),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
