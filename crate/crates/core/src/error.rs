use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid position: {0}")]
    InvalidPosition(String),
    #[error("code {code} out of range for a board with {edges} edges")]
    CodeOutOfRange { code: String, edges: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("board too large: {0}")]
    BoardTooLarge(String),
    #[error("edge {0} is already colored")]
    EdgeColored(usize),
    #[error("edge index {0} out of range")]
    EdgeOutOfRange(usize),
    #[error("enumeration cap exceeded: {needed} uncolored edges, cap is {cap}")]
    CapExceeded { needed: usize, cap: usize },
    #[error("invalid game spec: {0}")]
    InvalidSpec(String),
    #[error("game is over")]
    GameOver,
    #[error("illegal move: {0}")]
    IllegalMove(String),
    #[error("solver budget exceeded after {0} positions")]
    BudgetExceeded(usize),
    #[error("state not covered by the strategy table")]
    MissingState,
    #[error("root value is a tie")]
    RootTie,
    #[error("contradictory bounds for n={n}, k={k}")]
    ContradictoryBounds { n: u64, k: u64 },
    #[error("spec fingerprint mismatch")]
    FingerprintMismatch,
    #[error("corrupt game record: {0}")]
    CorruptRecord(String),
    #[error("invalid formula: {0}")]
    InvalidFormula(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("orbit computation exceeded its node budget")]
    OrbitTimeout,
    #[error("bad file format: {0}")]
    Format(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
