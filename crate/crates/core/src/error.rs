use thiserror::Error;

/// Lattice point at which a pointwise hypothesis failed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub x: f64,
    pub y: f64,
    pub slack: f64,
}

#[derive(Debug, Error)]
pub enum FreeError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("degenerate output: {0}")]
    Degenerate(String),
    #[error("infinite energy: {0}")]
    InfiniteEnergy(String),
    #[error("singular evaluation: {0}")]
    SingularEvaluation(String),
    #[error("multi-cut equilibrium not supported: {0}")]
    MultiCutUnsupported(String),
    #[error("solver failure: {0}")]
    SolverFailure(String),
    #[error("hypothesis violated at ({:.6}, {:.6}) with slack {:.3e}: {msg}", witness.x, witness.y, witness.slack)]
    Hypothesis { msg: String, witness: Witness },
    #[error("size limit exceeded: {0}")]
    Size(String),
    #[error("sampler failure: {0}")]
    Sampler(String),
    #[error("parse error at position {pos}: {msg}")]
    Parse { msg: String, pos: usize },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for FreeError {
    fn from(e: std::io::Error) -> Self {
        FreeError::Io(e.to_string())
    }
}

impl From<csv::Error> for FreeError {
    fn from(e: csv::Error) -> Self {
        FreeError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, FreeError>;
