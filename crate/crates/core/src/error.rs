use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("edge {index} has zero weight")]
    ZeroWeight { index: usize },

    #[error("{what} = {value} is outside the allowed range {range}")]
    OutOfRange {
        what: &'static str,
        value: String,
        range: &'static str,
    },

    #[error("size cap exceeded: {required} states required, cap is {cap}")]
    CapExceeded { required: u128, cap: usize },

    #[error("size cap exceeded in subtree `{subtree}`: {required} vertices required, cap is {cap}")]
    HierarchyCapExceeded {
        subtree: String,
        required: u128,
        cap: usize,
    },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("eigensolver did not converge (residual {residual:e})")]
    NoConvergence { residual: f64 },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("time step not converged: halving dt moved the state by {infidelity:e} (limit {limit:e})")]
    ConvergenceGate { infidelity: f64, limit: f64 },

    #[error("need at least {required} revival peaks, found {found}")]
    TooFewPeaks { found: usize, required: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures caused by bad inputs rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::NoConvergence { .. }
                | Error::NumericalBreakdown(_)
                | Error::ConvergenceGate { .. }
                | Error::Io(_)
        )
    }
}
