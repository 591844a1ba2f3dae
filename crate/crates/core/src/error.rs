use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// The first entry of `offenders` is the first vertex (by index) whose
    /// degree differs from the declared one.
    #[error("graph is not {expected}-regular: vertex {} has degree {}", offenders[0].0, offenders[0].1)]
    NotRegular { expected: usize, offenders: Vec<(usize, usize)> },

    #[error("graph is disconnected (vertex {unreachable} unreachable from 0)")]
    Disconnected { unreachable: usize },

    #[error("state space exceeded cap of {cap} states at step {step} of horizon {horizon}")]
    StateCap { cap: usize, step: usize, horizon: usize },

    #[error("eigensolver did not converge (residual {residual:e})")]
    SolverFailure { residual: f64 },

    #[error("matrix is singular")]
    Singular,

    #[error("group closure exceeded cap of {cap} elements (frontier size {frontier})")]
    CapExceeded { cap: usize, frontier: usize },

    #[error("field: {0}")]
    Field(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable tag for diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Parse { .. } => "parse",
            Error::NotRegular { .. } => "not-regular",
            Error::Disconnected { .. } => "disconnected",
            Error::StateCap { .. } => "state-cap",
            Error::SolverFailure { .. } => "solver",
            Error::Singular => "singular",
            Error::CapExceeded { .. } => "cap",
            Error::Field(_) => "field",
            Error::Io(_) => "io",
        }
    }
}
