use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("assembly failed: {0}")]
    Assembly(String),

    #[error("unsupported capability: {0}")]
    Capability(String),

    #[error("thermodynamic model evaluated outside its domain: {0}")]
    ModelDomain(String),

    #[error("invalid state: {0}")]
    State(String),

    #[error(
        "equilibrium solver failed after {iterations} iterations (residual {residual:e}): {reason}"
    )]
    SolverFailure {
        iterations: usize,
        residual: f64,
        reason: String,
    },

    /// The nonlinear time-step solve did not converge. Carries the last
    /// iterate so callers can inspect or checkpoint it.
    #[error("time step failed after {iterations} iterations (residual {residual:e}): {reason}")]
    StepperFailure {
        iterations: usize,
        residual: f64,
        reason: String,
        last_iterate: Vec<f64>,
    },
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}
