use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("point is too close to a singularity ({0})")]
    SingularPoint(&'static str),

    #[error("proposal rejected {rejections} consecutive draws")]
    DegenerateProposal { rejections: u64 },

    #[error("matrix is not positive definite (pivot {pivot} = {value:e}); increase n_samples or remove basis indices")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("overlap diagonal entry {index} is not positive ({value:e})")]
    NonPositiveDiagonal { index: usize, value: f64 },

    #[error("grid needs {requested} evaluations, budget is {budget}")]
    ResourceLimit { requested: u64, budget: u64 },

    #[error("finite-difference step {h:e} is too small: roundoff {roundoff:e} exceeds tolerance")]
    StepTooSmall { h: f64, roundoff: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
