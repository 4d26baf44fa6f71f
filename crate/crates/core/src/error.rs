use thiserror::Error;

/// Where inside a Runge–Kutta step a control evaluation happened.
pub type Stage = usize;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    #[error("adaptive quadrature did not converge on [{lo}, {hi}] (estimated error {err:e})")]
    Quadrature { lo: f64, hi: f64, err: f64 },

    #[error("agent index {index} out of range for {len} agents")]
    Index { index: usize, len: usize },

    #[error(
        "boundary violation: agent {agent} at t = {time} s (RK stage {stage}), \
         delta^2 - |e|^2 = {margin:e}"
    )]
    BoundaryViolation {
        agent: usize,
        stage: Stage,
        time: f64,
        margin: f64,
    },

    #[error("interpolant certification failed: max |error| = {max_error:e} > {bound:e}")]
    Certification { max_error: f64, bound: f64 },

    #[error("{0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            func,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
