use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates the precondition of the operation.
    #[error("{name} = {value} is out of range: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// The kernel series diverges: the point lies outside the convergence disc.
    #[error("series diverges at x = {x}: the convergence radius is {radius}")]
    Divergent { x: f64, radius: f64 },

    #[error("gamma_{{mu,q}}({k}) overflows the f64 range")]
    Overflow { k: usize },

    #[error("series did not reach the requested tolerance after {terms} terms")]
    NoConvergence { terms: usize },

    /// Two independent evaluation routes disagree beyond tolerance.
    #[error("cross-check failed for {what}: {first} vs {second}")]
    CrossCheck {
        what: &'static str,
        first: f64,
        second: f64,
    },

    #[error("test function `{function}` has no {what} metadata")]
    MissingMetadata { function: String, what: &'static str },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Domain { name, value, reason }
    }

    /// True for failures of the numerics themselves (as opposed to bad input).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Divergent { .. } | Error::Overflow { .. } | Error::NoConvergence { .. } | Error::CrossCheck { .. }
        )
    }
}
