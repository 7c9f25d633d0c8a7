use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two-body energy of a state is non-negative, so no ellipse exists.
    #[error("unbound orbit: two-body energy {energy:e} is not negative")]
    Unbound { energy: f64 },

    /// A distance entering the Hamiltonian vanished (or fell below the guard).
    #[error("singular configuration: {0}")]
    Singularity(String),

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("frequency extraction failed: {0}")]
    Frequency(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
