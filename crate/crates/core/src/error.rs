use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument outside the domain of the operation (negative time,
    /// non-finite matrix entry, non-positive temperature, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Mutually exclusive or inconsistent settings.
    #[error("configuration error: {0}")]
    Config(String),

    /// The intracavity field has no stable fixed point.
    #[error("unstable configuration: {0}")]
    Unstable(String),

    /// `V_i + V_f` is singular; cannot happen for physical states.
    #[error("degenerate state: {0}")]
    Degenerate(String),

    /// Trajectory blow-up or another numerical breakdown.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Config(_) => 2,
            Error::Unstable(_) => 3,
            Error::Degenerate(_) | Error::Numerical(_) => 4,
        }
    }
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
