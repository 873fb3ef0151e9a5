use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical procedure failed or produced non-finite values.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// An input configuration is invalid.
    #[error("config error: {0}")]
    Config(String),

    #[error("not implemented: {0}")]
    Unimplemented(&'static str),

    /// The self-consistent loop diverged; the history up to the failure is attached.
    #[error("scf diverged: {reason}")]
    Diverged {
        reason: String,
        history: Vec<crate::scf::ScfState>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn numeric<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Numeric(msg.into()))
}
