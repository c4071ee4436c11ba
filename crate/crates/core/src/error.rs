use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// Gram matrix of a sector's served channels is (numerically) singular.
    #[error("zero-forcing singularity in sector {sector}: condition estimate {condition:.3e}")]
    Singular { sector: String, condition: f64 },

    #[error("sector {sector} serves {served} UEs but has only {antennas} antennas")]
    Capacity { sector: String, served: usize, antennas: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures of the numerical pipeline rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Singular { .. } | Error::Capacity { .. })
    }
}
