use thiserror::Error;

/// Unified error type for the whole crate.
///
/// Every variant carries a stable machine-readable code (see [`Error::code`])
/// so front ends can map failures without parsing messages.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: bad alphabet, out-of-alphabet symbol, broken run
    /// sequence, inconsistent spec dimensions.
    #[error("invalid input: {0}")]
    Validation(String),

    /// Arguments outside the mathematical domain of an operation
    /// (probabilities not in (0,1), order < 2, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Index or size arguments that exceed what the data provides.
    #[error("out of range: {0}")]
    Range(String),

    /// A stated precondition does not hold for the given data.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// The source admits arbitrarily long constant blocks with too much mass,
    /// so exponential run-length decay cannot be certified.
    #[error("run-length decay violated: {0}")]
    DecayViolated(String),

    /// Numerical routine failed to converge or produced a degenerate result.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Estimator saw no collisions, so the plug-in value is undefined.
    #[error(
        "no collisions among {samples} sample prefixes of {prefix_len} runs; increase the sample count"
    )]
    ZeroCollisions { samples: usize, prefix_len: usize },

    /// Requested combination of model and method is not implemented.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A generation budget was exhausted before the requested data settled.
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Unparseable serialized data (JSON and friends).
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable identifier for the error category, exposed verbatim by the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Validation(_) => "validation",
            Error::Domain(_) => "domain",
            Error::Range(_) => "range",
            Error::Precondition(_) => "precondition",
            Error::DecayViolated(_) => "decay_violated",
            Error::Numerical(_) => "numerical",
            Error::ZeroCollisions { .. } => "zero_collisions",
            Error::Unsupported(_) => "unsupported",
            Error::ResourceCap(_) => "resource_cap",
            Error::Io(_) => "io",
            Error::Parse(_) => "parse",
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
