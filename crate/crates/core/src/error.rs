use thiserror::Error;

/// Errors raised by the numerical routines and the campaign front end.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quadrature did not converge on [{lo}, {hi}]: estimated error {achieved:e} (wanted {requested:e})")]
    Quadrature {
        lo: f64,
        hi: f64,
        achieved: f64,
        requested: f64,
    },

    #[error("Legendre transform sup for slope {slope} sits on the grid boundary (s = {s}); widen the log-radius range")]
    BoundaryArgmax { slope: f64, s: f64 },

    #[error("envelope slope never reaches {target} on [{s_lo}, {s_hi}]; the grid is too narrow")]
    EnvelopeSlope { target: f64, s_lo: f64, s_hi: f64 },

    #[error("norm integral for degree {n}, index {j} is not finite: the weight grows too slowly")]
    NonIntegrable { n: usize, j: usize },

    #[error("could not bracket the integrand mode for degree {n}, index {j} within s in [{s_lo}, {s_hi}]")]
    ModeNotFound {
        n: usize,
        j: usize,
        s_lo: f64,
        s_hi: f64,
    },

    #[error("basis index {j}: {source}")]
    BasisIndex { j: usize, source: Box<Error> },

    #[error("invalid coefficient distribution: {0}")]
    InvalidDistribution(String),

    #[error("polynomial is identically zero")]
    ZeroPolynomial,

    #[error("root finder did not converge after {iterations} iterations (worst correction {worst:e})")]
    RootFinding { iterations: usize, worst: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("{what}: {source}")]
    Context { what: String, source: Box<Error> },
}

impl Error {
    /// True for failures caused by bad user input, as opposed to numerical trouble.
    pub fn is_usage(&self) -> bool {
        if let Error::Context { source, .. } = self {
            return source.is_usage();
        }
        matches!(
            self,
            Error::InvalidWeight(_)
                | Error::InvalidArgument(_)
                | Error::InvalidDistribution(_)
                | Error::Config(_)
        )
    }
}

impl Error {
    /// Wrap with a note on where the failure happened.
    pub fn context(self, what: impl Into<String>) -> Error {
        Error::Context {
            what: what.into(),
            source: Box::new(self),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
