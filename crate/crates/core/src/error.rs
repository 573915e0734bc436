use thiserror::Error;

/// Errors surfaced by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("time {0} is not in the support of the base distribution")]
    NotInSupport(f64),

    #[error("vertex ({x}, {y}) lies outside the {width}x{height} grid")]
    OutsideGrid {
        x: usize,
        y: usize,
        width: usize,
        height: usize,
    },

    /// A ball touched the far edge of the window, so the finite grid no longer
    /// represents the infinite-lattice ball.
    #[error("ball B(t={t}) reaches the window boundary")]
    BallTruncated { t: u32 },

    #[error("shape C_t (t={t}) still contains the ray at the window boundary (theta={theta})")]
    RayTruncated { t: f64, theta: f64 },

    #[error("growth reached the window boundary before {target} cells")]
    WindowExceeded { target: usize },

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("schema version mismatch: {found} vs expected {expected}")]
    SchemaMismatch { found: u32, expected: u32 },

    #[error("io: {0}")]
    Io(String),

    #[error("json: {0}")]
    Json(String),
}

impl Error {
    /// Budget or window errors as opposed to configuration errors.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::BallTruncated { .. }
                | Error::RayTruncated { .. }
                | Error::WindowExceeded { .. }
                | Error::Inconclusive(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
