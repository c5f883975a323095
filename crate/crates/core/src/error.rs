use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("height {height} exceeds the exact-evaluation limit {max}; shrink Q")]
    HeightOverflow { height: u64, max: u64 },

    #[error("leading coefficient z is zero; the fiber is not a cubic")]
    InvalidFiber,

    #[error("Q = {q} is above the {what} guard {max}{hint}")]
    ScanGuard {
        what: &'static str,
        q: u32,
        max: u32,
        hint: &'static str,
    },

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("point is outside the real domain of the discriminant surface (S - 27 z^2 delta = {gap})")]
    OutOfDomain { gap: f64 },

    #[error("quadrature did not reach tolerance {tol:e}: best estimate {estimate} with error {error:e}")]
    Quadrature { estimate: f64, error: f64, tol: f64 },

    #[error("kappa forms disagree: direct {direct} vs 3/2 c1 {from_c1} (allowed {allowed:e})")]
    KappaMismatch { direct: f64, from_c1: f64, allowed: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("thread pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
}

impl Error {
    /// Numerical failures map to exit code 2 in the driver; everything else is a usage error.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Quadrature { .. } | Error::KappaMismatch { .. })
    }
}
