use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("skew parameter alpha = {0} is outside [-1, 1]; skew Brownian motion exists only for |alpha| <= 1")]
    SkewOutOfRange(f64),

    #[error("time {t} is outside the grid range [0, {t_max}]")]
    TimeOutOfRange { t: f64, t_max: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("scenario kind mismatch: expected {expected}, found {found}")]
    KindMismatch { expected: String, found: String },

    #[error("quadrature did not converge: estimate {estimate}, error estimate {error_estimate}")]
    Quadrature { estimate: f64, error_estimate: f64 },

    #[error("integrand returned a non-finite value at {0}")]
    NonFinite(f64),

    #[error("excursion signs are not identifiable from the observation path when alpha = 0")]
    Unidentifiable,

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
