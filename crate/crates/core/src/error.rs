//! Error type shared across the library.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("grid mismatch: {0} vs {1} nodes")]
    GridMismatch(usize, usize),

    #[error("order {order} aliases on a grid of {grid} nodes (need order < grid/2)")]
    Aliasing { order: usize, grid: usize },

    #[error("covariance window is not positive definite (Toeplitz pivot {0} failed)")]
    ToeplitzNotPd(usize),

    #[error("density must be strictly positive (node {node}: value {value})")]
    NonPositiveDensity { node: usize, value: f64 },

    #[error("denominator is not positive on the grid (node {node}: value {value})")]
    NonPositiveQ { node: usize, value: f64 },

    #[error("solver failed to reach tolerance within {0} iterations")]
    MaxIterations(usize),

    #[error("line search collapsed toward the positivity boundary without interior progress")]
    BoundaryApproach,

    #[error("maximum-entropy dual diverged; moments admit no interior solution")]
    NoInteriorSolution,

    #[error("no positive-definite point found in the lag box")]
    EmptyFeasibleBox,

    #[error("KL input {0} is negative; entropy ordering violated beyond tolerance")]
    NegativeKl(f64),

    #[error("expansion coefficient mu_{index} = {value} is negative")]
    NegativeMu { index: usize, value: f64 },

    #[error("model is not stationary: {0}")]
    NonStationaryModel(String),

    #[error("lag order {order} too large for a series of length {len}")]
    OrderTooLarge { order: usize, len: usize },

    #[error("pair distribution is unknown: {0}")]
    UnknownDistribution(String),

    #[error("invalid moments: {0}")]
    InvalidMoments(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable tag for JSON error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Invalid(_) => "Invalid",
            Error::GridMismatch(..) => "GridMismatch",
            Error::Aliasing { .. } => "Aliasing",
            Error::ToeplitzNotPd(_) => "ToeplitzNotPd",
            Error::NonPositiveDensity { .. } => "NonPositiveDensity",
            Error::NonPositiveQ { .. } => "NonPositiveQ",
            Error::MaxIterations(_) => "MaxIterations",
            Error::BoundaryApproach => "BoundaryApproach",
            Error::NoInteriorSolution => "NoInteriorSolution",
            Error::EmptyFeasibleBox => "EmptyFeasibleBox",
            Error::NegativeKl(_) => "NegativeKl",
            Error::NegativeMu { .. } => "NegativeMu",
            Error::NonStationaryModel(_) => "NonStationaryModel",
            Error::OrderTooLarge { .. } => "OrderTooLarge",
            Error::UnknownDistribution(_) => "UnknownDistribution",
            Error::InvalidMoments(_) => "InvalidMoments",
            Error::Parse { .. } => "Parse",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
        }
    }

    /// Exit code the CLI maps this error to: 2 for input/validation problems,
    /// 3 for solver failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::MaxIterations(_)
            | Error::BoundaryApproach
            | Error::NoInteriorSolution
            | Error::EmptyFeasibleBox
            | Error::NegativeKl(_) => 3,
            _ => 2,
        }
    }
}
