use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown loss id `{0}`")]
    UnknownLoss(String),

    #[error("invalid gamma {0}: gamma_hinge requires gamma > 0")]
    InvalidGamma(f64),

    #[error("`{op}` is not defined for the non-convex loss `{loss}`")]
    NonConvexLoss {
        op: &'static str,
        loss: &'static str,
    },

    #[error("`{op}` does not support loss `{loss}`")]
    UnsupportedLoss {
        op: &'static str,
        loss: &'static str,
    },

    #[error("invalid interval [{lo}, {hi}]: need lo < hi")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("dimension mismatch: predictor has {predictor}, distribution has {distribution}")]
    DimensionMismatch {
        predictor: usize,
        distribution: usize,
    },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(#[from] Violation),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("empty distribution")]
    EmptyDistribution,

    #[error("parse error: {0}")]
    Parse(String),
}

/// The first distribution invariant that failed.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Violation {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("no atoms with positive weight")]
    NoAtoms,
    #[error("atom {index} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        found: usize,
        expected: usize,
    },
    #[error("atom {index} has non-finite coordinates or weight")]
    NonFinite { index: usize },
    #[error("atom {index} has negative weight {weight}")]
    NegativeWeight { index: usize, weight: f64 },
    #[error("atom outside unit ball (atom {index}, norm {norm})")]
    OutsideUnitBall { index: usize, norm: f64 },
    #[error("weights sum to {0}")]
    WeightSum(f64),
}
