//! Error type shared by every module in the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("disparity must be positive, got {0}")]
    NonPositiveDisparity(f64),

    #[error("point is behind the camera (z = {0})")]
    BehindCamera(f64),

    #[error("interpolation is undefined for antipodal look directions")]
    DegenerateRotation,

    #[error("look direction collapsed to zero norm")]
    DegenerateLook,

    #[error("mask has no valid pixels")]
    EmptyMask,

    #[error("need at least 2 in-bounds keypoints, got {0}")]
    InsufficientKeypoints(usize),

    #[error("sampled disparities are all equal; scale/shift fit is rank-deficient")]
    RankDeficient,

    #[error("fitted scale must be positive, got {0}")]
    NonPositiveScale(f64),

    #[error("all pixels are masked out; nothing to fill from")]
    AllMasked,

    #[error("external refiner failed: {0}")]
    ExternalFailure(String),

    #[error("refiner contract violated: {0}")]
    ContractViolation(String),

    #[error("trajectory has {got} poses but {needed} are required")]
    TrajectoryTooShort { got: usize, needed: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { got: usize, needed: usize },

    #[error("covariance is not positive semidefinite: {0}")]
    NotPsd(String),

    #[error("window ({lo}, {hi}] out of bounds for a sequence of length {len}")]
    WindowOutOfBounds { lo: i64, hi: i64, len: usize },

    #[error("image is entirely black; letterbox crop would be empty")]
    FullyBlack,

    #[error("no subsampling stride lands in the target speed range")]
    NoValidStride,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable name, used by the CLI on standard error.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NonPositiveDisparity(_) => "NonPositiveDisparity",
            Error::BehindCamera(_) => "BehindCamera",
            Error::DegenerateRotation => "DegenerateRotation",
            Error::DegenerateLook => "DegenerateLook",
            Error::EmptyMask => "EmptyMask",
            Error::InsufficientKeypoints(_) => "InsufficientKeypoints",
            Error::RankDeficient => "RankDeficient",
            Error::NonPositiveScale(_) => "NonPositiveScale",
            Error::AllMasked => "AllMasked",
            Error::ExternalFailure(_) => "ExternalFailure",
            Error::ContractViolation(_) => "ContractViolation",
            Error::TrajectoryTooShort { .. } => "TrajectoryTooShort",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::TooFewSamples { .. } => "TooFewSamples",
            Error::NotPsd(_) => "NotPSD",
            Error::WindowOutOfBounds { .. } => "WindowOutOfBounds",
            Error::FullyBlack => "FullyBlack",
            Error::NoValidStride => "NoValidStride",
            Error::InvalidInput(_) => "InvalidInput",
            Error::Format(_) => "Format",
            Error::Io(_) => "Io",
        }
    }
}
