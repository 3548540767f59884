use thiserror::Error;

/// Errors raised across the focusing pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum VsarError {
    #[error("matrix dimensions must be positive (got {rows}x{cols})")]
    EmptyMatrix { rows: usize, cols: usize },

    #[error("matrix data length {len} does not match {rows}x{cols}")]
    ShapeMismatch { rows: usize, cols: usize, len: usize },

    #[error("non-finite sample at row {row}, col {col}")]
    NonFinite { row: usize, col: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("target {index} lies {radius_m:.3} m from scene center, beyond the {limit_m:.3} m scene radius guard")]
    TargetOutsideScene {
        index: usize,
        radius_m: f64,
        limit_m: f64,
    },

    #[error("phase history is in the wrong residual-video-phase state: expected {expected}, found {found}")]
    WrongRvpState {
        expected: &'static str,
        found: &'static str,
    },

    #[error("range scaling at pulse {pulse} pushes the occupied band to {band_hz:.1} Hz, beyond Nyquist {nyquist_hz:.1} Hz")]
    RangeSupportOverflow {
        pulse: usize,
        band_hz: f64,
        nyquist_hz: f64,
    },

    #[error("azimuth scaling at range bin {bin} pushes the occupied band to {band_hz:.1} Hz, beyond PRF/2 = {nyquist_hz:.1} Hz")]
    AzimuthSupportOverflow {
        bin: usize,
        band_hz: f64,
        nyquist_hz: f64,
    },

    #[error("requested output {rows}x{cols} is smaller than the {min_rows}x{min_cols} input grid")]
    OutputTooSmall {
        rows: usize,
        cols: usize,
        min_rows: usize,
        min_cols: usize,
    },

    #[error("oracle imaging of {samples} samples onto {pixels} pixels exceeds the size guard; pass force to override")]
    OracleTooLarge { samples: usize, pixels: usize },

    #[error("image is identically zero")]
    ZeroImage,

    #[error("metric failure: {0}")]
    Metric(#[from] MetricError),

    #[error("format error: {0}")]
    Format(String),
}

/// Point-response measurements that could not be made.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricError {
    #[error("no -3 dB crossing on the {side} side of the peak")]
    NoHalfPowerCrossing { side: &'static str },
    #[error("no null found on the {side} side of the peak")]
    NoNull { side: &'static str },
    #[error("profile is empty")]
    EmptyProfile,
}

pub type Result<T> = std::result::Result<T, VsarError>;
