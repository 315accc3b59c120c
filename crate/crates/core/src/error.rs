use thiserror::Error;

/// Errors raised by the geometry, flow, and translator routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GcfError {
    #[error("profile is not convex at cell {cell}: A = {a:e}, B = {b:e}")]
    NonConvex { cell: usize, a: f64, b: f64 },

    #[error("support value at cell {cell} is not a positive finite number ({value})")]
    NonPositiveSupport { cell: usize, value: f64 },

    #[error("profile needs at least {min} cells, got {got}")]
    TooFewCells { min: usize, got: usize },

    #[error("grids differ: {0}")]
    GridMismatch(String),

    #[error("height {z} lies outside [{h}, {l}]")]
    BadRange { z: f64, h: f64, l: f64 },

    #[error("time must be negative, got {0}")]
    BadTime(f64),

    #[error("alpha = {alpha} is outside the admissible range {range}")]
    BadAlpha { alpha: f64, range: &'static str },

    #[error("invalid parameter {name}: {reason}")]
    BadParameter { name: &'static str, reason: String },

    #[error("step of size {dt:e} at t = {t} produced a non-convex profile")]
    StepRejected { t: f64, dt: f64 },

    #[error("translator slope stayed bounded up to r = {radius} (expected blow-up near {expected})")]
    NoBlowupDetected { radius: f64, expected: f64 },

    #[error("not enough resolved nodes near the boundary: {0}")]
    InsufficientResolution(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, GcfError>;
