use alloc::string::String;
use core::fmt;

/// Errors raised by the detection core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Frame smaller than the 7x7 attribute neighbourhood.
    FrameTooSmall { width: usize, height: usize },
    /// Pixel buffer length does not match `width * height`.
    BufferSize { expected: usize, actual: usize },
    /// Two frames (or a frame and a detector) disagree on dimensions.
    DimensionMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },
    /// A per-pixel grid does not line up with the zone it belongs to.
    GridMismatch { expected: usize, actual: usize },
    /// A detection zone failed validation.
    InvalidZone { id: String, reason: ZoneDefect },
    /// A configuration value is out of its admissible range.
    InvalidConfig(&'static str),
}

/// Reasons a detection zone polygon is rejected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZoneDefect {
    TooFewVertices(usize),
    SelfIntersecting,
    OutOfBounds { x: i32, y: i32 },
    Sensitivity(f64),
    Empty,
}

impl fmt::Display for ZoneDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZoneDefect::TooFewVertices(n) => write!(f, "polygon needs at least 3 vertices, got {n}"),
            ZoneDefect::SelfIntersecting => f.write_str("polygon is self-intersecting"),
            ZoneDefect::OutOfBounds { x, y } => write!(f, "vertex ({x}, {y}) lies outside the frame"),
            ZoneDefect::Sensitivity(p) => write!(f, "p_d = {p} is outside [0, 1]"),
            ZoneDefect::Empty => f.write_str("polygon covers no pixel centre"),
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::FrameTooSmall { width, height } => {
                write!(f, "frame {width}x{height} is smaller than 7x7")
            }
            Error::BufferSize { expected, actual } => {
                write!(f, "pixel buffer holds {actual} values, expected {expected}")
            }
            Error::DimensionMismatch { expected, actual } => write!(
                f,
                "frame is {}x{}, expected {}x{}",
                actual.0, actual.1, expected.0, expected.1
            ),
            Error::GridMismatch { expected, actual } => {
                write!(f, "per-pixel grid has {actual} entries, zone has {expected} pixels")
            }
            Error::InvalidZone { id, reason } => write!(f, "zone '{id}': {reason}"),
            Error::InvalidConfig(what) => write!(f, "invalid configuration: {what}"),
        }
    }
}

impl core::error::Error for Error {}
