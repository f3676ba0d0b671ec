use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The mixing matrix must have fewer rows than columns.
    #[error("mixing matrix is {rows}x{cols}, expected rows < cols")]
    NotUnderdetermined { rows: usize, cols: usize },
    #[error("matrix has {rows}x{cols} shape but {len} entries")]
    EntryCount {
        rows: usize,
        cols: usize,
        len: usize,
    },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error(
        "mixing matrix violates the nonsingular-submatrix condition (min |det| = {min_abs_det:e})"
    )]
    SingularSubmatrix { min_abs_det: f64 },
    #[error("matrix is numerically singular (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },
    #[error("shape mismatch: {0}")]
    Shape(&'static str),
    #[error("expected {expected} frames, got {actual}")]
    FrameCount { expected: usize, actual: usize },
    #[error("frame dimensions {got_w}x{got_h} differ from {want_w}x{want_h}")]
    Dimensions {
        want_w: usize,
        want_h: usize,
        got_w: usize,
        got_h: usize,
    },
    #[error("frame dimensions {width}x{height} must be even")]
    OddDimensions { width: usize, height: usize },
    #[error("frame must be at least 1x1 with width*height pixels")]
    EmptyFrame,
    #[error("invalid parameter: {0}")]
    Parameter(&'static str),
    #[error("plane index {index} out of range for {n} sources")]
    IndexOutOfRange { index: usize, n: usize },
}
