use std::path::PathBuf;

use thiserror::Error;

/// Everything that can go wrong between loading frames and writing a report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("image dimensions must be positive, got {width}x{height}")]
    EmptyImage { width: usize, height: usize },

    #[error("pixel buffer holds {actual} samples but {width}x{height}x{channels} needs {expected}")]
    BufferLength {
        width: usize,
        height: usize,
        channels: usize,
        expected: usize,
        actual: usize,
    },

    #[error("pixel {index} has intensity {value}, outside [0, 255]")]
    IntensityOutOfRange { index: usize, value: f64 },

    #[error("unsupported channel count {0}: expected 1 (gray) or 3 (RGB)")]
    UnsupportedChannels(usize),

    #[error("sigma must be positive and finite, got {0}")]
    InvalidSigma(f64),

    #[error("sequence is empty")]
    EmptySequence,

    #[error("frame {index} ({id}) is {actual_width}x{actual_height}, expected {width}x{height}")]
    FrameDimensionMismatch {
        index: usize,
        id: String,
        width: usize,
        height: usize,
        actual_width: usize,
        actual_height: usize,
    },

    #[error("histogram pixel counts differ: {expected} vs {actual}")]
    PixelCountMismatch { expected: u64, actual: u64 },

    #[error("{0} frame identifiers supplied for {1} frames")]
    FrameIdCount(usize, usize),

    #[error("invalid ramp: {0}")]
    InvalidRamp(String),

    #[error(
        "interval {interval} selects frame index {index}, outside [0, {last}]; \
         the maximum legal interval is {max_interval}"
    )]
    IntervalOutOfRange {
        interval: usize,
        index: i64,
        last: usize,
        max_interval: usize,
    },

    #[error("interval must be a positive integer")]
    ZeroInterval,

    #[error("invalid glob pattern {pattern:?}: {message}")]
    Pattern { pattern: String, message: String },

    #[error("no frames matched {pattern:?} in {}", root.display())]
    NoFrames { root: PathBuf, pattern: String },

    #[error("{}: {message}", path.display())]
    Decode { path: PathBuf, message: String },

    #[error("{} is {width}x{height} but {} is {other_width}x{other_height}", first.display(), second.display())]
    MismatchedFiles {
        first: PathBuf,
        width: usize,
        height: usize,
        second: PathBuf,
        other_width: usize,
        other_height: usize,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {message}", path.display())]
    Serialize { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the filesystem rather than of the data.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. } | Error::Serialize { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
