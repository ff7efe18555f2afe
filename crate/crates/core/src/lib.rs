//! Illumination histogram consistency (IHC) for frame sequences.
//!
//! Each frame's illumination is estimated with single-scale Retinex (a
//! Gaussian-smoothed copy of the frame), binned into a 256-level histogram,
//! and compared against the sequence's mean histogram:
//!
//! ```text
//! M(j) = (1/K) sum_i G_i(j)
//! IHD  = sum_i sum_j |G_i(j) - M(j)| / (K * S)
//! IHC  = 2 - IHD
//! ```
//!
//! `K` is the frame count and `S` the pixels per frame. IHC is 2 for a
//! sequence with perfectly steady illumination and falls as lighting drifts.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix the common `f64` and `f32` instantiations.

pub mod cli;
pub mod error;
pub mod image;
pub mod io;
pub mod metric;
pub mod retinex;
pub mod scalar;
pub mod svg;
pub mod synth;

pub use crate::error::{Error, Result};
pub use crate::image::{rescale_for_display, to_luminance, GrayImage, PixelBuffer, Raster};
pub use crate::metric::{
    evaluate_sequence, evaluate_sequence_with_ids, frame_discrepancy, histogram_of, ihc, ihd, ihd_ratio,
    mean_histogram, DiscrepancyRatio, IlluminationHistogram, MeanHistogram, SequenceReport, BIN_COUNT,
};
pub use crate::retinex::{
    blur, decompose, estimate_illumination, estimate_reflectance, Decomposition, GaussianKernel, IlluminationMap,
    ReflectanceMap, DEFAULT_SIGMA,
};
pub use crate::scalar::Scalar;
pub use crate::synth::{
    generate_ramp, interval_sweep, sample_interval, sweep_frames, BasePattern, IntervalSample, RampMode, RampSpec,
    SweepPoint,
};

pub type GrayImageF64 = GrayImage<f64>;
pub type GrayImageF32 = GrayImage<f32>;
pub type GaussianKernelF64 = GaussianKernel<f64>;
pub type GaussianKernelF32 = GaussianKernel<f32>;
pub type IlluminationMapF64 = IlluminationMap<f64>;
pub type IlluminationMapF32 = IlluminationMap<f32>;
pub type ReflectanceMapF64 = ReflectanceMap<f64>;
pub type ReflectanceMapF32 = ReflectanceMap<f32>;
pub type MeanHistogramF64 = MeanHistogram<f64>;
pub type MeanHistogramF32 = MeanHistogram<f32>;
pub type SequenceReportF64 = SequenceReport<f64>;
pub type SequenceReportF32 = SequenceReport<f32>;
