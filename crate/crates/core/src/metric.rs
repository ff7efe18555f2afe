//! Illumination histograms and the sequence-level discrepancy (IHD) and
//! consistency (IHC = 2 - IHD) scores.
//!
//! Discrepancies are accumulated exactly in integers: with `T(j)` the bin
//! total over all `K` frames, `K * |G_i(j) - M(j)| = |K * G_i(j) - T(j)|`, so
//! the whole numerator of IHD is an integer and the only rounding happens in
//! the final division. Results are therefore independent of frame order and
//! of how per-frame work is scheduled.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{GrayImage, Raster};
use crate::retinex::{estimate_illumination, GaussianKernel};
use crate::scalar::Scalar;

pub const BIN_COUNT: usize = 256;

/// Upper bound of both scores; IHC equals this for a perfectly steady sequence.
const SCORE_MAX: f64 = 2.0;

/// Pixel counts of a map per rounded 8-bit level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlluminationHistogram {
    bins: [u64; BIN_COUNT],
    pixel_count: u64,
}

impl IlluminationHistogram {
    pub fn from_counts(bins: [u64; BIN_COUNT]) -> Result<Self> {
        let pixel_count: u64 = bins.iter().sum();
        if pixel_count == 0 {
            return Err(Error::EmptyImage {
                width: 0,
                height: 0,
            });
        }
        Ok(Self { bins, pixel_count })
    }

    pub fn bins(&self) -> &[u64; BIN_COUNT] {
        &self.bins
    }

    pub fn pixel_count(&self) -> u64 {
        self.pixel_count
    }
}

/// Bin index of a continuous value: round half away from zero, then clamp.
pub fn bin_index<T: Scalar>(value: T) -> usize {
    let r = value.round();
    if r.is_nan() || r <= T::zero() {
        0
    } else {
        r.to_usize().unwrap_or(BIN_COUNT - 1).min(BIN_COUNT - 1)
    }
}

pub fn histogram_of<T: Scalar, R: Raster<T> + ?Sized>(map: &R) -> Result<IlluminationHistogram> {
    let px = map.pixels();
    if px.is_empty() {
        return Err(Error::EmptyImage {
            width: map.width(),
            height: map.height(),
        });
    }
    let mut bins = [0u64; BIN_COUNT];
    for &v in px {
        bins[bin_index(v)] += 1;
    }
    Ok(IlluminationHistogram {
        bins,
        pixel_count: px.len() as u64,
    })
}

/// Per-bin average of a set of histograms sharing one pixel count.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanHistogram<T> {
    bins: Vec<T>,
    frame_count: usize,
    pixel_count: u64,
}

impl<T: Scalar> MeanHistogram<T> {
    pub fn bins(&self) -> &[T] {
        &self.bins
    }

    pub fn frame_count(&self) -> usize {
        self.frame_count
    }

    pub fn pixel_count(&self) -> u64 {
        self.pixel_count
    }
}

fn common_pixel_count(histograms: &[IlluminationHistogram]) -> Result<u64> {
    let first = histograms.first().ok_or(Error::EmptySequence)?;
    for h in &histograms[1..] {
        if h.pixel_count != first.pixel_count {
            return Err(Error::PixelCountMismatch {
                expected: first.pixel_count,
                actual: h.pixel_count,
            });
        }
    }
    Ok(first.pixel_count)
}

fn bin_totals(histograms: &[IlluminationHistogram]) -> [u64; BIN_COUNT] {
    let mut totals = [0u64; BIN_COUNT];
    for h in histograms {
        for (t, &c) in totals.iter_mut().zip(&h.bins) {
            *t += c;
        }
    }
    totals
}

fn ratio<T: Scalar>(num: u128, den: u128) -> T {
    T::from_u128(num).unwrap_or_else(T::infinity) / T::from_u128(den).unwrap_or_else(T::infinity)
}

pub fn mean_histogram<T: Scalar>(histograms: &[IlluminationHistogram]) -> Result<MeanHistogram<T>> {
    let pixel_count = common_pixel_count(histograms)?;
    let k = histograms.len();
    let bins = bin_totals(histograms)
        .iter()
        .map(|&t| ratio(u128::from(t), k as u128))
        .collect();
    Ok(MeanHistogram {
        bins,
        frame_count: k,
        pixel_count,
    })
}

/// L1 distance between one histogram and the mean, bounded by `2 S`.
pub fn frame_discrepancy<T: Scalar>(h: &IlluminationHistogram, m: &MeanHistogram<T>) -> Result<T> {
    if h.pixel_count != m.pixel_count {
        return Err(Error::PixelCountMismatch {
            expected: m.pixel_count,
            actual: h.pixel_count,
        });
    }
    Ok(h
        .bins
        .iter()
        .zip(&m.bins)
        .map(|(&c, &mean)| (T::lit(c as f64) - mean).abs())
        .sum())
}

/// IHD as an exact fraction `numerator / denominator`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiscrepancyRatio {
    pub numerator: u128,
    pub denominator: u128,
}

impl DiscrepancyRatio {
    pub fn to_scalar<T: Scalar>(self) -> T {
        ratio(self.numerator, self.denominator)
    }
}

/// Exact per-frame numerators `sum_j |K G_i(j) - T(j)|` (that is, `K` times the
/// L1 distance of frame `i` to the mean) plus the normalizer `K^2 S`.
struct ExactDiscrepancy {
    per_frame: Vec<u128>,
    frame_count: usize,
    pixel_count: u64,
}

impl ExactDiscrepancy {
    fn compute(histograms: &[IlluminationHistogram]) -> Result<Self> {
        let pixel_count = common_pixel_count(histograms)?;
        let k = histograms.len() as i128;
        let totals = bin_totals(histograms);
        let per_frame = histograms
            .iter()
            .map(|h| {
                h.bins
                    .iter()
                    .zip(&totals)
                    .map(|(&c, &t)| (k * c as i128 - t as i128).unsigned_abs())
                    .sum()
            })
            .collect();
        Ok(Self {
            per_frame,
            frame_count: histograms.len(),
            pixel_count,
        })
    }

    fn ratio(&self) -> DiscrepancyRatio {
        let k = self.frame_count as u128;
        DiscrepancyRatio {
            numerator: self.per_frame.iter().sum(),
            denominator: k * k * u128::from(self.pixel_count),
        }
    }
}

pub fn ihd_ratio(histograms: &[IlluminationHistogram]) -> Result<DiscrepancyRatio> {
    Ok(ExactDiscrepancy::compute(histograms)?.ratio())
}

pub fn ihd<T: Scalar>(histograms: &[IlluminationHistogram]) -> Result<T> {
    Ok(ihd_ratio(histograms)?.to_scalar())
}

pub fn ihc<T: Scalar>(histograms: &[IlluminationHistogram]) -> Result<T> {
    Ok(T::lit(SCORE_MAX) - ihd::<T>(histograms)?)
}

/// Scores for one evaluated sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceReport<T> {
    pub frame_count: usize,
    pub pixel_count: u64,
    /// L1 distance of each frame's histogram to the mean, in frame order.
    pub per_frame_discrepancy: Vec<T>,
    pub ihd: T,
    pub ihc: T,
    pub sigma: T,
    pub frame_ids: Vec<String>,
}

impl<T: Scalar> SequenceReport<T> {
    /// Scores a sequence whose illumination histograms are already known.
    pub fn from_histograms(histograms: &[IlluminationHistogram], frame_ids: Vec<String>, sigma: T) -> Result<Self> {
        if frame_ids.len() != histograms.len() {
            return Err(Error::FrameIdCount(frame_ids.len(), histograms.len()));
        }
        let exact = ExactDiscrepancy::compute(histograms)?;
        let k = exact.frame_count as u128;
        let per_frame_discrepancy = exact.per_frame.iter().map(|&n| ratio(n, k)).collect();
        let ihd: T = exact.ratio().to_scalar();
        Ok(Self {
            frame_count: exact.frame_count,
            pixel_count: exact.pixel_count,
            per_frame_discrepancy,
            ihd,
            ihc: T::lit(SCORE_MAX) - ihd,
            sigma,
            frame_ids,
        })
    }
}

pub fn default_frame_ids(count: usize) -> Vec<String> {
    (0..count).map(|i| i.to_string()).collect()
}

/// Illumination histogram of every frame, in order. Frames must share one size.
pub fn sequence_histograms<T: Scalar>(
    frames: &[GrayImage<T>],
    frame_ids: &[String],
    sigma: T,
) -> Result<Vec<IlluminationHistogram>> {
    let first = frames.first().ok_or(Error::EmptySequence)?;
    for (index, f) in frames.iter().enumerate() {
        if f.width() != first.width() || f.height() != first.height() {
            return Err(Error::FrameDimensionMismatch {
                index,
                id: frame_ids.get(index).cloned().unwrap_or_else(|| index.to_string()),
                width: first.width(),
                height: first.height(),
                actual_width: f.width(),
                actual_height: f.height(),
            });
        }
    }
    GaussianKernel::new(sigma)?;
    frames
        .par_iter()
        .map(|f| histogram_of(&estimate_illumination(f, sigma)?))
        .collect()
}

pub fn evaluate_sequence<T: Scalar>(frames: &[GrayImage<T>], sigma: T) -> Result<SequenceReport<T>> {
    evaluate_sequence_with_ids(frames, default_frame_ids(frames.len()), sigma)
}

pub fn evaluate_sequence_with_ids<T: Scalar>(
    frames: &[GrayImage<T>],
    frame_ids: Vec<String>,
    sigma: T,
) -> Result<SequenceReport<T>> {
    if frame_ids.len() != frames.len() {
        return Err(Error::FrameIdCount(frame_ids.len(), frames.len()));
    }
    let histograms = sequence_histograms(frames, &frame_ids, sigma)?;
    SequenceReport::from_histograms(&histograms, frame_ids, sigma)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spike(bin: usize, count: u64) -> IlluminationHistogram {
        let mut bins = [0; BIN_COUNT];
        bins[bin] = count;
        IlluminationHistogram::from_counts(bins).unwrap()
    }

    #[test]
    fn histogram_of_constant_map() {
        let m = GrayImage::constant(2, 2, 0.0f64).unwrap();
        let h = histogram_of(&m).unwrap();
        assert_eq!(h.bins()[0], 4);
        assert_eq!(h.pixel_count(), 4);
    }

    #[test]
    fn rounding_rule() {
        let m = GrayImage::new(3, 1, vec![0.4f64, 0.5, 254.9]).unwrap();
        let h = histogram_of(&m).unwrap();
        assert_eq!((h.bins()[0], h.bins()[1], h.bins()[255]), (1, 1, 1));
        assert_eq!(bin_index(254.5f64), 255);
        assert_eq!(bin_index(1.5f32), 2);
        assert_eq!(bin_index(-3.0f64), 0);
        assert_eq!(bin_index(300.0f64), 255);
    }

    #[test]
    fn from_counts_rejects_empty() {
        assert!(IlluminationHistogram::from_counts([0; BIN_COUNT]).is_err());
    }

    #[test]
    fn mean_of_one_is_identity() {
        let mut bins = [0; BIN_COUNT];
        bins[3] = 5;
        bins[200] = 7;
        let h = IlluminationHistogram::from_counts(bins).unwrap();
        let m: MeanHistogram<f64> = mean_histogram(std::slice::from_ref(&h)).unwrap();
        for (a, &b) in m.bins().iter().zip(h.bins()) {
            assert_eq!(*a, b as f64);
        }
        assert_eq!(m.frame_count(), 1);
    }

    #[test]
    fn mean_of_black_and_white() {
        let m: MeanHistogram<f64> = mean_histogram(&[spike(0, 4), spike(255, 4)]).unwrap();
        assert_eq!(m.bins()[0], 2.0);
        assert_eq!(m.bins()[255], 2.0);
        assert_eq!(m.bins().iter().sum::<f64>(), 4.0);
    }

    #[test]
    fn mean_rejects_bad_input() {
        assert!(matches!(mean_histogram::<f64>(&[]), Err(Error::EmptySequence)));
        assert!(matches!(
            mean_histogram::<f64>(&[spike(0, 4), spike(0, 5)]),
            Err(Error::PixelCountMismatch { .. })
        ));
    }

    #[test]
    fn discrepancy_examples() {
        let hs = [spike(0, 4), spike(255, 4)];
        let m: MeanHistogram<f64> = mean_histogram(&hs).unwrap();
        assert_eq!(frame_discrepancy(&hs[0], &m).unwrap(), 4.0);
        let same: MeanHistogram<f64> = mean_histogram(&hs[..1]).unwrap();
        assert_eq!(frame_discrepancy(&hs[0], &same).unwrap(), 0.0);
        assert!(frame_discrepancy(&spike(0, 5), &m).is_err());
    }

    #[test]
    fn ihd_examples() {
        let same = vec![spike(9, 4); 3];
        assert_eq!(ihd::<f64>(&same).unwrap(), 0.0);
        assert_eq!(ihc::<f64>(&same).unwrap(), 2.0);
        assert_eq!(ihd::<f64>(&[spike(0, 4), spike(255, 4)]).unwrap(), 1.0);
        let four = [spike(1, 4), spike(2, 4), spike(3, 4), spike(4, 4)];
        assert_eq!(ihd::<f64>(&four).unwrap(), 1.5);
        assert_eq!(ihc::<f64>(&four).unwrap(), 0.5);
        assert_eq!(ihd::<f32>(&four).unwrap(), 1.5);
        let r = ihd_ratio(&four).unwrap();
        assert_eq!((r.numerator, r.denominator), (96, 64));
    }

    #[test]
    fn report_invariants() {
        let hs = [spike(0, 4), spike(3, 4), spike(3, 4)];
        let r = SequenceReport::from_histograms(&hs, default_frame_ids(3), 1.0f64).unwrap();
        assert_eq!(r.ihc, 2.0 - r.ihd);
        let sum: f64 = r.per_frame_discrepancy.iter().sum();
        assert!((r.ihd - sum / 12.0).abs() < 1e-15);
    }

    #[test]
    fn evaluate_rejects_mismatched_frames() {
        let a = GrayImage::constant(4, 4, 1.0f64).unwrap();
        let b = GrayImage::constant(4, 5, 1.0f64).unwrap();
        let err = evaluate_sequence(&[a.clone(), a, b], 1.0).unwrap_err();
        assert!(matches!(err, Error::FrameDimensionMismatch { index: 2, .. }));
        assert!(matches!(evaluate_sequence::<f64>(&[], 1.0), Err(Error::EmptySequence)));
    }

    #[test]
    fn evaluate_black_white_pair() {
        let frames = [
            GrayImage::constant(8, 8, 0.0f64).unwrap(),
            GrayImage::constant(8, 8, 255.0).unwrap(),
        ];
        let r = evaluate_sequence(&frames, 2.0).unwrap();
        assert_eq!((r.ihd, r.ihc), (1.0, 1.0));
    }
}
