//! Procedural frame sequences with linearly increasing illumination, and the
//! fixed-interval subsets used to probe how the scores respond to growing
//! illumination change.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::{GrayImage, Raster};
use crate::metric::{histogram_of, IlluminationHistogram, SequenceReport};
use crate::retinex::{estimate_illumination, GaussianKernel};
use crate::scalar::{max_intensity, Scalar};

/// Zero-mean spatial texture laid over every frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BasePattern {
    /// Planar left-to-right gradient from `-amplitude` to `+amplitude`.
    #[default]
    Flat,
    /// Square cells alternating between `+amplitude` and `-amplitude`.
    Checker,
    /// Concentric cosine rings centred on the frame.
    Radial,
}

impl fmt::Display for BasePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BasePattern::Flat => "flat",
            BasePattern::Checker => "checker",
            BasePattern::Radial => "radial",
        })
    }
}

impl FromStr for BasePattern {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "flat" => Ok(BasePattern::Flat),
            "checker" => Ok(BasePattern::Checker),
            "radial" => Ok(BasePattern::Radial),
            other => Err(format!("unknown pattern {other:?} (expected flat, checker or radial)")),
        }
    }
}

/// How the per-frame brightness combines with the base pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RampMode {
    /// `pattern + b_t`
    #[default]
    Additive,
    /// `(1 + pattern / 255) * b_t`
    Multiplicative,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RampSpec {
    pub frame_count: usize,
    pub width: usize,
    pub height: usize,
    pub brightness_start: f64,
    pub brightness_end: f64,
    pub base_pattern: BasePattern,
    pub pattern_amplitude: f64,
    pub mode: RampMode,
    pub seed: u64,
}

impl Default for RampSpec {
    fn default() -> Self {
        Self {
            frame_count: 100,
            width: 256,
            height: 256,
            brightness_start: 40.0,
            brightness_end: 200.0,
            base_pattern: BasePattern::Flat,
            pattern_amplitude: 40.0,
            mode: RampMode::Additive,
            seed: 0,
        }
    }
}

impl RampSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidRamp(m));
        if self.frame_count < 2 {
            return bad(format!("frame count must be at least 2, got {}", self.frame_count));
        }
        if self.width == 0 || self.height == 0 {
            return bad(format!("dimensions must be positive, got {}x{}", self.width, self.height));
        }
        let in_range = |v: f64| (0.0..=255.0).contains(&v);
        if !in_range(self.brightness_start) || !in_range(self.brightness_end) {
            return bad(format!(
                "brightness endpoints must lie in [0, 255], got {} and {}",
                self.brightness_start, self.brightness_end
            ));
        }
        if self.brightness_start > self.brightness_end {
            return bad(format!(
                "brightness must not decrease: start {} > end {}",
                self.brightness_start, self.brightness_end
            ));
        }
        if !self.pattern_amplitude.is_finite() || self.pattern_amplitude < 0.0 {
            return bad(format!("pattern amplitude must be >= 0, got {}", self.pattern_amplitude));
        }
        Ok(())
    }

    /// Global brightness of frame `t`.
    pub fn brightness(&self, t: usize) -> f64 {
        let step = (self.brightness_end - self.brightness_start) / (self.frame_count - 1) as f64;
        self.brightness_start + t as f64 * step
    }

    fn pattern(&self) -> Vec<f64> {
        let (w, h) = (self.width, self.height);
        let amp = self.pattern_amplitude;
        let mut p: Vec<f64> = match self.base_pattern {
            BasePattern::Flat => {
                let denom = (w.max(2) - 1) as f64;
                (0..h)
                    .flat_map(|_| (0..w).map(move |x| if w == 1 { 0.0 } else { amp * (2.0 * x as f64 / denom - 1.0) }))
                    .collect()
            }
            BasePattern::Checker => {
                let cell = (w.min(h) / 8).max(1);
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                let (ox, oy) = (rng.gen_range(0..cell), rng.gen_range(0..cell));
                (0..h)
                    .flat_map(|y| {
                        (0..w).map(move |x| if ((x + ox) / cell + (y + oy) / cell) % 2 == 0 { amp } else { -amp })
                    })
                    .collect()
            }
            BasePattern::Radial => {
                let (cx, cy) = ((w as f64 - 1.0) / 2.0, (h as f64 - 1.0) / 2.0);
                let rmax = (cx * cx + cy * cy).sqrt().max(1.0);
                (0..h)
                    .flat_map(|y| {
                        (0..w).map(move |x| {
                            let r = ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)).sqrt();
                            amp * (std::f64::consts::PI * r / rmax).cos()
                        })
                    })
                    .collect()
            }
        };
        if self.base_pattern != BasePattern::Flat {
            let mean = p.iter().sum::<f64>() / p.len() as f64;
            p.iter_mut().for_each(|v| *v -= mean);
        }
        p
    }
}

pub fn generate_ramp<T: Scalar>(spec: &RampSpec) -> Result<Vec<GrayImage<T>>> {
    spec.validate()?;
    let pattern = spec.pattern();
    let hi = max_intensity::<f64>();
    (0..spec.frame_count)
        .into_par_iter()
        .map(|t| {
            let b = spec.brightness(t);
            GrayImage::from_fn(spec.width, spec.height, |x, y| {
                let p = pattern[y * spec.width + x];
                let v = match spec.mode {
                    RampMode::Additive => p + b,
                    RampMode::Multiplicative => (1.0 + p / hi).max(0.0) * b,
                };
                T::lit(v.clamp(0.0, hi))
            })
        })
        .collect()
}

/// `2 * arm + 1` frame indices spaced `interval` apart around `center`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntervalSample {
    pub center: usize,
    pub arm: usize,
    pub interval: usize,
}

impl Default for IntervalSample {
    fn default() -> Self {
        Self {
            center: 50,
            arm: 4,
            interval: 1,
        }
    }
}

impl IntervalSample {
    pub fn with_interval(self, interval: usize) -> Self {
        Self { interval, ..self }
    }

    /// Largest interval that keeps every index inside `0..frame_count`.
    pub fn max_interval(&self, frame_count: usize) -> usize {
        if self.center >= frame_count {
            return 0;
        }
        if self.arm == 0 {
            return usize::MAX;
        }
        self.center.min(frame_count - 1 - self.center) / self.arm
    }

    pub fn indices(&self, frame_count: usize) -> Result<Vec<usize>> {
        if self.interval == 0 {
            return Err(Error::ZeroInterval);
        }
        let arm = self.arm as i64;
        let last = frame_count.saturating_sub(1);
        (-arm..=arm)
            .map(|k| {
                let index = self.center as i64 + k * self.interval as i64;
                if index < 0 || index >= frame_count as i64 {
                    Err(Error::IntervalOutOfRange {
                        interval: self.interval,
                        index,
                        last,
                        max_interval: self.max_interval(frame_count),
                    })
                } else {
                    Ok(index as usize)
                }
            })
            .collect()
    }
}

pub fn sample_interval<T: Scalar>(frames: &[GrayImage<T>], sample: &IntervalSample) -> Result<Vec<GrayImage<T>>> {
    Ok(sample
        .indices(frames.len())?
        .into_iter()
        .map(|i| frames[i].clone())
        .collect())
}

/// Scores of one interval setting.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint<T> {
    pub interval: usize,
    pub ihd: T,
    pub ihc: T,
    pub frame_indices: Vec<usize>,
}

pub fn interval_sweep<T: Scalar>(
    spec: &RampSpec,
    template: &IntervalSample,
    intervals: &[usize],
    sigma: T,
) -> Result<Vec<SweepPoint<T>>> {
    spec.validate()?;
    // Fail on an illegal interval before paying for generation.
    for &i in intervals {
        template.with_interval(i).indices(spec.frame_count)?;
    }
    let frames = generate_ramp::<T>(spec)?;
    sweep_frames(&frames, template, intervals, sigma)
}

/// Interval sweep over an existing sequence. Each frame's histogram is
/// computed once, however many interval settings select it.
pub fn sweep_frames<T: Scalar>(
    frames: &[GrayImage<T>],
    template: &IntervalSample,
    intervals: &[usize],
    sigma: T,
) -> Result<Vec<SweepPoint<T>>> {
    GaussianKernel::new(sigma)?;
    let selections = intervals
        .iter()
        .map(|&i| template.with_interval(i).indices(frames.len()))
        .collect::<Result<Vec<_>>>()?;
    if let Some(first) = frames.first() {
        if let Some((index, f)) = frames
            .iter()
            .enumerate()
            .find(|(_, f)| f.width() != first.width() || f.height() != first.height())
        {
            return Err(Error::FrameDimensionMismatch {
                index,
                id: index.to_string(),
                width: first.width(),
                height: first.height(),
                actual_width: f.width(),
                actual_height: f.height(),
            });
        }
    }

    let mut needed: Vec<usize> = selections.iter().flatten().copied().collect();
    needed.sort_unstable();
    needed.dedup();
    let histograms: BTreeMap<usize, IlluminationHistogram> = needed
        .par_iter()
        .map(|&i| Ok((i, histogram_of(&estimate_illumination(&frames[i], sigma)?)?)))
        .collect::<Result<_>>()?;

    intervals
        .iter()
        .zip(selections)
        .map(|(&interval, indices)| {
            let hs: Vec<IlluminationHistogram> = indices.iter().map(|i| histograms[i].clone()).collect();
            let ids = indices.iter().map(|i| i.to_string()).collect();
            let report = SequenceReport::from_histograms(&hs, ids, sigma)?;
            Ok(SweepPoint {
                interval,
                ihd: report.ihd,
                ihc: report.ihc,
                frame_indices: indices,
            })
        })
        .collect()
}

/// How closely a sweep follows "larger interval, larger IHD, smaller IHC".
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepTrend {
    /// Spearman correlation of interval against IHD.
    pub ihd_rank_correlation: f64,
    /// Spearman correlation of interval against IHC.
    pub ihc_rank_correlation: f64,
    pub ihd_strictly_increasing: bool,
    pub ihc_strictly_decreasing: bool,
    /// `(max - min) / mean` of successive IHD differences; small means
    /// close to linear. `None` with fewer than two differences.
    pub difference_spread: Option<f64>,
}

pub fn sweep_trend<T: Scalar>(points: &[SweepPoint<T>]) -> SweepTrend {
    let x: Vec<f64> = points.iter().map(|p| p.interval as f64).collect();
    let d: Vec<f64> = points.iter().map(|p| p.ihd.to_f64_lossy()).collect();
    let c: Vec<f64> = points.iter().map(|p| p.ihc.to_f64_lossy()).collect();
    let diffs: Vec<f64> = d.windows(2).map(|w| w[1] - w[0]).collect();
    let difference_spread = (diffs.len() >= 2).then(|| {
        let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
        let (lo, hi) = diffs
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        (hi - lo) / mean.abs()
    });
    SweepTrend {
        ihd_rank_correlation: spearman(&x, &d),
        ihc_rank_correlation: spearman(&x, &c),
        ihd_strictly_increasing: d.windows(2).all(|w| w[1] > w[0]),
        ihc_strictly_decreasing: c.windows(2).all(|w| w[1] < w[0]),
        difference_spread,
    }
}

/// Ranks with ties averaged, 1-based.
fn ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && v[order[j + 1]] == v[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            out[o] = avg;
        }
        i = j + 1;
    }
    out
}

pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (ranks(a), ranks(b));
    let n = ra.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}
