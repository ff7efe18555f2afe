//! Single-channel rasters and the conversion from 8-bit frames.

use crate::error::{Error, Result};
use crate::scalar::{max_intensity, Scalar};

/// Row-major 2-D grid of real values with known dimensions.
pub trait Raster<T: Scalar> {
    fn width(&self) -> usize;
    fn height(&self) -> usize;
    fn pixels(&self) -> &[T];

    fn pixel_count(&self) -> usize {
        self.width() * self.height()
    }

    fn get(&self, x: usize, y: usize) -> T {
        self.pixels()[y * self.width() + x]
    }
}

/// Scene intensities on the 0..=255 scale, one real per pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Scalar> GrayImage<T> {
    /// Validates dimensions, buffer length and the [0, 255] intensity range.
    pub fn new(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        check_dims(width, height, 1, data.len())?;
        let hi = max_intensity::<T>();
        if let Some((index, v)) = data
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v >= T::zero() && **v <= hi))
        {
            return Err(Error::IntensityOutOfRange {
                index,
                value: v.to_f64_lossy(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Builds an image from `f(x, y)`, clamping each value into [0, 255].
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        check_dims(width, height, 1, width * height)?;
        let hi = max_intensity::<T>();
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                let v = f(x, y);
                // NaN collapses to 0 so the range invariant cannot be broken here.
                data.push(if v.is_nan() { T::zero() } else { v.max(T::zero()).min(hi) });
            }
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn constant(width: usize, height: usize, value: T) -> Result<Self> {
        check_dims(width, height, 1, width * height)?;
        Self::new(width, height, vec![value; width * height])
    }

    /// Caller guarantees the invariants (dimensions checked, values in range).
    pub(crate) fn from_raw_unchecked(width: usize, height: usize, data: Vec<T>) -> Self {
        debug_assert_eq!(data.len(), width * height);
        Self {
            width,
            height,
            data,
        }
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    /// Rounds to the nearest 8-bit level for export.
    pub fn to_u8(&self) -> Vec<u8> {
        self.data
            .iter()
            .map(|v| v.round().to_u8().unwrap_or(if *v > T::zero() { 255 } else { 0 }))
            .collect()
    }
}

impl<T: Scalar> Raster<T> for GrayImage<T> {
    fn width(&self) -> usize {
        self.width
    }
    fn height(&self) -> usize {
        self.height
    }
    fn pixels(&self) -> &[T] {
        &self.data
    }
}

pub(crate) fn check_dims(width: usize, height: usize, channels: usize, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::EmptyImage { width, height });
    }
    let expected = width * height * channels;
    if len != expected {
        return Err(Error::BufferLength {
            width,
            height,
            channels,
            expected,
            actual: len,
        });
    }
    Ok(())
}

/// Interleaved 8-bit frame as it comes out of a decoder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelBuffer {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub samples: Vec<u8>,
}

impl PixelBuffer {
    pub fn gray(width: usize, height: usize, samples: Vec<u8>) -> Self {
        Self {
            width,
            height,
            channels: 1,
            samples,
        }
    }

    pub fn rgb(width: usize, height: usize, samples: Vec<u8>) -> Self {
        Self {
            width,
            height,
            channels: 3,
            samples,
        }
    }
}

const LUMA_R: f64 = 0.299;
const LUMA_G: f64 = 0.587;
const LUMA_B: f64 = 0.114;

/// Gray frames pass through; RGB frames map to BT.601 luma.
pub fn to_luminance<T: Scalar>(frame: &PixelBuffer) -> Result<GrayImage<T>> {
    let PixelBuffer {
        width,
        height,
        channels,
        ref samples,
    } = *frame;
    if channels != 1 && channels != 3 {
        return Err(Error::UnsupportedChannels(channels));
    }
    check_dims(width, height, channels, samples.len())?;
    let data: Vec<T> = match channels {
        1 => samples.iter().map(|&s| T::lit(f64::from(s))).collect(),
        _ => {
            let (wr, wg, wb) = (T::lit(LUMA_R), T::lit(LUMA_G), T::lit(LUMA_B));
            let hi = max_intensity::<T>();
            samples
                .chunks_exact(3)
                .map(|px| {
                    let v = wr * T::lit(f64::from(px[0]))
                        + wg * T::lit(f64::from(px[1]))
                        + wb * T::lit(f64::from(px[2]));
                    v.min(hi)
                })
                .collect()
        }
    };
    Ok(GrayImage::from_raw_unchecked(width, height, data))
}

/// Min-max rescale of any map onto [0, 255]; a constant map becomes mid-gray 128.
pub fn rescale_for_display<T: Scalar, R: Raster<T> + ?Sized>(map: &R) -> GrayImage<T> {
    let px = map.pixels();
    let (lo, hi) = px
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let top = max_intensity::<T>();
    let data = if hi > lo {
        let scale = top / (hi - lo);
        px.iter()
            .map(|&v| ((v - lo) * scale).max(T::zero()).min(top))
            .collect()
    } else {
        vec![T::lit(128.0); px.len()]
    };
    GrayImage::from_raw_unchecked(map.width(), map.height(), data)
}
