use rayon::prelude::*;

use super::kernel::GaussianKernel;
use super::IlluminationMap;
use crate::image::{GrayImage, Raster};
use crate::scalar::Scalar;

/// Rows per parallel work item.
const ROW_BLOCK: usize = 16;

/// Separable Gaussian smoothing with clamp-to-edge boundaries: a horizontal
/// pass followed by a vertical pass with the same kernel.
///
/// Every output pixel is a dot product accumulated in kernel order, so the
/// result does not depend on how rows are split across threads.
pub fn blur<T: Scalar>(image: &GrayImage<T>, kernel: &GaussianKernel<T>) -> IlluminationMap<T> {
    let (w, h) = (image.width(), image.height());
    let src = image.pixels();
    let weights = kernel.weights();
    let r = kernel.radius();

    let mut horiz = vec![T::zero(); w * h];
    horiz
        .par_chunks_mut(w * ROW_BLOCK)
        .enumerate()
        .for_each(|(block, out)| {
            let mut padded = vec![T::zero(); w + 2 * r];
            for (i, out_row) in out.chunks_mut(w).enumerate() {
                let y = block * ROW_BLOCK + i;
                let row = &src[y * w..(y + 1) * w];
                pad_replicate(row, r, &mut padded);
                for (x, o) in out_row.iter_mut().enumerate() {
                    *o = dot(weights, &padded[x..x + weights.len()]);
                }
            }
        });

    let (lo, hi) = src
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v)));

    let mut data = vec![T::zero(); w * h];
    data.par_chunks_mut(w * ROW_BLOCK)
        .enumerate()
        .for_each(|(block, out)| {
            for (i, out_row) in out.chunks_mut(w).enumerate() {
                let y = (block * ROW_BLOCK + i) as i64;
                for (k, &wk) in weights.iter().enumerate() {
                    let sy = (y + k as i64 - r as i64).clamp(0, h as i64 - 1) as usize;
                    let in_row = &horiz[sy * w..(sy + 1) * w];
                    for (o, &v) in out_row.iter_mut().zip(in_row) {
                        *o = *o + wk * v;
                    }
                }
                // Renormalized weights can overshoot by an ulp or so.
                for o in out_row.iter_mut() {
                    *o = o.max(lo).min(hi);
                }
            }
        });

    IlluminationMap::from_image(GrayImage::from_raw_unchecked(w, h, data))
}

fn pad_replicate<T: Scalar>(row: &[T], r: usize, padded: &mut [T]) {
    let first = row[0];
    let last = row[row.len() - 1];
    padded[..r].fill(first);
    padded[r..r + row.len()].copy_from_slice(row);
    padded[r + row.len()..].fill(last);
}

#[inline]
fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}
