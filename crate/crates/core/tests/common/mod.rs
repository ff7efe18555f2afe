//! Reference implementations shared by the integration tests. They follow the
//! textbook definitions directly and share no code with the library paths
//! they check.

#![allow(dead_code, clippy::needless_range_loop)]

use ihc::{GrayImage, Raster};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_image(rng: &mut ChaCha8Rng, w: usize, h: usize) -> GrayImage<f64> {
    let data = (0..w * h).map(|_| rng.gen_range(0.0..=255.0)).collect();
    GrayImage::new(w, h, data).unwrap()
}

/// Normalized 1-D Gaussian weights, radius ceil(3 sigma).
pub fn reference_weights(sigma: f64) -> Vec<f64> {
    let r = (3.0 * sigma).ceil() as i64;
    let raw: Vec<f64> = (-r..=r)
        .map(|d| (-((d * d) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// Dense 2-D convolution with the outer-product kernel and replicate padding.
pub fn dense_blur(img: &GrayImage<f64>, sigma: f64) -> Vec<f64> {
    let w1 = reference_weights(sigma);
    let r = (w1.len() / 2) as i64;
    let (w, h) = (img.width() as i64, img.height() as i64);
    let mut out = vec![0.0; (w * h) as usize];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for dy in -r..=r {
                for dx in -r..=r {
                    let sy = (y + dy).clamp(0, h - 1) as usize;
                    let sx = (x + dx).clamp(0, w - 1) as usize;
                    acc += w1[(dy + r) as usize] * w1[(dx + r) as usize] * img.get(sx, sy);
                }
            }
            out[(y * w + x) as usize] = acc;
        }
    }
    out
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Scores recomputed with plain loops over frames, bins and pixels.
pub struct NaiveScores {
    pub mean: Vec<f64>,
    pub per_frame: Vec<f64>,
    pub ihd: f64,
    pub ihc: f64,
}

/// `maps[i]` holds the illumination values of frame `i`.
pub fn naive_scores(maps: &[Vec<f64>]) -> NaiveScores {
    let k = maps.len();
    let s = maps[0].len();
    let bin_of = |v: f64| -> usize {
        let b = (v + 0.5).floor();
        if b < 0.0 {
            0
        } else if b > 255.0 {
            255
        } else {
            b as usize
        }
    };
    let mut g = vec![vec![0.0f64; 256]; k];
    for i in 0..k {
        for j in 0..256 {
            for &v in &maps[i] {
                if bin_of(v) == j {
                    g[i][j] += 1.0;
                }
            }
        }
    }
    let mut mean = vec![0.0; 256];
    for j in 0..256 {
        for gi in &g {
            mean[j] += gi[j].abs();
        }
        mean[j] /= k as f64;
    }
    let mut per_frame = vec![0.0; k];
    let mut total = 0.0;
    for i in 0..k {
        for j in 0..256 {
            let d = (g[i][j] - mean[j]).abs();
            per_frame[i] += d;
            total += d;
        }
    }
    let ihd = total / (k * s) as f64;
    NaiveScores {
        mean,
        per_frame,
        ihd,
        ihc: 2.0 - ihd,
    }
}

/// IHD straight from histogram counts.
pub fn naive_ihd_from_counts(hists: &[Vec<u64>]) -> f64 {
    let k = hists.len();
    let s: u64 = hists[0].iter().sum();
    let mut total = 0.0;
    for i in 0..k {
        for j in 0..hists[i].len() {
            let m: f64 = hists.iter().map(|h| h[j] as f64).sum::<f64>() / k as f64;
            total += (hists[i][j] as f64 - m).abs();
        }
    }
    total / (k as f64 * s as f64)
}
