mod common;

use common::{naive_ihd_from_counts, naive_scores, random_image, rng};
use ihc::{
    estimate_illumination, evaluate_sequence, frame_discrepancy, histogram_of, ihc, ihd, mean_histogram, GrayImage,
    IlluminationHistogram, MeanHistogram, Raster, BIN_COUNT,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn from_vec(counts: &[u64]) -> IlluminationHistogram {
    let mut bins = [0u64; BIN_COUNT];
    bins.copy_from_slice(counts);
    IlluminationHistogram::from_counts(bins).unwrap()
}

fn histograms_strategy() -> impl Strategy<Value = Vec<Vec<u64>>> {
    // Every histogram distributes the same S pixels over 256 bins.
    (1usize..8, 1u64..400).prop_flat_map(|(k, s)| {
        prop::collection::vec(
            prop::collection::vec(0u64..1000, BIN_COUNT).prop_map(move |weights| {
                let total: u64 = weights.iter().sum::<u64>().max(1);
                let mut bins: Vec<u64> = weights.iter().map(|w| w * s / total).collect();
                let placed: u64 = bins.iter().sum();
                bins[0] += s - placed;
                bins
            }),
            k,
        )
    })
}

#[test]
fn pipeline_matches_naive_reference() {
    let mut r = rng(42);
    for _ in 0..10 {
        let k = r.gen_range(1..=8);
        let sigma = r.gen_range(0.5..5.0);
        let frames: Vec<_> = (0..k).map(|_| random_image(&mut r, 16, 16)).collect();
        let report = evaluate_sequence(&frames, sigma).unwrap();
        let maps: Vec<Vec<f64>> = frames
            .iter()
            .map(|f| estimate_illumination(f, sigma).unwrap().pixels().to_vec())
            .collect();
        let naive = naive_scores(&maps);
        assert!((report.ihd - naive.ihd).abs() < 1e-9);
        assert!((report.ihc - naive.ihc).abs() < 1e-9);
        for (a, b) in report.per_frame_discrepancy.iter().zip(&naive.per_frame) {
            assert!((a - b).abs() < 1e-9);
        }
        let hs: Vec<_> = maps
            .iter()
            .map(|m| histogram_of(&GrayImage::new(16, 16, m.clone()).unwrap()).unwrap())
            .collect();
        let mean: MeanHistogram<f64> = mean_histogram(&hs).unwrap();
        for (a, b) in mean.bins().iter().zip(&naive.mean) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}

#[test]
fn pixel_shuffle_leaves_histogram_unchanged() {
    let mut r = rng(9);
    let img = random_image(&mut r, 20, 15);
    let mut shuffled = img.pixels().to_vec();
    shuffled.shuffle(&mut r);
    let other = GrayImage::new(20, 15, shuffled).unwrap();
    assert_eq!(histogram_of(&img).unwrap(), histogram_of(&other).unwrap());
}

#[test]
fn frame_order_does_not_matter() {
    let mut r = rng(10);
    let frames: Vec<_> = (0..6).map(|_| random_image(&mut r, 12, 12)).collect();
    let base = evaluate_sequence(&frames, 1.0).unwrap();
    let mut order: Vec<usize> = (0..6).collect();
    order.shuffle(&mut r);
    let permuted: Vec<_> = order.iter().map(|&i| frames[i].clone()).collect();
    let p = evaluate_sequence(&permuted, 1.0).unwrap();
    assert_eq!(base.ihd, p.ihd);
    assert_eq!(base.ihc, p.ihc);
    for (pos, &i) in order.iter().enumerate() {
        assert_eq!(p.per_frame_discrepancy[pos], base.per_frame_discrepancy[i]);
    }
}

#[test]
fn identical_frames_are_perfectly_consistent() {
    let mut r = rng(1);
    let f = random_image(&mut r, 10, 10);
    let report = evaluate_sequence(&vec![f; 5], 2.0).unwrap();
    assert_eq!(report.ihd, 0.0);
    assert_eq!(report.ihc, 2.0);
    assert!(report.per_frame_discrepancy.iter().all(|&d| d == 0.0));
    assert_eq!(report.frame_ids, vec!["0", "1", "2", "3", "4"]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn bounds_and_oracle(hs in histograms_strategy()) {
        let h: Vec<_> = hs.iter().map(|c| from_vec(c)).collect();
        let d: f64 = ihd(&h).unwrap();
        let c: f64 = ihc(&h).unwrap();
        prop_assert!((0.0..2.0).contains(&d));
        prop_assert_eq!(c, 2.0 - d);
        prop_assert!((d - naive_ihd_from_counts(&hs)).abs() < 1e-12);
        let m: MeanHistogram<f64> = mean_histogram(&h).unwrap();
        let s = h[0].pixel_count() as f64;
        prop_assert!((m.bins().iter().sum::<f64>() - s).abs() < 1e-6);
        for hist in &h {
            prop_assert!(frame_discrepancy(hist, &m).unwrap() <= 2.0 * s + 1e-9);
        }
    }

    #[test]
    fn resolution_invariance(hs in histograms_strategy(), factor in 1u64..50) {
        let h: Vec<_> = hs.iter().map(|c| from_vec(c)).collect();
        let scaled: Vec<_> = hs
            .iter()
            .map(|c| from_vec(&c.iter().map(|v| v * factor).collect::<Vec<_>>()))
            .collect();
        let (a, b): (f64, f64) = (ihd(&h).unwrap(), ihd(&scaled).unwrap());
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn duplication_contraction(hs in histograms_strategy()) {
        let h: Vec<_> = hs.iter().map(|c| from_vec(c)).collect();
        let doubled: Vec<_> = h.iter().chain(h.iter()).cloned().collect();
        let (a, b): (f64, f64) = (ihd(&h).unwrap(), ihd(&doubled).unwrap());
        prop_assert!((a - b).abs() < 1e-12);
        let (m1, m2): (MeanHistogram<f64>, MeanHistogram<f64>) =
            (mean_histogram(&h).unwrap(), mean_histogram(&doubled).unwrap());
        for (x, y) in m1.bins().iter().zip(m2.bins()) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn histogram_partitions_pixels(data in prop::collection::vec(0.0f64..=255.0, 1..200)) {
        let n = data.len();
        let h = histogram_of(&GrayImage::new(n, 1, data).unwrap()).unwrap();
        prop_assert_eq!(h.bins().iter().sum::<u64>(), n as u64);
        prop_assert_eq!(h.pixel_count(), n as u64);
    }
}
