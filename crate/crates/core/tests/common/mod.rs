#![allow(dead_code)]

use disckit::grid::threshold_hypothesis;
use disckit::{
    Array1, Array2, BasisKind, BasisSpec, Grid, HypothesisClassSpec, LabeledDataset,
    UnlabeledDataset,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub fn unl(v: &[f64]) -> UnlabeledDataset {
    UnlabeledDataset::new(Array2::from_shape_vec((v.len(), 1), v.to_vec()).unwrap()).unwrap()
}

pub fn lab(v: &[f64], y: &[f64]) -> LabeledDataset {
    LabeledDataset::new(
        Array2::from_shape_vec((v.len(), 1), v.to_vec()).unwrap(),
        Array1::from(y.to_vec()),
    )
    .unwrap()
}

pub fn affine_1d(bound: f64) -> BasisSpec {
    BasisSpec::new(BasisKind::Affine, 1, bound).unwrap()
}

/// `sign(x - t)` and its negation for every `t`.
pub fn explicit_thresholds(ts: &[f64], bound: f64) -> HypothesisClassSpec {
    let b = affine_1d(bound);
    let mut members = Vec::new();
    for &t in ts {
        let h = threshold_hypothesis(&Array1::from(vec![1.0]), t, &b).unwrap();
        members.push(h.negate());
        members.push(h);
    }
    HypothesisClassSpec::new(b, 1e6)
        .unwrap()
        .with_grid(Grid::Explicit(members))
        .unwrap()
}

/// Every threshold classifier over 1-D data bounded by `bound`.
pub fn threshold_class(bound: f64) -> HypothesisClassSpec {
    HypothesisClassSpec::new(affine_1d(bound), 1e6)
        .unwrap()
        .with_grid(Grid::thresholds_1d())
        .unwrap()
}

/// Distinct values on a 1/1000 lattice in (-5, 5), so no two points tie.
pub fn distinct_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut lattice: Vec<i32> = (-4999..5000).collect();
    lattice.shuffle(rng);
    lattice[..n]
        .iter()
        .map(|&k| f64::from(k) / 1000.0)
        .collect()
}

/// A seeded tie-free 1-D instance: labeled source, unlabeled target, disjoint points.
pub fn tie_free_instance(seed: u64, max_n: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_s = rng.gen_range(2..=max_n);
    let n_t = rng.gen_range(2..=max_n);
    let pts = distinct_points(&mut rng, n_s + n_t);
    let cut: f64 = rng.gen_range(-2.0..2.0);
    let (s, t) = pts.split_at(n_s);
    let y: Vec<f64> = s
        .iter()
        .map(|&x| {
            let clean = if x >= cut { 1.0 } else { -1.0 };
            if rng.gen_bool(0.1) {
                -clean
            } else {
                clean
            }
        })
        .collect();
    (s.to_vec(), y, t.to_vec())
}

/// Plain-float labeling of `sign(o (x - t))` with `sign(0) = +1`.
pub fn threshold_label(t: f64, o: f64, x: f64) -> f64 {
    if o * (x - t) >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Cuts that realize every threshold labeling of the pooled points.
pub fn all_cuts(points: &[f64]) -> Vec<f64> {
    let mut p = points.to_vec();
    p.sort_by(f64::total_cmp);
    p.dedup();
    let mut cuts = vec![p[0] - 1.0];
    cuts.extend(p.windows(2).map(|w| (w[0] + w[1]) / 2.0));
    cuts.push(p[p.len() - 1] + 1.0);
    cuts
}

pub fn rate(errors: usize, n: usize) -> f64 {
    errors as f64 / n as f64
}

/// A seeded 1-D shift instance: source `N(0, 1)` labeled by a threshold with 5%
/// label noise, target `N(mu, sd)` with a random shift. Points are rounded to
/// 1/1000 and kept distinct across both samples.
pub fn shift_instance(seed: u64, max_n: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_s = rng.gen_range(10..=max_n);
    let n_t = rng.gen_range(10..=max_n);
    let cut: f64 = rng.gen_range(-0.5..0.5);
    let mu: f64 = rng.gen_range(-2.0..2.0);
    let sd: f64 = rng.gen_range(0.5..1.5);
    let mut seen = std::collections::HashSet::new();
    let mut draw = |dist: Normal<f64>, n: usize, rng: &mut ChaCha8Rng| {
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let v = (dist.sample(rng) * 1000.0).round();
            if seen.insert(v as i64) {
                out.push(v / 1000.0);
            }
        }
        out
    };
    let s = draw(Normal::new(0.0, 1.0).unwrap(), n_s, &mut rng);
    let t = draw(Normal::new(mu, sd).unwrap(), n_t, &mut rng);
    let y = s
        .iter()
        .map(|&x| {
            let clean = if x >= cut { 1.0 } else { -1.0 };
            if rng.gen_bool(0.05) {
                -clean
            } else {
                clean
            }
        })
        .collect();
    (s, y, t)
}
