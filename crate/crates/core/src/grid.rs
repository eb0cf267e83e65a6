//! Finite hypothesis grids for the enumeration oracles.
//!
//! Two shapes are supported:
//!
//! - [`Grid::Explicit`]: a hand-built list of hypotheses, closed under negation.
//! - [`Grid::Sweep`]: affine hypotheses `sign(d . x - t)` for a fixed set of
//!   directions `d`, crossed with every threshold `t` that changes the labeling
//!   of the pooled data (midpoints of consecutive distinct projections, plus one
//!   sentinel below the minimum and one above the maximum), in both
//!   orientations. The 0-1 risk of a threshold classifier is piecewise constant
//!   between data points, so for 1-D inputs and directions `{+1}` the sweep is
//!   exact over the whole threshold class.
//!
//! Sweeps are evaluated incrementally by [`sweep_direction`] and never
//! materialized unless an oracle needs explicit members (see
//! [`Grid::materialize`]).

use std::collections::HashSet;
use std::f64::consts::PI;

use ndarray::{Array1, Array2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::hypothesis::{BasisKind, BasisSpec, Hypothesis};

/// Default number of directions for the 2-D net.
pub const DEFAULT_DIRECTIONS_2D: usize = 720;

#[derive(Debug, Clone)]
pub enum Grid {
    Explicit(Vec<Hypothesis>),
    Sweep(SweepGrid),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    directions: Vec<Array1<f64>>,
    /// Keep at most this many thresholds per direction when materializing.
    max_thresholds: Option<usize>,
}

impl SweepGrid {
    pub fn new(directions: Vec<Array1<f64>>) -> Result<Self> {
        let dim = directions
            .first()
            .map(|d| d.len())
            .ok_or_else(|| Error::Empty("sweep grid needs at least one direction".into()))?;
        if dim == 0 || directions.iter().any(|d| d.len() != dim) {
            return Err(Error::Shape(
                "sweep directions must share a nonzero dimension".into(),
            ));
        }
        if directions
            .iter()
            .any(|d| d.iter().any(|v| !v.is_finite()) || d.iter().all(|&v| v == 0.0))
        {
            return Err(Error::InvalidParameter(
                "sweep directions must be finite and nonzero".into(),
            ));
        }
        Ok(Self {
            directions,
            max_thresholds: None,
        })
    }

    /// Canonical exact grid for 1-D inputs: every threshold classifier.
    pub fn thresholds_1d() -> Self {
        Self {
            directions: vec![Array1::from_elem(1, 1.0)],
            max_thresholds: None,
        }
    }

    /// Direction net: evenly spaced angles in 2-D, a Fibonacci lattice in 3-D,
    /// and seeded Gaussian directions (with their negations) above that.
    pub fn direction_net(dim: usize, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidParameter("direction count is zero".into()));
        }
        let directions = match dim {
            0 => return Err(Error::InvalidParameter("dimension is zero".into())),
            1 => vec![Array1::from_elem(1, 1.0)],
            2 => (0..count)
                .map(|k| {
                    let a = 2.0 * PI * k as f64 / count as f64;
                    Array1::from(vec![a.cos(), a.sin()])
                })
                .collect(),
            3 => {
                let golden = PI * (3.0 - 5f64.sqrt());
                (0..count)
                    .map(|k| {
                        let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
                        let r = (1.0 - z * z).sqrt();
                        let a = golden * k as f64;
                        Array1::from(vec![r * a.cos(), r * a.sin(), z])
                    })
                    .collect()
            }
            _ => {
                let mut rng = ChaCha8Rng::seed_from_u64(0);
                let mut out = Vec::with_capacity(count);
                while out.len() < count {
                    let v: Array1<f64> =
                        (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
                    let n = v.dot(&v).sqrt();
                    if n > 0.0 {
                        let u = v / n;
                        out.push(u.mapv(|x| -x));
                        out.insert(out.len() - 1, u);
                    }
                }
                out.truncate(count);
                out
            }
        };
        Self::new(directions)
    }

    pub fn with_max_thresholds(mut self, max: usize) -> Self {
        self.max_thresholds = Some(max.max(2));
        self
    }

    pub fn directions(&self) -> &[Array1<f64>] {
        &self.directions
    }

    pub fn dim(&self) -> usize {
        self.directions[0].len()
    }
}

impl Grid {
    pub fn thresholds_1d() -> Self {
        Grid::Sweep(SweepGrid::thresholds_1d())
    }

    pub(crate) fn check_against(&self, basis: &BasisSpec, norm_bound: f64) -> Result<()> {
        match self {
            Grid::Explicit(members) => {
                if members.is_empty() {
                    return Err(Error::Empty("grid has no members".into()));
                }
                for h in members {
                    if h.basis() != basis {
                        return Err(Error::Shape("grid member uses a different basis".into()));
                    }
                    if h.norm() > norm_bound {
                        return Err(Error::NormBound {
                            norm: h.norm(),
                            bound: norm_bound,
                        });
                    }
                }
                check_symmetric(members)
            }
            Grid::Sweep(sweep) => {
                if basis.kind != BasisKind::Affine || basis.input_dim != sweep.dim() {
                    return Err(Error::Shape(format!(
                        "sweep grids need an affine basis over {} inputs",
                        sweep.dim()
                    )));
                }
                // Threshold magnitudes depend on the data; members are
                // rescaled onto the ball on materialization.
                Ok(())
            }
        }
    }

    /// Explicit members. Sweeps are expanded against the pooled samples in
    /// order: direction, threshold ascending, `h` then `-h`.
    /// Sweep members whose weight norm exceeds `norm_bound` are rescaled onto
    /// the ball, which leaves their labels unchanged.
    pub fn materialize(
        &self,
        basis: &BasisSpec,
        norm_bound: f64,
        pooled: &[&Array2<f64>],
    ) -> Result<Vec<Hypothesis>> {
        match self {
            Grid::Explicit(members) => Ok(members.clone()),
            Grid::Sweep(sweep) => {
                let mut out = Vec::new();
                for d in &sweep.directions {
                    let proj = project(d, pooled);
                    let mut ts = thresholds(&proj);
                    if let Some(max) = sweep.max_thresholds {
                        ts = thin(ts, max);
                    }
                    for t in ts {
                        let mut h = threshold_hypothesis(d, t, basis)?;
                        if h.norm() > norm_bound {
                            h = h.scaled(norm_bound / h.norm());
                        }
                        let neg = h.negate();
                        out.push(h);
                        out.push(neg);
                    }
                }
                Ok(out)
            }
        }
    }

    /// Number of members once materialized against `pooled`.
    pub fn member_count(&self, pooled: &[&Array2<f64>]) -> usize {
        match self {
            Grid::Explicit(m) => m.len(),
            Grid::Sweep(sweep) => sweep
                .directions
                .iter()
                .map(|d| {
                    let n = thresholds(&project(d, pooled)).len();
                    2 * sweep.max_thresholds.map_or(n, |m| n.min(m))
                })
                .sum(),
        }
    }
}

fn bits(h: &Hypothesis) -> Vec<u64> {
    // -0.0 and 0.0 are the same weight
    h.weights()
        .iter()
        .map(|&w| if w == 0.0 { 0u64 } else { w.to_bits() })
        .collect()
}

fn check_symmetric(members: &[Hypothesis]) -> Result<()> {
    let set: HashSet<Vec<u64>> = members.iter().map(bits).collect();
    for (index, h) in members.iter().enumerate() {
        if !set.contains(&bits(&h.negate())) {
            return Err(Error::AsymmetricGrid { index });
        }
    }
    Ok(())
}

/// `sign(d . x - t)` as an affine hypothesis.
pub fn threshold_hypothesis(
    direction: &Array1<f64>,
    t: f64,
    basis: &BasisSpec,
) -> Result<Hypothesis> {
    let mut w = Vec::with_capacity(direction.len() + 1);
    w.extend(direction.iter().copied());
    w.push(if t == 0.0 { 0.0 } else { -t });
    Hypothesis::new(Array1::from(w), *basis)
}

pub(crate) fn project(d: &Array1<f64>, pooled: &[&Array2<f64>]) -> Vec<f64> {
    let mut out = Vec::with_capacity(pooled.iter().map(|x| x.nrows()).sum());
    for x in pooled {
        out.extend(x.dot(d).iter().copied());
    }
    out
}

fn sentinel_gap(v: f64) -> f64 {
    v.abs().max(1.0)
}

fn midpoint(a: f64, b: f64) -> f64 {
    a + (b - a) / 2.0
}

/// Every labeling-changing threshold along one projection, ascending.
pub(crate) fn thresholds(proj: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = proj.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    let mut out = Vec::with_capacity(v.len() + 1);
    if let (Some(&lo), Some(&hi)) = (v.first(), v.last()) {
        out.push(lo - sentinel_gap(lo));
        out.extend(v.windows(2).map(|w| midpoint(w[0], w[1])));
        out.push(hi + sentinel_gap(hi));
    }
    out
}

/// Keep `max` evenly spaced entries, always including both ends.
fn thin(ts: Vec<f64>, max: usize) -> Vec<f64> {
    if ts.len() <= max {
        return ts;
    }
    let last = ts.len() - 1;
    (0..max).map(|k| ts[k * last / (max - 1)]).collect()
}

/// Step events of a threshold sweep along one projection.
pub(crate) enum SweepEvent {
    /// Item `i` moves from the `+1` side to the `-1` side.
    Cross(usize),
    /// Evaluate the classifier `sign(p - t)` for the current state.
    Threshold(f64),
}

/// Drive a sweep: starts with every item on the `+1` side (threshold below the
/// minimum), then crosses items in ascending projection order, emitting a
/// threshold after each group of equal projections.
pub(crate) fn sweep_direction(proj: &[f64], mut visit: impl FnMut(SweepEvent)) {
    if proj.is_empty() {
        return;
    }
    let mut order: Vec<usize> = (0..proj.len()).collect();
    order.sort_by(|&a, &b| proj[a].total_cmp(&proj[b]).then(a.cmp(&b)));
    let lo = proj[order[0]];
    visit(SweepEvent::Threshold(lo - sentinel_gap(lo)));
    let mut k = 0;
    while k < order.len() {
        let v = proj[order[k]];
        while k < order.len() && proj[order[k]] == v {
            visit(SweepEvent::Cross(order[k]));
            k += 1;
        }
        let t = if k < order.len() {
            midpoint(v, proj[order[k]])
        } else {
            v + sentinel_gap(v)
        };
        visit(SweepEvent::Threshold(t));
    }
}
