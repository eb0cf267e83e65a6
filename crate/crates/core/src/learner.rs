//! Weighted empirical risk minimization over the norm ball `||w||_2 <= Lambda`.
//!
//! Full-batch projected subgradient descent from `w = 0` with steps
//! `eta_t = eta_0 / sqrt(t + 1)`. The step is taken on the weight-normalized
//! objective, so rescaling every example weight by the same constant leaves the
//! iterates unchanged. The best iterate seen is returned, which makes the
//! reported objective non-increasing across epochs.

use ndarray::{concatenate, Array1, Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypothesis::{sign, Hypothesis, HypothesisClassSpec};
use crate::loss::Loss;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepDecay {
    /// `eta_0 / sqrt(t + 1)`.
    InvSqrt,
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub surrogate: Loss,
    pub max_epochs: usize,
    pub step0: f64,
    pub decay: StepDecay,
    /// Stop once the objective changes by at most this much in one epoch.
    pub tolerance: f64,
    /// Projection radius; the class radius is used when unset.
    pub norm_bound: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            surrogate: Loss::Hinge,
            max_epochs: 2000,
            step0: 1.0,
            decay: StepDecay::InvSqrt,
            tolerance: 1e-7,
            norm_bound: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.surrogate.is_surrogate() {
            return Err(Error::InvalidParameter(
                "training needs a surrogate loss (hinge or logistic)".into(),
            ));
        }
        if !(self.step0 > 0.0 && self.step0.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "initial step must be positive, got {}",
                self.step0
            )));
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::InvalidParameter(
                "tolerance must be nonnegative".into(),
            ));
        }
        if let Some(l) = self.norm_bound {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "norm bound must be positive, got {l}"
                )));
            }
        }
        Ok(())
    }

    fn step(&self, t: usize) -> f64 {
        match self.decay {
            StepDecay::InvSqrt => self.step0 / ((t + 1) as f64).sqrt(),
            StepDecay::Constant => self.step0,
        }
    }
}

/// Examples with `+1` / `-1` targets and nonnegative weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSample {
    features: Array2<f64>,
    targets: Array1<f64>,
    weights: Array1<f64>,
}

impl WeightedSample {
    pub fn new(features: Array2<f64>, targets: Array1<f64>, weights: Array1<f64>) -> Result<Self> {
        let n = features.nrows();
        if n == 0 {
            return Err(Error::Empty("weighted sample has no rows".into()));
        }
        if targets.len() != n || weights.len() != n {
            return Err(Error::Shape(format!(
                "{} rows, {} targets, {} weights",
                n,
                targets.len(),
                weights.len()
            )));
        }
        if let Some((row, &value)) = targets
            .iter()
            .enumerate()
            .find(|(_, &y)| y != 1.0 && y != -1.0)
        {
            return Err(Error::InvalidLabel { row, value });
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::WeightScheme(
                "weights must be finite and nonnegative".into(),
            ));
        }
        if !weights.iter().any(|&w| w > 0.0) {
            return Err(Error::WeightScheme(
                "at least one weight must be positive".into(),
            ));
        }
        for ((row, col), v) in features.indexed_iter() {
            if !v.is_finite() {
                return Err(Error::NonFinite { row, col });
            }
        }
        Ok(Self {
            features,
            targets,
            weights,
        })
    }

    /// Every example weighted `1/n`.
    pub fn uniform(features: Array2<f64>, targets: Array1<f64>) -> Result<Self> {
        let n = features.nrows().max(1);
        let weights = Array1::from_elem(features.nrows(), 1.0 / n as f64);
        Self::new(features, targets, weights)
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn targets(&self) -> &Array1<f64> {
        &self.targets
    }

    pub fn weights(&self) -> &Array1<f64> {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Rows of `self` followed by rows of `other`, weights kept as-is.
    pub fn concat(&self, other: &WeightedSample) -> Result<WeightedSample> {
        if self.features.ncols() != other.features.ncols() {
            return Err(Error::Shape(
                "samples have different input dimensions".into(),
            ));
        }
        Self::new(
            concatenate(Axis(0), &[self.features.view(), other.features.view()])
                .expect("columns checked"),
            concatenate(Axis(0), &[self.targets.view(), other.targets.view()]).expect("1-d"),
            concatenate(Axis(0), &[self.weights.view(), other.weights.view()]).expect("1-d"),
        )
    }

    /// Same sample with rows reordered by `perm`.
    pub fn permuted(&self, perm: &[usize]) -> Result<WeightedSample> {
        Self::new(
            self.features.select(Axis(0), perm),
            self.targets.select(Axis(0), perm),
            self.weights.select(Axis(0), perm),
        )
    }

    pub fn with_weights(&self, weights: Array1<f64>) -> Result<WeightedSample> {
        Self::new(self.features.clone(), self.targets.clone(), weights)
    }

    fn has_uniform_weights(&self) -> bool {
        let w = 1.0 / self.len() as f64;
        self.weights.iter().all(|&v| v == w)
    }
}

/// `sum_i w_i l(h(x_i), y_i)`.
pub fn weighted_objective(h: &Hypothesis, sample: &WeightedSample, loss: Loss) -> Result<f64> {
    let scores = h.scores(&sample.features)?;
    Ok(scores
        .iter()
        .zip(sample.targets.iter())
        .zip(sample.weights.iter())
        .map(|((&s, &y), &w)| w * loss.eval(s, y))
        .sum())
}

/// The cost-sensitive objective
/// `J(h) = (1/n_S) sum_S l(h(x), y~) + (1/n_T) sum_T l(h(x), y~)`
/// on pseudo-labeled samples built with uniform weights.
pub fn cost_sensitive_objective(
    h: &Hypothesis,
    pseudo_source: &WeightedSample,
    pseudo_target: &WeightedSample,
    loss: Loss,
) -> Result<f64> {
    for (name, s) in [("source", pseudo_source), ("target", pseudo_target)] {
        if !s.has_uniform_weights() {
            return Err(Error::WeightScheme(format!(
                "pseudo-labeled {name} sample must weight every example 1/n"
            )));
        }
    }
    let term = |s: &WeightedSample| -> Result<f64> {
        let scores = h.scores(&s.features)?;
        let total: f64 = scores
            .iter()
            .zip(s.targets.iter())
            .map(|(&sc, &y)| loss.eval(sc, y))
            .sum();
        Ok(total / s.len() as f64)
    };
    Ok(term(pseudo_source)? + term(pseudo_target)?)
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub hypothesis: Hypothesis,
    /// Weighted surrogate objective at the returned hypothesis.
    pub objective: f64,
    /// Objective at `w = 0`.
    pub initial_objective: f64,
    pub epochs: usize,
    pub converged: bool,
    /// Best objective after each epoch.
    pub trace: Vec<f64>,
}

/// Train and return the hypothesis only.
pub fn train(
    sample: &WeightedSample,
    class: &HypothesisClassSpec,
    cfg: &TrainConfig,
) -> Result<Hypothesis> {
    Ok(train_detailed(sample, class, cfg)?.hypothesis)
}

pub fn train_detailed(
    sample: &WeightedSample,
    class: &HypothesisClassSpec,
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    train_from(sample, class, cfg, None)
}

/// [`train_detailed`] started from `init` (projected onto the ball) instead of `w = 0`.
pub fn train_from(
    sample: &WeightedSample,
    class: &HypothesisClassSpec,
    cfg: &TrainConfig,
    init: Option<&Hypothesis>,
) -> Result<TrainOutcome> {
    Ok(train_core(sample, class, cfg, init, None)?.0)
}

/// [`train_from`] that also returns the iterate with the smallest weighted 0-1
/// error `sum_i c_i [sign h(x_i) != y_i]` under `costs`, one per row, and that error.
pub fn train_tracking_zero_one(
    sample: &WeightedSample,
    class: &HypothesisClassSpec,
    cfg: &TrainConfig,
    init: Option<&Hypothesis>,
    costs: &Array1<f64>,
) -> Result<(TrainOutcome, Hypothesis, f64)> {
    if costs.len() != sample.len() {
        return Err(Error::Shape(format!(
            "{} rows but {} zero-one costs",
            sample.len(),
            costs.len()
        )));
    }
    let (out, tracked) = train_core(sample, class, cfg, init, Some(costs))?;
    let (err, w) = tracked.expect("tracking was requested");
    let h = Hypothesis::new(w, *class.basis())?;
    Ok((out, h, err))
}

/// Lowest weighted 0-1 error seen along the path, with its weights.
type Tracked = (f64, Array1<f64>);

fn train_core(
    sample: &WeightedSample,
    class: &HypothesisClassSpec,
    cfg: &TrainConfig,
    init: Option<&Hypothesis>,
    costs: Option<&Array1<f64>>,
) -> Result<(TrainOutcome, Option<Tracked>)> {
    cfg.validate()?;
    let basis = *class.basis();
    if let Some(h) = init {
        if h.basis() != &basis {
            return Err(Error::Shape(
                "initial hypothesis uses a different basis".into(),
            ));
        }
    }
    let phi = basis.design(&sample.features)?;
    let radius = cfg.norm_bound.unwrap_or(class.norm_bound());
    let total: f64 = sample.weights.sum();
    let omega = &sample.weights / total;
    let y = &sample.targets;
    let loss = cfg.surrogate;

    // Row-major copy of the transposed design keeps the gradient product contiguous.
    let phi_t = phi.t().as_standard_layout().into_owned();

    let mut w = match init {
        Some(h) => h.weights().clone(),
        None => Array1::<f64>::zeros(basis.output_dim),
    };
    let norm = w.dot(&w).sqrt();
    if norm > radius {
        w *= radius / norm;
    }
    let mut scores = phi.dot(&w);
    let mut coef = Array1::<f64>::zeros(sample.len());
    // Objective at the current scores, with the next gradient coefficients.
    let evaluate = |scores: &Array1<f64>, coef: &mut Array1<f64>| -> f64 {
        let mut f = 0.0;
        for (((c, &s), &t), &wi) in coef.iter_mut().zip(scores).zip(y).zip(&omega) {
            let (l, d) = loss.eval_with_derivative(s, t);
            f += wi * l;
            *c = wi * d;
        }
        f
    };
    let zero_one = |scores: &Array1<f64>, c: &Array1<f64>| -> f64 {
        scores
            .iter()
            .zip(y)
            .zip(c)
            .filter(|((&s, &t), _)| sign(s) != t)
            .map(|(_, &ci)| ci)
            .sum()
    };
    let mut tracked = costs.map(|c| (zero_one(&scores, c), w.clone()));
    let initial = evaluate(&scores, &mut coef);
    let mut best = initial;
    let mut best_w = w.clone();
    let mut prev = initial;
    let mut trace = Vec::with_capacity(cfg.max_epochs.min(4096));
    let mut converged = false;
    let mut epochs = 0;

    for t in 0..cfg.max_epochs {
        let grad = phi_t.dot(&coef);
        if grad.iter().all(|&g| g == 0.0) {
            converged = true;
            break;
        }
        w.scaled_add(-cfg.step(t), &grad);
        let norm = w.dot(&w).sqrt();
        epochs = t + 1;
        if !norm.is_finite() {
            return Err(Error::Divergence { epoch: epochs });
        }
        if norm > radius {
            w *= radius / norm;
        }
        scores = phi.dot(&w);
        let f = evaluate(&scores, &mut coef);
        if !f.is_finite() {
            return Err(Error::Divergence { epoch: epochs });
        }
        if let (Some((best01, best01_w)), Some(c)) = (tracked.as_mut(), costs) {
            let e = zero_one(&scores, c);
            if e < *best01 {
                *best01 = e;
                best01_w.assign(&w);
            }
        }
        if f < best {
            best = f;
            best_w.assign(&w);
        }
        trace.push(best * total);
        if (f - prev).abs() <= cfg.tolerance {
            converged = true;
            break;
        }
        prev = f;
    }

    let outcome = TrainOutcome {
        hypothesis: Hypothesis::new(best_w, basis)?,
        objective: best * total,
        initial_objective: initial * total,
        epochs,
        converged,
        trace,
    };
    Ok((outcome, tracked))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypothesis::{BasisKind, BasisSpec};
    use crate::loss::{empirical_risk, Reference};
    use ndarray::array;

    fn affine_class(dim: usize, bound: f64) -> HypothesisClassSpec {
        HypothesisClassSpec::new(
            BasisSpec::new(BasisKind::Affine, dim, 100.0).unwrap(),
            bound,
        )
        .unwrap()
    }

    #[test]
    fn separable_pair_is_learned() {
        let x = array![[-1.0], [1.0]];
        let y = array![-1.0, 1.0];
        let sample = WeightedSample::uniform(x.clone(), y.clone()).unwrap();
        let h = train(&sample, &affine_class(1, 10.0), &TrainConfig::default()).unwrap();
        let r = empirical_risk(&h, &x, Reference::Labels(&y), Loss::ZeroOne).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn zero_weight_is_inert() {
        let class = affine_class(1, 10.0);
        let cfg = TrainConfig::default();
        let with_dead =
            WeightedSample::new(array![[3.0], [1.0]], array![-1.0, 1.0], array![0.0, 1.0]).unwrap();
        let alone = WeightedSample::new(array![[1.0]], array![1.0], array![1.0]).unwrap();
        let a = train(&with_dead, &class, &cfg).unwrap();
        let b = train(&alone, &class, &cfg).unwrap();
        assert_eq!(a.weights(), b.weights());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            WeightedSample::new(array![[1.0]], array![1.0], array![0.0]),
            Err(Error::WeightScheme(_))
        ));
        assert!(matches!(
            WeightedSample::new(Array2::zeros((0, 1)), array![], array![]),
            Err(Error::Empty(_))
        ));
        let sample = WeightedSample::uniform(array![[1.0]], array![1.0]).unwrap();
        let cfg = TrainConfig {
            surrogate: Loss::ZeroOne,
            ..TrainConfig::default()
        };
        assert!(train(&sample, &affine_class(1, 1.0), &cfg).is_err());
        let cfg = TrainConfig {
            step0: 0.0,
            ..TrainConfig::default()
        };
        assert!(train(&sample, &affine_class(1, 1.0), &cfg).is_err());
    }

    #[test]
    fn huge_steps_with_logistic_stay_finite_or_report_divergence() {
        let sample = WeightedSample::uniform(array![[1e300], [-1e300]], array![1.0, -1.0]).unwrap();
        let cfg = TrainConfig {
            surrogate: Loss::Logistic,
            step0: 1e300,
            norm_bound: Some(1e300),
            ..TrainConfig::default()
        };
        match train_detailed(&sample, &affine_class(1, 1e300), &cfg) {
            Ok(out) => assert!(out.objective.is_finite()),
            Err(e) => assert!(matches!(e, Error::Divergence { .. })),
        }
    }

    #[test]
    fn projection_and_monotone_trace() {
        let x = array![
            [2.0, 1.0],
            [-1.0, -2.0],
            [0.5, -0.5],
            [1.0, 3.0],
            [-2.0, 0.5]
        ];
        let y = array![1.0, -1.0, -1.0, 1.0, 1.0];
        let sample = WeightedSample::uniform(x, y).unwrap();
        let class = affine_class(2, 0.3);
        let out = train_detailed(&sample, &class, &TrainConfig::default()).unwrap();
        assert!(out.hypothesis.norm() <= 0.3 + 1e-12);
        assert!(out.objective <= out.initial_objective);
        assert!(out.trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn cost_sensitive_rejects_non_uniform() {
        let s =
            WeightedSample::new(array![[1.0], [2.0]], array![1.0, 1.0], array![0.3, 0.7]).unwrap();
        let t = WeightedSample::uniform(array![[1.0]], array![-1.0]).unwrap();
        let h = Hypothesis::zeros(*affine_class(1, 1.0).basis());
        assert!(matches!(
            cost_sensitive_objective(&h, &s, &t, Loss::ZeroOne),
            Err(Error::WeightScheme(_))
        ));
    }
}
