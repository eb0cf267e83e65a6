//! Losses and empirical risks.
//!
//! Reference hypotheses are always hardened to `sign(h'(x))` before a loss is
//! evaluated. The 0-1 loss compares `sign` of both arguments, so a zero score
//! counts as a `+1` prediction.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypothesis::{sign, Hypothesis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Loss {
    ZeroOne,
    Hinge,
    Logistic,
}

impl Loss {
    /// `l(score, reference)`.
    #[inline]
    pub fn eval(self, score: f64, reference: f64) -> f64 {
        match self {
            Loss::ZeroOne => {
                if sign(score) == sign(reference) {
                    0.0
                } else {
                    1.0
                }
            }
            Loss::Hinge => (1.0 - score * reference).max(0.0),
            Loss::Logistic => softplus(-score * reference),
        }
    }

    /// A subgradient of `l(., reference)` at `score`. At the hinge kink the
    /// zero branch is used.
    #[inline]
    pub fn derivative(self, score: f64, reference: f64) -> f64 {
        match self {
            Loss::ZeroOne => 0.0,
            Loss::Hinge => {
                if score * reference < 1.0 {
                    -reference
                } else {
                    0.0
                }
            }
            Loss::Logistic => -reference * sigmoid(-score * reference),
        }
    }

    /// `(eval, derivative)` in one pass, sharing the exponential.
    #[inline]
    pub fn eval_with_derivative(self, score: f64, reference: f64) -> (f64, f64) {
        match self {
            Loss::Logistic => {
                let z = -score * reference;
                if z > 0.0 {
                    let e = (-z).exp();
                    (z + e.ln_1p(), -reference / (1.0 + e))
                } else {
                    let e = z.exp();
                    (e.ln_1p(), -reference * (e / (1.0 + e)))
                }
            }
            _ => (
                self.eval(score, reference),
                self.derivative(score, reference),
            ),
        }
    }

    pub fn is_surrogate(self) -> bool {
        !matches!(self, Loss::ZeroOne)
    }

    pub fn name(self) -> &'static str {
        match self {
            Loss::ZeroOne => "zero_one",
            Loss::Hinge => "hinge",
            Loss::Logistic => "logistic",
        }
    }
}

impl std::str::FromStr for Loss {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero_one" | "01" => Ok(Loss::ZeroOne),
            "hinge" => Ok(Loss::Hinge),
            "logistic" => Ok(Loss::Logistic),
            other => Err(Error::InvalidParameter(format!("unknown loss `{other}`"))),
        }
    }
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// What the hypothesis is compared against.
#[derive(Debug, Clone, Copy)]
pub enum Reference<'a> {
    Labels(&'a Array1<f64>),
    Hypothesis(&'a Hypothesis),
    /// The same label for every row, e.g. `+1` in the d_H risks.
    Constant(f64),
}

impl Reference<'_> {
    /// Hardened `+1` / `-1` reference labels.
    pub fn resolve(&self, features: &Array2<f64>) -> Result<Array1<f64>> {
        match *self {
            Reference::Labels(y) => {
                if y.len() != features.nrows() {
                    return Err(Error::Shape(format!(
                        "{} rows but {} reference labels",
                        features.nrows(),
                        y.len()
                    )));
                }
                Ok(y.mapv(sign))
            }
            Reference::Hypothesis(h) => h.predict(features),
            Reference::Constant(c) => Ok(Array1::from_elem(features.nrows(), sign(c))),
        }
    }
}

/// `(1/n) sum_i l(h(x_i), ref_i)`.
pub fn empirical_risk(
    h: &Hypothesis,
    features: &Array2<f64>,
    reference: Reference<'_>,
    loss: Loss,
) -> Result<f64> {
    if features.nrows() == 0 {
        return Err(Error::Empty("risk over an empty sample".into()));
    }
    let refs = reference.resolve(features)?;
    let scores = h.scores(features)?;
    let total: f64 = scores
        .iter()
        .zip(refs.iter())
        .map(|(&s, &r)| loss.eval(s, r))
        .sum();
    Ok(total / features.nrows() as f64)
}

/// A 0-1 risk kept as an exact count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorCount {
    pub errors: u64,
    pub n: u64,
}

impl ErrorCount {
    pub fn new(errors: u64, n: u64) -> Self {
        debug_assert!(errors <= n && n > 0);
        Self { errors, n }
    }

    pub fn rate(self) -> f64 {
        self.errors as f64 / self.n as f64
    }

    /// Errors of the complementary classifier (every prediction flipped).
    pub fn complement(self) -> Self {
        Self::new(self.n - self.errors, self.n)
    }
}

/// Exact `a - b` for two rates, rounded once.
pub fn rate_gap(a: ErrorCount, b: ErrorCount) -> f64 {
    let num = a.errors as i128 * b.n as i128 - b.errors as i128 * a.n as i128;
    let den = a.n as i128 * b.n as i128;
    ratio(num, den)
}

/// Exact `a + b`, rounded once.
pub fn rate_sum(a: ErrorCount, b: ErrorCount) -> f64 {
    let num = a.errors as i128 * b.n as i128 + b.errors as i128 * a.n as i128;
    ratio(num, a.n as i128 * b.n as i128)
}

/// Exact `1 - (a + b)`, rounded once.
pub fn one_minus_sum(a: ErrorCount, b: ErrorCount) -> f64 {
    let den = a.n as i128 * b.n as i128;
    let num = den - (a.errors as i128 * b.n as i128 + b.errors as i128 * a.n as i128);
    ratio(num, den)
}

/// Compare `|a - b|` values exactly via cross-multiplication.
pub(crate) fn gap_numerator(a: ErrorCount, b: ErrorCount) -> i128 {
    a.errors as i128 * b.n as i128 - b.errors as i128 * a.n as i128
}

fn ratio(num: i128, den: i128) -> f64 {
    // Exact while both fit in 53 bits; reduce first so larger samples still round once.
    let g = gcd(num.unsigned_abs(), den.unsigned_abs()).max(1) as i128;
    (num / g) as f64 / (den / g) as f64
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// 0-1 mistakes of `h` against a reference, as an exact count.
pub fn zero_one_errors(
    h: &Hypothesis,
    features: &Array2<f64>,
    reference: Reference<'_>,
) -> Result<ErrorCount> {
    if features.nrows() == 0 {
        return Err(Error::Empty("risk over an empty sample".into()));
    }
    let refs = reference.resolve(features)?;
    let preds = h.predict(features)?;
    Ok(count_disagreements(&preds, &refs))
}

pub(crate) fn count_disagreements(preds: &Array1<f64>, refs: &Array1<f64>) -> ErrorCount {
    let errors = preds
        .iter()
        .zip(refs.iter())
        .filter(|(p, r)| p != r)
        .count();
    ErrorCount::new(errors as u64, preds.len() as u64)
}
