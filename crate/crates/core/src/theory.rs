//! Closed-form bound calculators.
//!
//! Every calculator returns a [`BoundReport`] whose value is the left-to-right
//! sum of its named terms. Sample sizes enter as `f64` so the formulas read as
//! written; they must be at least 1.

use ndarray::{Array1, Array2};
use rand_distr::{Bernoulli, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SweepGrid;
use crate::ingest::stream_rng;

/// Inputs shared by the deviation and regret bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexityInput {
    /// `Lambda`, the class radius.
    pub lambda: f64,
    /// `D_phi`, the feature bound.
    pub d_phi: f64,
    pub n_t: f64,
    pub n_s: f64,
    pub delta: f64,
    /// `C_{H x H}`; `Lambda^2 D_phi^2` when unset.
    pub c_hh: Option<f64>,
    /// `M`, an upper bound on the loss.
    pub loss_bound: f64,
}

impl ComplexityInput {
    pub fn new(lambda: f64, d_phi: f64, n_t: f64, n_s: f64, delta: f64) -> Self {
        Self {
            lambda,
            d_phi,
            n_t,
            n_s,
            delta,
            c_hh: None,
            loss_bound: 1.0,
        }
    }

    pub fn with_c_hh(mut self, c: f64) -> Self {
        self.c_hh = Some(c);
        self
    }

    pub fn with_loss_bound(mut self, m: f64) -> Self {
        self.loss_bound = m;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        positive("lambda", self.lambda)?;
        positive("d_phi", self.d_phi)?;
        positive("loss_bound", self.loss_bound)?;
        if let Some(c) = self.c_hh {
            positive("c_hh", c)?;
        }
        if !(self.n_t >= 1.0 && self.n_s >= 1.0) {
            return Err(Error::InvalidParameter(
                "sample sizes must be at least 1".into(),
            ));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        Ok(())
    }

    /// `C_{H x H}`, defaulting to `Lambda^2 D_phi^2`.
    pub fn c(&self) -> f64 {
        self.c_hh
            .unwrap_or(self.lambda * self.lambda * self.d_phi * self.d_phi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundTerm {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound_name: String,
    pub value: f64,
    pub terms: Vec<BoundTerm>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl BoundReport {
    fn from_terms(name: &str, terms: Vec<(&str, f64)>) -> Self {
        let terms: Vec<BoundTerm> = terms
            .into_iter()
            .map(|(n, v)| BoundTerm {
                name: n.to_string(),
                value: v,
            })
            .collect();
        let value = terms.iter().fold(0.0, |acc, t| acc + t.value);
        Self {
            bound_name: name.to_string(),
            value,
            terms,
            notes: Vec::new(),
        }
    }

    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.name == name).map(|t| t.value)
    }
}

/// `sqrt(log(k / delta) / (2 n))`.
fn tail(k: f64, delta: f64, n: f64) -> f64 {
    ((k / delta).ln() / (2.0 * n)).sqrt()
}

/// Rademacher bound for products of linear-in-parameter hypotheses:
/// `Lambda^2 D_phi^2 / sqrt(m)`.
pub fn rademacher_linear_product(input: &ComplexityInput, m: f64) -> Result<f64> {
    if !(m >= 1.0) {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    let l2 = input.lambda * input.lambda;
    Ok(l2 * input.d_phi * input.d_phi / m.sqrt())
}

/// Deviation of the empirical 0-1 S-disc:
/// `C/sqrt(n_T) + C/sqrt(n_S) + sqrt(log(4/delta)/2n_T) + sqrt(log(4/delta)/2n_S)`.
pub fn sdisc_deviation_bound(input: &ComplexityInput) -> Result<BoundReport> {
    input.validate()?;
    let c = input.c();
    Ok(BoundReport::from_terms(
        "sdisc_deviation_01",
        vec![
            ("C_HH/sqrt(n_T)", c / input.n_t.sqrt()),
            ("C_HH/sqrt(n_S)", c / input.n_s.sqrt()),
            (
                "sqrt(log(4/delta)/(2 n_T))",
                tail(4.0, input.delta, input.n_t),
            ),
            (
                "sqrt(log(4/delta)/(2 n_S))",
                tail(4.0, input.delta, input.n_s),
            ),
        ],
    ))
}

fn check_rad(rad_t: f64, rad_s: f64) -> Result<()> {
    if rad_t >= 0.0 && rad_s >= 0.0 && rad_t.is_finite() && rad_s.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(
            "Rademacher terms must be nonnegative".into(),
        ))
    }
}

fn two_rad_plus_m_tails(
    name: &str,
    input: &ComplexityInput,
    rad_t: f64,
    rad_s: f64,
) -> Result<BoundReport> {
    input.validate()?;
    check_rad(rad_t, rad_s)?;
    let m = input.loss_bound;
    Ok(BoundReport::from_terms(
        name,
        vec![
            ("2 R_T(l o (H x H))", 2.0 * rad_t),
            ("2 R_S(l o (H x H))", 2.0 * rad_s),
            (
                "M sqrt(log(4/delta)/(2 n_T))",
                m * tail(4.0, input.delta, input.n_t),
            ),
            (
                "M sqrt(log(4/delta)/(2 n_S))",
                m * tail(4.0, input.delta, input.n_s),
            ),
        ],
    ))
}

/// Deviation of the empirical S-disc for any loss bounded by `M`.
pub fn sdisc_deviation_bound_general(
    input: &ComplexityInput,
    rad_t: f64,
    rad_s: f64,
) -> Result<BoundReport> {
    two_rad_plus_m_tails("sdisc_deviation", input, rad_t, rad_s)
}

/// Deviation of the empirical X-disc for a loss bounded by `M`.
pub fn xdisc_deviation_bound(
    input: &ComplexityInput,
    rad_t: f64,
    rad_s: f64,
) -> Result<BoundReport> {
    two_rad_plus_m_tails("xdisc_deviation", input, rad_t, rad_s)
}

/// Deviation of the empirical d_H:
/// `2 R_T(H) + 2 R_S(H) + sqrt(2 log(4/delta)/n_T) + sqrt(2 log(4/delta)/n_S)`.
pub fn dh_deviation_bound(input: &ComplexityInput, rad_t: f64, rad_s: f64) -> Result<BoundReport> {
    input.validate()?;
    check_rad(rad_t, rad_s)?;
    let l = (4.0 / input.delta).ln();
    Ok(BoundReport::from_terms(
        "dh_deviation",
        vec![
            ("2 R_T(H)", 2.0 * rad_t),
            ("2 R_S(H)", 2.0 * rad_s),
            ("sqrt(2 log(4/delta)/n_T)", (2.0 * l / input.n_t).sqrt()),
            ("sqrt(2 log(4/delta)/n_S)", (2.0 * l / input.n_s).sqrt()),
        ],
    ))
}

const CROSS_RISK_NOTE: &str = "R_T(h_S*, h_T*) needs target labels and cannot be estimated; \
    it was not supplied and is taken as 0";

fn check_risk(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must lie in [0, 1], got {v}"
        )))
    }
}

/// Finite-sample target regret bound for the 0-1 loss:
/// `R_S^(h, h_S*) + R_T(h_S*, h_T*) + sdisc^ + C/sqrt(n_T) + C/sqrt(n_S)
///  + sqrt(log(5/delta)/2n_T) + 2 sqrt(log(5/delta)/2n_S)`.
///
/// `cross_risk` is `R_T(h_S*, h_T*)`; when `None` it is set to 0 and the
/// report says so.
pub fn target_regret_bound(
    source_emp_risk: f64,
    cross_risk: Option<f64>,
    sdisc_emp: f64,
    input: &ComplexityInput,
) -> Result<BoundReport> {
    input.validate()?;
    check_risk("source risk", source_emp_risk)?;
    check_risk("S-disc", sdisc_emp)?;
    if let Some(r) = cross_risk {
        check_risk("cross risk", r)?;
    }
    let c = input.c();
    let mut report = BoundReport::from_terms(
        "target_regret",
        vec![
            ("R_S^(h, h_S*)", source_emp_risk),
            ("R_T(h_S*, h_T*)", cross_risk.unwrap_or(0.0)),
            ("sdisc^(P_T, P_S)", sdisc_emp),
            ("C_HH/sqrt(n_T)", c / input.n_t.sqrt()),
            ("C_HH/sqrt(n_S)", c / input.n_s.sqrt()),
            (
                "sqrt(log(5/delta)/(2 n_T))",
                tail(5.0, input.delta, input.n_t),
            ),
            (
                "2 sqrt(log(5/delta)/(2 n_S))",
                2.0 * tail(5.0, input.delta, input.n_s),
            ),
        ],
    );
    if cross_risk.is_none() {
        report.notes.push(CROSS_RISK_NOTE.into());
    }
    Ok(report)
}

/// Population regret bound: `R_S(h, h_S*) + R_T(h_S*, h_T*) + sdisc(P_T, P_S)`.
pub fn target_regret_bound_population(
    source_risk: f64,
    cross_risk: Option<f64>,
    sdisc: f64,
) -> Result<BoundReport> {
    check_risk("source risk", source_risk)?;
    check_risk("S-disc", sdisc)?;
    if let Some(r) = cross_risk {
        check_risk("cross risk", r)?;
    }
    let mut report = BoundReport::from_terms(
        "target_regret_population",
        vec![
            ("R_S(h, h_S*)", source_risk),
            ("R_T(h_S*, h_T*)", cross_risk.unwrap_or(0.0)),
            ("sdisc(P_T, P_S)", sdisc),
        ],
    );
    if cross_risk.is_none() {
        report.notes.push(CROSS_RISK_NOTE.into());
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub draws: usize,
}

/// Monte Carlo estimate of the empirical Rademacher average of `H x H` on the
/// rows of `phi`:
/// `E_sigma sup_{w, w'} (1/m) sum_i sigma_i (w . phi_i)(w' . phi_i)`,
/// with both suprema restricted to `Lambda` times a unit direction net (or 0).
/// The net makes this a lower bound on the exact supremum for each draw.
pub fn rademacher_product_monte_carlo(
    phi: &Array2<f64>,
    lambda: f64,
    draws: usize,
    directions: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    let (m, d) = phi.dim();
    if m == 0 || draws < 2 {
        return Err(Error::InvalidParameter(
            "need at least one point and two draws".into(),
        ));
    }
    let net = SweepGrid::direction_net(d, directions)?;
    let w = Array2::from_shape_fn((net.directions().len(), d), |(k, j)| net.directions()[k][j]);
    // Outer products, one row per point.
    let outer: Vec<Array2<f64>> = phi
        .rows()
        .into_iter()
        .map(|r| {
            let v = r.to_owned().insert_axis(ndarray::Axis(1));
            v.dot(&v.t())
        })
        .collect();
    let values: Vec<f64> = (0..draws)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(seed, t as u64);
            let coin = Bernoulli::new(0.5).expect("valid probability");
            let mut a = Array2::<f64>::zeros((d, d));
            for o in &outer {
                if coin.sample(&mut rng) {
                    a += o;
                } else {
                    a -= o;
                }
            }
            a /= m as f64;
            let forms = w.dot(&a).dot(&w.t());
            let best = forms.iter().copied().fold(0.0f64, f64::max);
            lambda * lambda * best
        })
        .collect();
    let v = Array1::from(values);
    let mean = v.mean().expect("nonempty");
    let var = v.mapv(|x| (x - mean).powi(2)).sum() / (draws - 1) as f64;
    Ok(MonteCarloEstimate {
        mean,
        std_error: (var / draws as f64).sqrt(),
        draws,
    })
}
