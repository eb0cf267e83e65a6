use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::hypothesis::Hypothesis;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Sdisc,
    Dh,
    XdiscBruteforce,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::Sdisc => "sdisc",
            Measure::Dh => "dh",
            Measure::XdiscBruteforce => "xdisc_bruteforce",
        }
    }
}

impl std::str::FromStr for Measure {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "sdisc" => Ok(Measure::Sdisc),
            "dh" => Ok(Measure::Dh),
            "xdisc" | "xdisc_bruteforce" => Ok(Measure::XdiscBruteforce),
            other => Err(crate::Error::InvalidParameter(format!(
                "unknown measure `{other}` (expected sdisc, dh or xdisc)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    Single(Hypothesis),
    Pair(Hypothesis, Hypothesis),
}

impl Witness {
    pub fn params(&self) -> Vec<Vec<f64>> {
        match self {
            Witness::Single(h) => vec![h.weights().to_vec()],
            Witness::Pair(a, b) => vec![a.weights().to_vec(), b.weights().to_vec()],
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// The minimized 0-1 objective (`J` for S-disc, the bracketed sum for d_H).
    pub j_value: Option<f64>,
    /// Named 0-1 risks at the witness.
    pub risks: BTreeMap<String, f64>,
    /// Whether the value had to be clamped into `[0, 1]`.
    pub clamped: bool,
    /// Which candidate hypothesis produced the value.
    pub selected: Option<String>,
    /// True when the selected candidate is not the trained minimizer.
    pub fallback: bool,
    /// 0-1 objective of every candidate, keyed by name.
    pub candidates: BTreeMap<String, f64>,
    /// Estimator-specific method name.
    pub method: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub measure: Measure,
    pub value: f64,
    /// The source classifier the S-disc is anchored on.
    pub reference_hypothesis: Option<Hypothesis>,
    pub witness: Witness,
    pub diagnostics: Diagnostics,
}

impl DiscrepancyReport {
    /// Clamp `raw` into `[0, 1]`, recording whether that changed it.
    pub(crate) fn clamp(raw: f64) -> (f64, bool) {
        let v = raw.clamp(0.0, 1.0);
        (v, v != raw)
    }

    pub fn to_record(&self) -> ResultRecord {
        ResultRecord {
            measure: self.measure,
            value: self.value,
            witness_params: self.witness.params(),
            reference_params: self
                .reference_hypothesis
                .as_ref()
                .map(|h| h.weights().to_vec()),
            diagnostics: self.diagnostics.clone(),
        }
    }
}

/// Flat JSON form written to results files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub measure: Measure,
    pub value: f64,
    pub witness_params: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_params: Option<Vec<f64>>,
    #[serde(default)]
    pub diagnostics: Diagnostics,
}
