use std::collections::BTreeMap;

use ndarray::{concatenate, Array1, Axis};

use crate::data::UnlabeledDataset;
use crate::error::Result;
use crate::hypothesis::{Hypothesis, HypothesisClassSpec};
use crate::learner::{train, TrainConfig, WeightedSample};
use crate::loss::{count_disagreements, one_minus_sum, rate_gap, rate_sum, ErrorCount};

use super::fixed_ref::max_gap;
use super::report::{Diagnostics, DiscrepancyReport, Measure, Witness};

/// d_H through a domain separator: target rows labeled `-1` with weight
/// `1/n_T`, source rows `+1` with weight `1/n_S`. The estimate is
/// `1 - min [R_T(h, -1) + R_S(h, +1)]` over the separator, its negation and
/// the constant `+1` classifier.
pub fn estimate_dh(
    source: &UnlabeledDataset,
    target: &UnlabeledDataset,
    class: &HypothesisClassSpec,
    cfg: &TrainConfig,
) -> Result<DiscrepancyReport> {
    let (ns, nt) = (source.len(), target.len());
    let features = concatenate(
        Axis(0),
        &[target.features().view(), source.features().view()],
    )
    .map_err(|_| crate::Error::Shape("source and target dimensions differ".into()))?;
    let labels: Array1<f64> = (0..nt + ns)
        .map(|i| if i < nt { -1.0 } else { 1.0 })
        .collect();
    let weights: Array1<f64> = (0..nt + ns)
        .map(|i| {
            if i < nt {
                1.0 / nt as f64
            } else {
                1.0 / ns as f64
            }
        })
        .collect();
    let sample = WeightedSample::new(features, labels, weights)?;
    let sep = train(&sample, class, cfg)?;

    let yt = Array1::from_elem(nt, -1.0);
    let ys = Array1::from_elem(ns, 1.0);
    let bracket = |h: &Hypothesis| -> Result<(ErrorCount, ErrorCount)> {
        Ok((
            count_disagreements(&h.predict(target.features())?, &yt),
            count_disagreements(&h.predict(source.features())?, &ys),
        ))
    };
    let candidates = [
        ("separator", sep.clone()),
        ("negated_separator", sep.negate()),
        ("constant", Hypothesis::zeros(*class.basis())),
    ];
    let mut scored = Vec::with_capacity(candidates.len());
    for (name, h) in candidates {
        let (et, es) = bracket(&h)?;
        scored.push((name, h, et, es));
    }
    let best = scored
        .iter()
        .enumerate()
        .min_by_key(|(i, s)| {
            let (et, es) = (s.2, s.3);
            (
                et.errors as i128 * es.n as i128 + es.errors as i128 * et.n as i128,
                *i,
            )
        })
        .map(|(i, _)| i)
        .expect("candidate set is nonempty");

    let mut diagnostics = Diagnostics {
        method: "domain_separator".into(),
        ..Diagnostics::default()
    };
    for (name, _, et, es) in &scored {
        diagnostics
            .candidates
            .insert(name.to_string(), rate_sum(*et, *es));
    }
    let (name, witness, et, es) = scored.swap_remove(best);
    let (value, clamped) = DiscrepancyReport::clamp(one_minus_sum(et, es));
    diagnostics.j_value = Some(rate_sum(et, es));
    diagnostics.clamped = clamped;
    diagnostics.selected = Some(name.to_string());
    diagnostics.fallback = best != 0;
    diagnostics.risks = BTreeMap::from([
        ("target_vs_minus_one".to_string(), et.rate()),
        ("source_vs_plus_one".to_string(), es.rate()),
    ]);
    Ok(DiscrepancyReport {
        measure: Measure::Dh,
        value,
        reference_hypothesis: None,
        witness: Witness::Single(witness),
        diagnostics,
    })
}

/// Exact `max_h |R_T(h, +1) - R_S(h, +1)|` over the class grid.
pub fn dh_bruteforce(
    source: &UnlabeledDataset,
    target: &UnlabeledDataset,
    class: &HypothesisClassSpec,
) -> Result<DiscrepancyReport> {
    let ones_t = Array1::from_elem(target.len(), 1.0);
    let ones_s = Array1::from_elem(source.len(), 1.0);
    let (et, es, m) = max_gap(
        class,
        target.features(),
        &ones_t,
        source.features(),
        &ones_s,
    )?;
    let value = rate_gap(et, es).abs();
    let diagnostics = Diagnostics {
        method: "grid_enumeration".into(),
        j_value: Some(1.0 - value),
        risks: BTreeMap::from([
            ("target_vs_plus_one".to_string(), et.rate()),
            ("source_vs_plus_one".to_string(), es.rate()),
        ]),
        ..Diagnostics::default()
    };
    Ok(DiscrepancyReport {
        measure: Measure::Dh,
        value,
        reference_hypothesis: None,
        witness: Witness::Single(m.build(class)?),
        diagnostics,
    })
}
