use std::collections::BTreeMap;

use crate::data::{LabeledDataset, UnlabeledDataset};
use crate::error::Result;
use crate::hypothesis::{Hypothesis, HypothesisClassSpec};
use crate::learner::{train, train_tracking_zero_one, TrainConfig, WeightedSample};
use crate::loss::{count_disagreements, one_minus_sum, rate_sum, ErrorCount};

use super::fixed_ref::fixed_ref_disc;
use super::report::{Diagnostics, DiscrepancyReport, Measure, Witness};

/// `h_S`: the surrogate risk minimizer on the labeled source sample.
pub fn source_classifier(
    source: &LabeledDataset,
    class: &HypothesisClassSpec,
    cfg: &TrainConfig,
) -> Result<Hypothesis> {
    let sample = WeightedSample::uniform(source.features().clone(), source.labels().clone())?;
    train(&sample, class, cfg)
}

/// Pseudo-labeled samples `(x, sign h_S(x))` on the source inputs and
/// `(x, -sign h_S(x))` on the target, weighted `1/n_S` and `1/n_T`.
pub fn pseudo_label(
    h_s: &Hypothesis,
    source: &UnlabeledDataset,
    target: &UnlabeledDataset,
) -> Result<(WeightedSample, WeightedSample)> {
    let ys = h_s.predict(source.features())?;
    let yt = h_s.predict(target.features())?.mapv(|v| -v);
    Ok((
        WeightedSample::uniform(source.features().clone(), ys)?,
        WeightedSample::uniform(target.features().clone(), yt)?,
    ))
}

/// Exact 0-1 cost-sensitive objective, as mistake counts on each pseudo-labeled sample.
fn j01(
    h: &Hypothesis,
    ps: &WeightedSample,
    pt: &WeightedSample,
) -> Result<(ErrorCount, ErrorCount)> {
    Ok((
        count_disagreements(&h.predict(ps.features())?, ps.targets()),
        count_disagreements(&h.predict(pt.features())?, pt.targets()),
    ))
}

/// S-disc through cost-sensitive learning.
///
/// The surrogate minimizer `h''` of the weighted objective is compared, under
/// the 0-1 objective, with `h_S` and `-h_S` (both score exactly 1), and the
/// best candidate is reported. The estimate is `1 - J_01` at that candidate.
pub fn estimate_sdisc(
    source: &LabeledDataset,
    target: &UnlabeledDataset,
    class: &HypothesisClassSpec,
    cfg: &TrainConfig,
) -> Result<DiscrepancyReport> {
    let h_s = source_classifier(source, class, cfg)?;
    let source_x = source.inputs();
    let (ps, pt) = pseudo_label(&h_s, &source_x, target)?;
    let pooled = ps.concat(&pt)?;
    // Every training run also yields its best iterate under the exact 0-1
    // objective, which the surrogate optimum can miss.
    let costs = pooled.weights().clone();
    let (h2, h2_path, _) = train_tracking_zero_one(&pooled, class, cfg, None, &costs)?;

    let mut candidates = vec![
        ("cost_sensitive".to_string(), h2.hypothesis),
        ("source_classifier".to_string(), h_s.clone()),
        ("negated_source_classifier".to_string(), h_s.negate()),
        ("cost_sensitive_path".to_string(), h2_path),
    ];
    // Restarts with one (domain, pseudo-label) group silenced. When the
    // pseudo-labels form an XOR pattern the full surrogate optimum collapses
    // toward w = 0, while the best 0-1 solutions give up exactly one group.
    // Each restart is warm-started from h_S and from -h_S.
    let ns = ps.len();
    for (group, in_source, label) in [
        ("source_pos", true, 1.0),
        ("source_neg", true, -1.0),
        ("target_pos", false, 1.0),
        ("target_neg", false, -1.0),
    ] {
        let weights = ndarray::Array1::from_shape_fn(pooled.len(), |i| {
            let silenced = (i < ns) == in_source && pooled.targets()[i] == label;
            if silenced {
                0.0
            } else {
                pooled.weights()[i]
            }
        });
        let remaining = weights.iter().filter(|&&w| w > 0.0).count();
        if remaining == 0 || remaining == pooled.len() {
            continue;
        }
        let silenced = pooled.with_weights(weights)?;
        for (start, init) in [("source", h_s.clone()), ("negated_source", h_s.negate())] {
            let (h, path, _) = train_tracking_zero_one(&silenced, class, cfg, Some(&init), &costs)?;
            let name = format!("cost_sensitive_without_{group}_from_{start}");
            candidates.push((format!("{name}_path"), path));
            candidates.push((name, h.hypothesis));
        }
    }
    let mut scored = Vec::with_capacity(candidates.len());
    for (name, h) in candidates {
        let (es, et) = j01(&h, &ps, &pt)?;
        scored.push((name, h, es, et));
    }
    let key = |es: ErrorCount, et: ErrorCount| {
        es.errors as i128 * et.n as i128 + et.errors as i128 * es.n as i128
    };
    let best = scored
        .iter()
        .enumerate()
        .min_by_key(|(i, s)| (key(s.2, s.3), *i))
        .map(|(i, _)| i)
        .expect("candidate set is nonempty");

    let mut diagnostics = Diagnostics {
        method: "cost_sensitive".into(),
        ..Diagnostics::default()
    };
    for (name, _, es, et) in &scored {
        diagnostics
            .candidates
            .insert(name.clone(), rate_sum(*es, *et));
    }
    let (name, witness, es, et) = scored.swap_remove(best);
    let (value, clamped) = DiscrepancyReport::clamp(one_minus_sum(es, et));
    diagnostics.j_value = Some(rate_sum(es, et));
    diagnostics.clamped = clamped;
    diagnostics.selected = Some(name);
    diagnostics.fallback = best != 0;
    diagnostics.risks = BTreeMap::from([
        ("source_vs_pseudo".to_string(), es.rate()),
        ("target_vs_negated_pseudo".to_string(), et.rate()),
    ]);
    Ok(DiscrepancyReport {
        measure: Measure::Sdisc,
        value,
        reference_hypothesis: Some(h_s),
        witness: Witness::Single(witness),
        diagnostics,
    })
}

/// Exact empirical S-disc over the class grid, anchored on the trained `h_S`.
pub fn sdisc_bruteforce(
    source: &LabeledDataset,
    target: &UnlabeledDataset,
    class: &HypothesisClassSpec,
    cfg: &TrainConfig,
) -> Result<DiscrepancyReport> {
    class.require_grid()?;
    let h_s = source_classifier(source, class, cfg)?;
    let r = fixed_ref_disc(&h_s, target, &source.inputs(), class)?;
    let diagnostics = Diagnostics {
        method: "grid_enumeration".into(),
        j_value: Some(1.0 - r.value),
        risks: BTreeMap::from([
            ("target_vs_reference".to_string(), r.errors_1.rate()),
            ("source_vs_reference".to_string(), r.errors_2.rate()),
        ]),
        ..Diagnostics::default()
    };
    Ok(DiscrepancyReport {
        measure: Measure::Sdisc,
        value: r.value,
        reference_hypothesis: Some(h_s),
        witness: Witness::Single(r.witness),
        diagnostics,
    })
}
