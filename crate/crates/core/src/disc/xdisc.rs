//! X-disc by enumerating ordered pairs of grid members.
//!
//! Each member's predictions are packed into bitsets, so the disagreement
//! count of a pair is a popcount of the XOR.

use std::collections::BTreeMap;

use ndarray::Array2;
use rayon::prelude::*;

use crate::data::UnlabeledDataset;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::hypothesis::{BasisKind, BasisSpec, Hypothesis, HypothesisClassSpec};
use crate::loss::{rate_gap, ErrorCount};

use super::report::{Diagnostics, DiscrepancyReport, Measure, Witness};

/// Default member cap: 2000 members, four million ordered pairs.
pub const DEFAULT_GRID_CAP: usize = 2000;

fn pack(h: &Hypothesis, x: &Array2<f64>) -> Result<Vec<u64>> {
    let scores = h.scores(x)?;
    let mut bits = vec![0u64; scores.len().div_ceil(64)];
    for (i, &s) in scores.iter().enumerate() {
        if s >= 0.0 {
            bits[i / 64] |= 1 << (i % 64);
        }
    }
    Ok(bits)
}

fn disagreements(a: &[u64], b: &[u64]) -> u64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x ^ y).count_ones() as u64)
        .sum()
}

/// [`xdisc_bruteforce_capped`] with [`DEFAULT_GRID_CAP`].
pub fn xdisc_bruteforce(
    source: &UnlabeledDataset,
    target: &UnlabeledDataset,
    class: &HypothesisClassSpec,
) -> Result<DiscrepancyReport> {
    xdisc_bruteforce_capped(source, target, class, DEFAULT_GRID_CAP)
}

/// Exact `max_{h, h'} |R_T(h, h') - R_S(h, h')|` over the class grid.
///
/// Without a grid, 1-D inputs get every threshold classifier (exact over the
/// threshold class); other inputs are rejected.
pub fn xdisc_bruteforce_capped(
    source: &UnlabeledDataset,
    target: &UnlabeledDataset,
    class: &HypothesisClassSpec,
    cap: usize,
) -> Result<DiscrepancyReport> {
    let auto;
    let class = match class.grid() {
        Some(_) => class,
        None if source.dim() == 1 => {
            let basis =
                BasisSpec::from_data(BasisKind::Affine, &[source.features(), target.features()])?;
            auto = HypothesisClassSpec::new(basis, class.norm_bound())?
                .with_grid(Grid::thresholds_1d())?;
            &auto
        }
        None => return Err(Error::MissingGrid),
    };
    let grid = class.require_grid()?;
    let pooled = [source.features(), target.features()];
    let members = grid.member_count(&pooled);
    if members > cap {
        return Err(Error::GridTooLarge { members, cap });
    }
    let members = grid.materialize(class.basis(), class.norm_bound(), &pooled)?;
    let packed: Vec<(Vec<u64>, Vec<u64>)> = members
        .iter()
        .map(|h| Ok((pack(h, target.features())?, pack(h, source.features())?)))
        .collect::<Result<_>>()?;
    let (nt, ns) = (target.len() as i128, source.len() as i128);

    // Only i < j is scanned: the gap is symmetric in the pair, and the diagonal is zero.
    let (_, bi, bj) = (0..packed.len())
        .into_par_iter()
        .map(|i| {
            let (ti, si) = &packed[i];
            let mut best = (0i128, i, i);
            for (j, (tj, sj)) in packed.iter().enumerate().skip(i + 1) {
                let g =
                    (disagreements(ti, tj) as i128 * ns - disagreements(si, sj) as i128 * nt).abs();
                if g > best.0 {
                    best = (g, i, j);
                }
            }
            best
        })
        .reduce(
            || (0, 0, 0),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && (b.1, b.2) < (a.1, a.2)) {
                    b
                } else {
                    a
                }
            },
        );
    let et = ErrorCount::new(disagreements(&packed[bi].0, &packed[bj].0), nt as u64);
    let es = ErrorCount::new(disagreements(&packed[bi].1, &packed[bj].1), ns as u64);
    let value = rate_gap(et, es).abs();
    let diagnostics = Diagnostics {
        method: "pair_enumeration".into(),
        risks: BTreeMap::from([
            ("target_pair_disagreement".to_string(), et.rate()),
            ("source_pair_disagreement".to_string(), es.rate()),
        ]),
        ..Diagnostics::default()
    };
    Ok(DiscrepancyReport {
        measure: Measure::XdiscBruteforce,
        value,
        reference_hypothesis: None,
        witness: Witness::Pair(members[bi].clone(), members[bj].clone()),
        diagnostics,
    })
}
