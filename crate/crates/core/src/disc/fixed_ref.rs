//! Exact enumeration against a fixed reference labeling.
//!
//! Both oracles here walk every member of the class grid and keep 0-1 risks as
//! exact counts, so comparisons between members never round.

use ndarray::{Array1, Array2};

use crate::data::UnlabeledDataset;
use crate::error::Result;
use crate::grid::{project, sweep_direction, threshold_hypothesis, Grid, SweepEvent};
use crate::hypothesis::{Hypothesis, HypothesisClassSpec};
use crate::loss::{count_disagreements, gap_numerator, one_minus_sum, rate_gap, ErrorCount};

/// Result of [`fixed_ref_disc`].
#[derive(Debug, Clone, PartialEq)]
pub struct FixedRefResult {
    /// `max_h |R_1(h, h_ref) - R_2(h, h_ref)|` over the grid.
    pub value: f64,
    pub witness: Hypothesis,
    /// Witness mistakes against the reference on the first sample.
    pub errors_1: ErrorCount,
    /// Witness mistakes against the reference on the second sample.
    pub errors_2: ErrorCount,
}

/// Result of [`grid_min_cost_sensitive`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridMinimum {
    /// `min_h R_S(h, h_ref) + R_T(h, -h_ref)` over the grid.
    pub j_value: f64,
    /// `1 - j_value`, computed exactly.
    pub one_minus_j: f64,
    pub witness: Hypothesis,
    pub source_errors: ErrorCount,
    /// Mistakes against the negated reference on the target sample.
    pub target_errors: ErrorCount,
}

/// Where a grid member came from, so the hypothesis is only built for the winner.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Member {
    Explicit(usize),
    Sweep { dir: usize, t: f64, negated: bool },
}

impl Member {
    pub(crate) fn build(self, class: &HypothesisClassSpec) -> Result<Hypothesis> {
        let grid = class.require_grid()?;
        match (self, grid) {
            (Member::Explicit(i), Grid::Explicit(m)) => Ok(m[i].clone()),
            (Member::Sweep { dir, t, negated }, Grid::Sweep(s)) => {
                let mut h = threshold_hypothesis(&s.directions()[dir], t, class.basis())?;
                if h.norm() > class.norm_bound() {
                    h = h.scaled(class.norm_bound() / h.norm());
                }
                Ok(if negated { h.negate() } else { h })
            }
            _ => unreachable!("member kind always matches its grid"),
        }
    }
}

/// Visit every grid member with its mistake counts against `r1` on `x1` and
/// `r2` on `x2`. Members come in grid order.
pub(crate) fn for_each_member(
    class: &HypothesisClassSpec,
    x1: &Array2<f64>,
    r1: &Array1<f64>,
    x2: &Array2<f64>,
    r2: &Array1<f64>,
    mut visit: impl FnMut(ErrorCount, ErrorCount, Member),
) -> Result<()> {
    let (n1, n2) = (x1.nrows() as u64, x2.nrows() as u64);
    match class.require_grid()? {
        Grid::Explicit(members) => {
            for (i, h) in members.iter().enumerate() {
                let e1 = count_disagreements(&h.predict(x1)?, r1);
                let e2 = count_disagreements(&h.predict(x2)?, r2);
                visit(e1, e2, Member::Explicit(i));
            }
        }
        Grid::Sweep(sweep) => {
            class.basis().check_cols(x1)?;
            class.basis().check_cols(x2)?;
            let refs: Vec<f64> = r1.iter().chain(r2.iter()).copied().collect();
            let split = x1.nrows();
            let base1 = r1.iter().filter(|&&r| r < 0.0).count() as u64;
            let base2 = r2.iter().filter(|&&r| r < 0.0).count() as u64;
            for (dir, d) in sweep.directions().iter().enumerate() {
                let proj = project(d, &[x1, x2]);
                let (mut e1, mut e2) = (base1, base2);
                sweep_direction(&proj, |ev| match ev {
                    SweepEvent::Cross(i) => {
                        // The item now predicts -1.
                        let e = if i < split { &mut e1 } else { &mut e2 };
                        if refs[i] < 0.0 {
                            *e -= 1;
                        } else {
                            *e += 1;
                        }
                    }
                    SweepEvent::Threshold(t) => {
                        visit(
                            ErrorCount::new(e1, n1),
                            ErrorCount::new(e2, n2),
                            Member::Sweep {
                                dir,
                                t,
                                negated: false,
                            },
                        );
                        visit(
                            ErrorCount::new(n1 - e1, n1),
                            ErrorCount::new(n2 - e2, n2),
                            Member::Sweep {
                                dir,
                                t,
                                negated: true,
                            },
                        );
                    }
                });
            }
        }
    }
    Ok(())
}

/// Grid member maximizing `|R_1(h, r1) - R_2(h, r2)|`; the first one wins ties.
pub(crate) fn max_gap(
    class: &HypothesisClassSpec,
    x1: &Array2<f64>,
    r1: &Array1<f64>,
    x2: &Array2<f64>,
    r2: &Array1<f64>,
) -> Result<(ErrorCount, ErrorCount, Member)> {
    let mut best: Option<(i128, ErrorCount, ErrorCount, Member)> = None;
    for_each_member(class, x1, r1, x2, r2, |e1, e2, m| {
        let g = gap_numerator(e1, e2).abs();
        if best.as_ref().is_none_or(|b| g > b.0) {
            best = Some((g, e1, e2, m));
        }
    })?;
    let (_, e1, e2, m) = best.expect("grids are never empty");
    Ok((e1, e2, m))
}

/// The discrepancy with a supplied reference:
/// `max_h |R_1(h, h_ref) - R_2(h, h_ref)|` over the class grid, 0-1 loss.
pub fn fixed_ref_disc(
    h_ref: &Hypothesis,
    x1: &UnlabeledDataset,
    x2: &UnlabeledDataset,
    class: &HypothesisClassSpec,
) -> Result<FixedRefResult> {
    class.require_grid()?;
    let r1 = h_ref.predict(x1.features())?;
    let r2 = h_ref.predict(x2.features())?;
    let (e1, e2, m) = max_gap(class, x1.features(), &r1, x2.features(), &r2)?;
    Ok(FixedRefResult {
        value: rate_gap(e1, e2).abs(),
        witness: m.build(class)?,
        errors_1: e1,
        errors_2: e2,
    })
}

/// Minimum over the grid of the 0-1 cost-sensitive objective
/// `J(h) = R_S(h, h_ref) + R_T(h, -h_ref)`.
pub fn grid_min_cost_sensitive(
    h_ref: &Hypothesis,
    source: &UnlabeledDataset,
    target: &UnlabeledDataset,
    class: &HypothesisClassSpec,
) -> Result<GridMinimum> {
    class.require_grid()?;
    let rs = h_ref.predict(source.features())?;
    let rt = h_ref.predict(target.features())?.mapv(|v| -v);
    let mut best: Option<(i128, ErrorCount, ErrorCount, Member)> = None;
    for_each_member(
        class,
        source.features(),
        &rs,
        target.features(),
        &rt,
        |es, et, m| {
            // J * n_S * n_T, exact.
            let scaled = es.errors as i128 * et.n as i128 + et.errors as i128 * es.n as i128;
            if best.as_ref().is_none_or(|b| scaled < b.0) {
                best = Some((scaled, es, et, m));
            }
        },
    )?;
    let (_, es, et, m) = best.expect("grids are never empty");
    Ok(GridMinimum {
        j_value: crate::loss::rate_sum(es, et),
        one_minus_j: one_minus_sum(es, et),
        witness: m.build(class)?,
        source_errors: es,
        target_errors: et,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::threshold_hypothesis;
    use crate::hypothesis::{BasisKind, BasisSpec};
    use ndarray::array;

    fn basis1() -> BasisSpec {
        BasisSpec::new(BasisKind::Affine, 1, 10.0).unwrap()
    }

    fn explicit_thresholds(ts: &[f64]) -> HypothesisClassSpec {
        let b = basis1();
        let mut m = Vec::new();
        for &t in ts {
            let h = threshold_hypothesis(&array![1.0], t, &b).unwrap();
            m.push(h.negate());
            m.push(h);
        }
        HypothesisClassSpec::new(b, 10.0)
            .unwrap()
            .with_grid(Grid::Explicit(m))
            .unwrap()
    }

    fn unl(v: &[f64]) -> UnlabeledDataset {
        UnlabeledDataset::new(Array2::from_shape_vec((v.len(), 1), v.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn worked_instance_is_one_half() {
        let class = explicit_thresholds(&[-2.0, 0.0, 2.0]);
        let h_ref = Hypothesis::new(array![1.0, 0.0], basis1()).unwrap();
        let r = fixed_ref_disc(&h_ref, &unl(&[-1.0, 1.0]), &unl(&[-1.0]), &class).unwrap();
        assert_eq!(r.value, 0.5);
    }

    #[test]
    fn identical_samples_give_zero() {
        let class = explicit_thresholds(&[-2.0, 0.0, 2.0]);
        let h_ref = Hypothesis::new(array![1.0, 0.0], basis1()).unwrap();
        let x = unl(&[-1.5, 0.5, 1.0]);
        assert_eq!(fixed_ref_disc(&h_ref, &x, &x, &class).unwrap().value, 0.0);
    }

    #[test]
    fn reference_only_grid_gives_zero() {
        let b = basis1();
        let h_ref = Hypothesis::new(array![1.0, -0.25], b).unwrap();
        let class = HypothesisClassSpec::new(b, 10.0)
            .unwrap()
            .with_grid(Grid::Explicit(vec![h_ref.clone(), h_ref.negate()]))
            .unwrap();
        let r = fixed_ref_disc(&h_ref, &unl(&[-1.0, 2.0]), &unl(&[3.0]), &class).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn sweep_agrees_with_explicit_materialization() {
        let b = basis1();
        let x1 = unl(&[-1.2, 0.3, 0.7, 2.0]);
        let x2 = unl(&[-3.0, -0.4, 0.3, 1.1, 5.0]);
        let h_ref = Hypothesis::new(array![1.0, -0.5], b).unwrap();
        let sweep = HypothesisClassSpec::new(b, 100.0)
            .unwrap()
            .with_grid(Grid::thresholds_1d())
            .unwrap();
        let members = Grid::thresholds_1d()
            .materialize(&b, 100.0, &[x1.features(), x2.features()])
            .unwrap();
        let explicit = HypothesisClassSpec::new(b, 100.0)
            .unwrap()
            .with_grid(Grid::Explicit(members))
            .unwrap();
        let a = fixed_ref_disc(&h_ref, &x1, &x2, &sweep).unwrap();
        let e = fixed_ref_disc(&h_ref, &x1, &x2, &explicit).unwrap();
        assert_eq!(a.value, e.value);
        assert_eq!(a.witness, e.witness);
        let ga = grid_min_cost_sensitive(&h_ref, &x1, &x2, &sweep).unwrap();
        let ge = grid_min_cost_sensitive(&h_ref, &x1, &x2, &explicit).unwrap();
        assert_eq!(ga.j_value, ge.j_value);
    }

    #[test]
    fn missing_grid_is_reported() {
        let b = basis1();
        let class = HypothesisClassSpec::new(b, 10.0).unwrap();
        let h = Hypothesis::zeros(b);
        let x = unl(&[1.0]);
        assert!(matches!(
            fixed_ref_disc(&h, &x, &x, &class),
            Err(crate::Error::MissingGrid)
        ));
    }
}
