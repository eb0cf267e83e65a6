mod common;

use common::{explicit_thresholds, lab, threshold_class, unl};
use disckit::disc::{
    build_xdisc_sdp, grid_min_cost_sensitive, sdisc_bruteforce, source_classifier, xdisc_bruteforce,
};
use disckit::theory::{
    dh_deviation_bound, sdisc_deviation_bound, sdisc_deviation_bound_general, target_regret_bound,
    target_regret_bound_population, xdisc_deviation_bound, BoundReport, ComplexityInput,
};
use disckit::{Array1, BasisKind, BasisSpec, TrainConfig};
use serde_json::Value;

fn golden() -> Value {
    serde_json::from_str(include_str!("golden/values.json")).unwrap()
}

fn num(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("missing {key}"))
}

fn input_from(v: &Value) -> ComplexityInput {
    let i = &v["inputs"];
    let mut c = ComplexityInput::new(
        num(i, "lambda"),
        num(i, "d_phi"),
        num(i, "n_t"),
        num(i, "n_s"),
        num(i, "delta"),
    );
    if let Some(x) = i["c_hh"].as_f64() {
        c = c.with_c_hh(x);
    }
    if let Some(m) = i["loss_bound"].as_f64() {
        c = c.with_loss_bound(m);
    }
    c
}

fn check(report: &BoundReport, expected: f64) {
    assert!(
        (report.value - expected).abs() < 1e-12,
        "{}: {} vs {expected}",
        report.bound_name,
        report.value
    );
    let sum: f64 = report.terms.iter().map(|t| t.value).sum();
    assert!((report.value - sum).abs() < 1e-12);
}

#[test]
fn four_point_sdisc_matches_golden() {
    let g = golden();
    let fp = &g["four_point"];
    let s = lab(&[-2.0, -1.0, 1.0, 2.0], &[-1.0, -1.0, 1.0, 1.0]);
    let t = unl(&[-2.0, -1.0, -1.0, -2.0]);
    let class = explicit_thresholds(&[-3.0, -1.5, 0.0, 1.5, 3.0], 3.0);
    let cfg = TrainConfig::default();

    let h_s = source_classifier(&s, &class, &cfg).unwrap();
    assert_eq!(h_s.predict(s.features()).unwrap(), *s.labels());

    let r = sdisc_bruteforce(&s, &t, &class, &cfg).unwrap();
    assert_eq!(r.value, num(fp, "sdisc"));
    let m = grid_min_cost_sensitive(&h_s, &s.inputs(), &t, &class).unwrap();
    assert_eq!(m.j_value, num(fp, "j_min"));
    assert_eq!(r.value, m.one_minus_j);
}

#[test]
fn four_point_xdisc_matches_golden() {
    let g = golden();
    let fp = &g["four_point"];
    let s = unl(&[-2.0, -1.0, 1.0, 2.0]);
    let t = unl(&[-2.0, -1.0, -1.0, -2.0]);
    let shared = explicit_thresholds(&[-3.0, -1.5, 0.0, 1.5, 3.0], 3.0);
    assert_eq!(
        xdisc_bruteforce(&s, &t, &shared).unwrap().value,
        num(fp, "xdisc_shared_grid")
    );
    assert_eq!(
        xdisc_bruteforce(&s, &t, &threshold_class(3.0))
            .unwrap()
            .value,
        num(fp, "xdisc_threshold_class")
    );
}

#[test]
fn sdp_single_pair_hand_values() {
    let t = unl(&[3.0]);
    let s = unl(&[-2.0]);
    let basis = BasisSpec::new(BasisKind::Identity, 1, 3.0).unwrap();
    let d = build_xdisc_sdp(&s, &t, &basis).unwrap();
    assert_eq!(d.dim(), 4);
    assert_eq!(*d.a(), Array1::from(vec![1.0, -1.0]));
    assert_eq!(d.c(), Array1::from(vec![1.0, -1.0, 0.0, 0.0]));
    assert_eq!(d.f(0), Array1::from(vec![1.0, 0.0, 0.0, 0.0]));
    assert_eq!(d.f(1), Array1::from(vec![0.0, 1.0, 0.0, 0.0]));
    for (i, phi) in [(0, 3.0), (1, -2.0)] {
        let m = d.phi_matrix(i).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                let expected = if (r, c) == (2, 3) || (r, c) == (3, 2) {
                    0.5 * phi * phi
                } else {
                    0.0
                };
                assert_eq!(m[[r, c]], expected, "Phi_{i}[{r},{c}]");
            }
        }
    }
}

#[test]
fn zero_one_deviation_bound_golden() {
    let g = golden();
    let v = &g["sdisc_deviation_01"];
    check(
        &sdisc_deviation_bound(&input_from(v)).unwrap(),
        num(v, "value"),
    );
}

#[test]
fn general_and_pair_bounds_golden() {
    let g = golden();
    type Bound = fn(&ComplexityInput, f64, f64) -> disckit::Result<BoundReport>;
    let calculators: [(&str, Bound); 3] = [
        ("sdisc_deviation", sdisc_deviation_bound_general),
        ("xdisc_deviation", xdisc_deviation_bound),
        ("dh_deviation", dh_deviation_bound),
    ];
    for (key, f) in calculators {
        let v = &g[key];
        let i = &v["inputs"];
        let r = f(&input_from(v), num(i, "rad_t"), num(i, "rad_s")).unwrap();
        check(&r, num(v, "value"));
    }
}

#[test]
fn regret_bounds_golden() {
    let g = golden();
    let v = &g["target_regret"];
    let i = &v["inputs"];
    let r = target_regret_bound(
        num(i, "source_risk"),
        Some(num(i, "cross_risk")),
        num(i, "sdisc"),
        &input_from(v),
    )
    .unwrap();
    check(&r, num(v, "value"));
    let p = &g["target_regret_population"];
    let pi = &p["inputs"];
    let rp = target_regret_bound_population(
        num(pi, "source_risk"),
        Some(num(pi, "cross_risk")),
        num(pi, "sdisc"),
    )
    .unwrap();
    check(&rp, num(p, "value"));
    assert!(r.value >= rp.value);
}

#[test]
fn bounds_vanish_in_the_limit() {
    let big = 1e16;
    let i = ComplexityInput::new(1.0, 1.0, big, big, 0.05);
    assert!(sdisc_deviation_bound(&i).unwrap().value < 1e-7);
    assert!(sdisc_deviation_bound_general(&i, 0.0, 0.0).unwrap().value < 1e-7);
    assert!(target_regret_bound(0.0, Some(0.0), 0.0, &i).unwrap().value < 1e-7);
}

#[test]
fn general_bound_equals_pair_bound_with_unit_loss() {
    let i = ComplexityInput::new(1.0, 2.0, 300.0, 700.0, 0.02);
    let a = sdisc_deviation_bound_general(&i, 0.04, 0.01).unwrap();
    let b = xdisc_deviation_bound(&i, 0.04, 0.01).unwrap();
    assert_eq!(a.value, b.value);
    for (x, y) in a.terms.iter().zip(&b.terms) {
        assert_eq!(x.value, y.value);
    }
}

#[test]
fn bound_json_names_terms() {
    let r = sdisc_deviation_bound(&ComplexityInput::new(1.0, 1.0, 800.0, 800.0, 0.05)).unwrap();
    let v: Value = serde_json::to_value(&r).unwrap();
    assert_eq!(v["terms"].as_array().unwrap().len(), 4);
    assert_eq!(v["terms"][0]["name"], "C_HH/sqrt(n_T)");
}
