mod common;

use common::{lab, shift_instance, threshold_class, unl};
use disckit::disc::{
    estimate_dh, estimate_sdisc, rank_sources, sdisc_bruteforce, EstimatorConfig, Measure,
    SourceEntry,
};
use disckit::experiments::{derive_seed, toy_domains};
use disckit::ingest::{gen_gaussian_domain, GaussianDomainSpec};
use disckit::{
    train_detailed, Array1, Array2, BasisKind, BasisSpec, HypothesisClassSpec, Loss, TrainConfig,
    WeightedSample,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn learner_matches_grid_search_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut rows = Vec::new();
    let mut y = Vec::new();
    while y.len() < 20 {
        let p: [f64; 2] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let m = p[0] + 0.5 * p[1];
        if m.abs() < 0.2 {
            continue;
        }
        rows.extend(p);
        y.push(if m > 0.0 { 1.0 } else { -1.0 });
    }
    let weights: Vec<f64> = (0..20)
        .map(|i| if i % 3 == 0 { 2.0 } else { 1.0 })
        .collect();
    let x = Array2::from_shape_vec((20, 2), rows).unwrap();
    let sample = WeightedSample::new(
        x.clone(),
        Array1::from(y.clone()),
        Array1::from(weights.clone()),
    )
    .unwrap();
    let lambda = 2.0;
    let class =
        HypothesisClassSpec::new(BasisSpec::new(BasisKind::Identity, 2, 1.5).unwrap(), lambda)
            .unwrap();
    let cfg = TrainConfig {
        max_epochs: 20_000,
        tolerance: 0.0,
        ..TrainConfig::default()
    };
    let out = train_detailed(&sample, &class, &cfg).unwrap();

    // Weighted hinge, normalized by total weight, over a fine polar grid of the disc.
    let total: f64 = weights.iter().sum();
    let objective = |w: [f64; 2]| {
        (0..20)
            .map(|i| {
                let s = w[0] * x[[i, 0]] + w[1] * x[[i, 1]];
                weights[i] * (1.0 - y[i] * s).max(0.0)
            })
            .sum::<f64>()
            / total
    };
    let mut best = f64::INFINITY;
    for ri in 0..=400 {
        let r = lambda * f64::from(ri) / 400.0;
        for ai in 0..1440 {
            let a = std::f64::consts::TAU * f64::from(ai) / 1440.0;
            best = best.min(objective([r * a.cos(), r * a.sin()]));
        }
    }
    let w = out.hypothesis.weights();
    let ours = objective([w[0], w[1]]);
    assert!((ours * total - out.objective).abs() < 1e-9);
    assert!(ours <= best + 1e-3, "learner {ours} vs grid {best}");
}

#[test]
fn estimate_tracks_brute_force_on_1d_instances() {
    let cfg = TrainConfig::default();
    let mut worst = 0.0f64;
    for seed in 0..20 {
        let (s, y, t) = shift_instance(derive_seed(31, seed), 40);
        let source = lab(&s, &y);
        let target = unl(&t);
        let class = threshold_class(6.0);
        let exact = sdisc_bruteforce(&source, &target, &class, &cfg)
            .unwrap()
            .value;
        let est = estimate_sdisc(&source, &target, &class, &cfg).unwrap();
        assert!(
            est.value <= exact + 1e-12,
            "seed {seed}: estimate above the grid optimum"
        );
        worst = worst.max(exact - est.value);
    }
    assert!(worst <= 0.15, "largest surrogate gap {worst}");
}

#[test]
fn estimate_reports_j_value_and_bounds() {
    let d = toy_domains(4, 60).unwrap();
    let est = EstimatorConfig::default();
    let t = d.target.inputs();
    let class = est
        .class_for(&[d.source_2.features(), t.features()])
        .unwrap();
    let r = estimate_sdisc(&d.source_2, &t, &class, &est.train).unwrap();
    assert!((0.0..=1.0).contains(&r.value));
    let j = r.diagnostics.j_value.unwrap();
    assert_eq!(r.value, (1.0 - j).clamp(0.0, 1.0));
    assert!(r.reference_hypothesis.is_some());
}

#[test]
fn identical_samples_give_zero() {
    let d = toy_domains(9, 50).unwrap();
    let est = EstimatorConfig::default();
    let x = d.source_1.inputs();
    let class = est.class_for(&[x.features()]).unwrap();
    assert_eq!(
        estimate_sdisc(&d.source_1, &x, &class, &est.train)
            .unwrap()
            .value,
        0.0
    );
    assert_eq!(estimate_dh(&x, &x, &class, &est.train).unwrap().value, 0.0);
}

#[test]
fn separated_clusters_give_full_dh() {
    let s = unl(&[-10.0, -9.0]);
    let t = unl(&[9.0, 10.0]);
    let est = EstimatorConfig::default();
    let class = est.class_for(&[s.features(), t.features()]).unwrap();
    assert_eq!(estimate_dh(&s, &t, &class, &est.train).unwrap().value, 1.0);
}

#[test]
fn self_discrepancy_is_small_at_large_n() {
    let gen = |stream| {
        gen_gaussian_domain(&GaussianDomainSpec::new(
            vec![5.0, -3.0],
            vec![-5.0, -3.0],
            2500,
            derive_seed(77, stream),
        ))
        .unwrap()
    };
    let source = gen(1);
    let target = gen(2).inputs();
    let est = EstimatorConfig::default();
    let class = est
        .class_for(&[source.features(), target.features()])
        .unwrap();
    let v = estimate_sdisc(&source, &target, &class, &est.train)
        .unwrap()
        .value;
    assert!(v <= 0.08, "self-discrepancy {v}");
}

#[test]
fn toy_ranking_orders_flip_between_measures() {
    let d = toy_domains(0, 200).unwrap();
    let sources = vec![
        SourceEntry {
            name: "s2".into(),
            data: d.source_2.clone(),
            tag: None,
        },
        SourceEntry {
            name: "s1".into(),
            data: d.source_1.clone(),
            tag: None,
        },
    ];
    let est = EstimatorConfig::default();
    let t = d.target.inputs();
    let by_sdisc = rank_sources(&t, &sources, Measure::Sdisc, &est, 1).unwrap();
    assert_eq!(by_sdisc.entries[0].name, "s1");
    let by_dh = rank_sources(&t, &sources, Measure::Dh, &est, 1).unwrap();
    assert_eq!(by_dh.entries[0].name, "s2");
}

#[test]
fn failing_source_is_reported_without_aborting() {
    let good = lab(&[-1.0, 1.0], &[-1.0, 1.0]);
    let wide = disckit::LabeledDataset::new(
        Array2::from_shape_vec((2, 2), vec![0.0, 1.0, 1.0, 0.0]).unwrap(),
        Array1::from(vec![1.0, -1.0]),
    )
    .unwrap();
    let sources = vec![
        SourceEntry {
            name: "wide".into(),
            data: wide,
            tag: None,
        },
        SourceEntry {
            name: "good".into(),
            data: good,
            tag: None,
        },
    ];
    let est = EstimatorConfig {
        train: TrainConfig {
            surrogate: Loss::Logistic,
            ..TrainConfig::default()
        },
        ..EstimatorConfig::default()
    };
    let r = rank_sources(&unl(&[0.5, -0.5]), &sources, Measure::Sdisc, &est, 5).unwrap();
    assert_eq!(r.entries[0].name, "good");
    assert_eq!(r.entries[0].rank, Some(1));
    assert_eq!(r.entries[1].rank, None);
    assert!(r.entries[1].error.is_some());
}
