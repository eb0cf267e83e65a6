//! Experiment harnesses behind the `disckit` subcommands.
//!
//! Every harness is a pure function of its configuration and seed. Per-trial
//! seeds are derived from the run seed by trial index with [`derive_seed`].

use std::time::Instant;

use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::data::{LabeledDataset, UnlabeledDataset};
use crate::disc::{
    estimate_dh, estimate_sdisc, fixed_ref_disc, rank_sources, source_classifier,
    xdisc_bruteforce_capped, EstimatorConfig, Measure, Ranking, SourceEntry, SourceTag,
};
use crate::error::{Error, Result};
use crate::grid::{Grid, SweepGrid};
use crate::hypothesis::Hypothesis;
use crate::ingest::{
    corrupt_dataset, gen_gaussian_domain, scale_pixels, stream_rng, GaussianDomainSpec, Style,
    SynthDigits,
};
use crate::learner::TrainConfig;
use crate::loss::{empirical_risk, Loss, Reference};
use crate::theory::{
    rademacher_linear_product, rademacher_product_monte_carlo, sdisc_deviation_bound, BoundReport,
    ComplexityInput, MonteCarloEstimate,
};

/// Seed for stream `stream` of run seed `seed`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    stream_rng(seed, stream).next_u64()
}

/// The three toy domains: class means for `+1` and `-1`.
pub const TOY_SOURCE_1: ([f64; 2], [f64; 2]) = ([5.0, -5.0], [-5.0, -5.0]);
pub const TOY_SOURCE_2: ([f64; 2], [f64; 2]) = ([2.0, -3.0], [0.0, 3.0]);
pub const TOY_TARGET: ([f64; 2], [f64; 2]) = ([5.0, -3.0], [-5.0, -3.0]);
pub const TOY_PER_CLASS: usize = 200;

#[derive(Debug, Clone)]
pub struct ToyDomains {
    pub source_1: LabeledDataset,
    pub source_2: LabeledDataset,
    /// Target labels are only used to score the source-trained classifiers.
    pub target: LabeledDataset,
}

pub fn toy_domains(seed: u64, per_class: usize) -> Result<ToyDomains> {
    let gen = |means: ([f64; 2], [f64; 2]), stream| {
        gen_gaussian_domain(&GaussianDomainSpec::new(
            means.0.to_vec(),
            means.1.to_vec(),
            per_class,
            derive_seed(seed, stream),
        ))
    };
    Ok(ToyDomains {
        source_1: gen(TOY_SOURCE_1, 1)?,
        source_2: gen(TOY_SOURCE_2, 2)?,
        target: gen(TOY_TARGET, 3)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyResult {
    pub seed: u64,
    pub sdisc_s1: f64,
    pub sdisc_s2: f64,
    pub dh_s1: f64,
    pub dh_s2: f64,
    /// Target 0-1 loss of the classifier trained on each source.
    pub target_loss_s1: f64,
    pub target_loss_s2: f64,
}

pub fn run_toy(seed: u64, cfg: &EstimatorConfig) -> Result<(ToyDomains, ToyResult)> {
    run_toy_sized(seed, TOY_PER_CLASS, cfg)
}

pub fn run_toy_sized(
    seed: u64,
    per_class: usize,
    cfg: &EstimatorConfig,
) -> Result<(ToyDomains, ToyResult)> {
    let d = toy_domains(seed, per_class)?;
    let target_x = d.target.inputs();
    let mut row = [0.0f64; 6];
    for (k, source) in [&d.source_1, &d.source_2].into_iter().enumerate() {
        let class = cfg.class_for(&[source.features(), target_x.features()])?;
        let s = estimate_sdisc(source, &target_x, &class, &cfg.train)?;
        let dh = estimate_dh(&source.inputs(), &target_x, &class, &cfg.train)?;
        let h = source_classifier(source, &class, &cfg.train)?;
        let loss = empirical_risk(
            &h,
            d.target.features(),
            Reference::Labels(d.target.labels()),
            Loss::ZeroOne,
        )?;
        row[k] = s.value;
        row[2 + k] = dh.value;
        row[4 + k] = loss;
    }
    let result = ToyResult {
        seed,
        sdisc_s1: row[0],
        sdisc_s2: row[1],
        dh_s1: row[2],
        dh_s2: row[3],
        target_loss_s1: row[4],
        target_loss_s2: row[5],
    };
    Ok((d, result))
}

/// Canvas side of the synthetic digit images.
pub const DIGIT_SIDE: usize = 6;

/// Faint digits on a mid-gray canvas. Centering the range keeps clipped pixel
/// noise close to zero-mean.
pub const DIGIT_STYLE: Style = Style {
    contrast: 0.3,
    offset: 98.0,
    pixel_noise: 5.0,
};

const ALL_DIGITS: [u8; 10] = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9];

/// Logistic surrogate with a short run, used on the digit images.
pub fn digit_estimator() -> EstimatorConfig {
    EstimatorConfig {
        train: TrainConfig {
            surrogate: Loss::Logistic,
            max_epochs: 200,
            ..TrainConfig::default()
        },
        ..EstimatorConfig::default()
    }
}

/// Synthetic stand-in for the digit source-selection study.
///
/// Target and clean sources render the same digit prototypes in the same
/// style. Noisy sources are clean ones with clipped Gaussian pixel noise. The
/// task is even versus odd, on pixels scaled to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    pub n_per_domain: usize,
    pub n_clean: usize,
    pub n_noisy: usize,
    pub sigma: f64,
    pub side: usize,
    pub style: Style,
    pub top_k: usize,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            n_per_domain: 2000,
            n_clean: 5,
            n_noisy: 5,
            sigma: 50.0,
            side: DIGIT_SIDE,
            style: DIGIT_STYLE,
            top_k: 5,
        }
    }
}

/// Target and tagged sources of one repetition, sources in a seeded random order.
pub fn selection_domains(
    seed: u64,
    cfg: &SelectionConfig,
) -> Result<(UnlabeledDataset, Vec<SourceEntry>)> {
    if cfg.n_clean + cfg.n_noisy == 0 || cfg.n_per_domain == 0 {
        return Err(Error::InvalidParameter(
            "need at least one source and one example".into(),
        ));
    }
    let gen = SynthDigits::new(cfg.side, derive_seed(seed, 0))?;
    let sample_seed = derive_seed(seed, 1);
    let target = gen.sample(cfg.n_per_domain, &ALL_DIGITS, cfg.style, sample_seed, 0)?;
    let target = UnlabeledDataset::new(scale_pixels(&target.pixels))?;
    let mut sources = Vec::with_capacity(cfg.n_clean + cfg.n_noisy);
    for k in 0..cfg.n_clean + cfg.n_noisy {
        let raw = gen
            .sample(
                cfg.n_per_domain,
                &ALL_DIGITS,
                cfg.style,
                sample_seed,
                1 + k as u64,
            )?
            .labeled()?;
        let (name, tag, data) = if k < cfg.n_clean {
            (format!("clean_{k}"), SourceTag::Clean, raw)
        } else {
            let noisy = corrupt_dataset(&raw, cfg.sigma, derive_seed(seed, 100 + k as u64))?;
            (
                format!("noisy_{}", k - cfg.n_clean),
                SourceTag::Noisy,
                noisy,
            )
        };
        let data = data.with_features(scale_pixels(data.features()))?;
        sources.push(SourceEntry {
            name,
            data,
            tag: Some(tag),
        });
    }
    sources.shuffle(&mut stream_rng(seed, 2));
    Ok((target, sources))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub seed: u64,
    pub sdisc: Ranking,
    pub dh: Ranking,
}

pub fn run_selection(
    seed: u64,
    cfg: &SelectionConfig,
    est: &EstimatorConfig,
) -> Result<SelectionResult> {
    let (target, sources) = selection_domains(seed, cfg)?;
    Ok(SelectionResult {
        seed,
        sdisc: rank_sources(&target, &sources, Measure::Sdisc, est, cfg.top_k)?,
        dh: rank_sources(&target, &sources, Measure::Dh, est, cfg.top_k)?,
    })
}

/// Largest per-domain size the convergence study accepts.
pub const MAX_CONVERGENCE_N: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    /// Source drawn from the target distribution.
    Identical,
    /// Source restricted to digits 0 to 7.
    Biased,
}

impl Pairing {
    pub fn name(self) -> &'static str {
        match self {
            Pairing::Identical => "identical",
            Pairing::Biased => "biased",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub pairing: Pairing,
    pub measure: Measure,
    pub value: f64,
}

/// S-disc and d_H between a digit target and two sources, for every `n` in
/// `n_grid` taken in ascending order.
pub fn run_convergence(
    seed: u64,
    n_grid: &[usize],
    est: &EstimatorConfig,
) -> Result<Vec<ConvergenceRow>> {
    if n_grid.is_empty() {
        return Err(Error::InvalidParameter("sample size grid is empty".into()));
    }
    let mut grid = n_grid.to_vec();
    grid.sort_unstable();
    grid.dedup();
    if let Some(&n) = grid.iter().find(|&&n| n == 0 || n > MAX_CONVERGENCE_N) {
        return Err(Error::InvalidParameter(format!(
            "sample size {n} is outside 1..={MAX_CONVERGENCE_N}"
        )));
    }
    let gen = SynthDigits::new(DIGIT_SIDE, derive_seed(seed, 0))?;
    let biased_digits: Vec<u8> = (0..8).collect();
    let mut rows = Vec::with_capacity(4 * grid.len());
    for &n in &grid {
        let s = derive_seed(seed, n as u64);
        let draw = |digits: &[u8], stream| -> Result<LabeledDataset> {
            let d = gen.sample(n, digits, DIGIT_STYLE, s, stream)?.labeled()?;
            d.with_features(scale_pixels(d.features()))
        };
        let target = draw(&ALL_DIGITS, 0)?.inputs();
        let sources = [
            (Pairing::Identical, draw(&ALL_DIGITS, 1)?),
            (Pairing::Biased, draw(&biased_digits, 2)?),
        ];
        for (pairing, source) in &sources {
            let class = est.class_for(&[source.features(), target.features()])?;
            let sd = estimate_sdisc(source, &target, &class, &est.train)?;
            let dh = estimate_dh(&source.inputs(), &target, &class, &est.train)?;
            for (measure, value) in [(Measure::Sdisc, sd.value), (Measure::Dh, dh.value)] {
                rows.push(ConvergenceRow {
                    n,
                    pairing: *pairing,
                    measure,
                    value,
                });
            }
        }
    }
    Ok(rows)
}

/// Least-squares slope of `ln y` on `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 || points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::InvalidParameter(
            "need two or more points with positive coordinates".into(),
        ));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("all x values are equal".into()));
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Ok(sxy / sxx)
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len().is_multiple_of(2) {
        (v[m - 1] + v[m]) / 2.0
    } else {
        v[m]
    })
}

/// Exact fixed-reference discrepancy over the direction grid between two
/// independent samples of the toy target distribution, `n` points each.
/// The reference is `sign(x_1)`; the population value is 0.
pub fn self_discrepancy(seed: u64, n: usize, directions: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(
            "need at least two points per sample".into(),
        ));
    }
    let draw = |stream| {
        gen_gaussian_domain(&GaussianDomainSpec::new(
            TOY_TARGET.0.to_vec(),
            TOY_TARGET.1.to_vec(),
            n / 2,
            derive_seed(seed, stream),
        ))
        .map(|d| d.inputs())
    };
    let (a, b) = (draw(1)?, draw(2)?);
    let est = EstimatorConfig {
        grid_directions: directions,
        ..EstimatorConfig::default()
    };
    let class = est.oracle_class_for(&[a.features(), b.features()])?;
    let h_ref = Hypothesis::new(Array1::from(vec![1.0, 0.0, 0.0]), *class.basis())?;
    Ok(fixed_ref_disc(&h_ref, &a, &b, &class)?.value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageSummary {
    pub n: usize,
    pub delta: f64,
    pub bound: BoundReport,
    /// Observed discrepancy of each trial; the population value is 0.
    pub deviations: Vec<f64>,
    pub covered: usize,
}

impl CoverageSummary {
    pub fn rate(&self) -> f64 {
        self.covered as f64 / self.deviations.len() as f64
    }
}

/// How often the finite-sample deviation bound covers [`self_discrepancy`].
///
/// The 0-1 losses depend on `sign(w . phi(x))` only, so scaling every
/// `phi(x)` and `w` to unit norm leaves the discrepancy unchanged. The bound is
/// therefore taken at `Lambda = D_phi = 1`.
pub fn bound_coverage(
    seed: u64,
    n: usize,
    trials: usize,
    delta: f64,
    directions: usize,
) -> Result<CoverageSummary> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trial count is zero".into()));
    }
    let input = ComplexityInput::new(1.0, 1.0, n as f64, n as f64, delta);
    let bound = sdisc_deviation_bound(&input)?;
    let deviations = (0..trials as u64)
        .map(|t| self_discrepancy(derive_seed(seed, t), n, directions))
        .collect::<Result<Vec<f64>>>()?;
    let covered = deviations.iter().filter(|&&d| d <= bound.value).count();
    Ok(CoverageSummary {
        n,
        delta,
        bound,
        deviations,
        covered,
    })
}

/// Monte Carlo Rademacher average of `H x H` for `m` points uniform in the
/// unit disc, with `Lambda = 1`, next to the closed-form bound `1 / sqrt(m)`.
pub fn rademacher_check(
    seed: u64,
    m: usize,
    draws: usize,
    directions: usize,
) -> Result<(MonteCarloEstimate, f64)> {
    if m == 0 {
        return Err(Error::InvalidParameter("need at least one point".into()));
    }
    let mut rng = stream_rng(seed, 0);
    let mut coords = Vec::with_capacity(2 * m);
    for _ in 0..m {
        let r = rng.gen::<f64>().sqrt();
        let a = rng.gen_range(0.0..std::f64::consts::TAU);
        coords.extend([r * a.cos(), r * a.sin()]);
    }
    let phi = Array2::from_shape_vec((m, 2), coords).expect("two coordinates per point");
    let estimate =
        rademacher_product_monte_carlo(&phi, 1.0, draws, directions, derive_seed(seed, 1))?;
    let input = ComplexityInput::new(1.0, 1.0, m as f64, m as f64, 0.5);
    Ok((estimate, rademacher_linear_product(&input, m as f64)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub repeats: usize,
    /// Directions of the pair-enumeration grid; every data threshold is kept.
    pub xdisc_directions: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: vec![100, 200, 400],
            repeats: 3,
            xdisc_directions: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub method: String,
    pub median_seconds: f64,
    pub runs: Vec<f64>,
    /// Grid members enumerated, for the pair enumeration.
    pub grid_members: Option<usize>,
}

type TimedRun<'a> = Box<dyn Fn() -> Result<()> + 'a>;

/// Wall-clock time of the S-disc and d_H estimators and of X-disc by pair
/// enumeration, on the toy source 1 and target at `n` points per domain.
pub fn run_bench(seed: u64, cfg: &BenchConfig, est: &EstimatorConfig) -> Result<Vec<BenchRow>> {
    if cfg.sizes.is_empty() || cfg.sizes.contains(&0) {
        return Err(Error::InvalidParameter(
            "bench sizes must be nonempty and positive".into(),
        ));
    }
    if cfg.repeats == 0 || cfg.xdisc_directions == 0 {
        return Err(Error::InvalidParameter(
            "repeats and directions must be positive".into(),
        ));
    }
    let mut rows = Vec::new();
    for &n in &cfg.sizes {
        let d = toy_domains(derive_seed(seed, n as u64), n.div_ceil(2))?;
        let (source, target) = (&d.source_1, d.target.inputs());
        let class = est.class_for(&[source.features(), target.features()])?;
        let grid = SweepGrid::direction_net(2, cfg.xdisc_directions)?;
        let oracle = class.clone().with_grid(Grid::Sweep(grid))?;
        let members = oracle
            .require_grid()?
            .member_count(&[source.features(), target.features()]);
        let methods: [(&str, TimedRun); 3] = [
            (
                "sdisc",
                Box::new(|| estimate_sdisc(source, &target, &class, &est.train).map(drop)),
            ),
            (
                "dh",
                Box::new(|| estimate_dh(&source.inputs(), &target, &class, &est.train).map(drop)),
            ),
            (
                "xdisc_bruteforce",
                Box::new(|| {
                    xdisc_bruteforce_capped(&source.inputs(), &target, &oracle, members).map(drop)
                }),
            ),
        ];
        for (method, run) in &methods {
            let mut runs = Vec::with_capacity(cfg.repeats);
            for _ in 0..cfg.repeats {
                let start = Instant::now();
                run()?;
                runs.push(start.elapsed().as_secs_f64());
            }
            rows.push(BenchRow {
                n,
                method: method.to_string(),
                median_seconds: median(&runs).expect("repeats > 0"),
                runs,
                grid_members: (*method == "xdisc_bruteforce").then_some(members),
            });
        }
    }
    Ok(rows)
}
