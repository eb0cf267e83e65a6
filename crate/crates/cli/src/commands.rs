use std::path::{Path, PathBuf};

use serde::Serialize;

use disckit::disc::{
    estimate_dh, estimate_sdisc, rank_sources, xdisc_bruteforce_capped, EstimatorConfig, Measure,
    SourceEntry, SourceTag,
};
use disckit::experiments::{
    digit_estimator, median, run_bench, run_convergence, run_selection, BenchConfig,
    SelectionConfig,
};
use disckit::ingest::{
    even_odd_labels, read_idx_file, read_instances_file, scale_pixels, write_instances,
};
use disckit::{LabeledDataset, Loss, UnlabeledDataset};

use crate::config::FileValues;
use crate::output::{json_string, write_table, Format};
use crate::{
    BenchArgs, CliError, Common, ConvergenceArgs, EstimateArgs, EstimatorArgs, RankArgs, ToyArgs,
};

const COMMON_KEYS: [&str; 3] = ["seed", "out", "format"];
const ESTIMATOR_KEYS: [&str; 6] = [
    "surrogate",
    "lambda",
    "epochs",
    "step",
    "directions",
    "grid_cap",
];

fn load_file(
    path: Option<&PathBuf>,
    command: &str,
    extra: &[&str],
) -> Result<FileValues, CliError> {
    let file = match path {
        Some(p) => FileValues::load(p)?,
        None => FileValues::default(),
    };
    let mut allowed: Vec<&str> = COMMON_KEYS
        .iter()
        .chain(ESTIMATOR_KEYS.iter())
        .copied()
        .collect();
    allowed.extend_from_slice(extra);
    file.check_keys(command, &allowed)?;
    Ok(file)
}

struct Resolved {
    seed: u64,
    out: PathBuf,
    format: Format,
}

fn resolve_common(c: &Common, file: &FileValues) -> Result<Resolved, CliError> {
    Ok(Resolved {
        seed: file.pick(c.seed, "seed", 0)?,
        out: file.pick(c.out.clone(), "out", PathBuf::from("disckit-out"))?,
        format: file.pick(c.format, "format", Format::Json)?,
    })
}

fn resolve_estimator(
    a: &EstimatorArgs,
    file: &FileValues,
    base: EstimatorConfig,
) -> Result<EstimatorConfig, CliError> {
    let mut cfg = base;
    if let Some(s) = file.pick_opt(a.surrogate.clone(), "surrogate")? {
        let loss: Loss = s
            .parse::<Loss>()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        cfg.train.surrogate = loss;
    }
    cfg.norm_bound = file.pick_opt(a.lambda, "lambda")?.or(cfg.norm_bound);
    cfg.train.max_epochs = file.pick(a.epochs, "epochs", cfg.train.max_epochs)?;
    cfg.train.step0 = file.pick(a.step, "step", cfg.train.step0)?;
    cfg.grid_directions = file.pick(a.directions, "directions", cfg.grid_directions)?;
    cfg.grid_cap = file.pick(a.grid_cap, "grid_cap", cfg.grid_cap)?;
    cfg.train.validate()?;
    Ok(cfg)
}

fn parse_measure(s: &str) -> Result<Measure, CliError> {
    s.parse::<Measure>()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn announce(path: &Path) {
    println!("wrote {}", path.display());
}

#[derive(Serialize)]
struct ToyRow {
    quantity: &'static str,
    source: &'static str,
    value: f64,
}

#[derive(Serialize)]
struct PointRow {
    domain: &'static str,
    x1: f64,
    x2: f64,
    label: f64,
}

pub fn toy(a: ToyArgs) -> Result<(), CliError> {
    let file = load_file(a.common.config.as_ref(), "toy", &["per_class"])?;
    let r = resolve_common(&a.common, &file)?;
    let est = resolve_estimator(&a.est, &file, EstimatorConfig::default())?;
    let per_class = file.pick(
        a.per_class,
        "per_class",
        disckit::experiments::TOY_PER_CLASS,
    )?;
    if per_class == 0 {
        return Err(CliError::Usage("per_class must be positive".into()));
    }
    let (domains, result) = disckit::experiments::run_toy_sized(r.seed, per_class, &est)?;
    let rows = vec![
        ToyRow {
            quantity: "sdisc",
            source: "s1",
            value: result.sdisc_s1,
        },
        ToyRow {
            quantity: "sdisc",
            source: "s2",
            value: result.sdisc_s2,
        },
        ToyRow {
            quantity: "dh",
            source: "s1",
            value: result.dh_s1,
        },
        ToyRow {
            quantity: "dh",
            source: "s2",
            value: result.dh_s2,
        },
        ToyRow {
            quantity: "target_loss",
            source: "s1",
            value: result.target_loss_s1,
        },
        ToyRow {
            quantity: "target_loss",
            source: "s2",
            value: result.target_loss_s2,
        },
    ];
    announce(&write_table(&r.out, "toy", r.format, &result, &rows)?);
    let mut points = Vec::new();
    for (domain, d) in [
        ("s1", &domains.source_1),
        ("s2", &domains.source_2),
        ("target", &domains.target),
    ] {
        for (x, &y) in d.features().rows().into_iter().zip(d.labels()) {
            points.push(PointRow {
                domain,
                x1: x[0],
                x2: x[1],
                label: y,
            });
        }
    }
    announce(&write_table(
        &r.out,
        "toy_points",
        r.format,
        &points,
        &points,
    )?);
    for (name, d, labeled) in [
        ("toy_s1.inst", &domains.source_1, true),
        ("toy_s2.inst", &domains.source_2, true),
        ("toy_target.inst", &domains.target, false),
    ] {
        let body = write_instances(d.features(), labeled.then(|| d.labels()))?;
        let path = r.out.join(name);
        std::fs::write(&path, body)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
        announce(&path);
    }
    Ok(())
}

#[derive(Serialize)]
struct ConvergenceCsvRow {
    n: usize,
    pairing: &'static str,
    measure: &'static str,
    value: f64,
}

pub fn convergence(a: ConvergenceArgs) -> Result<(), CliError> {
    let file = load_file(a.common.config.as_ref(), "convergence", &["n_grid"])?;
    let r = resolve_common(&a.common, &file)?;
    let est = resolve_estimator(&a.est, &file, digit_estimator())?;
    let grid = file.pick_list(a.n_grid, "n_grid", vec![1000, 2000, 4000, 8000])?;
    let rows = run_convergence(r.seed, &grid, &est)?;
    let flat: Vec<ConvergenceCsvRow> = rows
        .iter()
        .map(|x| ConvergenceCsvRow {
            n: x.n,
            pairing: x.pairing.name(),
            measure: x.measure.name(),
            value: x.value,
        })
        .collect();
    announce(&write_table(&r.out, "convergence", r.format, &rows, &flat)?);
    Ok(())
}

/// `idx:IMAGES[,LABELS]` or an instance file.
fn load_dataset(
    spec: &str,
) -> Result<(disckit::Array2<f64>, Option<disckit::Array1<f64>>), CliError> {
    if let Some(rest) = spec.strip_prefix("idx:") {
        let (images, labels) = match rest.split_once(',') {
            Some((i, l)) => (i, Some(l)),
            None => (rest, None),
        };
        let x = read_idx_file(images)
            .map_err(|e| CliError::Data(format!("{images}: {e}")))?
            .to_matrix()?;
        let y = labels
            .map(|l| -> Result<_, CliError> {
                let t = read_idx_file(l).map_err(|e| CliError::Data(format!("{l}: {e}")))?;
                let digits: Vec<u8> = t.data.to_f64().iter().map(|&v| v as u8).collect();
                Ok(even_odd_labels(&digits)?)
            })
            .transpose()?;
        return Ok((scale_pixels(&x), y));
    }
    let inst = read_instances_file(spec).map_err(|e| CliError::Data(format!("{spec}: {e}")))?;
    Ok((inst.features, inst.labels))
}

fn load_labeled(spec: &str) -> Result<LabeledDataset, CliError> {
    match load_dataset(spec)? {
        (x, Some(y)) => Ok(LabeledDataset::new(x, y)?),
        (_, None) => Err(CliError::Data(format!("{spec}: source data needs labels"))),
    }
}

fn load_unlabeled(spec: &str) -> Result<UnlabeledDataset, CliError> {
    Ok(UnlabeledDataset::new(load_dataset(spec)?.0)?)
}

fn parse_source(spec: &str) -> Result<(String, Option<SourceTag>), CliError> {
    match spec.rsplit_once('@') {
        Some((path, "clean")) => Ok((path.to_string(), Some(SourceTag::Clean))),
        Some((path, "noisy")) => Ok((path.to_string(), Some(SourceTag::Noisy))),
        Some((_, tag)) => Err(CliError::Usage(format!(
            "unknown source tag `{tag}` (expected clean or noisy)"
        ))),
        None => Ok((spec.to_string(), None)),
    }
}

#[derive(Serialize)]
struct SelectionRow {
    sigma: f64,
    rep: usize,
    seed: u64,
    measure: &'static str,
    clean_in_top_k: usize,
}

#[derive(Serialize)]
struct SelectionSummary {
    sigma: f64,
    measure: &'static str,
    mean_score: f64,
    median_score: f64,
    perfect: usize,
    reps: usize,
}

#[derive(Serialize)]
struct SelectionReport<'a> {
    config: &'a SelectionConfig,
    summary: Vec<SelectionSummary>,
    rows: &'a [SelectionRow],
}

pub fn rank(a: RankArgs) -> Result<(), CliError> {
    let file = load_file(
        a.common.config.as_ref(),
        "rank",
        &[
            "target",
            "sources",
            "measure",
            "top_k",
            "synthetic",
            "sigmas",
            "reps",
            "n",
        ],
    )?;
    let r = resolve_common(&a.common, &file)?;
    let synthetic = a.synthetic || file.pick(None, "synthetic", false)?;
    let top_k = file.pick(a.top_k, "top_k", 5)?;
    if synthetic {
        let est = resolve_estimator(&a.est, &file, digit_estimator())?;
        let sigmas = file.pick_list(a.sigmas, "sigmas", vec![30.0, 40.0, 50.0])?;
        let reps = file.pick(a.reps, "reps", 15)?;
        let n = file.pick(a.n, "n", 2000)?;
        if sigmas.is_empty() || reps == 0 || n == 0 {
            return Err(CliError::Usage(
                "sigmas, reps and n must be nonempty and positive".into(),
            ));
        }
        return rank_synthetic(&r, &est, &sigmas, reps, n, top_k);
    }
    let est = resolve_estimator(&a.est, &file, EstimatorConfig::default())?;
    let target = file
        .pick_opt(a.target, "target")?
        .ok_or_else(|| CliError::Usage("rank needs --target (or --synthetic)".into()))?;
    let specs = file.pick_list(
        (!a.sources.is_empty()).then_some(a.sources),
        "sources",
        Vec::new(),
    )?;
    if specs.is_empty() {
        return Err(CliError::Usage("rank needs at least one --source".into()));
    }
    let measure = parse_measure(&file.pick(a.measure, "measure", "sdisc".to_string())?)?;
    let target = load_unlabeled(&target)?;
    let sources = specs
        .iter()
        .map(|s| {
            let (path, tag) = parse_source(s)?;
            Ok(SourceEntry {
                data: load_labeled(&path)?,
                name: path,
                tag,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let ranking = rank_sources(&target, &sources, measure, &est, top_k)?;
    announce(&write_table(
        &r.out,
        "ranking",
        r.format,
        &ranking,
        &ranking.entries,
    )?);
    if let Some(c) = ranking.clean_in_top_k {
        println!("clean sources in the top {}: {c}", ranking.top_k);
    }
    Ok(())
}

fn rank_synthetic(
    r: &Resolved,
    est: &EstimatorConfig,
    sigmas: &[f64],
    reps: usize,
    n: usize,
    top_k: usize,
) -> Result<(), CliError> {
    let mut cfg = SelectionConfig {
        n_per_domain: n,
        top_k,
        ..SelectionConfig::default()
    };
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for &sigma in sigmas {
        cfg.sigma = sigma;
        let mut scores: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
        for rep in 0..reps {
            let seed = disckit::experiments::derive_seed(r.seed, rep as u64);
            let res = run_selection(seed, &cfg, est)?;
            for (k, ranking) in [&res.sdisc, &res.dh].into_iter().enumerate() {
                let score = ranking
                    .clean_in_top_k
                    .expect("synthetic sources are tagged");
                scores[k].push(score as f64);
                rows.push(SelectionRow {
                    sigma,
                    rep,
                    seed,
                    measure: ranking.measure.name(),
                    clean_in_top_k: score,
                });
            }
        }
        for (k, measure) in [Measure::Sdisc, Measure::Dh].into_iter().enumerate() {
            let s = &scores[k];
            summary.push(SelectionSummary {
                sigma,
                measure: measure.name(),
                mean_score: s.iter().sum::<f64>() / s.len() as f64,
                median_score: median(s).expect("reps > 0"),
                perfect: s
                    .iter()
                    .filter(|&&v| v == cfg.n_clean.min(top_k) as f64)
                    .count(),
                reps,
            });
            println!(
                "sigma {sigma}: {} mean clean-in-top-{top_k} score {:.2}",
                measure.name(),
                summary.last().expect("just pushed").mean_score
            );
        }
    }
    let report = SelectionReport {
        config: &cfg,
        summary,
        rows: &rows,
    };
    announce(&write_table(&r.out, "selection", r.format, &report, &rows)?);
    Ok(())
}

#[derive(Serialize)]
struct BenchCsvRow<'a> {
    n: usize,
    method: &'a str,
    median_seconds: f64,
    log10_median_seconds: f64,
    grid_members: Option<usize>,
    note: &'static str,
}

const BRUTEFORCE_NOTE: &str =
    "exact pair enumeration over a direction grid stands in for the SDP solver";

pub fn bench(a: BenchArgs) -> Result<(), CliError> {
    let file = load_file(
        a.common.config.as_ref(),
        "bench",
        &["sizes", "repeats", "xdisc_directions"],
    )?;
    let r = resolve_common(&a.common, &file)?;
    let est = resolve_estimator(&a.est, &file, EstimatorConfig::default())?;
    let defaults = BenchConfig::default();
    let cfg = BenchConfig {
        sizes: file.pick_list(a.sizes, "sizes", defaults.sizes)?,
        repeats: file.pick(a.repeats, "repeats", defaults.repeats)?,
        xdisc_directions: file.pick(
            a.xdisc_directions,
            "xdisc_directions",
            defaults.xdisc_directions,
        )?,
    };
    if cfg.sizes.is_empty() {
        return Err(CliError::Usage("bench needs at least one size".into()));
    }
    let rows = run_bench(r.seed, &cfg, &est)?;
    let flat: Vec<BenchCsvRow> = rows
        .iter()
        .map(|x| BenchCsvRow {
            n: x.n,
            method: &x.method,
            median_seconds: x.median_seconds,
            log10_median_seconds: x.median_seconds.max(1e-9).log10(),
            grid_members: x.grid_members,
            note: if x.grid_members.is_some() {
                BRUTEFORCE_NOTE
            } else {
                ""
            },
        })
        .collect();
    announce(&write_table(&r.out, "bench", r.format, &rows, &flat)?);
    for x in &rows {
        println!("n={} {}: median {:.4} s", x.n, x.method, x.median_seconds);
    }
    Ok(())
}

pub fn estimate(a: EstimateArgs) -> Result<(), CliError> {
    let file = match a.config.as_ref() {
        Some(p) => FileValues::load(p)?,
        None => FileValues::default(),
    };
    let mut allowed: Vec<&str> = ESTIMATOR_KEYS.to_vec();
    allowed.extend_from_slice(&["source", "target", "measure"]);
    file.check_keys("estimate", &allowed)?;
    let est = resolve_estimator(&a.est, &file, EstimatorConfig::default())?;
    let source = file
        .pick_opt(a.source, "source")?
        .ok_or_else(|| CliError::Usage("estimate needs --source".into()))?;
    let target = file
        .pick_opt(a.target, "target")?
        .ok_or_else(|| CliError::Usage("estimate needs --target".into()))?;
    let measure = parse_measure(&file.pick(a.measure, "measure", "sdisc".to_string())?)?;
    let target = load_unlabeled(&target)?;
    let report = match measure {
        Measure::Sdisc => {
            let source = load_labeled(&source)?;
            let class = est.class_for(&[source.features(), target.features()])?;
            estimate_sdisc(&source, &target, &class, &est.train)?
        }
        Measure::Dh => {
            let source = load_unlabeled(&source)?;
            let class = est.class_for(&[source.features(), target.features()])?;
            estimate_dh(&source, &target, &class, &est.train)?
        }
        Measure::XdiscBruteforce => {
            let source = load_unlabeled(&source)?;
            let class = est.oracle_class_for(&[source.features(), target.features()])?;
            xdisc_bruteforce_capped(&source, &target, &class, est.grid_cap)?
        }
    };
    print!("{}", json_string(&report.to_record()));
    Ok(())
}
