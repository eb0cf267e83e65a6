use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn disckit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_disckit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&read(path)).expect("valid json")
}

fn write(dir: &TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn toy_reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = disckit(&[
            "toy",
            "--seed",
            "5",
            "--per-class",
            "40",
            "--out",
            path_str(out),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    for name in [
        "toy.json",
        "toy_points.json",
        "toy_s1.inst",
        "toy_target.inst",
    ] {
        assert_eq!(read(&a.join(name)), read(&b.join(name)), "{name}");
    }
}

#[test]
fn toy_csv_has_all_quantities() {
    let dir = TempDir::new().unwrap();
    let o = disckit(&[
        "toy",
        "--per-class",
        "30",
        "--format",
        "csv",
        "--out",
        path_str(dir.path()),
    ]);
    assert_eq!(code(&o), 0);
    let text = read(&dir.path().join("toy.csv"));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("quantity,source,value"));
    assert_eq!(lines.count(), 6);
    let points = read(&dir.path().join("toy_points.csv"));
    assert_eq!(points.lines().count(), 1 + 3 * 60);
}

#[test]
fn toy_files_round_trip_through_estimate() {
    let dir = TempDir::new().unwrap();
    let o = disckit(&[
        "toy",
        "--seed",
        "2",
        "--per-class",
        "50",
        "--out",
        path_str(dir.path()),
    ]);
    assert_eq!(code(&o), 0);
    let toy = json(&dir.path().join("toy.json"));
    for (file, key) in [("toy_s1.inst", "sdisc_s1"), ("toy_s2.inst", "sdisc_s2")] {
        let o = disckit(&[
            "estimate",
            "--source",
            path_str(&dir.path().join(file)),
            "--target",
            path_str(&dir.path().join("toy_target.inst")),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let report: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(report["measure"], "sdisc");
        assert_eq!(report["value"], toy[key], "{file}");
    }
}

#[test]
fn estimate_xdisc_matches_threshold_oracle_in_1d() {
    let dir = TempDir::new().unwrap();
    let s = write(&dir, "s.inst", "0.1;+1\n0.5;-1\n0.7;+1\n");
    let t = write(&dir, "t.inst", "0.2\n0.3\n0.9\n");
    let o = disckit(&[
        "estimate",
        "--source",
        &s,
        "--target",
        &t,
        "--measure",
        "xdisc",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();

    // Every pair of thresholds, both orientations.
    let src = [0.1, 0.5, 0.7];
    let tgt = [0.2, 0.3, 0.9];
    let mut cuts: Vec<f64> = vec![-1.0, 2.0];
    let mut all: Vec<f64> = src.iter().chain(&tgt).copied().collect();
    all.sort_by(f64::total_cmp);
    cuts.extend(all.windows(2).map(|w| (w[0] + w[1]) / 2.0));
    let label = |c: f64, o: f64, x: f64| if o * (x - c) > 0.0 { 1 } else { -1 };
    let disagree = |pts: &[f64], a: (f64, f64), b: (f64, f64)| {
        pts.iter()
            .filter(|&&x| label(a.0, a.1, x) != label(b.0, b.1, x))
            .count() as f64
            / pts.len() as f64
    };
    let members: Vec<(f64, f64)> = cuts.iter().flat_map(|&c| [(c, 1.0), (c, -1.0)]).collect();
    let mut best = 0.0f64;
    for &a in &members {
        for &b in &members {
            best = best.max((disagree(&tgt, a, b) - disagree(&src, a, b)).abs());
        }
    }
    assert!((report["value"].as_f64().unwrap() - best).abs() < 1e-12);
}

#[test]
fn bad_path_is_a_data_error() {
    let o = disckit(&[
        "estimate",
        "--source",
        "/nonexistent/s",
        "--target",
        "/nonexistent/t",
    ]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/"));
}

#[test]
fn divergence_is_a_numeric_failure() {
    let dir = TempDir::new().unwrap();
    let s = write(&dir, "s.inst", "1e10;+1\n-1e10;-1\n");
    let o = disckit(&[
        "estimate", "--source", &s, "--target", &s, "--lambda", "1e300", "--step", "1e300",
    ]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn usage_errors_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "bad.cfg", "sed = 3\n");
    assert_eq!(code(&disckit(&["toy", "--config", &cfg])), 1);
    assert_eq!(code(&disckit(&["frobnicate"])), 1);
    assert_eq!(code(&disckit(&["toy", "--format", "xml"])), 1);
    assert_eq!(code(&disckit(&["estimate", "--target", "x"])), 1);
    assert_eq!(code(&disckit(&["toy", "--surrogate", "cubic"])), 1);
    assert_eq!(code(&disckit(&["--help"])), 0);
}

#[test]
fn empty_bench_sizes_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "bench.cfg", "sizes =\n");
    let out = dir.path().join("o");
    assert_eq!(
        code(&disckit(&[
            "bench",
            "--config",
            &cfg,
            "--out",
            path_str(&out)
        ])),
        1
    );
    assert_eq!(code(&disckit(&["bench", "--sizes", ""])), 1);
    assert!(!out.exists());
}

#[test]
fn flags_override_the_config_file() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("o");
    let cfg = write(
        &dir,
        "toy.cfg",
        &format!(
            "# toy run\nseed = 11\nper-class = 20\nout = {}\n",
            out.display()
        ),
    );
    let o = disckit(&["toy", "--config", &cfg, "--seed", "12"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let toy = json(&out.join("toy.json"));
    assert_eq!(toy["seed"], 12);
    let points = json(&out.join("toy_points.json"));
    assert_eq!(points.as_array().unwrap().len(), 3 * 40);
}

#[test]
fn rank_single_source() {
    let dir = TempDir::new().unwrap();
    let s = write(&dir, "s.inst", "0.1;+1\n0.5;-1\n0.7;+1\n");
    let t = write(&dir, "t.inst", "0.2\n0.3\n0.9\n");
    let out = dir.path().join("o");
    let o = disckit(&[
        "rank",
        "--target",
        &t,
        "--source",
        &format!("{s}@clean"),
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&out.join("ranking.json"));
    assert_eq!(r["entries"].as_array().unwrap().len(), 1);
    assert_eq!(r["entries"][0]["rank"], 1);
    assert_eq!(r["clean_in_top_k"], 1);
}

#[test]
fn rank_reads_idx_with_digit_labels() {
    let dir = TempDir::new().unwrap();
    let images: Vec<u8> = (0..4u8).flat_map(|i| [i * 60, 255 - i * 60]).collect();
    let mut img = vec![0, 0, 0x08, 3, 0, 0, 0, 4, 0, 0, 0, 1, 0, 0, 0, 2];
    img.extend(images);
    let mut lab = vec![0, 0, 0x08, 1, 0, 0, 0, 4];
    lab.extend([0u8, 1, 2, 3]);
    let ip = dir.path().join("img.idx");
    let lp = dir.path().join("lab.idx");
    std::fs::write(&ip, img).unwrap();
    std::fs::write(&lp, lab).unwrap();
    let src = format!("idx:{},{}", ip.display(), lp.display());
    let tgt = format!("idx:{}", ip.display());
    let out = dir.path().join("o");
    let o = disckit(&[
        "rank",
        "--target",
        &tgt,
        "--source",
        &src,
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&out.join("ranking.json"));
    assert_eq!(r["entries"][0]["value"], 0.0);

    let unlabeled = format!("idx:{}", ip.display());
    let o = disckit(&["rank", "--target", &tgt, "--source", &unlabeled]);
    assert_eq!(code(&o), 2);
}

#[test]
fn synthetic_rank_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let mut bodies = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let o = disckit(&[
            "rank",
            "--synthetic",
            "--sigmas",
            "50",
            "--reps",
            "1",
            "--n",
            "100",
            "--epochs",
            "30",
            "--seed",
            "3",
            "--format",
            "csv",
            "--out",
            path_str(&out),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        bodies.push(read(&out.join("selection.csv")));
    }
    assert_eq!(bodies[0], bodies[1]);
    let mut lines = bodies[0].lines();
    assert_eq!(lines.next(), Some("sigma,rep,seed,measure,clean_in_top_k"));
    assert_eq!(lines.count(), 2);
}

#[test]
fn convergence_rows_ascend_in_n() {
    let dir = TempDir::new().unwrap();
    let o = disckit(&[
        "convergence",
        "--n-grid",
        "300,100,200",
        "--epochs",
        "30",
        "--format",
        "csv",
        "--out",
        path_str(dir.path()),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = read(&dir.path().join("convergence.csv"));
    let ns: Vec<usize> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(ns.len(), 3 * 2 * 2);
    assert!(ns.windows(2).all(|w| w[0] <= w[1]));

    let o = disckit(&["convergence", "--n-grid", "1000000"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn bench_writes_the_oracle_note() {
    let dir = TempDir::new().unwrap();
    let o = disckit(&[
        "bench",
        "--sizes",
        "20,40",
        "--repeats",
        "1",
        "--epochs",
        "50",
        "--format",
        "csv",
        "--out",
        path_str(dir.path()),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = read(&dir.path().join("bench.csv"));
    assert_eq!(text.lines().count(), 1 + 2 * 3);
    assert!(text.contains("pair enumeration"));
}
