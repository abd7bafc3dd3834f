use std::path::Path;
use std::process::{Command, Output};

use canardlab::ExperimentConfig;

fn run(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_canardlab"));
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn config_text_round_trip() {
    let text = "# family\nb = 1\nbeta = -1\nc_minus_gamma = 2.5\nxi = 6.5\nphi = finite\nk = 3\n\
                z_values = -0.5,-1,-2\nout = results/run1\n";
    let cfg = ExperimentConfig::parse(text).unwrap();
    assert_eq!(cfg.xi, Some(6.5));
    assert_eq!(cfg.z_values, Some(vec![-0.5, -1.0, -2.0]));
    let again = ExperimentConfig::parse(&cfg.to_text()).unwrap();
    assert_eq!(again, cfg);
}

#[test]
fn config_file_and_flags_merge() {
    let tmp = tempfile::tempdir().unwrap();
    let conf = tmp.path().join("run.conf");
    std::fs::write(&conf, "xi = 2.0\nb = 1\n").unwrap();
    let out = tmp.path().join("classify");
    let o = run(
        &["classify", "--config", conf.to_str().unwrap(), "--xi", "3.5", "--out", out.to_str().unwrap()],
        &[],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&read(&out, "classify.json")).unwrap();
    let lp = report["eigen"]["lambda_plus"].as_f64().unwrap();
    assert!((lp + 0.6).abs() < 1e-12);
}

#[test]
fn invalid_parameters_exit_with_code_two() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["classify", "--b", "0", "--out", tmp.path().to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(2));
    let conf = tmp.path().join("bad.conf");
    std::fs::write(&conf, "xi = 2\nnot_a_key = 1\n").unwrap();
    let o = run(&["classify", "--config", conf.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn missing_config_is_an_io_error() {
    let o = run(&["classify", "--config", "/nonexistent/canardlab.conf"], &[]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn simulate_output_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let o = run(&["simulate", "--t-end", "0.5", "--out", dir.to_str().unwrap()], &[]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(read(&a, "trajectory.csv"), read(&b, "trajectory.csv"));
    let meta: serde_json::Value = serde_json::from_str(&read(&a, "trajectory.csv.meta.json")).unwrap();
    assert_eq!(meta["command"], "simulate");
    assert_eq!(meta["file"], "trajectory.csv");
    let header = read(&a, "trajectory.csv").lines().next().unwrap().to_string();
    let cols: Vec<String> = meta["columns"].as_array().unwrap().iter().map(|c| c.as_str().unwrap().to_string()).collect();
    assert_eq!(header, cols.join(","));
}

#[test]
fn hunt_is_identical_across_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("one"), tmp.path().join("two"));
    for (dir, threads) in [(&a, "1"), (&b, "2")] {
        let o = run(
            &["hunt", "--xi", "2", "--grid-points", "200", "--out", dir.to_str().unwrap()],
            &[("CANARDLAB_THREADS", threads)],
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for name in ["attracting.csv", "repelling.csv", "intersections.csv", "rotations.csv"] {
        assert_eq!(read(&a, name), read(&b, name), "{name}");
        assert!(a.join(format!("{name}.meta.json")).exists());
    }
    let summary: serde_json::Value = serde_json::from_str(&read(&a, "summary.json")).unwrap();
    assert_eq!(summary["intersections"], 1);
}

#[test]
fn bad_thread_count_is_rejected() {
    let o = run(&["classify"], &[("CANARDLAB_THREADS", "zero")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_range_is_validated() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(
        &["sweep", "--xi-min", "0.5", "--xi-max", "3", "--out", tmp.path().to_str().unwrap()],
        &[],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fold_scaling_writes_fit() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["fold-scaling", "--k", "2", "--phi", "finite", "--out", tmp.path().to_str().unwrap()], &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let fit: serde_json::Value = serde_json::from_str(&read(tmp.path(), "fit.json")).unwrap();
    let e = fit["fitted_exponent"].as_f64().unwrap();
    assert!((e - 2.0 / 3.0).abs() < 0.02 * 2.0 / 3.0);
    assert_eq!(read(tmp.path(), "exit_vs_eps.csv").lines().count(), 8);
}
