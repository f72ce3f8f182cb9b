use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use freemin_cli::{parse_config, preset_config, run_experiment, PRESETS};

fn freemin(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freemin")).args(args).current_dir(dir).output().unwrap()
}

fn config_text(name: &str, extra: &str) -> String {
    let base = format!(
        "name = {name}\ndivergence = rkl\nmetric_mode = plain\nn = 16\nperiodic = false\npotential = zero\n\
         mu = power(4)\nkernel = zero\ndt = 1\niterations = 1\nseed = 5\noutput_dir = out\n"
    );
    let mut lines: Vec<String> = base.lines().map(str::to_string).collect();
    for (k, v) in extra.lines().filter_map(|l| l.split_once('=')) {
        match lines.iter_mut().find(|l| l.starts_with(&format!("{} ", k.trim()))) {
            Some(line) => *line = format!("{} = {}", k.trim(), v.trim()),
            None => lines.push(format!("{} = {}", k.trim(), v.trim())),
        }
    }
    lines.join("\n") + "\n"
}

fn columns(text: &str, col: usize) -> Vec<f64> {
    text.lines().skip(1).map(|l| l.split(' ').nth(col).unwrap().parse().unwrap()).collect()
}

#[test]
fn run_writes_the_three_files() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("a.cfg"), config_text("a", "")).unwrap();
    let out = freemin(&["run", "a.cfg"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = tmp.path().join("out");
    let trace = fs::read_to_string(dir.join("a_trace.csv")).unwrap();
    assert!(trace.starts_with("iter,energy,error\n"));
    assert!(!trace.contains('\r'));
    assert_eq!(trace.lines().count(), 3);
    let final_text = fs::read_to_string(dir.join("a_final.txt")).unwrap();
    assert!(final_text.starts_with("index x p mu reference\n"));
    assert_eq!(final_text.lines().count(), 17);
    let meta = fs::read_to_string(dir.join("a_meta.txt")).unwrap();
    assert!(meta.contains("final_error = ") && meta.contains("stationarity_residual = "));
    // The config echo at the top of the meta file parses back.
    assert_eq!(parse_config(&meta).unwrap(), parse_config(&config_text("a", "")).unwrap());
}

#[test]
fn one_step_without_interaction_lands_on_mu() {
    let tmp = tempfile::tempdir().unwrap();
    let mut config = parse_config(&config_text("one", "")).unwrap();
    config.output_dir = tmp.path().to_path_buf();
    run_experiment(&config).unwrap();
    let text = fs::read_to_string(tmp.path().join("one_final.txt")).unwrap();
    let (p, mu, reference) = (columns(&text, 2), columns(&text, 3), columns(&text, 4));
    for i in 0..p.len() {
        assert!((p[i] - mu[i]).abs() <= 1e-12, "{i}: {} vs {}", p[i], mu[i]);
        assert!((reference[i] - mu[i]).abs() <= 1e-12);
    }
}

#[test]
fn kl_reference_column_is_softmax_of_minus_v() {
    let tmp = tempfile::tempdir().unwrap();
    let mut config = preset_config("kl_pd").unwrap();
    config.n = 32;
    config.iterations = 2;
    config.output_dir = tmp.path().to_path_buf();
    run_experiment(&config).unwrap();
    let text = fs::read_to_string(tmp.path().join("kl_pd_final.txt")).unwrap();
    let x = columns(&text, 1);
    let reference = columns(&text, 4);
    let w: Vec<f64> = x.iter().map(|x| (-(4.0 * std::f64::consts::PI * x).sin()).exp()).collect();
    let z: f64 = w.iter().sum();
    for (r, w) in reference.iter().zip(&w) {
        assert!((r - w / z).abs() <= 1e-14);
    }
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("foo.cfg"), config_text("a", "foo = 1")).unwrap();
    let out = freemin(&["run", "foo.cfg"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("foo") && err.contains("line 13"), "{err}");

    fs::write(tmp.path().join("dt.cfg"), config_text("a", "dt = -1")).unwrap();
    let out = freemin(&["run", "dt.cfg"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dt"));

    assert_eq!(freemin(&["preset", "nope"], tmp.path()).status.code(), Some(2));
    assert_eq!(freemin(&["bogus"], tmp.path()).status.code(), Some(2));
}

#[test]
fn solver_failure_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let text = config_text("boom", "divergence = kl\nmu = uniform\nkernel = log(1e4, 1e-6)\nn = 8\niterations = 5");
    fs::write(tmp.path().join("boom.cfg"), text).unwrap();
    let out = freemin(&["run", "boom.cfg"], tmp.path());
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn io_failures_exit_4() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(freemin(&["run", "missing.cfg"], tmp.path()).status.code(), Some(4));
    fs::write(tmp.path().join("blocker"), "").unwrap();
    fs::write(tmp.path().join("a.cfg"), config_text("a", "output_dir = blocker/sub")).unwrap();
    assert_eq!(freemin(&["run", "a.cfg"], tmp.path()).status.code(), Some(4));
    let out = freemin(&["plot", "missing.csv", "--kind", "error", "--out", "e.svg"], tmp.path());
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn presets_listing_matches_shipped_files() {
    let tmp = tempfile::tempdir().unwrap();
    let out = freemin(&["presets"], tmp.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let names: Vec<&str> = text.lines().map(|l| l.split_whitespace().next().unwrap()).collect();
    assert_eq!(names, PRESETS.map(|p| p.name));
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("presets");
    let mut files: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().trim_end_matches(".cfg").to_string())
        .collect();
    files.sort();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(files, sorted);
}

#[test]
fn preset_then_plot() {
    let tmp = tempfile::tempdir().unwrap();
    let out = freemin(&["preset", "rkl_pd", "--out", "o"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for kind in ["energy", "error"] {
        let svg = format!("{kind}.svg");
        let out = freemin(&["plot", "o/rkl_pd_trace.csv", "--kind", kind, "--out", &svg], tmp.path());
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let text = fs::read_to_string(tmp.path().join(&svg)).unwrap();
        assert!(text.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\"") && text.trim_end().ends_with("</svg>"));
        assert!(text.contains("<polyline"));
    }
    let out = freemin(&["plot", "o/rkl_pd_trace.csv", "--kind", "bogus", "--out", "x.svg"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rkl_pd_error_small_by_row_15() {
    let tmp = tempfile::tempdir().unwrap();
    let mut config = preset_config("rkl_pd").unwrap();
    config.output_dir = tmp.path().to_path_buf();
    run_experiment(&config).unwrap();
    let trace = fs::read_to_string(tmp.path().join("rkl_pd_trace.csv")).unwrap();
    let row: Vec<&str> = trace.lines().nth(16).unwrap().split(',').collect();
    assert_eq!(row[0], "15");
    assert!(row[2].parse::<f64>().unwrap() <= 1e-12);
}
