//! End-to-end runs of the subcommands, in process: arguments are parsed
//! exactly as on the command line and results come back as exit codes.

use std::path::{Path, PathBuf};

use bidisk_ar::ar2d::extend_covariance_2d;
use bidisk_ar::covariance::IndexRect;
use bidisk_ar::linalg::{self, CMat};
use bidisk_ar::poly::MatrixPolynomial2D;
use clap::Parser;
use serde_json::{json, Value};
use tempfile::TempDir;

use crate::{run as run_cli, Cli};

fn samples() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("samples")
}

struct Run {
    code: u8,
    stdout: Vec<u8>,
    stderr: String,
}

/// Runs with `--output` pointed at a scratch file, read back as `stdout`.
fn run(args: &[&str]) -> Run {
    let scratch = TempDir::new().unwrap();
    let out = scratch.path().join("out");
    let mut argv = vec!["bidisk-ar"];
    argv.extend_from_slice(args);
    if !args.contains(&"--output") {
        argv.extend_from_slice(&["--output", out.to_str().unwrap()]);
    }
    let result = Cli::try_parse_from(&argv)
        .map_err(|e| crate::Failure::input(e.to_string()))
        .and_then(|cli| run_cli(&cli));
    let (code, stderr) = match result {
        Ok(()) => (0, String::new()),
        Err(f) => (f.code, f.message),
    };
    Run {
        code,
        stdout: std::fs::read(&out).unwrap_or_default(),
        stderr,
    }
}

fn run_on(cmd: &str, input: &Path, extra: &[&str]) -> (Run, Value) {
    let mut args = vec![cmd, "--input", input.to_str().unwrap()];
    args.extend_from_slice(extra);
    let r = run(&args);
    let v = serde_json::from_slice(&r.stdout).unwrap_or(Value::Null);
    (r, v)
}

fn write(dir: &TempDir, name: &str, v: &Value) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, serde_json::to_string(v).unwrap()).unwrap();
    path
}

fn scalar_of(v: &Value) -> f64 {
    v["re"][0][0].as_f64().unwrap()
}

fn entry(i: i64, j: i64, m: &CMat) -> Value {
    let part = |f: fn(&linalg::C64) -> f64| -> Vec<Vec<f64>> {
        (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| f(&m[(r, c)])).collect()).collect()
    };
    json!({ "i": i, "j": j, "re": part(|z| z.re), "im": part(|z| z.im) })
}

/// Band document of `(p p*)⁻¹` on the window `n × m`.
fn grid_doc(p: &MatrixPolynomial2D, n: i64, m: i64, with_corner: bool, tweak: impl Fn((i64, i64)) -> f64) -> Value {
    let table = extend_covariance_2d(p, IndexRect::centered(n, m), 512).unwrap();
    let entries: Vec<Value> = table
        .entries
        .iter()
        .filter(|(k, _)| {
            let corner = k.0.abs() == n && k.1.abs() == m;
            !corner || (with_corner && k.0 * k.1 > 0)
        })
        .map(|(&(i, j), v)| entry(i, j, &(v + linalg::identity(p.d).scale(tweak((i, j))))))
        .collect();
    json!({ "d": p.d, "n": n, "m": m, "entries": entries })
}

fn diagonal_filter() -> MatrixPolynomial2D {
    MatrixPolynomial2D::scalar(1, 1, &[1.0, -0.3, -0.3, 0.0])
}

#[test]
fn identity_check_is_feasible_with_zero_residual() {
    let (r, v) = run_on("check", &samples().join("identity.json"), &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(v["feasible"], json!(true));
    assert_eq!(v["comm_residual"].as_f64().unwrap(), 0.0);
}

#[test]
fn separable_check_reports_forced_corner() {
    let (r, v) = run_on("check", &samples().join("separable.json"), &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!((scalar_of(&v["corner_c_minus_nm"]) - 0.2 / 0.63).abs() < 1e-9);
}

#[test]
fn broken_symmetry_names_the_index() {
    let dir = TempDir::new().unwrap();
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(samples().join("separable.json")).unwrap()).unwrap();
    for e in doc["entries"].as_array_mut().unwrap() {
        if e["i"] == json!(1) && e["j"] == json!(0) {
            e["re"][0][0] = json!(0.9);
        }
    }
    let (r, _) = run_on("check", &write(&dir, "bad.json", &doc), &[]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("(1, 0)") || r.stderr.contains("(-1, 0)"), "{}", r.stderr);
}

#[test]
fn malformed_and_out_of_band_inputs_exit_one() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\"d\": 1,\n \"n\": 1,\n \"m\": [}").unwrap();
    let (r, _) = run_on("check", &path, &[]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("line 3"), "{}", r.stderr);

    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(samples().join("identity.json")).unwrap()).unwrap();
    doc["entries"].as_array_mut().unwrap().push(json!({"i": 1, "j": -1, "re": [[0.0]], "im": [[0.0]]}));
    let (r, _) = run_on("check", &write(&dir, "corner.json", &doc), &[]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("(1, -1)"), "{}", r.stderr);

    let (r, _) = run_on("check", &samples().join("identity.json"), &["--grid-n", "48"]);
    assert_eq!(r.code, 1);
    let (r, _) = run_on("check", &samples().join("identity.json"), &["--tol-comm", "-1"]);
    assert_eq!(r.code, 1);
}

#[test]
fn perturbed_grid_is_infeasible() {
    let dir = TempDir::new().unwrap();
    let doc = grid_doc(&diagonal_filter(), 2, 2, false, |k| {
        if k == (1, 0) || k == (-1, 0) {
            0.05
        } else {
            0.0
        }
    });
    let path = write(&dir, "perturbed.json", &doc);
    let (r, v) = run_on("check", &path, &[]);
    assert_eq!(r.code, 2, "{}", r.stderr);
    assert!(v["comm_residual"].as_f64().unwrap() > 1e-3);
    assert_eq!(run_on("design", &path, &[]).0.code, 2);
}

fn round_trip(grid: &Value, dir: &TempDir) -> f64 {
    let input = write(dir, "grid.json", grid);
    let (r, design) = run_on("design", &input, &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let coeffs = write(dir, "design.json", &design);
    let (r, ext) = run_on("extend", &coeffs, &["--fft-n", "256"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let lookup = |i: &Value, j: &Value| {
        ext["entries"]
            .as_array()
            .unwrap()
            .iter()
            .find(|e| &e["i"] == i && &e["j"] == j)
            .cloned()
            .unwrap()
    };
    let mut worst: f64 = 0.0;
    for e in grid["entries"].as_array().unwrap() {
        let x = lookup(&e["i"], &e["j"]);
        for part in ["re", "im"] {
            for (a, b) in e[part].as_array().unwrap().iter().zip(x[part].as_array().unwrap()) {
                for (u, v) in a.as_array().unwrap().iter().zip(b.as_array().unwrap()) {
                    worst = worst.max((u.as_f64().unwrap() - v.as_f64().unwrap()).abs());
                }
            }
        }
    }
    worst
}

#[test]
fn design_then_extend_reproduces_the_band() {
    let dir = TempDir::new().unwrap();
    let separable: Value = serde_json::from_str(&std::fs::read_to_string(samples().join("separable.json")).unwrap()).unwrap();
    assert!(round_trip(&separable, &dir) < 1e-7);
    assert!(round_trip(&grid_doc(&diagonal_filter(), 2, 2, false, |_| 0.0), &dir) < 1e-7);
    let p = MatrixPolynomial2D::from_fn(2, 1, 1, |i, j| match (i, j) {
        (0, 0) => linalg::identity(2),
        (1, 0) => CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![linalg::C64::new(-0.4, 0.0), linalg::C64::new(0.2, 0.1)])),
        (0, 1) => linalg::identity(2).scale(-0.3),
        _ => linalg::zeros(2, 2),
    });
    assert!(round_trip(&grid_doc(&p, 1, 1, false, |_| 0.0), &dir) < 1e-7);
}

#[test]
fn separable_pipeline_matches_closed_form() {
    let dir = TempDir::new().unwrap();
    let p = MatrixPolynomial2D::scalar(1, 1, &[1.0, -0.4, -0.5, 0.2]);
    let input = write(&dir, "grid.json", &grid_doc(&p, 1, 1, true, |_| 0.0));
    let (r, design) = run_on("design", &input, &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let coeff = |i: i64, j: i64| {
        let e = design["p"].as_array().unwrap().iter().find(|e| e["i"] == json!(i) && e["j"] == json!(j)).unwrap();
        scalar_of(e)
    };
    let p00 = coeff(0, 0);
    for (i, j, want) in [(0, 1, -0.4), (1, 0, -0.5), (1, 1, 0.2)] {
        assert!((coeff(i, j) / p00 - want).abs() < 1e-8);
    }
    // closed form c_ij = 0.5^|i| 0.4^|j| / (0.75·0.84)
    let (r, ext) = run_on("extend", &input, &["--extend-j", "3"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    for e in ext["entries"].as_array().unwrap() {
        let (i, j) = (e["i"].as_i64().unwrap(), e["j"].as_i64().unwrap());
        let want = 0.5f64.powi(i.abs() as i32) * 0.4f64.powi(j.abs() as i32) / 0.63;
        assert!((scalar_of(e) - want).abs() < 1e-9, "({i}, {j})");
    }
}

#[test]
fn identity_spectrum_is_flat() {
    let input = samples().join("identity.json");
    let r = run(&["spectrum", "--input", input.to_str().unwrap(), "--grid-n", "64"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let text = String::from_utf8(r.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta_z,theta_w,entry_row,entry_col,re,im"));
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 64 * 64);
    for row in rows {
        let f: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((f[4] - 1.0).abs() < 1e-14 && f[5].abs() < 1e-14);
    }
}

#[test]
fn unstable_filter_exits_three() {
    let dir = TempDir::new().unwrap();
    let p = MatrixPolynomial2D::scalar(1, 0, &[1.0, -2.0]);
    let doc = json!({
        "d": 1, "n": 1, "m": 0,
        "p": [entry(0, 0, p.get(0, 0)), entry(1, 0, p.get(1, 0))],
        "r": [],
    });
    let (r, _) = run_on("extend", &write(&dir, "unstable.json", &doc), &[]);
    assert_eq!(r.code, 3, "{}", r.stderr);
}

#[test]
fn nehari_pipelines() {
    let (r, v) = run_on("nehari2d", &samples().join("nehari2d.json"), &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    for e in v["gammas"].as_array().unwrap() {
        let want = if e["i"] == json!(0) && e["j"] == json!(0) { 0.5 } else { 0.0 };
        assert!((scalar_of(e) - want).abs() < 1e-12);
    }
    assert!((v["sup_norm"].as_f64().unwrap() - 0.5).abs() < 1e-12);

    let (r, v) = run_on("nehari1d", &samples().join("nehari1d.json"), &["--trunc-n", "12", "--extend-j", "12"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(v["disagreement"].as_f64().unwrap() <= 1e-6);
    assert!(v["sup_norm"].as_f64().unwrap() < 1.0);

    let dir = TempDir::new().unwrap();
    let big = json!({"rows": 1, "cols": 1, "gammas": [{"k": 0, "re": [[1.5]], "im": [[0.0]]}]});
    let (r, _) = run_on("nehari1d", &write(&dir, "big.json", &big), &[]);
    assert_eq!(r.code, 2);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let input = samples().join("separable.json");
    for cmd in ["check", "design", "extend", "spectrum"] {
        let outs: Vec<Vec<u8>> = (0..2)
            .map(|k| {
                let out = dir.path().join(format!("{cmd}{k}"));
                let r = run(&[cmd, "--input", input.to_str().unwrap(), "--output", out.to_str().unwrap()]);
                assert_eq!(r.code, 0, "{}", r.stderr);
                std::fs::read(out).unwrap()
            })
            .collect();
        assert!(!outs[0].is_empty());
        assert_eq!(outs[0], outs[1], "{cmd}");
    }
    for (cmd, file) in [("nehari1d", "nehari1d.json"), ("nehari2d", "nehari2d.json")] {
        let a = run_on(cmd, &samples().join(file), &[]).0.stdout;
        let b = run_on(cmd, &samples().join(file), &[]).0.stdout;
        assert_eq!(a, b, "{cmd}");
    }
}
