//! End-to-end runs of the `plate-lab` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plate-lab")).args(args).output().expect("binary runs")
}

fn run_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plate-lab")).args(args).env(key, value).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(text: &[u8]) -> Value {
    serde_json::from_slice(text).expect("valid JSON")
}

fn read_json(path: &Path) -> Value {
    json(&fs::read(path).unwrap())
}

/// Rows of a CSV table after the header, parsed as numbers.
fn csv_rows(text: &str) -> (String, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default().to_string();
    let rows = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    (header, rows)
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).display().to_string()
}

#[test]
fn solve_reports_positive_interval_plate() {
    let o = run(&[
        "solve",
        "--domain",
        "interval",
        "--L",
        "1",
        "--eps",
        "0.1",
        "--h",
        "0.00390625",
        "--forcing",
        "const:1",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(&o.stdout);
    assert_eq!(report["positivity"]["is_nonneg"], Value::Bool(true));
    for key in ["hopf_c0", "collar_mass", "tau", "conv", "trace", "beta", "profile_residual", "bounds"] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
    assert_eq!(report["bounds"].as_array().unwrap().len(), 3);
}

#[test]
fn usage_errors_exit_two() {
    let cases: &[&[&str]] = &[
        &["solve", "--domain", "interval"],
        &["solve", "--eps", "0.1", "--forcing", "const:-1"],
        &["solve", "--eps", "0.1", "--gamma", "100"],
        &["solve", "--eps", "0.1", "--h", "0.3"],
        &["solve", "--eps", "-1"],
        &["solve", "--eps", "0.1", "--domain", "triangle"],
        &["solve", "--eps", "0.1", "--domain", "disk", "--L", "2"],
        &["solve", "--eps", "0.1", "--solver", "magic"],
        &["solve", "--eps", "0.1", "--unknown-flag", "1"],
        &["sweep", "--eps-list", "0.1,0.2"],
        &["threshold", "--bracket", "0.5"],
        &["exact", "--model", "none"],
        &["frobnicate"],
    ];
    for args in cases {
        let o = run(args);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn gamma_sets_eps() {
    let by_gamma = run(&["solve", "--gamma", "100", "--h", "0.0078125"]);
    let by_eps = run(&["solve", "--eps", "0.1", "--h", "0.0078125"]);
    assert_eq!(code(&by_gamma), 0);
    assert_eq!(by_gamma.stdout, by_eps.stdout);
}

#[test]
fn exact_profile_value_at_one() {
    let o = run(&["exact", "--model", "profile", "--beta", "1", "--tmax", "5", "--dt", "0.01"]);
    assert_eq!(code(&o), 0);
    let (header, rows) = csv_rows(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(header, "t,u,du,d2u");
    assert_eq!(rows.len(), 501);
    let at_one = &rows[100];
    assert!((at_one[0] - 1.0).abs() < 1e-12);
    assert!((at_one[1] - 0.367_879_441_2).abs() < 1e-10);
}

#[test]
fn exact_oned_is_clamped() {
    let o = run(&["exact", "--model", "oned", "--eps", "0.1"]);
    assert_eq!(code(&o), 0);
    let (_, rows) = csv_rows(&String::from_utf8(o.stdout).unwrap());
    for row in [rows.first().unwrap(), rows.last().unwrap()] {
        assert!(row[1].abs() <= 1e-10 && row[2].abs() <= 1e-10, "{row:?}");
    }
}

#[test]
fn exact_radial_is_clamped() {
    let o = run(&["exact", "--model", "radial", "--eps", "0.05"]);
    assert_eq!(code(&o), 0);
    let (_, rows) = csv_rows(&String::from_utf8(o.stdout).unwrap());
    let last = rows.last().unwrap();
    assert!((last[0] - 1.0).abs() < 1e-12);
    assert!(last[1].abs() <= 1e-8 && last[2].abs() <= 1e-8, "{last:?}");
}

#[test]
fn config_file_layers_under_flags() {
    let dir = TempDir::new().unwrap();
    let cfg = path(&dir, "run.cfg");
    fs::write(&cfg, "# plate settings\neps = 0.2\nh = 0.0078125\nforcing = const:2\n").unwrap();

    let from_config = run(&["solve", "--config", &cfg]);
    let explicit = run(&["solve", "--eps", "0.2", "--h", "0.0078125", "--forcing", "const:2"]);
    assert_eq!(code(&from_config), 0, "{}", String::from_utf8_lossy(&from_config.stderr));
    assert_eq!(from_config.stdout, explicit.stdout);

    let overridden = run(&["solve", "--config", &cfg, "--eps", "0.1"]);
    let expected = run(&["solve", "--eps", "0.1", "--h", "0.0078125", "--forcing", "const:2"]);
    assert_eq!(overridden.stdout, expected.stdout);

    // The default forcing applies when neither layer sets it.
    fs::write(&cfg, "eps = 0.2\nh = 0.0078125\n").unwrap();
    let defaulted = run(&["solve", "--config", &cfg]);
    let expected = run(&["solve", "--eps", "0.2", "--h", "0.0078125", "--forcing", "const:1"]);
    assert_eq!(defaulted.stdout, expected.stdout);

    // A command-line --gamma outranks eps from the config file.
    let o = run(&["solve", "--config", &cfg, "--gamma", "100"]);
    let expected = run(&["solve", "--eps", "0.1", "--h", "0.0078125"]);
    assert_eq!(o.stdout, expected.stdout);

    fs::write(&cfg, "eps = 0.2\nspacing = 0.1\n").unwrap();
    assert_eq!(code(&run(&["solve", "--config", &cfg])), 2);
    fs::write(&cfg, "eps = 0.2\ngamma = 25\n").unwrap();
    assert_eq!(code(&run(&["solve", "--config", &cfg])), 2);
    assert_eq!(code(&run(&["solve", "--config", &path(&dir, "missing.cfg")])), 2);
}

#[test]
fn sweep_of_one_eps_matches_solve() {
    let dir = TempDir::new().unwrap();
    let report = path(&dir, "sweep.json");
    let o = run(&[
        "sweep",
        "--eps-list",
        "0.0625",
        "--h-rule",
        "eps/8",
        "--out",
        &path(&dir, "sweep.csv"),
        "--report",
        &report,
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let solve = run(&["solve", "--eps", "0.0625", "--h", "0.0078125"]);
    let rows = read_json(Path::new(&report));
    assert_eq!(rows[0]["h"].as_f64(), Some(0.0078125));
    assert_eq!(rows[0]["report"], json(&solve.stdout));

    let table = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let header = table.lines().next().unwrap();
    assert_eq!(
        header,
        "eps,h,min_u,is_nonneg,L_minus,L_plus,M,M_over_eps,beta,profile_residual,hopf_c0,collar_mass,h1_v,l2_eps_lap"
    );
    assert_eq!(table.lines().count(), 2);
}

#[test]
fn threshold_on_interval_reports_no_sign_change() {
    let o = run(&["threshold", "--domain", "interval", "--bracket", "0.01,1", "--bistol", "1e-3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o.stdout);
    let flags: Vec<&str> = r["flags"].as_array().unwrap().iter().map(|f| f.as_str().unwrap()).collect();
    assert!(flags.contains(&"bracket not sign-changing"), "{flags:?}");
}

#[test]
fn blowup_writes_profile_and_summary() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "blowup.csv");
    let report = path(&dir, "blowup.json");
    let o = run(&["blowup", "--eps", "0.0078125", "--out", &out, "--report", &report]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = csv_rows(&fs::read_to_string(&out).unwrap());
    assert_eq!(header, "s,u_scaled,halfspace,abs_diff");
    assert_eq!(rows[0][0], 0.0);
    assert_eq!(rows[0][1], 0.0);
    assert!((rows.last().unwrap()[0] - 5.0).abs() < 1e-9);
    let summary = read_json(Path::new(&report));
    let beta = summary["beta"].as_f64().unwrap();
    let residual = summary["residual"].as_f64().unwrap();
    let worst = rows.iter().map(|r| r[3]).fold(0.0, f64::max);
    assert!((worst - residual).abs() <= 1e-12 * residual.max(1.0));
    assert!((summary["residual_over_beta"].as_f64().unwrap() - residual / beta).abs() < 1e-12);
}

#[test]
fn manifests_accompany_outputs() {
    let dir = TempDir::new().unwrap();
    let field = path(&dir, "u.csv");
    let report = path(&dir, "report.json");
    let op = path(&dir, "a.txt");
    let o = run(&[
        "solve",
        "--eps",
        "0.25",
        "--h",
        "0.03125",
        "--out",
        &field,
        "--report",
        &report,
        "--dump-operator",
        &op,
    ]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    for p in [&field, &report, &op] {
        let m = read_json(Path::new(&format!("{p}.manifest.json")));
        assert_eq!(m["command"], "solve");
        assert_eq!(m["inputs"]["eps"].as_f64(), Some(0.25));
        assert_eq!(m["solves"].as_array().unwrap().len(), 2);
        assert!(m["workers"].as_u64().unwrap() >= 1);
        assert!(m["outputs"].as_array().unwrap().len() == 3);
    }
    let text = fs::read_to_string(&field).unwrap();
    assert!(text.starts_with("x,u\n"));
    assert_eq!(text.lines().count(), 34);
}

#[test]
fn samples_forcing_reproduces_constant_load() {
    let dir = TempDir::new().unwrap();
    let load = path(&dir, "f.csv");
    let mut text = String::from("x,u\n");
    for k in 0..=32 {
        text.push_str(&format!("{:.16e},{:.16e}\n", k as f64 / 32.0, 1.0));
    }
    fs::write(&load, text).unwrap();
    let sampled = run(&["solve", "--eps", "0.25", "--h", "0.03125", "--forcing", &format!("samples:{load}")]);
    let constant = run(&["solve", "--eps", "0.25", "--h", "0.03125", "--forcing", "const:1"]);
    assert_eq!(code(&sampled), 0, "{}", String::from_utf8_lossy(&sampled.stderr));
    assert_eq!(sampled.stdout, constant.stdout);
    // A file on a different grid is rejected.
    assert_ne!(code(&run(&["solve", "--eps", "0.25", "--h", "0.0625", "--forcing", &format!("samples:{load}")])), 0);
}

#[test]
fn outputs_do_not_depend_on_worker_count() {
    let args = ["sweep", "--domain", "square", "--eps-list", "0.25,0.125,0.0625", "--h-rule", "eps/4"];
    let one = run_env(&args, "PLATE_LAB_THREADS", "1");
    let four = run_env(&args, "PLATE_LAB_THREADS", "4");
    assert_eq!(code(&one), 0, "{}", String::from_utf8_lossy(&one.stderr));
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(code(&run_env(&args, "PLATE_LAB_THREADS", "zero")), 2);
}

#[test]
fn radial_field_uses_radius_header() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "u.csv");
    let o = run(&["solve", "--domain", "disk", "--eps", "0.25", "--h", "0.03125", "--out", &out]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = csv_rows(&fs::read_to_string(out).unwrap());
    assert_eq!(header, "r,u");
    assert_eq!(rows.len(), 33);
    assert_eq!(rows.last().unwrap()[1], 0.0);
}
