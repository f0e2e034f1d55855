use std::path::Path;
use std::process::{Command, Output};

use approx::assert_relative_eq;

fn cslheat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cslheat")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Parses CSV output into (header, rows of raw fields).
fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn column(text: &str, name: &str) -> Vec<f64> {
    let (header, rows) = csv_rows(text);
    let i = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

#[test]
fn builtin_scenario_reports_core_rise() {
    let o = cslheat(&["scenario", "cu-cuore"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let per = column(&stdout(&o), "core_delta_per_lambda")[0];
    assert!((per - 187.0).abs() < 1.0, "{per}");
}

#[test]
fn json_report_echoes_defaults() {
    let o = cslheat(&["--format", "json", "scenario", "teo2-cuore"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let defaults: Vec<&str> = v["scenario"]["applied_defaults"].as_array().unwrap().iter().map(|d| d.as_str().unwrap()).collect();
    assert!(defaults.iter().any(|d| d.contains("v_eff")), "{defaults:?}");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_relative_eq!(v["core_delta_per_lambda"].as_f64().unwrap(), 1.0083e4, max_relative = 1e-3);
}

#[test]
fn runs_are_bit_reproducible() {
    let args = ["--seed", "7", "mc", "--trajectories", "40", "--steps", "10", "--record-every", "2"];
    let a = cslheat(&args);
    let b = cslheat(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let c = cslheat(&["--seed", "8", "mc", "--trajectories", "40", "--steps", "10", "--record-every", "2"]);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(cslheat(&["scenario", "cu-cuore"]).stdout, cslheat(&["scenario", "cu-cuore"]).stdout);
}

#[test]
fn zero_lambda_gives_flat_profile() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "zero.toml", "[scenario]\nmaterial = \"Cu\"\nlambda = 0.0\nrc = 1e-7\ngeometry = \"sphere:0.1\"\nt_s = 0.03\n");
    let o = cslheat(&["--config", &cfg, "scenario"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(column(&out, "core_delta_exact"), vec![0.0]);
    assert_eq!(column(&out, "core_delta_linearized"), vec![0.0]);
}

#[test]
fn lambda_sweep_is_linear() {
    let o = cslheat(&["sweep", "cu-cuore", "--param", "lambda", "--values", "1e-12,1e-10,1e-8,1e-6"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let lam = column(&out, "lambda");
    let dt = column(&out, "core_delta_linearized");
    for i in 1..lam.len() {
        let slope = (dt[i] / dt[i - 1]).ln() / (lam[i] / lam[i - 1]).ln();
        assert!((slope - 1.0).abs() < 1e-6, "{slope}");
    }
}

#[test]
fn cutoff_sweep_tracks_limits() {
    let o = cslheat(&["sweep", "cu-cuore", "--param", "cutoff", "--values", "0.01,1,100"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let ratio = column(&stdout(&o), "ratio_to_white");
    let low = 8.0 / (15.0 * std::f64::consts::PI.sqrt()) * 0.01f64.powi(5);
    assert_relative_eq!(ratio[0], low, max_relative = 1e-2);
    assert!(ratio[0] < ratio[1] && ratio[1] < ratio[2]);
    assert!((ratio[2] - 1.0).abs() < 1e-4);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(cslheat(&["sweep", "cu-cuore", "--param", "lambda", "--values"]).status.code(), Some(2));
    assert_eq!(cslheat(&["sweep", "cu-cuore", "--param", "temperature", "--values", "1"]).status.code(), Some(2));
    assert_eq!(cslheat(&["profile", "--geometry", "cube:1", "--ts", "0.01", "--qdot", "1"]).status.code(), Some(2));
    assert_eq!(cslheat(&["rate", "--material", "Unobtainium"]).status.code(), Some(2));
    assert_eq!(cslheat(&["scenario", "no-such-scenario"]).status.code(), Some(2));
    assert_eq!(cslheat(&["frobnicate"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "typo.toml", "[scenario]\nmaterial = \"Cu\"\nlamda = 1e-8\n");
    let o = cslheat(&["--config", &cfg, "scenario"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("lamda"), "{}", stderr(&o));
}

#[test]
fn unreachable_tolerance_exits_3() {
    let o = cslheat(&["rate", "--spectrum", "step-ratio:1", "--tol", "1e-300"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn output_directory_gets_report_and_profile() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = cslheat(&["--output", out.to_str().unwrap(), "--format", "json", "scenario", "cu-cuore"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let profile_path = report["profile_path"].as_str().unwrap();
    let profile: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(profile_path).unwrap()).unwrap();
    assert_eq!(profile.as_array().unwrap().len(), 101);
}

#[test]
fn unwritable_output_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = write(dir.path(), "file", "");
    let o = cslheat(&["--output", &format!("{blocker}/sub"), "scenario", "cu-cuore"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn profile_from_rate_matches_explicit_qdot() {
    let q = column(&stdout(&cslheat(&["rate"])), "q_dot")[0];
    let explicit = cslheat(&["profile", "--geometry", "sphere:0.1", "--ts", "0.03", "--k0", "80", "--qdot", &format!("{q:e}"), "--samples", "5"]);
    let chained = cslheat(&["profile", "--geometry", "sphere:0.1", "--ts", "0.03", "--k0", "80", "--from-rate", "--samples", "5"]);
    assert_eq!(chained.status.code(), Some(0), "{}", stderr(&chained));
    assert_eq!(explicit.stdout, chained.stdout);
    let t = column(&stdout(&chained), "T_exact");
    assert!(t.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(*t.last().unwrap(), 0.03);
}

#[test]
fn convert_sde_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "strat.toml", "convention = \"stratonovich\"\nA = [[-0.25]]\na = [0.0]\nB = [[[0.5]]]\nb = [[2.0]]\n");
    let o = cslheat(&["convert-sde", "--input", &input]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let ito = stdout(&o);
    assert!(ito.contains("convention = \"ito\""));
    assert!(ito.contains("A = [[-0.125]]") && ito.contains("a = [0.5]"), "{ito}");
    let back = write(dir.path(), "ito.toml", &ito);
    let o = cslheat(&["convert-sde", "--input", &back]);
    let strat = stdout(&o);
    assert!(strat.contains("convention = \"stratonovich\"") && strat.contains("A = [[-0.25]]") && strat.contains("a = [0.0]"), "{strat}");
}

#[test]
fn cumulant_dephasing_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let sys = write(
        dir.path(),
        "sys.toml",
        "h0 = [[0.0, 0.0], [0.0, 0.0]]\nl = [[1.0, 0.0], [0.0, -1.0]]\npsi0 = [0.7071067811865476, 0.7071067811865476]\n[noise]\nkind = \"white\"\ngamma = 1000.0\n",
    );
    let o = cslheat(&["cumulant", "--system", &sys, "--t", "5e-4", "--dt", "1e-5", "--trajectories", "2000", "--points", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    for (td, se) in column(&out, "trace_distance").iter().zip(column(&out, "bootstrap_se")) {
        assert!(*td <= (3.0 * se).max(0.02), "{td} vs {se}");
    }
}
