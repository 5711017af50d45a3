//! End-to-end runs of the `erws` binary.

use std::path::Path;
use std::process::{Command, Output};

use erws_cli::output::reformat_csv;

fn erws(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_erws")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = erws(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn column(csv_text: &str, name: &str) -> Vec<String> {
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let idx = reader.headers().unwrap().iter().position(|h| h == name).expect(name);
    reader.records().map(|r| r.unwrap()[idx].to_string()).collect()
}

fn numbers(csv_text: &str, name: &str) -> Vec<f64> {
    column(csv_text, name).iter().map(|v| v.parse().unwrap()).collect()
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).unwrap()
}

const WALK: [&str; 6] = ["--eps", "0.1", "--r", "0.2", "--gamma", "0.3"];

fn with_walk<'a>(cmd: &'a str, extra: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec![cmd];
    v.extend(WALK);
    v.extend(extra);
    v
}

#[test]
fn exact_small_times() {
    let text = stdout(&with_walk("exact", &["--checkpoints", "1,2,3"]));
    assert!(text.starts_with("t,m1,sigma2,m2,m2_over_t,m2_leading_term,method\n"));
    let m2 = numbers(&text, "m2");
    for (got, want) in m2.iter().zip([1.0, 2.4, 3.85]) {
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }
    assert!(column(&text, "method").iter().all(|m| m == "closed_form"));
}

#[test]
fn exact_log_branch_leading_term() {
    let text = stdout(&["exact", "--eps", "0.1", "--r", "0.2", "--gamma", "0.5", "--t-max", "1000"]);
    let ts = numbers(&text, "t");
    let lead = numbers(&text, "m2_leading_term");
    for (t, l) in ts.iter().zip(lead) {
        let want = t * t.ln() / 3.0;
        assert!((l - want).abs() <= 1e-12 * want.max(1.0), "t={t}: {l} vs {want}");
    }
}

#[test]
fn exact_resonance_is_flagged_and_strict_exits_3() {
    let args = ["exact", "--eps", "0.1", "--r", "0.2", "--gamma", "0.35", "--t-max", "64"];
    let text = stdout(&args);
    assert!(column(&text, "method").iter().all(|m| m == "recurrence"));
    let mut strict = args.to_vec();
    strict.push("--strict");
    assert_eq!(erws(&strict).status.code(), Some(3));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(erws(&["exact", "--eps", "2", "--r", "0.2", "--gamma", "0.3", "--t-max", "3"]).status.code(), Some(2));
    assert_eq!(erws(&["exact", "--eps", "0.1"]).status.code(), Some(2));
    assert_eq!(erws(&["scan", "--eps", "0.1", "--r-range", "0.1:0.2:1", "--gamma-range", "0:0.4:3"]).status.code(), Some(2));
    assert_eq!(erws(&with_walk("simulate", &["--walkers", "10", "--t-max", "4", "--dim", "3"])).status.code(), Some(2));
}

#[test]
fn simulate_unit_first_step_and_thread_independence() {
    let base = with_walk("simulate", &["--walkers", "20000", "--t-max", "300", "--seed", "42"]);
    let mut one = base.clone();
    one.extend(["--threads", "1"]);
    let mut eight = base.clone();
    eight.extend(["--threads", "8"]);
    let a = stdout(&one);
    let b = stdout(&eight);
    assert_eq!(a, b);
    assert!(a.starts_with("t,mean_x,msd,msd_se,walkers\n1,"));
    assert_eq!(numbers(&a, "msd")[0], 1.0);
}

#[test]
fn simulate_2d_matches_exact() {
    let text = stdout(&with_walk(
        "simulate",
        &["--dim", "2", "--gamma-prime", "0.1", "--walkers", "100000", "--t-max", "1000"],
    ));
    assert!(text.starts_with("t,mean_x,mean_y,msd,msd_se,walkers\n"));
    let params = erws_core::Params2D::from_gammas(0.3, 0.1, 0.2, 0.1, [0.25; 4], 0.5).unwrap();
    for ((t, msd), se) in numbers(&text, "t").iter().zip(numbers(&text, "msd")).zip(numbers(&text, "msd_se")) {
        let exact = erws_core::exact::second_moment_2d(&params, *t as u64).unwrap().value;
        assert!((msd - exact).abs() <= 4.0 * se, "t={t}: {msd} vs {exact} (se {se})");
    }
}

#[test]
fn simulate_resource_error() {
    let out = erws(&with_walk("simulate", &["--walkers", "100000", "--t-max", "16", "--memory-cap", "64"]));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}

#[test]
fn scan_cells() {
    let text = stdout(&["scan", "--eps", "0.1", "--r-range", "0.2:0.9:2", "--gamma-range", "0.49:0.51:2"]);
    let regimes = column(&text, "regime");
    assert_eq!(regimes, ["diffusive", "super_diffusive", "invalid", "invalid"]);
    let d: f64 = column(&text, "diffusivity")[0].parse().unwrap();
    let gap: f64 = column(&text, "residual_gap")[0].parse().unwrap();
    assert!((d - 50.0 / 3.0).abs() < 1e-9 && (gap - 35.0 / 3.0).abs() < 1e-9);
    let e: f64 = column(&text, "leading_exponent")[1].parse().unwrap();
    assert!((e - 1.02).abs() < 1e-12);
    assert_eq!(column(&text, "diffusivity")[1], "");

    let text = stdout(&["scan", "--eps", "0.1", "--baseline", "--r-range", "0.2:0.6:2", "--gamma-range", "0.3:0.6:2"]);
    assert_eq!(column(&text, "regime")[0], "sub_diffusive");
    let e: f64 = column(&text, "leading_exponent")[0].parse().unwrap();
    assert!((e - 0.8).abs() < 1e-12);
}

#[test]
fn scan_residual_path() {
    let text = stdout(&["scan", "--eps", "0.2", "--r-range", "0.02:0.32:16", "--path", "residual"]);
    for (g, (r, gap)) in numbers(&text, "gamma")
        .iter()
        .zip(numbers(&text, "r").iter().zip(numbers(&text, "residual_gap")))
    {
        assert!((g - 0.5 * (1.0 - 0.2 * r)).abs() < 1e-15);
        assert!(gap > 0.0);
    }
}

#[test]
fn oracle_reports() {
    let report = json(&stdout(&with_walk("oracle", &["--t", "2"])));
    for key in ["enumeration", "closed_form", "recurrence"] {
        assert!((report[key]["m2"].as_f64().unwrap() - 2.4).abs() < 1e-14, "{key}");
    }
    assert!(report["max_abs_diff"].as_f64().unwrap() < 1e-14);

    let report = json(&stdout(&with_walk("oracle", &["--t", "1"])));
    for key in ["enumeration", "closed_form", "recurrence"] {
        assert_eq!(report[key]["m2"].as_f64(), Some(1.0));
    }

    let report = json(&stdout(&with_walk("oracle", &["--t", "2", "--dim", "2", "--gamma-prime", "0.1"])));
    for key in ["enumeration", "closed_form", "recurrence"] {
        assert!((report[key]["m2"].as_f64().unwrap() - 2.4).abs() < 1e-14, "{key}");
    }

    assert_eq!(erws(&with_walk("oracle", &["--t", "9"])).status.code(), Some(1));
}

fn fit_json(dir: &Path, csv_text: &str, window: &str) -> serde_json::Value {
    let path = dir.join("curve.csv");
    std::fs::write(&path, csv_text).unwrap();
    json(&stdout(&["fit", "--input", path.to_str().unwrap(), "--window", window]))
}

#[test]
fn fit_synthetic_and_exact_curves() {
    let dir = tempfile::tempdir().unwrap();
    let mut synthetic = String::from("t,msd\n");
    for k in 0..10 {
        let t = 10_000u64 * 2u64.pow(k / 2) + k as u64;
        synthetic.push_str(&format!("{t},{}\n", 3.5 * t as f64));
    }
    let fit = fit_json(dir.path(), &synthetic, "1e4:1e7");
    assert!((fit["exponent"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((fit["r_squared"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let curve = stdout(&["exact", "--eps", "0.1", "--r", "0.2", "--gamma", "0.3", "--t-max", "1e6", "--checkpoints", "log"]);
    let fit = fit_json(dir.path(), &curve, "1e4:1e6");
    assert_eq!(fit["column"], "m2");
    assert!(fit["exponent"].as_f64().unwrap() > 0.9 && fit["exponent"].as_f64().unwrap() < 1.0);

    let sparse = "t,msd\n10000,1\n20000,2\n";
    let path = dir.path().join("sparse.csv");
    std::fs::write(&path, sparse).unwrap();
    assert_eq!(erws(&["fit", "--input", path.to_str().unwrap(), "--window", "1:1e6"]).status.code(), Some(1));
}

#[test]
fn emitted_csv_round_trips() {
    let outputs = [
        stdout(&with_walk("exact", &["--t-max", "5000", "--checkpoints", "linear", "--points", "40"])),
        stdout(&with_walk("simulate", &["--walkers", "500", "--t-max", "100"])),
        stdout(&["scan", "--eps", "0.1", "--r-range", "0.05:0.95:7", "--gamma-range", "-0.8:0.8:9"]),
    ];
    for text in outputs {
        assert!(!text.contains('\r'));
        assert_eq!(reformat_csv(&text).unwrap(), text);
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exact.csv");
    let out = erws(&with_walk("exact", &["--checkpoints", "1,2", "--out", path.to_str().unwrap()]));
    assert!(out.status.success() && out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 3);
}
