use std::path::PathBuf;
use std::process::{Command, Output};

fn voltail(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_voltail"))
        .args(args)
        .output()
        .expect("voltail runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("voltail-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn geodesic_prints_csv() {
    let o = voltail(&["geodesic", "--from", "0", "--to", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("y,u,d"));
    let d: f64 = lines.next().unwrap().split(',').nth(2).unwrap().parse().unwrap();
    assert!((d - 5.37771).abs() < 1e-5);
}

#[test]
fn fig2_constant_sigma_matches_half_d2() {
    let o = voltail(&["fig2", "--sigma0", "0.25", "--zero-drift", "--n-grid", "201", "--no-cross-check"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 121);
    assert_eq!(text.lines().next(), Some("y,E,half_d2"));
    for r in &rows {
        assert!((r[1] - r[2]).abs() < 1e-6, "{r:?}");
    }
    assert_eq!(rows[60], vec![0.0, 0.0, 0.0]);
}

#[test]
fn config_file_with_flag_override() {
    let cfg = scratch("cev.cfg");
    std::fs::write(&cfg, "# CEV tail table\n[cev]\ndelta = 0.2\nbeta = -0.5\n\n[cev-tail]\nx_grid = 10,100\n").unwrap();
    let o = voltail(&["cev-tail", "--config", cfg.to_str().unwrap(), "--x-grid", "1000,10000"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("x,log_density,asymptote,ratio"));
    assert!(text.lines().nth(1).unwrap().starts_with("1000,"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn malformed_config_reports_line_and_column() {
    let cfg = scratch("bad.cfg");
    std::fs::write(&cfg, "[vol]\nkind = figure1\nsigma0 0.2\n").unwrap();
    let o = voltail(&["geodesic", "--config", cfg.to_str().unwrap(), "--to", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3, column 11"), "{err}");
}

#[test]
fn exit_codes() {
    assert_eq!(voltail(&["geodesic"]).status.code(), Some(2));
    assert_eq!(voltail(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(voltail(&["carrlee", "--lambda", "0.5", "--samples", "/nonexistent.csv"]).status.code(), Some(2));
    // Replication on a grid too coarse for the tolerance is a numerical failure.
    let o = voltail(&[
        "replicate",
        "--payoff",
        "exp(3*s)",
        "--forward",
        "1",
        "--grid",
        "0.5:2:0.5",
        "--tolerance",
        "1e-9",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).starts_with("kind,strike,weight\ncash,1,"));
}

#[test]
fn critical_lambda_report_has_slope_and_verdict() {
    let rep = scratch("cl.json");
    let o = voltail(&["critical-lambda", "--report", rep.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("lambda_star,bracket_lo,bracket_hi,slope,feasible\n"));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    for key in ["lambda_star", "sqrt_2_lambda_star", "feasible", "feasibility_note"] {
        assert!(r["outputs"].get(key).is_some(), "{key}");
    }
    assert_eq!(r["outputs"]["feasible"], serde_json::json!(false));
    assert_eq!(r["tool"], "voltail");
}

#[test]
fn mc_pipeline_and_replay() {
    let clock = scratch("tau.csv");
    let s = scratch("s.csv");
    let rep = scratch("compose.json");
    let o = voltail(&["mc", "cir", "--paths", "20000", "--steps", "100", "--seed", "4", "--out", clock.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(std::fs::read_to_string(&clock).unwrap().starts_with("tau\n"));
    let o = voltail(&[
        "mc",
        "compose",
        "--clock",
        clock.to_str().unwrap(),
        "--scheme",
        "exact",
        "--seed",
        "5",
        "--out",
        s.to_str().unwrap(),
        "--report",
        rep.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let o = voltail(&["carrlee", "--kind", "cev", "--lambda", "2", "--samples", s.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    let est: f64 = text.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
    // E e^{2∫v} for the default clock is about 1.0854.
    assert!((est - 1.0854).abs() < 0.02, "{est}");

    let o = voltail(&["report", rep.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("reproduced mc-compose (seed 5)"));
}

#[test]
fn json_format_and_replay_for_deterministic_commands() {
    let rep = scratch("wing.json");
    let o = voltail(&["wing", "--kind", "cev", "--k-grid", "5:15:5", "--format", "json", "--out", rep.to_str().unwrap()]);
    assert!(o.status.success());
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    assert_eq!(r["outputs"]["columns"], serde_json::json!(["k", "i2_over_k"]));
    assert_eq!(r["outputs"]["rows"].as_array().unwrap().len(), 3);
    assert!(voltail(&["report", rep.to_str().unwrap()]).status.success());
}

#[test]
fn doss_check_constant_sigma() {
    let o = voltail(&["doss-check", "--sigma0", "0.3", "--points", "0.3,0.6", "--paths", "200000", "--steps", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with(
        "x,tail_prob,half_width_95,neg_log_tail,half_d2,ratio,sandwich_lower,sandwich_upper,exact_tail\n"
    ));
    for line in text.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((v[1] - v[8]).abs() <= 3.0 * v[2] / 1.96, "{line}");
        // Constant σ has C₁ = C₂ = −½σ² < 0, so the lower bound is the exact tail.
        assert!((v[6] - v[8]).abs() < 1e-12 * v[8] && v[7] >= v[8]);
    }
}
