//! End-to-end tests of the `reebflow` binary.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_reebflow"))
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("reebflow-cli-{}-{tag}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn volume_prints_a_json_report() {
    let out = bin().args(["volume", "--reeb", "1,2"]).output().unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(text.trim()).unwrap();
    let pi = std::f64::consts::PI;
    assert!((parsed["volume"].as_f64().unwrap() - pi * pi).abs() < 1e-8);
    assert!((parsed["relative_volume"].as_f64().unwrap() - 0.5).abs() < 1e-10);
    assert_eq!(parsed["min_pairing"].as_f64().unwrap(), 1.0);

    let out = bin()
        .args(["volume", "--reeb", "1,2", "--relative"])
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(text.trim()).unwrap();
    assert!((parsed["relative_volume"].as_f64().unwrap() - 0.5).abs() < 1e-10);
}

#[test]
fn volume_rejects_vectors_outside_the_cone() {
    let out = bin().args(["volume", "--reeb", "-1,2"]).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("Reeb cone"), "stderr: {err}");
}

#[test]
fn futaki_subcommand_reports_the_invariant() {
    let out = bin()
        .args(["--json", "futaki", "--reeb", "0.5,1.5", "--y", "1,-1"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let parsed: serde_json::Value =
        serde_json::from_str(String::from_utf8(out.stdout).unwrap().trim()).unwrap();
    let exact = 16.0 * std::f64::consts::PI.powi(2) / 9.0;
    assert!((parsed["futaki"].as_f64().unwrap() - exact).abs() < 1e-8 * exact);
}

#[test]
fn flow_writes_trajectory_csv_and_svg() {
    let dir = scratch("flow");
    let csv = dir.join("traj.csv");
    let svg = dir.join("traj.svg");
    let out = bin()
        .args([
            "flow",
            "--start",
            "0.5,1.5",
            "--out",
            csv.to_str().unwrap(),
            "--svg",
            svg.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,a0,a1,volume,grad_norm,mu");
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "0");
    assert_eq!(first[1], "0.5");
    // volume column decreases between the first and last rows
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| {
            l.split(',')
                .map(|v| v.parse().unwrap_or(f64::NAN))
                .collect()
        })
        .collect();
    assert!(rows.len() > 10);
    assert!(rows.last().unwrap()[3] < rows[0][3]);
    // mu column attached and non-decreasing
    assert!(rows.iter().all(|r| r[5].is_finite()));
    let svg_text = std::fs::read_to_string(&svg).unwrap();
    assert!(svg_text.starts_with("<svg"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn minimize_lands_on_the_round_point() {
    let out = bin()
        .args(["--json", "minimize", "--start", "0.3,0.9,1.8"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let parsed: serde_json::Value =
        serde_json::from_str(String::from_utf8(out.stdout).unwrap().trim()).unwrap();
    for a in parsed["minimizer"].as_array().unwrap() {
        assert!((a.as_f64().unwrap() - 1.0).abs() < 1e-7);
    }
}

#[test]
fn soliton_profile_and_sweep_outputs() {
    let dir = scratch("soliton");
    let csv = dir.join("profile.csv");
    let svg = dir.join("profile.svg");
    let out = bin()
        .args([
            "--json",
            "soliton",
            "--weights",
            "1,2",
            "--out",
            csv.to_str().unwrap(),
            "--svg",
            svg.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let parsed: serde_json::Value =
        serde_json::from_str(String::from_utf8(out.stdout).unwrap().trim()).unwrap();
    assert!(parsed["b"].as_f64().unwrap() > 0.0);
    assert!(parsed["residual"].as_f64().unwrap() < 1e-10);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), "x,phi,K_T,f");
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));

    let sweep_csv = dir.join("sweep.csv");
    let out = bin()
        .args([
            "soliton",
            "--weights",
            "1,1",
            "--sweep",
            "1:4:5",
            "--out",
            sweep_csv.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&sweep_csv).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert_eq!(
        text.lines().next().unwrap(),
        "ratio,w0,w1,b,k_min,residual,mu"
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn entropy_reports_the_bound() {
    let out = bin()
        .args(["entropy", "--weights", "1,2"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let parsed: serde_json::Value =
        serde_json::from_str(String::from_utf8(out.stdout).unwrap().trim()).unwrap();
    assert!(parsed["bound_ok"].as_bool().unwrap());
    let mu = parsed["mu"].as_f64().unwrap();
    assert!((parsed["A"].as_f64().unwrap() - mu).abs() < 1e-6 * mu.abs());
}

#[test]
fn config_errors_name_the_key_and_line() {
    let dir = scratch("cfg");
    let cfg = dir.join("bad.cfg");
    std::fs::write(&cfg, "flow.dt0 = -1\n").unwrap();
    let out = bin()
        .args(["--config", cfg.to_str().unwrap(), "volume", "--reeb", "1,1"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("flow.dt0") && err.contains("line 1"),
        "stderr: {err}"
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn seed_env_var_overrides_the_config() {
    let dir = scratch("seed");
    let cfg = dir.join("seeded.cfg");
    std::fs::write(&cfg, "quad.mc_seed = 42\nverbosity = 0\n").unwrap();
    // Not observable from the volume output itself; this asserts the
    // override at least parses and a malformed value is rejected loudly.
    let out = bin()
        .env("REEBFLOW_SEED", "notanumber")
        .args(["--config", cfg.to_str().unwrap(), "volume", "--reeb", "1,1"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("REEBFLOW_SEED"));
    let out = bin()
        .env("REEBFLOW_SEED", "77")
        .args(["--config", cfg.to_str().unwrap(), "volume", "--reeb", "1,1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    std::fs::remove_dir_all(&dir).ok();
}

fn run_report_into(dir: &Path, cfg: &Path) {
    let out = bin()
        .args([
            "--config",
            cfg.to_str().unwrap(),
            "report",
            "--out-dir",
            dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "report failed.\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn report_runs_are_byte_identical() {
    let base = scratch("report");
    let cfg = base.join("run.cfg");
    std::fs::write(&cfg, "verbosity = 0\nquad.mc_samples = 200000\n").unwrap();
    let dir_a = base.join("a");
    let dir_b = base.join("b");
    run_report_into(&dir_a, &cfg);
    run_report_into(&dir_b, &cfg);
    let mut compared = 0;
    for entry in std::fs::read_dir(&dir_a).unwrap() {
        let path = entry.unwrap().path();
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        if ext != "csv" {
            continue;
        }
        let name = path.file_name().unwrap();
        let a = std::fs::read(&path).unwrap();
        let b = std::fs::read(dir_b.join(name)).unwrap();
        assert_eq!(a, b, "CSV files differ: {name:?}");
        compared += 1;
    }
    assert!(compared >= 5, "only {compared} CSV files compared");
    // summary declares overall success
    let summary = std::fs::read_to_string(dir_a.join("summary.txt")).unwrap();
    assert!(
        summary.contains("PASS: all report assertions hold"),
        "{summary}"
    );
    std::fs::remove_dir_all(&base).ok();
}

#[test]
fn report_with_n2_finds_the_symmetric_minimizer() {
    let base = scratch("report-n2");
    let cfg = base.join("run.cfg");
    std::fs::write(&cfg, "n = 2\nverbosity = 0\nquad.mc_samples = 100000\n").unwrap();
    let dir = base.join("out");
    run_report_into(&dir, &cfg);
    let minimizer = std::fs::read_to_string(dir.join("minimizer.csv")).unwrap();
    let mut lines = minimizer.lines();
    assert_eq!(lines.next().unwrap(), "method,a0,a1,a2,volume");
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        for a in &cols[1..4] {
            let v: f64 = a.parse().unwrap();
            assert!((v - 1.0).abs() < 1e-6, "{line}");
        }
    }
    std::fs::remove_dir_all(&base).ok();
}

#[test]
fn report_flags_a_broken_quadrature_rule() {
    let base = scratch("report-broken");
    let cfg = base.join("run.cfg");
    // 4 nodes cannot resolve the near-boundary volume integrand; the
    // Monte Carlo cross-check must flag the discrepancy.
    std::fs::write(
        &cfg,
        "quad.points = 4\nverbosity = 0\nquad.mc_samples = 200000\n",
    )
    .unwrap();
    let dir = base.join("out");
    let out = bin()
        .args([
            "--config",
            cfg.to_str().unwrap(),
            "report",
            "--out-dir",
            dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        !out.status.success(),
        "a 4-node rule must fail the oracle check"
    );
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("quadrature.oracle"), "stderr: {err}");
    std::fs::remove_dir_all(&base).ok();
}
