use std::path::PathBuf;
use std::process::{Command, Output};

use colloid_core::spear::solve_spear;
use colloid_core::{characteristic_distances, LJParams};
use serde_json::Value;

fn colloid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_colloid")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = colloid(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

/// Header plus rows of floats (integers parse as floats too).
fn table(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn spear_table_round_trips_solver_output() {
    let (header, rows) = table(&stdout(&["spear", "--N", "16", "--beta", "3", "--alpha", "36"]));
    assert_eq!(header, ["k", "h_k", "h_bar", "h_check", "h_hat", "residual_k"]);
    assert_eq!(rows.len(), 15);
    let p = LJParams::unit(36.0, 3.0).unwrap();
    let d = characteristic_distances(&p);
    let sol = solve_spear(16, &p, 1e-10, 100).unwrap();
    for (k, row) in rows.iter().enumerate() {
        assert_eq!(row[0], (k + 1) as f64);
        assert_eq!(row[1], sol.spacing.as_slice()[k]);
        assert_eq!(row[5], sol.gradient[k]);
        assert!(row[1] >= d.h_check && row[1] <= d.h_hat);
        assert_eq!((row[2], row[3], row[4]), (d.h_bar, d.h_check, d.h_hat));
    }
}

#[test]
fn two_particles_sit_at_the_profile_minimum() {
    let (_, rows) = table(&stdout(&["spear", "--N", "2", "--alpha", "36", "--beta", "3"]));
    assert_eq!(rows.len(), 1);
    assert!((rows[0][1] - rows[0][4]).abs() < 1e-12);
}

#[test]
fn spear_sweep_writes_asymptotic_table() {
    let v = json(&["spear", "--alpha", "36", "--sweep", "16,32,64", "--format", "json"]);
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    let slope = v["center_slope"].as_f64().unwrap();
    assert!((-2.5..-1.5).contains(&slope), "{slope}");
}

#[test]
fn rejected_configs_name_the_key() {
    for (args, key) in [
        (vec!["spear", "--alpha", "2", "--beta", "3"], "alpha"),
        (vec!["spear", "--N", "1"], "N"),
        (vec!["spear", "--tol", "-1"], "tol"),
        (vec!["spear", "--sweep", "32,16"], "sweep"),
        (vec!["ring", "--B0", "0"], "B0"),
        (vec!["ring", "--format", "xml"], "format"),
        (vec!["thresholds", "--format", "csv"], "format"),
        (vec!["dynamics", "--init", "blob"], "init"),
        (vec!["dynamics", "--dt", "0"], "dt"),
        (vec!["dynamics", "--perturb", "-0.1"], "perturb"),
        (vec!["gershgorin", "--matrix", "dense"], "matrix"),
    ] {
        let out = colloid(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(&format!("`{key}`")), "{args:?}: {err}");
    }
}

#[test]
fn exit_codes_for_solver_and_io_failures() {
    assert_eq!(colloid(&["spear", "--max-iter", "0"]).status.code(), Some(2));
    let missing = scratch("no/such/dir/out.csv");
    assert_eq!(colloid(&["ring", "--out", missing.to_str().unwrap()]).status.code(), Some(3));
    let unparsable = colloid(&["spear", "--alpha", "many"]);
    assert_eq!(unparsable.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&unparsable.stderr).contains("--alpha"));
}

#[test]
fn thresholds_report() {
    let v = json(&["thresholds", "--beta", "3"]);
    assert!((v["alpha_dag"].as_f64().unwrap() - 4.9).abs() < 0.1);
    assert!((v["alpha_star"].as_f64().unwrap() - 34.0).abs() < 1.0);
    let d = &v["distances"];
    assert!(d["h_bar"].as_f64() < d["h_tilde"].as_f64() && d["h_tilde"].as_f64() < d["h_hat"].as_f64());
}

#[test]
fn ring_radius_for_four() {
    let (header, rows) = table(&stdout(&["ring", "--N", "4", "--alpha", "12", "--beta", "3"]));
    assert_eq!(header, ["N", "A_tilde", "B_tilde", "r_star", "nn_distance", "nn_error", "h_bar"]);
    assert!((rows[0][3] - 0.8108).abs() < 1e-4, "{}", rows[0][3]);
    let (_, sweep) = table(&stdout(&["ring", "--sweep", "8,16,32,64"]));
    assert_eq!(sweep.len(), 4);
    assert!(sweep.windows(2).all(|w| w[1][5] < w[0][5]));
}

#[test]
fn exact_ring_is_a_fixed_point() {
    let v = json(&["dynamics", "--init", "ring", "--N", "12", "--perturb", "0"]);
    assert_eq!(v["structure"], "ring");
    assert_eq!(v["converged"], true);
    assert!(v["max_drift"].as_f64().unwrap() < 1e-8);
}

#[test]
fn dynamics_is_deterministic_and_writes_snapshots() {
    let args = ["dynamics", "--N", "6", "--seed", "3", "--B", "2", "--horizon", "5", "--cadence", "50", "--format", "csv"];
    let (a, b) = (scratch("snap_a.csv"), scratch("snap_b.csv"));
    for path in [&a, &b] {
        let out = colloid(&[&args[..], &["--out", path.to_str().unwrap()]].concat());
        // a short horizon leaves the run unconverged
        assert_eq!(out.status.code(), Some(2));
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    assert!(text.starts_with("t,k,x1,x2,x3,m1,m2,m3,v1,v2,v3,w1,w2,w3\n"));
    let (_, rows) = table(&text);
    assert_eq!(rows.len() % 6, 0);
    assert!(rows.iter().all(|r| r.len() == 14));
}

#[test]
fn config_file_with_flag_overrides() {
    let cfg = scratch("spear.cfg");
    std::fs::write(&cfg, "# chain\nalpha = 36\nbeta = 3\nN = 8\nformat = json\n").unwrap();
    let c = cfg.to_str().unwrap();
    let v = json(&["spear", "--config", c]);
    assert_eq!(v["N"], 8);
    assert_eq!(v["params"]["alpha"], 36.0);
    let v = json(&["spear", "--config", c, "--alpha", "12", "--N", "5"]);
    assert_eq!(v["N"], 5);
    assert_eq!(v["params"]["alpha"], 12.0);

    std::fs::write(&cfg, "alhpa = 36\n").unwrap();
    let out = colloid(&["spear", "--config", c]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`alhpa`"));
}

#[test]
fn gershgorin_reports() {
    let v = json(&["gershgorin", "--samples", "3", "--seed", "1"]);
    assert_eq!(v["hypotheses_hold"], true);
    assert!(v["max_ratio"].as_f64().unwrap() <= 1.0);
    assert!(v["counterexample"].is_null());
    assert!((v["r_plus"].as_f64().unwrap() - 0.3685).abs() < 1e-3);

    let v = json(&["gershgorin", "--matrix", "spear", "--alpha", "36", "--N", "40"]);
    assert!(v["r_plus"].as_f64().unwrap() < 1.0);
    assert_eq!(v["hypotheses_hold"], true);

    let v = json(&["gershgorin", "--c", "0.4", "--gamma", "2"]);
    assert!(v["r_plus"].as_f64().unwrap() >= 1.0);
    assert!(v["kappa"].is_null() && v["max_ratio"].is_null());
}

#[test]
fn identical_runs_give_identical_json() {
    let args = ["spear", "--sweep", "8,16", "--format", "json"];
    assert_eq!(stdout(&args), stdout(&args));
}
