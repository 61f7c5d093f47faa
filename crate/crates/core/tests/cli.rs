use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multiphoton"))
        .args(args)
        .current_dir(cwd)
        .env_remove("MULTIPHOTON_OUT_DIR")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn map_ghz_three_emits_eee_and_lll() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&bin(&["map", "--preset", "ghz", "--n", "3"], dir.path()));
    for key in ["source_state", "photon_state", "reports"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let ph = &v["photon_state"];
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for (label, amp) in ph["labels"].as_array().unwrap().iter().zip(ph["amplitudes"].as_array().unwrap()) {
        let label = label.as_str().unwrap();
        assert!(label.chars().all(|c| c == 'E' || c == 'L'));
        let expect = if label == "EEE" || label == "LLL" { h } else { 0.0 };
        let (re, im) = (amp[0].as_f64().unwrap(), amp[1].as_f64().unwrap());
        assert!((re - expect).abs() < 1e-12 && im.abs() < 1e-12, "{label}: {re} {im}");
    }
}

#[test]
fn same_seed_gives_identical_report_files() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.json", "b.json"] {
        let out = bin(&["map", "--preset", "w", "--n", "4", "--seed", "17", "--report", name], dir.path());
        assert_eq!(out.status.code(), Some(0));
    }
    let a = fs::read(dir.path().join("a.json")).unwrap();
    let b = fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn stats_at_unit_eta_needs_two_rounds() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&bin(&["stats", "--eta", "1.0", "--trials", "10000"], dir.path()));
    assert_eq!(v["trials"], 10000);
    let mean = v["mean_rounds"].as_f64().unwrap();
    assert!((mean - 2.0).abs() <= 0.05, "mean {mean}");
    assert!(v["stderr_rounds"].as_f64().unwrap() > 0.0);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.json"), r#"{"command": "stats", "trials": 3, "eta": 0.9, "seed": 4}"#).unwrap();
    let v = json(&bin(&["stats", "--config", "c.json", "--trials", "1000"], dir.path()));
    assert_eq!(v["config"]["trials"], 1000);
    assert_eq!(v["config"]["seed"], 4);
    assert_eq!(v["trials"], 1000);
}

#[test]
fn echoed_config_reruns_to_the_same_report() {
    let dir = tempfile::tempdir().unwrap();
    let first = bin(&["rus", "--input", "random", "--seed", "99"], dir.path());
    let v = json(&first);
    fs::write(dir.path().join("echo.json"), v["config"].to_string()).unwrap();
    let second = bin(&["rus", "--config", "echo.json"], dir.path());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn exit_codes_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad_eta.json"), r#"{"eta": 1.5}"#).unwrap();
    let out = bin(&["stats", "--config", "bad_eta.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("eta"));

    fs::write(dir.path().join("unknown.json"), r#"{"etaa": 0.5}"#).unwrap();
    assert_eq!(bin(&["stats", "--config", "unknown.json"], dir.path()).status.code(), Some(2));
    fs::write(dir.path().join("broken.json"), "{").unwrap();
    assert_eq!(bin(&["stats", "--config", "broken.json"], dir.path()).status.code(), Some(2));
    assert_eq!(bin(&["teleport"], dir.path()).status.code(), Some(2));

    assert_eq!(bin(&["stats", "--eta", "0"], dir.path()).status.code(), Some(1));
    let codes: Vec<i32> = (0..16)
        .map(|seed| bin(&["rus", "--max-rounds", "1", "--seed", &seed.to_string()], dir.path()).status.code().unwrap())
        .collect();
    assert!(codes.iter().all(|&c| c <= 1) && codes.contains(&0) && codes.contains(&1), "{codes:?}");

    assert_eq!(bin(&["prepare", "--config", "missing.json"], dir.path()).status.code(), Some(3));
    assert_eq!(bin(&["prepare", "--report", "no/such/dir/r.json"], dir.path()).status.code(), Some(3));
    assert_eq!(bin(&["prepare"], dir.path()).status.code(), Some(0));
}

#[test]
fn thirteen_qubits_report_only_a_summary() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&bin(&["prepare", "--n", "13", "--preset", "ghz"], dir.path()));
    let s = &v["source_state"];
    assert!(s.get("amplitudes").is_none());
    assert_eq!(s["qubits"], 13);
    assert_eq!(s["support"], 2);
    assert!((s["max_probability"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn interfere_csv_maxima_sit_on_fringes() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&bin(&["interfere", "--state", "symmetric", "--k0r", "18.849556", "--output", "sym.csv"], dir.path()));
    assert_eq!(v["csv"], "sym.csv");
    let text = fs::read_to_string(dir.path().join("sym.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta,phi,intensity"));
    let rows: Vec<[f64; 3]> = lines
        .map(|l| {
            let f: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            [f[0], f[1], f[2]]
        })
        .collect();
    assert_eq!(rows.len(), 181 * 360);
    // Unit separation along x̂, dipole along ẑ: I = sin²θ (1 + cos(k0r sinθ cosφ)).
    let k0r = 18.849556;
    for r in &rows {
        let expect = r[0].sin().powi(2) * (1.0 + (k0r * r[0].sin() * r[1].cos()).cos());
        assert!((r[2] - expect).abs() < 1e-12);
    }
    let maxima = v["maxima"].as_array().unwrap();
    assert!(!maxima.is_empty());
    let cell = std::f64::consts::PI / 180.0;
    for m in maxima {
        let (th, ph) = (m[0].as_f64().unwrap(), m[1].as_f64().unwrap());
        let order = k0r * th.sin() * ph.cos() / (2.0 * std::f64::consts::PI);
        // One grid cell moves the order by at most 3·cell.
        assert!((order - order.round()).abs() <= 3.0 * cell + 1e-9, "maximum at ({th}, {ph}), order {order}");
    }
}

#[test]
fn out_dir_variable_sets_default_csv_location() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_multiphoton"))
        .args(["interfere", "--n-theta", "11", "--n-phi", "12"])
        .current_dir(dir.path())
        .env("MULTIPHOTON_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("intensity.csv").exists());
}
