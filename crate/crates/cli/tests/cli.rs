use std::path::Path;
use std::process::{Command, Output};

fn omegachan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_omegachan")).args(args).output().expect("binary runs")
}

/// Runs a command expected to succeed and returns its CSV rows as (header, rows).
fn table(args: &[&str]) -> (Vec<String>, Vec<Vec<f64>>) {
    let out = omegachan(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap_or(if c == "true" { 1.0 } else { 0.0 })).collect())
        .collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn zero_energy_gives_an_all_zero_entropy_row() {
    let (h, rows) = table(&["fig1", "--e-grid", "0"]);
    assert_eq!(rows.len(), 1);
    for c in ["e", "e_tilde", "s2_omega", "s2_sqvac", "s2_tms"] {
        assert_eq!(rows[0][col(&h, c)], 0.0, "{c}");
    }
    assert!(h.contains(&"n_trunc".to_string()) && h.contains(&"tail_mass".to_string()));
}

#[test]
fn superposition_entropy_exceeds_squeezed_vacuum_at_moderate_energy() {
    let (h, rows) = table(&["fig1", "--e-grid", "0.5,1.0"]);
    for r in &rows {
        assert!(r[col(&h, "s2_omega")] > r[col(&h, "s2_sqvac")]);
    }
}

#[test]
fn distance_bounds_vanish_at_zero_energy_and_grow() {
    let (h, rows) = table(&["fig2", "--e-grid", "0,0.25,0.5,1,2"]);
    let (lo, hi, out) = (col(&h, "delta_lower_omega"), col(&h, "delta_upper_omega"), col(&h, "delta_upper_channel_output"));
    assert_eq!((rows[0][lo], rows[0][hi], rows[0][out]), (0.0, 0.0, 0.0));
    for w in rows.windows(2) {
        assert!(w[1][lo] > w[0][lo]);
    }
    for r in &rows {
        assert!(r[lo] <= r[hi] + 1e-12);
    }
}

#[test]
fn photon_distribution_is_even_and_normalized() {
    let (h, rows) = table(&["fig3", "--e-grid", "0.5,1,5,10"]);
    let (e, n, p) = (col(&h, "e"), col(&h, "n"), col(&h, "p"));
    for energy in [0.5, 1.0, 5.0, 10.0] {
        let sel: Vec<_> = rows.iter().filter(|r| r[e] == energy).collect();
        assert_eq!(sel[0][n], 0.0);
        assert!(sel.iter().filter(|r| r[n] as usize % 2 == 1).all(|r| r[p] == 0.0));
        let total: f64 = sel.iter().map(|r| r[p]).sum();
        assert!((total - 1.0).abs() < 1e-9);
    }
}

#[test]
fn critical_noise_at_unit_energy_is_one_third() {
    let (h, rows) = table(&["threshold", "--e-grid", "1", "--noise", "0.5"]);
    assert_eq!(rows.len(), 1);
    assert!((rows[0][col(&h, "n_crit")] - 1.0 / 3.0).abs() < 1e-12);
    assert_eq!(rows[0][col(&h, "classical")], 1.0);
}

#[test]
fn swap_channel_has_no_contraction_bound() {
    let (h, rows) = table(&["contraction", "--e-grid", "1", "--zeta", "1.5707963267948966"]);
    assert!(rows[0][col(&h, "tau_lower")].abs() < 1e-12);
    assert!(rows[0][col(&h, "refinements")] >= 0.0);
}

#[test]
fn weak_amplifier_adds_no_relative_noise() {
    let (h, rows) = table(&["noise", "--e-grid", "1", "--r", "0.0001"]);
    assert!((rows[0][col(&h, "mu_omega")] - 1.0).abs() < 1e-6);
    assert!((rows[0][col(&h, "mu_coherent")] - 1.0).abs() < 1e-6);
}

fn run_to(dir: &Path, name: &str, args: &[&str]) -> Vec<u8> {
    let path = dir.join(name);
    let mut all = args.to_vec();
    let p = path.to_str().unwrap().to_string();
    all.extend(["--out", &p]);
    let out = omegachan(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    std::fs::read(path).unwrap()
}

#[test]
fn reruns_reproduce_output_bytes() {
    let dir = tempfile::tempdir().unwrap();
    for (fmt, args) in [("csv", ["fig2", "--e-grid", "0.5,1"]), ("json", ["fig1", "--e-grid", "0.5,2"])] {
        let mut args = args.to_vec();
        args.extend(["--format", fmt]);
        let a = run_to(dir.path(), "a", &args);
        let b = run_to(dir.path(), "b", &args);
        assert_eq!(a, b);
    }
    let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names.len(), 2, "temporary files left behind: {names:?}");
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# fig3 run\ne-grid = 0.5\nformat = json\n").unwrap();
    let c = cfg.to_str().unwrap();
    let json = omegachan(&["fig3", "--config", c]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["rows"][0][0], 0.5);
    let (h, rows) = table(&["fig3", "--config", c, "--format", "csv", "--e-grid", "1"]);
    assert!(rows.iter().all(|r| r[col(&h, "e")] == 1.0));
}

#[test]
fn invalid_settings_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "zeta = wide\n").unwrap();
    let out = omegachan(&["contraction", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("zeta"));

    let out = omegachan(&["fig1", "--e-grid", "0.5,-1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("e-grid"));

    let out = omegachan(&["noise", "--r", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid r"));
}
