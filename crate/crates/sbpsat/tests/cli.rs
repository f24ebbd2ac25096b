use std::path::PathBuf;
use std::process::{Command, Output};

use sbpsat::assembly::presets;
use sbpsat::sbp;
use sbpsat::sparse::Csr;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sbpsat")).args(args).output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let d = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn verify_ops_passes() {
    let out = scratch("verify");
    let o = bin(&["verify-ops", "--order", "4", "--n", "17", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("overall = pass"));
    assert!(out.join("certificate_order4.txt").exists());
}

#[test]
fn injected_bad_d1_names_invariant() {
    let out = scratch("bad_d1");
    let set = sbp::build_sbp_set::<f64>(4, sbp::Grid1D::unit(17).unwrap()).unwrap();
    let mut trips: Vec<_> = set.d1.triplets().collect();
    trips[0].2 += 1e-3;
    let bad = Csr::from_triplets(17, 17, trips);
    let file = out.join("d1.txt");
    std::fs::write(&file, sbp::triplet_text(&bad)).unwrap();
    let o = bin(&["verify-ops", "--order", "4", "--n", "17", "--d1-file", file.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let s = stdout(&o);
    assert!(s.contains("check.sbp_n17.Q_plus_QT_equals_B = FAIL") || s.contains("Q_plus_QT_equals_B = FAIL"), "{s}");
}

#[test]
fn unknown_preset_is_config_error() {
    let o = bin(&["spectrum", "--preset", "no-such-preset", "--out", scratch("bad_preset").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = bin(&["converge", "--preset", "tjunction-converge", "--order", "5"]);
    assert_eq!(o.status.code(), Some(2));
    let o = bin(&["run", "--bogus-flag"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn spectrum_from_config_file() {
    let out = scratch("spectrum");
    let cfg = out.join("single.toml");
    std::fs::write(&cfg, presets::single_block(2, 11, "zero").to_toml()).unwrap();
    let o = bin(&["spectrum", "--config", cfg.to_str().unwrap(), "--expect-stable", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let csv = std::fs::read_to_string(out.join("spectrum.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# config_hash = "));
    assert_eq!(lines.next().unwrap(), "re,im,re_scaled,im_scaled");
    assert_eq!(lines.count(), 121);
}

#[test]
fn run_writes_logs_and_zero_data_gives_zero_error() {
    let out = scratch("run");
    let mut c = presets::cartesian_pair(4, 11, 21, "zero");
    c.t_end = 0.05;
    let cfg = out.join("pair.toml");
    std::fs::write(&cfg, c.to_toml()).unwrap();
    let o = bin(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let errors = std::fs::read_to_string(out.join("errors.csv")).unwrap();
    let hash = format!("# config_hash = {}", c.hash());
    assert_eq!(errors.lines().next().unwrap(), hash);
    assert!(errors.lines().skip(2).all(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap() == 0.0));
    let energy = std::fs::read_to_string(out.join("energy.csv")).unwrap();
    assert_eq!(energy.lines().nth(1).unwrap(), "t,G,G1,G2,G3");
}

#[test]
fn run_over_step_budget_is_refused() {
    let out = scratch("budget");
    let o = bin(&["run", "--preset", "extreme-interface-longtime", "--max-steps", "1000", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("step"));
}
