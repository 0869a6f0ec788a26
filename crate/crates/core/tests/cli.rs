use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qnsim(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qnsim")).args(args).current_dir(cwd).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let idx = lines.next().unwrap().split(',').position(|c| c == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

#[test]
fn check_passes_on_fresh_build() {
    let dir = tempfile::tempdir().unwrap();
    let out = qnsim(&["check"], dir.path());
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.contains("0 failed"));
}

#[test]
fn run_with_zero_t_end_emits_initial_records() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.cfg", "grid_n = 16\nt_end = 0\n");
    let out = qnsim(&["run", "--config", &cfg, "--output-dir", "o"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let energy = fs::read_to_string(dir.path().join("o/energy.csv")).unwrap();
    assert_eq!(energy.lines().count(), 2);
    assert!(energy.starts_with("t,e_kin,f_free,e_total,diss_visc,diss_rot,balance_residual,l2_q,l4_q,l6_q\n"));
    let reg = fs::read_to_string(dir.path().join("o/regularity.csv")).unwrap();
    assert!(reg.starts_with("t,phi,phi1,phi2,f,g,bg_ratio\n"));
    assert!(dir.path().join("o/snap_00000000.qnsf").exists());
}

#[test]
fn zero_initial_data_gives_zero_records() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.cfg", "grid_n = 16\nt_end = 0.01\nic.energy_q = 0\nic.energy_u = 0\n");
    let out = qnsim(&["run", "--config", &cfg, "--output-dir", "o"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let energy = fs::read_to_string(dir.path().join("o/energy.csv")).unwrap();
    for row in energy.lines().skip(1) {
        assert!(row.split(',').skip(1).all(|v| v.parse::<f64>().unwrap() == 0.0), "{row}");
    }
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for (text, needle) in [("grid_n = 16\nc = -1\n", "c > 0"), ("grid_n = 16\nxi = 0.5\n", "xi"), ("grid_n = 16\nbogus = 1\n", "bogus")] {
        let cfg = write(dir.path(), "bad.cfg", text);
        let out = qnsim(&["run", "--config", &cfg], dir.path());
        assert_eq!(out.status.code(), Some(2));
        assert!(String::from_utf8_lossy(&out.stderr).contains(needle));
    }
    let cfg = write(dir.path(), "xi.cfg", "grid_n = 16\nxi = 0.5\n");
    assert_eq!(qnsim(&["check-formulas", "--config", &cfg], dir.path()).status.code(), Some(0));
    assert_eq!(qnsim(&["run"], dir.path()).status.code(), Some(2));
}

#[test]
fn unstable_run_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.cfg", "grid_n = 32\ndt = 0.5\nt_end = 50\nic.energy_u = 2000\nsave_every = 1\n");
    let out = qnsim(&["run", "--config", &cfg, "--output-dir", "o"], dir.path());
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stdout));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("numerical failure at step"), "{err}");
}

#[test]
fn identical_twins_have_zero_delta() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.cfg", "grid_n = 32\nt_end = 0.05\ndiag_every = 10\n");
    let out = qnsim(&["twin", "--config", &cfg, "--n1", "32", "--n2", "32", "--output-dir", "o"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("o/gronwall.csv")).unwrap();
    assert!(csv.starts_with("t,delta_e,k_strong\n"));
    let d = column(&csv, "delta_e");
    assert_eq!(d.len(), 6);
    assert!(d.iter().all(|v| *v <= 1e-14));
}

#[test]
fn lp_and_pressure_read_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.cfg", "grid_n = 16\nt_end = 0\n");
    assert_eq!(qnsim(&["run", "--config", &cfg, "--output-dir", "o"], dir.path()).status.code(), Some(0));
    let out = qnsim(&["lp", "--snapshot", "o/snap_00000000.qnsf", "--profile", "smooth"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("dyadic"));
    let out = qnsim(&["pressure", "--snapshot", "o/snap_00000000.qnsf", "--out", "p.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let p = fs::read_to_string(dir.path().join("p.csv")).unwrap();
    assert_eq!(p.lines().count(), 16);
    assert!(p.lines().all(|l| l.split(',').count() == 16));

    fs::write(dir.path().join("junk.qnsf"), b"NOPE").unwrap();
    assert_eq!(qnsim(&["lp", "--snapshot", "junk.qnsf"], dir.path()).status.code(), Some(1));
}
