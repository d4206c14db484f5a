use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_oamproca");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("OAMPROCA_JOBS")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

/// Data rows of a CSV result, comment header stripped.
fn csv_rows(bytes: &[u8]) -> Vec<Vec<String>> {
    String::from_utf8(bytes.to_vec())
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn fermionic_tower_csv() {
    let out = run(&["tower", "--mstar", "1", "--kind", "fermionic", "--levels", "3"]);
    assert!(out.status.success());
    let rows = csv_rows(&out.stdout);
    assert_eq!(rows[0], ["j", "mu"]);
    let parsed: Vec<(String, f64)> = rows[1..]
        .iter()
        .map(|r| (r[0].clone(), r[1].parse().unwrap()))
        .collect();
    assert_eq!(parsed[0], ("1/2".into(), 1.0));
    assert_eq!(parsed[1], ("3/2".into(), 0.5));
    assert_eq!(parsed[2].0, "5/2");
    assert!((parsed[2].1 - 1.0 / 3.0).abs() < 1e-16);
}

#[test]
fn exit_codes() {
    let missing = run(&["mass", "--set", "profile.n0=0.05"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("missing key: E_amp"));

    let malformed = run(&["mass", "--set", "profile.n0=abc", "--set", "proca.E_amp=1"]);
    assert_eq!(malformed.status.code(), Some(2));

    let dense = run(&[
        "mass",
        "--set",
        "profile.n0=0.05",
        "--set",
        "proca.E_amp=1",
        "--set",
        "perturbation.1.n_tilde=0.06",
        "--set",
        "perturbation.1.ell0=1",
        "--set",
        "perturbation.1.q0=0",
    ]);
    assert_eq!(dense.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&dense.stderr).contains("perturbation exceeds density"));

    let singular = run(&[
        "mass",
        "--set",
        "profile.n0=0.05",
        "--set",
        "proca.E_amp=1",
        "--set",
        "proca.grad_phi_par=-1",
    ]);
    assert_eq!(singular.status.code(), Some(5));

    let algebra = run(&["algebra-verify"]);
    assert_eq!(algebra.status.code(), Some(1));

    let violation = run(&[
        "check-positivity",
        "--set",
        "profile.n0=0.05",
        "--set",
        "proca.E_amp=1",
        "--set",
        "proca.box_grad_phi_par=-1",
    ]);
    assert_eq!(violation.status.code(), Some(1));

    let unwritable = run(&["tower", "--mstar", "1", "--output", "/nonexistent-dir/out.csv"]);
    assert_eq!(unwritable.status.code(), Some(4));
}

#[test]
fn result_file_reruns_to_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.ini",
        "seed = 4\n[profile]\nn0 = 0.05\n[[perturbation]]\nn_tilde = 0.003\nell0 = 1\nq0 = 0.2\n\
         [[perturbation]]\nn_tilde = 0.001\nell0 = 2\nq0 = -0.1\nphase = 0.5\n[proca]\nE_amp = 1\n\
         [sweep]\nparam = delta_v_dot\nmin = 0\nmax = 0.02\ncount = 5\n",
    );
    for format in ["csv", "json"] {
        let first = dir.path().join(format!("first.{format}"));
        let second = dir.path().join(format!("second.{format}"));
        let a = run(&[
            "mass",
            "--config",
            &cfg,
            "--format",
            format,
            "--output",
            first.to_str().unwrap(),
        ]);
        assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
        let b = run(&[
            "mass",
            "--config",
            first.to_str().unwrap(),
            "--output",
            second.to_str().unwrap(),
        ]);
        assert!(b.status.success(), "{}", String::from_utf8_lossy(&b.stderr));
        assert_eq!(
            std::fs::read(&first).unwrap(),
            std::fs::read(&second).unwrap(),
            "{format}"
        );
    }
}

#[test]
fn repeated_runs_are_identical_for_any_job_count() {
    let args = [
        "check-positivity",
        "--seed",
        "9",
        "--set",
        "profile.n0=0.05",
        "--set",
        "proca.E_amp=1",
        "--set",
        "check.random=300",
    ];
    let one = run(&[&args[..], &["--jobs", "1"]].concat());
    let four = run(&[&args[..], &["--jobs", "4"]].concat());
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    let other_seed = run(&[&args[..2], &["10"], &args[3..]].concat());
    assert_ne!(one.stdout, other_seed.stdout);
}

#[test]
fn ratio_sweep_is_positive_everywhere() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "sweep.ini",
        "[profile]\nn0 = 0.05\n[[perturbation]]\nn_tilde = 0\nell0 = 1\nq0 = 0.5\n[proca]\nE_amp = 1\n\
         delta_v_dot = 0.01\n[sweep]\nparam = n_tilde_ratio\nmin = 0\nmax = 0.1\ncount = 11\n",
    );
    let out = run(&["check-positivity", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&out.stdout);
    let mu_sq = rows[0].iter().position(|c| c == "mu_sq").unwrap();
    assert_eq!(rows.len(), 12);
    for r in &rows[1..] {
        assert!(r[mu_sq].parse::<f64>().unwrap() > 0.0);
    }
}

#[test]
fn singular_sweep_point_stays_on_its_row() {
    let out = run(&[
        "mass",
        "--formula",
        "EQ2",
        "--set",
        "profile.n0=0.05",
        "--set",
        "proca.E_amp=1",
        "--set",
        "sweep.param=grad_phi_par",
        "--set",
        "sweep.min=-2",
        "--set",
        "sweep.max=0",
        "--set",
        "sweep.count=3",
    ]);
    assert!(out.status.success());
    let rows = csv_rows(&out.stdout);
    let err = rows[0].iter().position(|c| c == "error").unwrap();
    assert!(rows[1][err].is_empty());
    assert!(!rows[2][err].is_empty());
    assert!(rows[3][err].is_empty());
}

#[test]
fn dispersion_writes_field_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let field = dir.path().join("field.bin");
    let rs = dir.path().join("rs.csv");
    let out = run(&[
        "dispersion",
        "--set",
        "profile.n0=0.02",
        "--set",
        "dispersion.points=32",
        "--set",
        "dispersion.length=16",
        "--set",
        "dispersion.samples=256",
        "--set",
        "dispersion.modes=0,1,2",
        "--field-dump",
        field.to_str().unwrap(),
        "--field-format",
        "binary",
        "--rs-dump",
        rs.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::metadata(&field).unwrap().len(), 32 * 5 * 8);
    assert!(std::fs::read_to_string(&rs).unwrap().lines().count() > 8 * 8 * 8);
    let rows = csv_rows(&out.stdout);
    assert_eq!(rows[0], ["k", "omega", "power"]);
    assert_eq!(rows.len(), 4);
}

#[test]
fn modes_report_the_coupled_basis() {
    let out = run(&[
        "modes",
        "--set",
        "profile.n0=0.02",
        "--set",
        "perturbation.1.n_tilde=0.001",
        "--set",
        "perturbation.1.ell0=1",
        "--set",
        "perturbation.1.q0=0.5",
        "--ell-min",
        "-2",
        "--ell-max",
        "2",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&out.stdout);
    assert_eq!(rows.len(), 6);
    let negative = rows[0].iter().position(|c| c == "negative").unwrap();
    assert!(rows[1..].iter().all(|r| r[negative] == "false"));
}
