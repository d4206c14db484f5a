mod common;

use std::f64::consts::PI;

use common::{assert_close, assert_rel, jacobi_hermitean_eigenvalues};
use num_complex::Complex64;
use oamproca_core::dispersion::{
    effective_mass_fit, effective_mass_spectrum, evolve_scalar, measure_dispersion, mode_coupling_matrix,
    record_history, run_dispersion, truncation_shift, DispersionSample, DispersionSetup, ModeCouplingMatrix,
    ScalarWaveState, DEFAULT_SAMPLE_DT, DEFAULT_SUBSTEPS,
};
use oamproca_core::grid::Grid3;
use oamproca_core::linalg::hermitean_defect;
use oamproca_core::plasma::{HelicalTerm, PlasmaProfile};
use proptest::prelude::*;

fn plasma(omega_p0: f64) -> PlasmaProfile {
    PlasmaProfile::from_plasma_frequency(omega_p0, vec![]).unwrap()
}

fn measured(
    profile: PlasmaProfile,
    points: usize,
    length: f64,
    modes: &[i64],
    dt: f64,
    samples: usize,
) -> Vec<DispersionSample> {
    let grid = Grid3::line(points, length).unwrap();
    let s = ScalarWaveState::standing_waves(grid, profile, modes, 1.0).unwrap();
    let history = record_history(&s, dt, samples, 1).unwrap();
    measure_dispersion(&history).unwrap().samples
}

#[test]
fn vacuum_mode_oscillates_at_its_wavenumber() {
    let k = 2.0 * PI * 3.0 / 16.0;
    let s = measured(PlasmaProfile::vacuum(), 64, 16.0, &[3], 0.1, 1024);
    assert_eq!(s.len(), 1);
    assert_close(s[0].k, k, 1e-12, "k");
    assert_rel(s[0].omega, k, 1e-3, "vacuum omega");
}

#[test]
fn uniform_plasma_oscillation_at_plasma_frequency() {
    let s = measured(plasma(0.5), 32, 10.0, &[0], 0.1, 1024);
    assert_eq!(s.len(), 1);
    assert_eq!(s[0].k, 0.0);
    assert_rel(s[0].omega, 0.5, 1e-3, "k = 0 omega");
}

#[test]
fn unit_wavenumber_in_plasma() {
    // L = 8π and mode 4 put k = 1 on the grid.
    let s = measured(plasma(0.5), 64, 8.0 * PI, &[4], 0.1, 1024);
    assert_close(s[0].k, 1.0, 1e-12, "k");
    assert_rel(s[0].omega, 1.25f64.sqrt(), 1e-2, "k = 1 omega");
    assert_rel(s[0].omega, 1.118034, 1e-2, "k = 1 omega, decimal");
}

#[test]
fn vacuum_ratio_is_one_within_resolution() {
    let grid = Grid3::line(32, 2.0 * PI).unwrap();
    let s = ScalarWaveState::standing_waves(grid, PlasmaProfile::vacuum(), &[1, 2, 3], 1.0).unwrap();
    let m = measure_dispersion(&record_history(&s, 0.05, 512, 1).unwrap()).unwrap();
    let ks: Vec<f64> = m.samples.iter().map(|x| x.k).collect();
    assert_eq!(ks, [1.0, 2.0, 3.0]);
    for x in &m.samples {
        assert!((x.omega - x.k).abs() <= m.resolution, "omega {} at k {}", x.omega, x.k);
        assert!((x.omega / x.k - 1.0).abs() <= m.resolution / x.k);
    }
    assert_close(m.resolution, 2.0 * PI / (512.0 * 0.05), 1e-15, "resolution");
}

#[test]
fn static_field_gives_a_single_zero_frequency() {
    let grid = Grid3::line(16, 4.0).unwrap();
    let s = ScalarWaveState::new(grid, PlasmaProfile::vacuum(), vec![0.3; 16], vec![0.0; 16]).unwrap();
    let m = measure_dispersion(&record_history(&s, 0.1, 128, 1).unwrap()).unwrap();
    assert_eq!(m.samples.len(), 1);
    assert_eq!(m.samples[0].k, 0.0);
    assert_eq!(m.samples[0].omega, 0.0);
}

/// Ordinary least squares `y = a x + b` with a free slope.
fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let (sx, sy) = (x.iter().sum::<f64>(), y.iter().sum::<f64>());
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    (slope, (sy - slope * sx) / n)
}

#[test]
fn plasma_intercept_matches_linear_fit_oracle() {
    let s = measured(plasma(0.5), 128, 32.0, &[0, 1, 2, 3, 5, 8], 0.1, 2048);
    assert_eq!(s.len(), 6);
    let x: Vec<f64> = s.iter().map(|v| v.k * v.k).collect();
    let y: Vec<f64> = s.iter().map(|v| v.omega * v.omega).collect();
    let (slope, intercept) = linear_fit(&x, &y);
    assert_rel(slope, 1.0, 1e-2, "slope");
    assert_rel(intercept, 0.25, 1e-2, "free-slope intercept");
    let fit = effective_mass_fit(&s).unwrap();
    assert_rel(fit.mu_sq, intercept, 1e-2, "unit-slope intercept vs oracle");
}

#[test]
fn vacuum_fit_is_massless_within_error() {
    let s = measured(PlasmaProfile::vacuum(), 64, 16.0, &[1, 2, 3, 4], 0.1, 1024);
    let fit = effective_mass_fit(&s).unwrap();
    assert!(
        fit.mu_sq.abs() <= fit.stderr.max(1e-6),
        "mu_sq {} stderr {}",
        fit.mu_sq,
        fit.stderr
    );
}

#[test]
fn default_homogeneous_run_recovers_the_mass() {
    let run = run_dispersion(&DispersionSetup::default(), &plasma(0.5)).unwrap();
    assert_eq!(run.measurement.samples.len(), 9);
    let fit = run.fit.unwrap();
    assert_rel(fit.mu_sq, 0.25, 1e-2, "fitted mass squared");
    for s in &run.measurement.samples {
        assert!(s.omega >= 0.0);
        assert!((s.omega * s.omega - s.k * s.k - 0.25).abs() <= 0.0025);
    }
}

fn structured() -> PlasmaProfile {
    let n0 = 0.25 / (4.0 * PI);
    let q0 = 2.0 * PI * 2.0 / 64.0;
    PlasmaProfile::new(n0, vec![HelicalTerm::new(0.1 * n0, 1, q0)]).unwrap()
}

#[test]
fn leapfrog_energy_drift_at_default_resolution() {
    let setup = DispersionSetup::default();
    let grid = Grid3::line(setup.points, setup.length).unwrap();
    let s = ScalarWaveState::standing_waves(grid, structured(), &setup.modes, 1.0).unwrap();
    let dt = DEFAULT_SAMPLE_DT / DEFAULT_SUBSTEPS as f64;
    let e0 = s.energy();
    let i0 = s.leapfrog_invariant(dt);
    let mut state = s;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        state = evolve_scalar(&state, dt, 100).unwrap();
        worst = worst.max(((state.energy() - e0) / e0).abs());
    }
    assert!((state.time - 10.0).abs() < 1e-9);
    assert!(worst <= 1e-6, "relative energy drift {worst:e}");
    assert!(((state.leapfrog_invariant(dt) - i0) / i0).abs() <= 1e-12);
}

#[test]
fn structured_run_stays_near_the_homogeneous_mass() {
    let setup = DispersionSetup {
        samples: 512,
        ..DispersionSetup::default()
    };
    let run = run_dispersion(&setup, &structured()).unwrap();
    let fit = run.fit.unwrap();
    assert!(fit.mu_sq > 0.0);
    assert!((fit.mu_sq - 0.25).abs() <= 0.1 * 0.25 + 3.0 * fit.stderr, "{fit:?}");
}

fn eigenvalues(m: &ModeCouplingMatrix) -> Vec<f64> {
    effective_mass_spectrum(m)
        .unwrap()
        .iter()
        .map(|e| e.eigenvalue)
        .collect()
}

fn single_term(n0: f64, ratio: f64, ell0: i64, q0: f64) -> PlasmaProfile {
    PlasmaProfile::new(n0, vec![HelicalTerm::new(ratio * n0, ell0, q0)]).unwrap()
}

#[test]
fn unperturbed_matrix_is_exactly_diagonal() {
    for profile in [
        PlasmaProfile::homogeneous(0.05).unwrap(),
        single_term(0.05, 0.0, 1, 0.2),
    ] {
        let m = mode_coupling_matrix(&profile, -2..=2, 1.0, 1).unwrap();
        let w0 = profile.omega_p0_sq();
        for i in 0..m.basis.len() {
            for j in 0..m.basis.len() {
                let expected = if i == j { m.basis[i].k_z.powi(2) + w0 } else { 0.0 };
                assert_eq!(m.entries[(i, j)], Complex64::new(expected, 0.0));
            }
        }
        for e in effective_mass_spectrum(&m).unwrap() {
            assert_close(e.mu_sq_eff, w0, 1e-14, "unperturbed effective mass");
        }
    }
}

#[test]
fn selection_rule_and_coupling_strength() {
    let (n0, ratio, q0) = (0.05, 0.05, 0.2);
    let profile = single_term(n0, ratio, 1, q0).clone();
    let m = mode_coupling_matrix(&profile, -3..=3, 1.0, 1).unwrap();
    let c = profile.omega_p0_sq() * ratio * n0 / (2.0 * n0);
    assert_eq!(hermitean_defect(&m.entries), 0.0);
    let mut couplings = 0;
    for (i, a) in m.basis.iter().enumerate() {
        for (j, b) in m.basis.iter().enumerate() {
            if i == j {
                continue;
            }
            let (dl, dk) = (a.ell - b.ell, a.k_z - b.k_z);
            let allowed = (dl == 1 && (dk - q0).abs() < 1e-9) || (dl == -1 && (dk + q0).abs() < 1e-9);
            let v = m.entries[(i, j)];
            if allowed {
                couplings += 1;
                assert_close(v.norm(), c, 1e-15, "coupling magnitude");
            } else {
                assert_eq!(
                    v,
                    Complex64::new(0.0, 0.0),
                    "entry ({i},{j}) outside the selection rule"
                );
            }
        }
    }
    assert_eq!(m.basis.len(), 7);
    assert_eq!(couplings, 12);
}

#[test]
fn weak_helix_keeps_every_effective_mass_positive() {
    let profile = single_term(0.05, 0.05, 1, 0.2);
    let m = mode_coupling_matrix(&profile, -2..=2, 1.0, 1).unwrap();
    assert_eq!(m.basis.len(), 5);
    let w0 = profile.omega_p0_sq();
    let spectrum = effective_mass_spectrum(&m).unwrap();
    for e in &spectrum {
        assert!(!e.is_negative());
        assert!((e.mu_sq_eff - w0).abs() <= 0.05 * w0, "{e:?}");
    }
    let oracle = jacobi_hermitean_eigenvalues(&m.entries);
    for (a, b) in eigenvalues(&m).iter().zip(&oracle) {
        assert_close(*a, *b, 1e-10, "eigenvalue vs Jacobi");
    }
}

#[test]
fn two_terms_match_an_independent_eigensolve() {
    let n0 = 0.08;
    let profile = PlasmaProfile::new(
        n0,
        vec![
            HelicalTerm::new(0.04 * n0, 1, 0.2),
            HelicalTerm::new(0.03 * n0, 2, -0.15).with_phase(0.7),
        ],
    )
    .unwrap();
    let m = mode_coupling_matrix(&profile, -4..=4, 0.8, 1).unwrap();
    assert_eq!(hermitean_defect(&m.entries), 0.0);
    let ours = eigenvalues(&m);
    let oracle = jacobi_hermitean_eigenvalues(&m.entries);
    assert_eq!(ours.len(), oracle.len());
    for (a, b) in ours.iter().zip(&oracle) {
        assert_close(*a, *b, 1e-10, "eigenvalue vs Jacobi");
    }
}

#[test]
fn doubling_the_range_barely_moves_the_seed_eigenvalue() {
    let profile = single_term(0.05, 0.05, 1, 0.2);
    let shift = truncation_shift(&profile, -2..=2, 1.0).unwrap();
    assert!(shift < 1e-8, "truncation shift {shift:e}");
}

#[test]
fn range_must_contain_the_coupled_images() {
    let profile = single_term(0.05, 0.05, 2, 0.2);
    assert!(mode_coupling_matrix(&profile, -1..=1, 1.0, 1).is_err());
    assert!(mode_coupling_matrix(&profile, -2..=2, 1.0, 1).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn coupled_spectrum_stays_above_the_lowest_wavenumber(
        n0 in 1e-3f64..1.0,
        ratio in 0.0f64..=0.1,
        ell0 in 1i64..=3,
        q0 in -1.0f64..1.0,
        k_center in -2.0f64..2.0,
        phase in 0.0f64..(2.0 * PI),
    ) {
        let profile = PlasmaProfile::new(n0, vec![HelicalTerm::new(ratio * n0, ell0, q0).with_phase(phase)]).unwrap();
        let m = mode_coupling_matrix(&profile, -(2 * ell0)..=(2 * ell0), k_center, 1).unwrap();
        prop_assert_eq!(hermitean_defect(&m.entries), 0.0);
        let k_min_sq = m.basis.iter().map(|b| b.k_z * b.k_z).fold(f64::INFINITY, f64::min);
        let spectrum = effective_mass_spectrum(&m).unwrap();
        prop_assert!(spectrum[0].eigenvalue >= k_min_sq);
        for e in &spectrum {
            prop_assert!(!e.is_negative(), "{:?}", e);
        }
    }
}
