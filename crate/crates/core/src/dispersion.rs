//! Numerical cross-check of the plasma photon mass.
//!
//! A scalar Klein-Gordon field `∂t² u = ∇²u − ω_p²(x) u` stands in for each
//! polarization of the Proca photon. Its measured dispersion `ω² = k² + μ²`
//! gives the mass independently of the closed-form expressions.
//!
//! Two integrators:
//! - homogeneous plasma: exact rotation of each Fourier mode, no stability
//!   limit;
//! - structured plasma: velocity Verlet (kick-drift-kick leapfrog) with a
//!   spectral Laplacian, stable for `dt ≤ ½ min(Δx)` and
//!   `dt · ω_max < 2`.
//!
//! The OAM mode-coupling operator lives here as well: in the basis
//! `e^{i(ℓφ + k_z z)}` the helical term `ñ cos(ℓ0 φ + q0 z + phase)` couples
//! `(ℓ, k_z)` to `(ℓ ± ℓ0, k_z ± q0)` with strength `ω_p0² ñ / 2n0`. The
//! radial degree of freedom is frozen to a single cell.

use std::collections::{HashMap, VecDeque};
use std::f64::consts::PI;
use std::ops::RangeInclusive;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Fft3, Grid3};
use crate::linalg::hermitean_eigh;
use crate::plasma::PlasmaProfile;

/// Minimum number of snapshots accepted by [`measure_dispersion`].
pub const MIN_SNAPSHOTS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarWaveState {
    pub grid: Grid3,
    pub u: Vec<f64>,
    pub udot: Vec<f64>,
    pub profile: PlasmaProfile,
    pub time: f64,
}

impl ScalarWaveState {
    pub fn new(grid: Grid3, profile: PlasmaProfile, u: Vec<f64>, udot: Vec<f64>) -> Result<Self> {
        if u.len() != grid.len() || udot.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                left: u.len().max(udot.len()),
                right: grid.len(),
            });
        }
        Ok(Self {
            grid,
            u,
            udot,
            profile,
            time: 0.0,
        })
    }

    /// Superposition of standing waves `Σ amplitude · cos(2π m z / Lz)` at
    /// rest, one per mode number `m`.
    pub fn standing_waves(grid: Grid3, profile: PlasmaProfile, modes: &[i64], amplitude: f64) -> Result<Self> {
        let lz = grid.lengths()[2];
        let u = (0..grid.len())
            .map(|i| {
                let z = grid.position(i)[2];
                modes
                    .iter()
                    .map(|&m| amplitude * (2.0 * PI * m as f64 * z / lz).cos())
                    .sum()
            })
            .collect();
        Self::new(grid, profile, u, vec![0.0; grid.len()])
    }

    /// Local `ω_p²` at every grid point. The cylinder axis runs along `z`
    /// through the centre of the transverse box.
    pub fn plasma_freq_sq_field(&self) -> Vec<f64> {
        plasma_freq_sq_field(&self.grid, &self.profile)
    }

    /// `½ ∫ (u̇² + |∇u|² + ω_p² u²)`, gradient taken spectrally.
    pub fn energy(&self) -> f64 {
        let wp2 = self.plasma_freq_sq_field();
        let local: f64 = self
            .udot
            .iter()
            .zip(&self.u)
            .zip(&wp2)
            .map(|((v, u), w)| v * v + w * u * u)
            .sum();
        0.5 * (local + gradient_sq_sum(&self.grid, &self.u)) * self.grid.cell_volume()
    }

    /// Quadratic invariant of velocity Verlet at step `dt`:
    /// `energy − (dt²/8) ∫ |K u|²` with `K = −∇² + ω_p²`. Conserved to
    /// rounding by [`evolve_scalar`] on the leapfrog path.
    pub fn leapfrog_invariant(&self, dt: f64) -> f64 {
        let wp2 = self.plasma_freq_sq_field();
        let ku = apply_k(&self.grid, &wp2, &self.u);
        let ku_sq: f64 = ku.iter().map(|v| v * v).sum();
        self.energy() - dt * dt / 8.0 * ku_sq * self.grid.cell_volume()
    }
}

fn plasma_freq_sq_field(grid: &Grid3, profile: &PlasmaProfile) -> Vec<f64> {
    let [nx, ny, _] = grid.dims();
    let [lx, ly, _] = grid.lengths();
    let xc = if nx > 1 { lx / 2.0 } else { 0.0 };
    let yc = if ny > 1 { ly / 2.0 } else { 0.0 };
    (0..grid.len())
        .map(|i| {
            let [x, y, z] = grid.position(i);
            let (dx, dy) = if nx > 1 || ny > 1 { (x - xc, y - yc) } else { (0.0, 0.0) };
            let r = dx.hypot(dy);
            profile.plasma_freq_sq(r, dy.atan2(dx), z)
        })
        .collect()
}

fn k_sq(grid: &Grid3, idx: usize) -> f64 {
    let k = grid.wavevector(idx);
    k[0] * k[0] + k[1] * k[1] + k[2] * k[2]
}

fn to_complex(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

/// `Σ |∇u|²` over grid points via Parseval.
fn gradient_sq_sum(grid: &Grid3, u: &[f64]) -> f64 {
    let fft = Fft3::new(grid);
    let mut uh = to_complex(u);
    fft.forward(&mut uh);
    let s: f64 = uh.iter().enumerate().map(|(i, c)| k_sq(grid, i) * c.norm_sqr()).sum();
    s / grid.len() as f64
}

/// `(−∇² + ω_p²) u`.
fn apply_k(grid: &Grid3, wp2: &[f64], u: &[f64]) -> Vec<f64> {
    let fft = Fft3::new(grid);
    let mut uh = to_complex(u);
    fft.forward(&mut uh);
    uh.iter_mut().enumerate().for_each(|(i, c)| *c *= k_sq(grid, i));
    fft.inverse(&mut uh);
    uh.iter().zip(u).zip(wp2).map(|((l, u), w)| l.re + w * u).collect()
}

/// Stability bound on `dt` for the leapfrog path.
pub fn leapfrog_dt_bound(grid: &Grid3, profile: &PlasmaProfile) -> f64 {
    let h = grid
        .dims()
        .iter()
        .zip(grid.spacing())
        .filter(|(&n, _)| n > 1)
        .map(|(_, h)| h)
        .fold(f64::INFINITY, f64::min);
    let wp_max = plasma_freq_sq_field(grid, profile).into_iter().fold(0.0, f64::max);
    let omega_max = (grid.k_max().powi(2) + wp_max).sqrt();
    (0.5 * h).min(2.0 / omega_max)
}

pub fn evolve_scalar(state: &ScalarWaveState, dt: f64, steps: usize) -> Result<ScalarWaveState> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be > 0, got {dt}")));
    }
    if state.profile.is_homogeneous() {
        Ok(evolve_exact(state, dt, steps))
    } else {
        let bound = leapfrog_dt_bound(&state.grid, &state.profile);
        if dt > bound {
            return Err(Error::UnstableTimeStep { dt, bound });
        }
        Ok(evolve_leapfrog(state, dt, steps))
    }
}

fn evolve_exact(state: &ScalarWaveState, dt: f64, steps: usize) -> ScalarWaveState {
    let grid = state.grid;
    let t = dt * steps as f64;
    let w0_sq = state.profile.omega_p0_sq();
    let fft = Fft3::new(&grid);
    let mut uh = to_complex(&state.u);
    let mut vh = to_complex(&state.udot);
    fft.forward(&mut uh);
    fft.forward(&mut vh);
    uh.par_iter_mut()
        .zip(vh.par_iter_mut())
        .enumerate()
        .for_each(|(i, (u, v))| {
            let omega = (k_sq(&grid, i) + w0_sq).sqrt();
            let (u0, v0) = (*u, *v);
            if omega == 0.0 {
                *u = u0 + v0 * t;
            } else {
                let (s, c) = (omega * t).sin_cos();
                *u = u0 * c + v0 * (s / omega);
                *v = v0 * c - u0 * (omega * s);
            }
        });
    fft.inverse(&mut uh);
    fft.inverse(&mut vh);
    ScalarWaveState {
        grid,
        u: uh.iter().map(|c| c.re).collect(),
        udot: vh.iter().map(|c| c.re).collect(),
        profile: state.profile.clone(),
        time: state.time + t,
    }
}

fn evolve_leapfrog(state: &ScalarWaveState, dt: f64, steps: usize) -> ScalarWaveState {
    let grid = state.grid;
    let wp2 = state.plasma_freq_sq_field();
    let mut u = state.u.clone();
    let mut v = state.udot.clone();
    let mut acc = apply_k(&grid, &wp2, &u);
    for _ in 0..steps {
        for (vi, ai) in v.iter_mut().zip(&acc) {
            *vi -= 0.5 * dt * ai;
        }
        for (ui, vi) in u.iter_mut().zip(&v) {
            *ui += dt * vi;
        }
        acc = apply_k(&grid, &wp2, &u);
        for (vi, ai) in v.iter_mut().zip(&acc) {
            *vi -= 0.5 * dt * ai;
        }
    }
    ScalarWaveState {
        grid,
        u,
        udot: v,
        profile: state.profile.clone(),
        time: state.time + dt * steps as f64,
    }
}

/// `samples` snapshots at cadence `dt`, starting with `initial`. Each
/// cadence interval is integrated in `substeps` equal steps.
pub fn record_history(
    initial: &ScalarWaveState,
    dt: f64,
    samples: usize,
    substeps: usize,
) -> Result<Vec<ScalarWaveState>> {
    if substeps == 0 {
        return Err(Error::InvalidArgument("substeps must be >= 1".into()));
    }
    let mut history = Vec::with_capacity(samples);
    if samples == 0 {
        return Ok(history);
    }
    history.push(initial.clone());
    for _ in 1..samples {
        let next = evolve_scalar(history.last().expect("non-empty"), dt / substeps as f64, substeps)?;
        history.push(next);
    }
    Ok(history)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionSample {
    /// Wavenumber magnitude.
    pub k: f64,
    /// Ridge frequency, `≥ 0`.
    pub omega: f64,
    /// Squared amplitude of the ridge.
    pub power: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispersionMeasurement {
    pub samples: Vec<DispersionSample>,
    /// `2π / T` for a record of total duration `T`.
    pub resolution: f64,
}

/// Relative power below which a spatial mode counts as not excited.
const EXCITATION_THRESHOLD: f64 = 1e-8;

/// Space-time Fourier analysis of a uniformly sampled history. For every
/// excited spatial mode (one per `±k` pair) the temporal spectrum is
/// windowed (4-term Blackman-Harris, low enough sidelobes that the `−ω`
/// image of a standing wave does not bias the `+ω` peak) and its peak
/// refined by golden-section search on the continuous transform.
pub fn measure_dispersion(history: &[ScalarWaveState]) -> Result<DispersionMeasurement> {
    let n = history.len();
    if n < MIN_SNAPSHOTS {
        return Err(Error::TooFewSnapshots {
            got: n,
            need: MIN_SNAPSHOTS,
        });
    }
    let grid = history[0].grid;
    if history.iter().any(|s| s.grid != grid) {
        return Err(Error::GridMismatch);
    }
    let dt = history[1].time - history[0].time;
    if dt.is_nan() || dt <= 0.0 {
        return Err(Error::InvalidArgument("snapshot times must increase".into()));
    }
    for w in history.windows(2) {
        if ((w[1].time - w[0].time) - dt).abs() > 1e-9 * dt.max(1.0) {
            return Err(Error::InvalidArgument("snapshots must have uniform cadence".into()));
        }
    }

    let fft = Fft3::new(&grid);
    let spectra: Vec<Vec<Complex64>> = history
        .par_iter()
        .map(|s| {
            let mut uh = to_complex(&s.u);
            fft.forward(&mut uh);
            uh
        })
        .collect();

    let power: Vec<f64> = (0..grid.len())
        .map(|i| spectra.iter().map(|s| s[i].norm_sqr()).sum())
        .collect();
    let max_power = power.iter().copied().fold(0.0, f64::max);
    let resolution = 2.0 * PI / (n as f64 * dt);
    if max_power == 0.0 {
        return Ok(DispersionMeasurement {
            samples: Vec::new(),
            resolution,
        });
    }

    let excited: Vec<usize> = (0..grid.len())
        .filter(|&i| power[i] >= EXCITATION_THRESHOLD * max_power && is_canonical_half(&grid.wavevector(i)))
        .collect();

    let window: Vec<f64> = (0..n).map(|j| blackman_harris(j, n)).collect();
    let wsum: f64 = window.iter().sum();

    let mut samples: Vec<DispersionSample> = excited
        .par_iter()
        .map(|&i| {
            let series: Vec<Complex64> = spectra.iter().zip(&window).map(|(s, w)| s[i] * *w).collect();
            let (omega, mag) = ridge_frequency(&series, dt);
            let kv = grid.wavevector(i);
            let k = (kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2]).sqrt();
            let norm = grid.len() as f64 * wsum;
            DispersionSample {
                k,
                omega,
                power: (mag / norm).powi(2),
            }
        })
        .collect();
    samples.sort_by(|a, b| a.k.total_cmp(&b.k));
    Ok(DispersionMeasurement { samples, resolution })
}

fn blackman_harris(j: usize, n: usize) -> f64 {
    const A: [f64; 4] = [0.35875, 0.48829, 0.14128, 0.01168];
    let x = 2.0 * PI * j as f64 / n as f64;
    A[0] - A[1] * x.cos() + A[2] * (2.0 * x).cos() - A[3] * (3.0 * x).cos()
}

/// One representative of each `±k` pair: first nonzero component positive.
fn is_canonical_half(k: &[f64; 3]) -> bool {
    k.iter().find(|c| **c != 0.0).is_none_or(|c| *c > 0.0)
}

fn dtft_magnitude(series: &[Complex64], dt: f64, omega: f64) -> f64 {
    let step = Complex64::from_polar(1.0, -omega * dt);
    let mut phasor = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, x) in series.iter().enumerate() {
        if j % 64 == 0 {
            phasor = Complex64::from_polar(1.0, -omega * dt * j as f64);
        }
        acc += x * phasor;
        phasor *= step;
    }
    acc.norm()
}

/// Peak `|ω|` of an already-windowed series and the transform magnitude
/// there.
fn ridge_frequency(series: &[Complex64], dt: f64) -> (f64, f64) {
    let n = series.len();
    let padded_len = 4 * n.next_power_of_two();
    let mut buf = vec![Complex64::new(0.0, 0.0); padded_len];
    buf[..n].copy_from_slice(series);
    let mut planner = rustfft::FftPlanner::new();
    planner.plan_fft_forward(padded_len).process(&mut buf);
    let (peak, _) = buf
        .iter()
        .enumerate()
        .map(|(b, c)| (b, c.norm()))
        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    let bin_width = 2.0 * PI / (padded_len as f64 * dt);
    let signed_bin = if peak <= padded_len / 2 {
        peak as f64
    } else {
        peak as f64 - padded_len as f64
    };
    let centre = signed_bin * bin_width;

    // Golden-section search for the maximum in [centre − w, centre + w].
    let f = |w: f64| -dtft_magnitude(series, dt, w);
    let (mut a, mut b) = (centre - bin_width, centre + bin_width);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        if (b - a).abs() < 1e-14 * centre.abs().max(bin_width) {
            break;
        }
    }
    let mut best = 0.5 * (a + b);
    let mut best_mag = dtft_magnitude(series, dt, best);
    if peak == 0 {
        let at_zero = dtft_magnitude(series, dt, 0.0);
        if at_zero >= best_mag * (1.0 - 1e-12) {
            best = 0.0;
            best_mag = at_zero;
        }
    }
    (best.abs(), best_mag)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassFit {
    pub mu_sq: f64,
    pub stderr: f64,
}

/// Least-squares intercept of `ω² = k² + μ²` with the slope fixed to one.
pub fn effective_mass_fit(samples: &[DispersionSample]) -> Result<MassFit> {
    if samples.len() < 3 {
        return Err(Error::DegenerateSamples(format!(
            "need >= 3 samples, got {}",
            samples.len()
        )));
    }
    let mut ks: Vec<f64> = samples.iter().map(|s| s.k).collect();
    ks.sort_by(f64::total_cmp);
    ks.dedup();
    if ks.len() < 3 {
        return Err(Error::DegenerateSamples(format!(
            "need >= 3 distinct k, got {}",
            ks.len()
        )));
    }
    let d: Vec<f64> = samples.iter().map(|s| s.omega * s.omega - s.k * s.k).collect();
    let n = d.len() as f64;
    let mean = d.iter().sum::<f64>() / n;
    let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(MassFit {
        mu_sq: mean,
        stderr: (var / n).sqrt(),
    })
}

/// Standing-wave run in a given plasma, measured and fitted end to end.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionSetup {
    pub points: usize,
    pub length: f64,
    pub dt: f64,
    pub samples: usize,
    /// Excited mode numbers along `z`.
    pub modes: Vec<i64>,
    pub amplitude: f64,
    /// Integration steps per sampling interval. Only the leapfrog path
    /// (structured plasma) needs more than one.
    pub substeps: usize,
}

/// Sampling interval of the default setup.
pub const DEFAULT_SAMPLE_DT: f64 = 0.1;

/// Leapfrog substeps per sample in the default setup, giving an
/// integration step of `0.001`.
pub const DEFAULT_SUBSTEPS: usize = 100;

impl Default for DispersionSetup {
    fn default() -> Self {
        Self {
            points: 256,
            length: 64.0,
            dt: DEFAULT_SAMPLE_DT,
            samples: 4096,
            modes: (0..=8).collect(),
            amplitude: 1.0,
            substeps: DEFAULT_SUBSTEPS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispersionRun {
    pub measurement: DispersionMeasurement,
    pub fit: Option<MassFit>,
    pub final_state: ScalarWaveState,
}

pub fn run_dispersion(setup: &DispersionSetup, profile: &PlasmaProfile) -> Result<DispersionRun> {
    let grid = Grid3::line(setup.points, setup.length)?;
    let initial = ScalarWaveState::standing_waves(grid, profile.clone(), &setup.modes, setup.amplitude)?;
    let substeps = if profile.is_homogeneous() { 1 } else { setup.substeps };
    let history = record_history(&initial, setup.dt, setup.samples, substeps)?;
    let measurement = measure_dispersion(&history)?;
    let fit = effective_mass_fit(&measurement.samples).ok();
    let final_state = history.into_iter().last().expect("samples >= MIN_SNAPSHOTS");
    Ok(DispersionRun {
        measurement,
        fit,
        final_state,
    })
}

/// Basis state `e^{i(ℓφ + k_z z)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub ell: i64,
    pub k_z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeCouplingMatrix {
    pub basis: Vec<Mode>,
    pub entries: DMatrix<Complex64>,
    pub profile: PlasmaProfile,
}

fn k_key(k: f64) -> i64 {
    (k * 1e9).round() as i64
}

fn same_k(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Basis reachable from `(ℓ_c, k_center)` through the profile's helical
/// shifts, `ℓ_c` the middle of `ell_range`, at most `span` shifts deep and
/// with every `ℓ` inside the range. Without perturbation terms the basis is
/// one mode per `ℓ` at `k_center`.
fn coupled_basis(profile: &PlasmaProfile, ell_range: &RangeInclusive<i64>, k_center: f64) -> Vec<Mode> {
    let (lo, hi) = (*ell_range.start(), *ell_range.end());
    let shifts: Vec<(i64, f64)> = profile
        .terms()
        .iter()
        .filter(|t| t.ell0 != 0 || t.q0 != 0.0)
        .flat_map(|t| [(t.ell0, t.q0), (-t.ell0, -t.q0)])
        .collect();
    if shifts.is_empty() {
        return (lo..=hi).map(|ell| Mode { ell, k_z: k_center }).collect();
    }
    let centre = lo + (hi - lo) / 2;
    let depth_cap = (hi - lo) as usize;
    let mut seen: HashMap<(i64, i64), Mode> = HashMap::new();
    let mut queue = VecDeque::new();
    let seed = Mode {
        ell: centre,
        k_z: k_center,
    };
    seen.insert((seed.ell, k_key(seed.k_z)), seed);
    queue.push_back((seed, 0usize));
    while let Some((m, depth)) = queue.pop_front() {
        if depth == depth_cap {
            continue;
        }
        for &(dl, dk) in &shifts {
            let next = Mode {
                ell: m.ell + dl,
                k_z: m.k_z + dk,
            };
            if next.ell < lo || next.ell > hi {
                continue;
            }
            let key = (next.ell, k_key(next.k_z));
            if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(key) {
                e.insert(next);
                queue.push_back((next, depth + 1));
            }
        }
    }
    let mut basis: Vec<Mode> = seen.into_values().collect();
    basis.sort_by(|a, b| a.ell.cmp(&b.ell).then(a.k_z.total_cmp(&b.k_z)));
    basis
}

pub fn mode_coupling_matrix(
    profile: &PlasmaProfile,
    ell_range: RangeInclusive<i64>,
    k_center: f64,
    radial_cut: usize,
) -> Result<ModeCouplingMatrix> {
    if radial_cut != 1 {
        return Err(Error::InvalidArgument(format!(
            "radial_cut must be 1, got {radial_cut}"
        )));
    }
    let (lo, hi) = (*ell_range.start(), *ell_range.end());
    if hi < lo || hi - lo < 2 {
        return Err(Error::InvalidArgument(format!(
            "ell_range too small: {lo}..={hi} (need >= 3 values)"
        )));
    }
    let centre = lo + (hi - lo) / 2;
    for t in profile.terms() {
        if centre - t.ell0.abs() < lo || centre + t.ell0.abs() > hi {
            return Err(Error::InvalidArgument(format!(
                "ell_range too small: {lo}..={hi} does not contain {centre} ± {}",
                t.ell0.abs()
            )));
        }
    }
    if !k_center.is_finite() {
        return Err(Error::InvalidArgument("k_center must be finite".into()));
    }

    let basis = coupled_basis(profile, &ell_range, k_center);
    let w0_sq = profile.omega_p0_sq();
    let n0 = profile.n0();
    let dim = basis.len();
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for (i, mi) in basis.iter().enumerate() {
        let mut diag = mi.k_z * mi.k_z + w0_sq;
        for t in profile.terms().iter().filter(|t| t.ell0 == 0 && t.q0 == 0.0) {
            diag += w0_sq * t.n_tilde / n0 * t.phase.cos();
        }
        m[(i, i)] = Complex64::new(diag, 0.0);
        for (j, mj) in basis.iter().enumerate().skip(i + 1) {
            let mut v = Complex64::new(0.0, 0.0);
            for t in profile.terms().iter().filter(|t| t.ell0 != 0 || t.q0 != 0.0) {
                let c = w0_sq * t.n_tilde / (2.0 * n0);
                let dl = mi.ell - mj.ell;
                let dk = mi.k_z - mj.k_z;
                if dl == t.ell0 && same_k(dk, t.q0) {
                    v += Complex64::from_polar(c, t.phase);
                }
                if dl == -t.ell0 && same_k(dk, -t.q0) {
                    v += Complex64::from_polar(c, -t.phase);
                }
            }
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
    }
    Ok(ModeCouplingMatrix {
        basis,
        entries: m,
        profile: profile.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveMode {
    /// Basis mode carrying the largest share of the eigenvector.
    pub dominant: Mode,
    /// That share, `|v_dominant|²`.
    pub weight: f64,
    /// Eigenvalue `ω²` of the coupled operator.
    pub eigenvalue: f64,
    /// `ω² − k_z,dominant²`.
    pub mu_sq_eff: f64,
}

impl EffectiveMode {
    pub fn is_negative(&self) -> bool {
        self.mu_sq_eff < 0.0
    }
}

/// Eigen-decomposition of the coupled operator, ascending in `ω²`.
pub fn effective_mass_spectrum(m: &ModeCouplingMatrix) -> Result<Vec<EffectiveMode>> {
    let (values, vectors) = hermitean_eigh(&m.entries)?;
    Ok(values
        .iter()
        .zip(&vectors)
        .map(|(&eigenvalue, v)| {
            let (idx, weight) = v
                .iter()
                .map(|c| c.norm_sqr())
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
            let dominant = m.basis[idx];
            EffectiveMode {
                dominant,
                weight,
                eigenvalue,
                mu_sq_eff: eigenvalue - dominant.k_z * dominant.k_z,
            }
        })
        .collect())
}

/// Shift of the eigenvalue dominated by the seed mode `(ℓ_c, k_center)`
/// when the `ell_range` is doubled about its centre.
pub fn truncation_shift(profile: &PlasmaProfile, ell_range: RangeInclusive<i64>, k_center: f64) -> Result<f64> {
    let (lo, hi) = (*ell_range.start(), *ell_range.end());
    let centre = lo + (hi - lo) / 2;
    let half = hi - lo;
    let seed_eigenvalue = |range: RangeInclusive<i64>| -> Result<f64> {
        let m = mode_coupling_matrix(profile, range, k_center, 1)?;
        effective_mass_spectrum(&m)?
            .into_iter()
            .find(|e| e.dominant.ell == centre && same_k(e.dominant.k_z, k_center))
            .map(|e| e.eigenvalue)
            .ok_or_else(|| Error::InvalidArgument("seed mode is not dominant in any eigenvector".into()))
    };
    let base = seed_eigenvalue(lo..=hi)?;
    let doubled = seed_eigenvalue((centre - half)..=(centre + half))?;
    Ok((doubled - base).abs())
}
