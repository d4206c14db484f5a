//! Riemann-Silberstein photon field on a periodic grid.
//!
//! Sign convention (fixed here and nowhere else): a field with helicity sign
//! `σ` is built from the electromagnetic fields as `G = E + σ i B` and
//! evolves as `∂t G = −σ i ∇×G`, i.e. `i ∂t Ĝ = H Ĝ` with
//! `H = σ (i s)·k` from [`photon_hamiltonian`](crate::algebra::photon_hamiltonian).
//! Both signs describe the vacuum Maxwell equations `∂t E = ∇×B`,
//! `∂t B = −∇×E`. Positive-frequency eigenmodes of either sign carry the
//! phase `e^{−i|k|t}`.
//!
//! In mode space the evolution is `Ĝ(t) = exp(σ t [k]×) Ĝ(0)`, a real
//! rotation by `σ|k|t` about `k̂`, applied exactly (Rodrigues formula).
//! Normalization of `G` is conventional; only relative and conserved
//! quantities are meaningful.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::algebra::{Helicity, Wavevector};
use crate::error::{Error, Result};
use crate::grid::{Fft3, Grid3};

pub type CVec3 = [Complex64; 3];

const CZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: Grid3,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn from_fn(grid: Grid3, f: impl Fn([f64; 3]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.position(i))).collect();
        Self { grid, values }
    }

    pub fn constant(grid: Grid3, value: f64) -> Self {
        Self {
            grid,
            values: vec![value; grid.len()],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub grid: Grid3,
    pub values: Vec<[f64; 3]>,
}

impl VectorField {
    pub fn from_fn(grid: Grid3, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.position(i))).collect();
        Self { grid, values }
    }

    pub fn zeros(grid: Grid3) -> Self {
        Self {
            grid,
            values: vec![[0.0; 3]; grid.len()],
        }
    }
}

/// Scalar and vector potentials `(Φ, A)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialPair {
    pub phi: ScalarField,
    pub a: VectorField,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RsField {
    grid: Grid3,
    values: Vec<CVec3>,
    helicity: Helicity,
}

fn check_rs_grid(grid: &Grid3) -> Result<()> {
    if grid.dims().iter().any(|&n| n < 4) {
        return Err(Error::InvalidGrid(format!(
            "RS fields need >= 4 points per axis, got {:?}",
            grid.dims()
        )));
    }
    Ok(())
}

impl RsField {
    pub fn new(grid: Grid3, values: Vec<CVec3>, helicity: Helicity) -> Result<Self> {
        check_rs_grid(&grid)?;
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                left: values.len(),
                right: grid.len(),
            });
        }
        Ok(Self { grid, values, helicity })
    }

    pub fn from_fn(grid: Grid3, helicity: Helicity, f: impl Fn([f64; 3]) -> CVec3) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(grid.position(i))).collect();
        Self::new(grid, values, helicity)
    }

    pub fn zeros(grid: Grid3, helicity: Helicity) -> Result<Self> {
        Self::new(grid, vec![[CZERO; 3]; grid.len()], helicity)
    }

    /// `G = E + σ i B`.
    pub fn from_eb(e: &VectorField, b: &VectorField, helicity: Helicity) -> Result<Self> {
        if e.grid != b.grid {
            return Err(Error::GridMismatch);
        }
        let s = helicity.sign();
        let values = e
            .values
            .iter()
            .zip(&b.values)
            .map(|(ev, bv)| [0, 1, 2].map(|c| Complex64::new(ev[c], s * bv[c])))
            .collect();
        Self::new(e.grid, values, helicity)
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn values(&self) -> &[CVec3] {
        &self.values
    }

    pub fn helicity(&self) -> Helicity {
        self.helicity
    }

    pub fn e_field(&self) -> VectorField {
        VectorField {
            grid: self.grid,
            values: self.values.iter().map(|g| g.map(|c| c.re)).collect(),
        }
    }

    pub fn b_field(&self) -> VectorField {
        let s = self.helicity.sign();
        VectorField {
            grid: self.grid,
            values: self.values.iter().map(|g| g.map(|c| s * c.im)).collect(),
        }
    }

    /// `Σ |G|²` over grid points.
    pub fn norm_sq(&self) -> f64 {
        self.values
            .iter()
            .map(|g| g.iter().map(|c| c.norm_sqr()).sum::<f64>())
            .sum()
    }

    /// Field energy `∫ (E² + B²)/8π`.
    pub fn energy(&self) -> f64 {
        self.norm_sq() * self.grid.cell_volume() / (8.0 * PI)
    }

    /// Pointwise sum; both fields must share grid and helicity.
    pub fn add(&self, other: &RsField) -> Result<RsField> {
        if self.grid != other.grid || self.helicity != other.helicity {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| [0, 1, 2].map(|c| a[c] + b[c]))
            .collect();
        Ok(RsField {
            grid: self.grid,
            values,
            helicity: self.helicity,
        })
    }

    pub fn scale(&self, s: Complex64) -> RsField {
        RsField {
            grid: self.grid,
            values: self.values.iter().map(|g| g.map(|c| c * s)).collect(),
            helicity: self.helicity,
        }
    }

    /// Component-wise spectra `Ĝ_c(k)`, flat-indexed like the grid.
    pub fn spectrum(&self) -> Vec<CVec3> {
        let fft = Fft3::new(&self.grid);
        let mut comps: [Vec<Complex64>; 3] = [0, 1, 2].map(|c| self.values.iter().map(|g| g[c]).collect());
        for comp in comps.iter_mut() {
            fft.forward(comp);
        }
        (0..self.grid.len())
            .map(|i| [comps[0][i], comps[1][i], comps[2][i]])
            .collect()
    }

    fn from_spectrum(grid: Grid3, helicity: Helicity, spec: &[CVec3]) -> RsField {
        let fft = Fft3::new(&grid);
        let mut comps: [Vec<Complex64>; 3] = [0, 1, 2].map(|c| spec.iter().map(|g| g[c]).collect());
        for comp in comps.iter_mut() {
            fft.inverse(comp);
        }
        let values = (0..grid.len())
            .map(|i| [comps[0][i], comps[1][i], comps[2][i]])
            .collect();
        RsField { grid, values, helicity }
    }

    /// CSV dump with header `x,y,z,re_gx,im_gx,re_gy,im_gy,re_gz,im_gz`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "x,y,z,re_gx,im_gx,re_gy,im_gy,re_gz,im_gz")?;
        for (i, g) in self.values.iter().enumerate() {
            let x = self.grid.position(i);
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                x[0], x[1], x[2], g[0].re, g[0].im, g[1].re, g[1].im, g[2].re, g[2].im
            )?;
        }
        Ok(())
    }

    /// Flat little-endian `f64` records of
    /// `(x, y, z, Re Gx, Im Gx, Re Gy, Im Gy, Re Gz, Im Gz)`, no header.
    pub fn write_binary<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (i, g) in self.values.iter().enumerate() {
            let x = self.grid.position(i);
            let rec = [x[0], x[1], x[2], g[0].re, g[0].im, g[1].re, g[1].im, g[2].re, g[2].im];
            for v in rec {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }
}

fn unit(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    v.map(|c| c / n)
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Unit polarization of the positive-frequency eigenmode of
/// `H = σ (i s)·k`: `(e1 + σ i e2)/√2` with `e2 = k̂ × e1`.
pub fn helicity_polarization(k: [f64; 3], helicity: Helicity) -> CVec3 {
    let n = unit(k);
    let axis = (0..3).min_by(|&a, &b| n[a].abs().total_cmp(&n[b].abs())).unwrap();
    let mut a = [0.0; 3];
    a[axis] = 1.0;
    let dot = n[axis];
    let e1 = unit([0, 1, 2].map(|c| a[c] - dot * n[c]));
    let e2 = cross(n, e1);
    let s = helicity.sign();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    [0, 1, 2].map(|c| Complex64::new(r * e1[c], s * r * e2[c]))
}

/// Signed integer mode numbers for `k`, if it sits on the grid lattice.
pub fn grid_modes(grid: &Grid3, k: &Wavevector) -> Result<[i64; 3]> {
    let mut modes = [0i64; 3];
    for (a, mode) in modes.iter_mut().enumerate() {
        let m = k.0[a] * grid.lengths()[a] / (2.0 * PI);
        let r = m.round();
        if (m - r).abs() > 1e-9 * m.abs().max(1.0) {
            return Err(Error::NotCommensurate(format!("axis {a}: k L / 2π = {m}")));
        }
        *mode = r as i64;
    }
    if grid.mode_index(modes).is_none() {
        return Err(Error::NotCommensurate(format!(
            "mode {modes:?} is not resolved on grid {:?}",
            grid.dims()
        )));
    }
    Ok(modes)
}

/// Circularly polarized transverse plane wave `amp · ε · e^{ik·x}`, the
/// positive-frequency helicity eigenmode for `k`.
pub fn plane_wave(k: &Wavevector, amplitude: Complex64, helicity: Helicity, grid: &Grid3) -> Result<RsField> {
    check_rs_grid(grid)?;
    let modes = grid_modes(grid, k)?;
    if modes == [0, 0, 0] {
        return Err(Error::ZeroMode);
    }
    let kk = [0, 1, 2].map(|a| 2.0 * PI * modes[a] as f64 / grid.lengths()[a]);
    let pol = helicity_polarization(kk, helicity);
    RsField::from_fn(*grid, helicity, |x| {
        let phase = Complex64::from_polar(1.0, kk[0] * x[0] + kk[1] * x[1] + kk[2] * x[2]) * amplitude;
        pol.map(|p| p * phase)
    })
}

/// Relative longitudinal content `√(Σ|k̂·Ĝ|² / Σ|Ĝ|²)`; zero means exactly
/// transverse. The `k = 0` bin carries no direction and counts as
/// transverse.
pub fn divergence_defect(f: &RsField) -> f64 {
    let spec = f.spectrum();
    let mut longitudinal = 0.0;
    let mut total = 0.0;
    for (i, g) in spec.iter().enumerate() {
        total += g.iter().map(|c| c.norm_sqr()).sum::<f64>();
        let k = f.grid.wavevector(i);
        let kn = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
        if kn > 0.0 {
            let proj = (g[0] * k[0] + g[1] * k[1] + g[2] * k[2]) / kn;
            longitudinal += proj.norm_sqr();
        }
    }
    if total == 0.0 {
        0.0
    } else {
        (longitudinal / total).sqrt()
    }
}

/// Rotation `exp(σ t [k]×)` as a real 3x3 matrix.
pub fn mode_propagator(k: [f64; 3], helicity: Helicity, t: f64) -> [[f64; 3]; 3] {
    let kn = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
    let mut r = [[0.0; 3]; 3];
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    if kn == 0.0 {
        return r;
    }
    let n = k.map(|c| c / kn);
    let theta = helicity.sign() * kn * t;
    let (s, c) = theta.sin_cos();
    // N = [n]×, N² = n nᵀ − I
    let nx = [[0.0, -n[2], n[1]], [n[2], 0.0, -n[0]], [-n[1], n[0], 0.0]];
    for i in 0..3 {
        for j in 0..3 {
            let n2 = n[i] * n[j] - if i == j { 1.0 } else { 0.0 };
            r[i][j] += s * nx[i][j] + (1.0 - c) * n2;
        }
    }
    r
}

/// Advance `steps` steps of size `dt` with the exact per-mode propagator.
pub fn evolve(f: &RsField, dt: f64, steps: usize) -> Result<RsField> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be > 0, got {dt}")));
    }
    if steps == 0 {
        return Ok(f.clone());
    }
    let grid = f.grid;
    let helicity = f.helicity;
    let mut spec = f.spectrum();
    spec.par_iter_mut().enumerate().for_each(|(i, g)| {
        let r = mode_propagator(grid.wavevector(i), helicity, dt);
        for _ in 0..steps {
            let v = *g;
            for (row, out) in r.iter().zip(g.iter_mut()) {
                *out = v[0] * row[0] + v[1] * row[1] + v[2] * row[2];
            }
        }
    });
    Ok(RsField::from_spectrum(grid, helicity, &spec))
}

/// Proca energy density `(E² + B² + μ²Φ² + μ²A²) / 8π`.
pub fn proca_energy_density(e: &VectorField, b: &VectorField, pot: &PotentialPair, mu: f64) -> Result<ScalarField> {
    let grid = e.grid;
    if b.grid != grid || pot.phi.grid != grid || pot.a.grid != grid {
        return Err(Error::GridMismatch);
    }
    if !(mu.is_finite() && mu >= 0.0) {
        return Err(Error::InvalidArgument(format!("mass must be >= 0, got {mu}")));
    }
    let sq = |v: &[f64; 3]| v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    let mu2 = mu * mu;
    let values = (0..grid.len())
        .map(|i| {
            let phi = pot.phi.values[i];
            (sq(&e.values[i]) + sq(&b.values[i]) + mu2 * phi * phi + mu2 * sq(&pot.a.values[i])) / (8.0 * PI)
        })
        .collect();
    Ok(ScalarField { grid, values })
}
