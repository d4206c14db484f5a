//! Uniform periodic Cartesian grids and the FFT plumbing shared by the
//! spectral modules.
//!
//! Storage is row-major with `z` fastest: `index = (ix * ny + iy) * nz + iz`.
//! Fourier index `m` along an axis of `n` points maps to the signed mode
//! number `m` for `m <= (n - 1) / 2` and `m - n` otherwise, so an even-size
//! Nyquist bin carries `-n/2`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid3 {
    dims: [usize; 3],
    lengths: [f64; 3],
}

impl Grid3 {
    pub fn new(dims: [usize; 3], lengths: [f64; 3]) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::InvalidGrid(format!("zero-sized axis in {dims:?}")));
        }
        if lengths.iter().any(|&l| !(l.is_finite() && l > 0.0)) {
            return Err(Error::InvalidGrid(format!(
                "box lengths must be positive, got {lengths:?}"
            )));
        }
        Ok(Self { dims, lengths })
    }

    /// A one-dimensional grid along `z`.
    pub fn line(nz: usize, lz: f64) -> Result<Self> {
        Self::new([1, 1, nz], [1.0, 1.0, lz])
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn lengths(&self) -> [f64; 3] {
        self.lengths
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self) -> [f64; 3] {
        [0, 1, 2].map(|a| self.lengths[a] / self.dims[a] as f64)
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().iter().product()
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        (ix * self.dims[1] + iy) * self.dims[2] + iz
    }

    #[inline]
    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let nz = self.dims[2];
        let ny = self.dims[1];
        [idx / (ny * nz), (idx / nz) % ny, idx % nz]
    }

    pub fn position(&self, idx: usize) -> [f64; 3] {
        let i = self.unravel(idx);
        let h = self.spacing();
        [0, 1, 2].map(|a| i[a] as f64 * h[a])
    }

    pub fn signed_mode(&self, axis: usize, m: usize) -> i64 {
        let n = self.dims[axis];
        if m <= (n - 1) / 2 {
            m as i64
        } else {
            m as i64 - n as i64
        }
    }

    /// Angular wavenumber of Fourier index `m` along `axis`.
    pub fn wavenumber(&self, axis: usize, m: usize) -> f64 {
        2.0 * PI * self.signed_mode(axis, m) as f64 / self.lengths[axis]
    }

    /// Wavevector of the Fourier bin stored at flat index `idx`.
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let m = self.unravel(idx);
        [0, 1, 2].map(|a| self.wavenumber(a, m[a]))
    }

    /// Flat Fourier index for signed mode numbers, if representable.
    pub fn mode_index(&self, modes: [i64; 3]) -> Option<usize> {
        let mut m = [0usize; 3];
        for a in 0..3 {
            let n = self.dims[a] as i64;
            let lo = -(n / 2);
            let hi = (n - 1) / 2;
            if modes[a] < lo || modes[a] > hi {
                return None;
            }
            m[a] = modes[a].rem_euclid(n) as usize;
        }
        Some(self.index(m[0], m[1], m[2]))
    }

    /// Largest wavenumber magnitude resolved on the grid.
    pub fn k_max(&self) -> f64 {
        [0, 1, 2]
            .iter()
            .map(|&a| {
                if self.dims[a] == 1 {
                    0.0
                } else {
                    PI * self.dims[a] as f64 / self.lengths[a]
                }
            })
            .map(|k| k * k)
            .sum::<f64>()
            .sqrt()
    }
}

/// Reusable 3D FFT over a [`Grid3`]. Forward is unnormalized, inverse
/// divides by the number of points.
pub struct Fft3 {
    dims: [usize; 3],
    forward: [std::sync::Arc<dyn rustfft::Fft<f64>>; 3],
    inverse: [std::sync::Arc<dyn rustfft::Fft<f64>>; 3],
}

impl Fft3 {
    pub fn new(grid: &Grid3) -> Self {
        let mut planner = FftPlanner::new();
        let dims = grid.dims();
        let forward = dims.map(|n| planner.plan_fft_forward(n));
        let inverse = dims.map(|n| planner.plan_fft_inverse(n));
        Self { dims, forward, inverse }
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.forward);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inverse);
        let scale = 1.0 / data.len() as f64;
        data.iter_mut().for_each(|v| *v *= scale);
    }

    fn transform(&self, data: &mut [Complex64], plans: &[std::sync::Arc<dyn rustfft::Fft<f64>>; 3]) {
        let [nx, ny, nz] = self.dims;
        assert_eq!(data.len(), nx * ny * nz);

        if nz > 1 {
            plans[2].process(data);
        }
        if ny > 1 {
            let mut line = vec![Complex64::new(0.0, 0.0); ny];
            for ix in 0..nx {
                for iz in 0..nz {
                    for (iy, v) in line.iter_mut().enumerate() {
                        *v = data[(ix * ny + iy) * nz + iz];
                    }
                    plans[1].process(&mut line);
                    for (iy, v) in line.iter().enumerate() {
                        data[(ix * ny + iy) * nz + iz] = *v;
                    }
                }
            }
        }
        if nx > 1 {
            let mut line = vec![Complex64::new(0.0, 0.0); nx];
            for iy in 0..ny {
                for iz in 0..nz {
                    for (ix, v) in line.iter_mut().enumerate() {
                        *v = data[(ix * ny + iy) * nz + iz];
                    }
                    plans[0].process(&mut line);
                    for (ix, v) in line.iter().enumerate() {
                        data[(ix * ny + iy) * nz + iz] = *v;
                    }
                }
            }
        }
    }
}
