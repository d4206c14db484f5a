//! Dense Hermitean helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest entry of `|M - M†|`.
pub fn hermitean_defect(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of a Hermitean matrix in ascending order.
pub fn hermitean_eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    Ok(hermitean_eigh(m)?.0)
}

/// Eigen-decomposition of a Hermitean matrix, sorted by ascending eigenvalue.
/// Eigenvectors are returned as columns aligned with the eigenvalues.
pub fn hermitean_eigh(m: &DMatrix<Complex64>) -> Result<(Vec<f64>, Vec<DVector<Complex64>>)> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            left: m.nrows(),
            right: m.ncols(),
        });
    }
    let scale = m.iter().map(|v| v.norm()).fold(1.0f64, f64::max);
    let defect = hermitean_defect(m);
    if defect > 1e-12 * scale {
        return Err(Error::NotHermitean(defect));
    }
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_y_spectrum() {
        let i = Complex64::i();
        let z = Complex64::new(0.0, 0.0);
        let m = DMatrix::from_row_slice(2, 2, &[z, -i, i, z]);
        let ev = hermitean_eigenvalues(&m).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitean() {
        let one = Complex64::new(1.0, 0.0);
        let z = Complex64::new(0.0, 0.0);
        let m = DMatrix::from_row_slice(2, 2, &[z, one, -one, z]);
        assert!(matches!(hermitean_eigenvalues(&m), Err(Error::NotHermitean(_))));
    }
}
