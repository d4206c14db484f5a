//! Independent reference implementations used as test oracles.

#![allow(dead_code, clippy::needless_range_loop)]

use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;

/// Eigenvalues of a complex Hermitean matrix by cyclic Jacobi rotations on
/// the real symmetric embedding `[[Re, −Im], [Im, Re]]`. Every eigenvalue of
/// the embedding appears twice; one copy of each is returned, ascending.
pub fn jacobi_hermitean_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let n = m.nrows();
    let size = 2 * n;
    let mut a = vec![vec![0.0f64; size]; size];
    for i in 0..n {
        for j in 0..n {
            let c = m[(i, j)];
            a[i][j] = c.re;
            a[i + n][j + n] = c.re;
            a[i][j + n] = -c.im;
            a[i + n][j] = c.im;
        }
    }
    for _sweep in 0..100 {
        let off: f64 = (0..size)
            .flat_map(|i| (0..size).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..size {
            for q in (p + 1)..size {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..size {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..size {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut diag: Vec<f64> = (0..size).map(|i| a[i][i]).collect();
    diag.sort_by(f64::total_cmp);
    diag.into_iter().step_by(2).collect()
}

/// `exp(m)` by scaling and squaring a truncated Taylor series.
pub fn expm3(m: &Matrix3<Complex64>) -> Matrix3<Complex64> {
    let norm = m.iter().map(|c| c.norm()).sum::<f64>();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = m / Complex64::new(2f64.powi(squarings as i32), 0.0);
    let mut term = Matrix3::<Complex64>::identity();
    let mut sum = Matrix3::<Complex64>::identity();
    for k in 1..=30 {
        term = term * scaled / Complex64::new(k as f64, 0.0);
        sum += term;
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

pub fn assert_close(actual: f64, expected: f64, tol: f64, what: &str) {
    assert!(
        (actual - expected).abs() <= tol,
        "{what}: got {actual:.17e}, expected {expected:.17e}, tolerance {tol:e}"
    );
}

pub fn assert_rel(actual: f64, expected: f64, rel: f64, what: &str) {
    assert!(
        (actual - expected).abs() <= rel * expected.abs(),
        "{what}: got {actual:.17e}, expected {expected:.17e}, relative tolerance {rel:e}"
    );
}
