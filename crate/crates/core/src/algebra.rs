//! Infinitesimal Lorentz generators in the 4-vector representation and the
//! algebra built on them.
//!
//! Generator arithmetic is exact: every entry is a Gaussian integer
//! (`a + ib` with integer `a`, `b`), which is closed under the products and
//! sums a commutator needs. Floating point only enters for eigensolves.
//!
//! Row/column order of the 4x4 matrices is `(t, x, y, z)`.

use std::fmt;

use nalgebra::{DMatrix, Matrix3, Matrix4, Vector4};
use num_complex::{Complex, Complex64};

use crate::error::{Error, Result};

pub type Gaussian = Complex<i64>;

const ZERO: Gaussian = Complex { re: 0, im: 0 };
const I: Gaussian = Complex { re: 0, im: 1 };
const MINUS_I: Gaussian = Complex { re: 0, im: -1 };

/// Square matrix over the Gaussian integers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    n: usize,
    data: Vec<Gaussian>,
}

impl ExactMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![ZERO; n * n],
        }
    }

    /// Real integer matrix from row-major entries.
    pub fn from_integers(n: usize, rows: &[i64]) -> Self {
        assert_eq!(rows.len(), n * n, "expected {} entries", n * n);
        Self {
            n,
            data: rows.iter().map(|&v| Complex::new(v, 0)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> Gaussian {
        self.data[row * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Gaussian) {
        self.data[row * self.n + col] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| *v == ZERO)
    }

    pub fn scale(&self, c: Gaussian) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.n);
        for r in 0..self.n {
            for c in 0..self.n {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let t = self.transpose();
        Self {
            n: self.n,
            data: t.data.iter().map(|v| v.conj()).collect(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.transpose()
    }

    pub fn is_antisymmetric(&self) -> bool {
        *self == self.transpose().scale(Complex::new(-1, 0))
    }

    pub fn is_hermitean(&self) -> bool {
        *self == self.adjoint()
    }

    pub fn is_antihermitean(&self) -> bool {
        *self == self.adjoint().scale(Complex::new(-1, 0))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let n = self.n;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for c in 0..n {
                let mut acc = ZERO;
                for k in 0..n {
                    acc += self.get(r, k) * other.get(k, c);
                }
                out.set(r, c, acc);
            }
        }
        Ok(out)
    }

    /// Largest entry modulus.
    pub fn max_modulus(&self) -> f64 {
        let sq = self.data.iter().map(|v| v.norm_sqr()).max().unwrap_or(0);
        (sq as f64).sqrt()
    }

    /// Leading `size x size` block starting at `offset` on the diagonal.
    pub fn block(&self, offset: usize, size: usize) -> Self {
        assert!(offset + size <= self.n);
        let mut out = Self::zeros(size);
        for r in 0..size {
            for c in 0..size {
                out.set(r, c, self.get(offset + r, offset + c));
            }
        }
        out
    }

    pub fn to_dmatrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.n, self.n, |r, c| {
            let v = self.get(r, c);
            Complex64::new(v.re as f64, v.im as f64)
        })
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExactMatrix({}x{})", self.n, self.n)?;
        for r in 0..self.n {
            let row: Vec<String> = (0..self.n)
                .map(|c| {
                    let v = self.get(r, c);
                    match (v.re, v.im) {
                        (re, 0) => format!("{re}"),
                        (0, im) => format!("{im}i"),
                        (re, im) => format!("{re}{im:+}i"),
                    }
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// `AB - BA`.
pub fn commutator(a: &ExactMatrix, b: &ExactMatrix) -> Result<ExactMatrix> {
    a.checked_mul(b)?.checked_sub(&b.checked_mul(a)?)
}

/// The six Lorentz generators together with the operators derived from them.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSet {
    /// Rotations `S_x, S_y, S_z` (real antisymmetric).
    pub rotations: [ExactMatrix; 3],
    /// Boosts `T_x, T_y, T_z` (real symmetric).
    pub boosts: [ExactMatrix; 3],
    /// `a_j = i S_j`.
    pub a: [ExactMatrix; 3],
    /// `b_j = -i T_j`.
    pub b: [ExactMatrix; 3],
    /// Spatial 3x3 blocks `s_j` of the rotations.
    pub spin: [ExactMatrix; 3],
    /// `i s_j`, the Hermitean spin-1 matrices.
    pub spin_herm: [ExactMatrix; 3],
}

impl GeneratorSet {
    /// Derive `a`, `b`, `s` and `i s` from arbitrary rotation and boost
    /// matrices. Used for fault injection as well as the canonical set.
    pub fn from_matrices(rotations: [ExactMatrix; 3], boosts: [ExactMatrix; 3]) -> Self {
        let a = rotations.clone().map(|m| m.scale(I));
        let b = boosts.clone().map(|m| m.scale(MINUS_I));
        let spin = rotations.clone().map(|m| m.block(1, 3));
        let spin_herm = spin.clone().map(|m| m.scale(I));
        Self {
            rotations,
            boosts,
            a,
            b,
            spin,
            spin_herm,
        }
    }
}

#[rustfmt::skip]
pub fn build_generators() -> GeneratorSet {
    let sx = ExactMatrix::from_integers(4, &[
        0, 0, 0,  0,
        0, 0, 0,  0,
        0, 0, 0, -1,
        0, 0, 1,  0,
    ]);
    let sy = ExactMatrix::from_integers(4, &[
        0,  0, 0, 0,
        0,  0, 0, 1,
        0,  0, 0, 0,
        0, -1, 0, 0,
    ]);
    let sz = ExactMatrix::from_integers(4, &[
        0, 0,  0, 0,
        0, 0, -1, 0,
        0, 1,  0, 0,
        0, 0,  0, 0,
    ]);
    let tx = ExactMatrix::from_integers(4, &[
        0, 1, 0, 0,
        1, 0, 0, 0,
        0, 0, 0, 0,
        0, 0, 0, 0,
    ]);
    let ty = ExactMatrix::from_integers(4, &[
        0, 0, 1, 0,
        0, 0, 0, 0,
        1, 0, 0, 0,
        0, 0, 0, 0,
    ]);
    let tz = ExactMatrix::from_integers(4, &[
        0, 0, 0, 1,
        0, 0, 0, 0,
        0, 0, 0, 0,
        1, 0, 0, 0,
    ]);
    GeneratorSet::from_matrices([sx, sy, sz], [tx, ty, tz])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    A,
    B,
}

#[derive(Debug, Clone, Copy)]
struct Relation {
    left: (Family, usize),
    right: (Family, usize),
    coeff: Gaussian,
    result: Option<(Family, usize)>,
}

impl Relation {
    fn cycled(self, shift: usize) -> Self {
        let rot = |(f, j): (Family, usize)| (f, (j + shift) % 3);
        Self {
            left: rot(self.left),
            right: rot(self.right),
            coeff: self.coeff,
            result: self.result.map(rot),
        }
    }

    fn name(&self) -> String {
        let sym = |(f, j): (Family, usize)| {
            let axis = ["x", "y", "z"][j];
            match f {
                Family::A => format!("a_{axis}"),
                Family::B => format!("b_{axis}"),
            }
        };
        let rhs = match self.result {
            None => "0".to_string(),
            Some(op) => {
                let c = match (self.coeff.re, self.coeff.im) {
                    (0, 1) => "i ".to_string(),
                    (0, -1) => "-i ".to_string(),
                    (1, 0) => String::new(),
                    (-1, 0) => "-".to_string(),
                    (re, im) => format!("({re}{im:+}i) "),
                };
                format!("{c}{}", sym(op))
            }
        };
        format!("[{},{}]={}", sym(self.left), sym(self.right), rhs)
    }
}

/// The commutation rules exactly as tabulated for `a_j = i S_j`,
/// `b_j = -i T_j`. The cyclic images are generated from these.
const PRINTED_RELATIONS: [Relation; 5] = [
    Relation {
        left: (Family::A, 0),
        right: (Family::A, 1),
        coeff: I,
        result: Some((Family::A, 2)),
    },
    Relation {
        left: (Family::B, 0),
        right: (Family::B, 1),
        coeff: MINUS_I,
        result: Some((Family::A, 2)),
    },
    Relation {
        left: (Family::A, 0),
        right: (Family::B, 0),
        coeff: ZERO,
        result: None,
    },
    Relation {
        left: (Family::A, 0),
        right: (Family::B, 1),
        coeff: I,
        result: Some((Family::B, 2)),
    },
    Relation {
        left: (Family::A, 0),
        right: (Family::B, 2),
        coeff: I,
        result: Some((Family::B, 1)),
    },
];

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: String,
    pub pass: bool,
    /// Largest entry modulus of `[L, R] - rhs`; exactly zero when the
    /// identity holds.
    pub max_defect: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraReport {
    pub checks: Vec<IdentityCheck>,
}

impl AlgebraReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Check every tabulated commutation rule and its cyclic images
/// `x -> y -> z -> x`. Failures are reported, never raised.
pub fn verify_algebra(g: &GeneratorSet) -> AlgebraReport {
    let op = |(f, j): (Family, usize)| match f {
        Family::A => &g.a[j],
        Family::B => &g.b[j],
    };
    let mut checks = Vec::new();
    for base in PRINTED_RELATIONS {
        for rel in (0..3).map(|shift| base.cycled(shift)) {
            let lhs = commutator(op(rel.left), op(rel.right)).expect("generators are all 4x4");
            let rhs = match rel.result {
                Some(o) => op(o).scale(rel.coeff),
                None => ExactMatrix::zeros(lhs.dim()),
            };
            let defect = lhs.checked_sub(&rhs).expect("same dimension");
            checks.push(IdentityCheck {
                name: rel.name(),
                pass: defect.is_zero(),
                max_defect: defect.max_modulus(),
            });
        }
    }
    AlgebraReport { checks }
}

/// Photon helicity sign, the `±` of `H = ±s·p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Helicity {
    Positive,
    Negative,
}

impl Helicity {
    pub fn sign(self) -> f64 {
        match self {
            Helicity::Positive => 1.0,
            Helicity::Negative => -1.0,
        }
    }

    pub fn from_sign(sign: i32) -> Result<Self> {
        match sign {
            1 => Ok(Helicity::Positive),
            -1 => Ok(Helicity::Negative),
            s => Err(Error::InvalidArgument(format!(
                "helicity sign must be +1 or -1, got {s}"
            ))),
        }
    }
}

/// Momentum-space vector in natural units (inverse length).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavevector(pub [f64; 3]);

impl Wavevector {
    pub fn new(p: [f64; 3]) -> Result<Self> {
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite wavevector {p:?}")));
        }
        Ok(Self(p))
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// `H = ±(i s)·p`, using the Hermitean spin matrices so the spectrum is real.
pub fn photon_hamiltonian(p: &Wavevector, helicity: Helicity) -> Matrix3<Complex64> {
    let g = build_generators();
    let mut h = Matrix3::<Complex64>::zeros();
    for (j, s) in g.spin_herm.iter().enumerate() {
        let sj = s.to_dmatrix();
        for r in 0..3 {
            for c in 0..3 {
                h[(r, c)] += sj[(r, c)] * p.0[j];
            }
        }
    }
    h * Complex64::new(helicity.sign(), 0.0)
}

/// Eigenvalues of [`photon_hamiltonian`] in ascending order.
pub fn hamiltonian_spectrum(p: &Wavevector, helicity: Helicity) -> [f64; 3] {
    let mut ev: Vec<f64> = photon_hamiltonian(p, helicity)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    [ev[0], ev[1], ev[2]]
}

/// Dirac matrices in the standard (Dirac-Pauli) representation:
/// `α_j = [[0, σ_j], [σ_j, 0]]`, `β = diag(1, 1, -1, -1)`.
pub fn dirac_matrices() -> ([Matrix4<Complex64>; 3], Matrix4<Complex64>) {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    let i = Complex64::i();
    let pauli = [[[z, o], [o, z]], [[z, -i], [i, z]], [[o, z], [z, -o]]];
    let alpha = pauli.map(|s| {
        let mut m = Matrix4::zeros();
        for r in 0..2 {
            for c in 0..2 {
                m[(r, c + 2)] = s[r][c];
                m[(r + 2, c)] = s[r][c];
            }
        }
        m
    });
    let beta = Matrix4::from_diagonal(&Vector4::new(o, o, -o, -o));
    (alpha, beta)
}

/// Plane-wave solution of the massive Dirac equation at fixed momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracPlaneWaveCheck {
    /// Positive-energy root `W`.
    pub energy: f64,
    /// Negative-energy root.
    pub energy_negative: f64,
    pub p: Wavevector,
    pub mu: f64,
    /// Largest `‖(α·p + βμ − W)ψ‖` over the four eigenpairs.
    pub residual: f64,
    /// `W² − |p|² − μ²` for the positive root.
    pub mass_shell_defect: f64,
    /// Full spectrum of `α·p + βμ`, ascending.
    pub spectrum: [f64; 4],
}

pub fn dirac_mass_shell(p: &Wavevector, mu: f64) -> Result<DiracPlaneWaveCheck> {
    if !(mu.is_finite() && mu >= 0.0) {
        return Err(Error::InvalidArgument(format!("mass must be >= 0, got {mu}")));
    }
    let (alpha, beta) = dirac_matrices();
    let mut h = beta * Complex64::new(mu, 0.0);
    for (a, pj) in alpha.iter().zip(p.0) {
        h += a * Complex64::new(pj, 0.0);
    }
    let eig = h.symmetric_eigen();
    let mut residual = 0.0f64;
    for k in 0..4 {
        let v = eig.eigenvectors.column(k);
        let r = h * v - v * Complex64::new(eig.eigenvalues[k], 0.0);
        residual = residual.max(r.norm());
    }
    let mut spectrum = [0.0; 4];
    spectrum.copy_from_slice(eig.eigenvalues.as_slice());
    spectrum.sort_by(f64::total_cmp);
    let energy = spectrum[3];
    let p2 = p.norm().powi(2);
    Ok(DiracPlaneWaveCheck {
        energy,
        energy_negative: spectrum[0],
        p: *p,
        mu,
        residual,
        mass_shell_defect: energy * energy - p2 - mu * mu,
        spectrum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: i64, im: i64) -> Gaussian {
        Complex::new(re, im)
    }

    #[test]
    fn rotation_and_boost_entries() {
        let g = build_generators();
        let sz = &g.rotations[2];
        assert_eq!(sz.get(1, 2), c(-1, 0));
        assert_eq!(sz.get(2, 1), c(1, 0));
        let tx = &g.boosts[0];
        for r in 0..4 {
            for col in 0..4 {
                let expected = if (r, col) == (0, 1) || (r, col) == (1, 0) { 1 } else { 0 };
                assert_eq!(tx.get(r, col), c(expected, 0), "T_x[{r}][{col}]");
            }
        }
    }

    #[test]
    fn symmetry_classes() {
        let g = build_generators();
        for j in 0..3 {
            assert!(g.rotations[j].is_antisymmetric());
            assert!(g.boosts[j].is_symmetric());
            assert!(g.a[j].is_hermitean());
            assert!(g.spin_herm[j].is_hermitean());
            // -i times a real symmetric matrix is anti-Hermitean.
            assert!(g.b[j].is_antihermitean());
            assert!(!g.b[j].is_hermitean());
        }
    }

    #[test]
    fn a_z_spectrum() {
        let g = build_generators();
        let mut ev = crate::linalg::hermitean_eigenvalues(&g.a[2].to_dmatrix()).unwrap();
        ev.sort_by(f64::total_cmp);
        let expected = [-1.0, 0.0, 0.0, 1.0];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn commutator_examples() {
        let g = build_generators();
        assert_eq!(commutator(&g.a[0], &g.a[1]).unwrap(), g.a[2].scale(I));
        assert_eq!(commutator(&g.b[0], &g.b[1]).unwrap(), g.a[2].scale(MINUS_I));
        assert!(commutator(&g.a[0], &g.b[0]).unwrap().is_zero());
    }

    #[test]
    fn commutator_dimension_mismatch() {
        let a = ExactMatrix::zeros(3);
        let b = ExactMatrix::zeros(4);
        assert_eq!(commutator(&a, &b), Err(Error::DimensionMismatch { left: 3, right: 4 }));
    }

    #[test]
    fn report_lists_fifteen_identities() {
        let report = verify_algebra(&build_generators());
        assert_eq!(report.checks.len(), 15);
        assert!(report.get("[a_x,a_y]=i a_z").unwrap().pass);
        assert!(report.get("[a_y,a_z]=i a_x").unwrap().pass);
        assert!(report.get("[b_z,b_x]=-i a_y").unwrap().pass);
        assert!(report.get("[a_x,b_y]=i b_z").unwrap().pass);
        assert!(report.get("[a_z,b_z]=0").unwrap().pass);
    }

    #[test]
    fn printed_a_x_b_z_rule_has_opposite_sign() {
        // With the generators as given, [a_x, b_z] = -i b_y; the tabulated
        // "+i b_y" fails by exactly 2 in the (0,2) and (2,0) entries.
        let g = build_generators();
        let lhs = commutator(&g.a[0], &g.b[2]).unwrap();
        assert_eq!(lhs, g.b[1].scale(MINUS_I));
        let report = verify_algebra(&g);
        let check = report.get("[a_x,b_z]=i b_y").unwrap();
        assert!(!check.pass);
        assert_eq!(check.max_defect, 2.0);
    }

    #[test]
    fn flipped_s_z_breaks_a_x_a_y() {
        let mut g = build_generators();
        let mut rot = g.rotations.clone();
        rot[2].set(1, 2, c(1, 0));
        g = GeneratorSet::from_matrices(rot, g.boosts.clone());
        let report = verify_algebra(&g);
        assert!(!report.get("[a_x,a_y]=i a_z").unwrap().pass);
    }

    #[test]
    fn hamiltonian_examples() {
        let zero = hamiltonian_spectrum(&Wavevector([0.0; 3]), Helicity::Positive);
        assert!(zero.iter().all(|v| v.abs() < 1e-15));
        assert!(photon_hamiltonian(&Wavevector([0.0; 3]), Helicity::Positive)
            .iter()
            .all(|v| v.norm() == 0.0));

        let ev = hamiltonian_spectrum(&Wavevector([0.0, 0.0, 2.0]), Helicity::Positive);
        for (a, b) in ev.iter().zip([-2.0, 0.0, 2.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        let ev = hamiltonian_spectrum(&Wavevector([1.0, 1.0, 1.0]), Helicity::Negative);
        let r3 = 3f64.sqrt();
        for (a, b) in ev.iter().zip([-r3, 0.0, r3]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn hamiltonian_is_hermitean() {
        let h = photon_hamiltonian(&Wavevector([0.3, -1.2, 2.5]), Helicity::Negative);
        assert!((h - h.adjoint()).iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn dirac_representation_is_valid() {
        let (alpha, beta) = dirac_matrices();
        let id = Matrix4::<Complex64>::identity();
        for a in &alpha {
            assert_eq!(a * a, id);
            assert_eq!(a * beta + beta * a, Matrix4::zeros());
            assert_eq!(*a, a.adjoint());
        }
        for i in 0..3 {
            for j in (i + 1)..3 {
                assert_eq!(alpha[i] * alpha[j] + alpha[j] * alpha[i], Matrix4::zeros());
            }
        }
        assert_eq!(beta * beta, id);
    }

    #[test]
    fn dirac_examples() {
        let rest = dirac_mass_shell(&Wavevector([0.0; 3]), 1.0).unwrap();
        assert!((rest.energy - 1.0).abs() < 1e-14 && (rest.energy_negative + 1.0).abs() < 1e-14);
        assert!(rest.residual < 1e-12);

        let massless = dirac_mass_shell(&Wavevector([0.0, 0.0, 1.0]), 0.0).unwrap();
        assert!((massless.energy - 1.0).abs() < 1e-14 && (massless.energy_negative + 1.0).abs() < 1e-14);

        let w = dirac_mass_shell(&Wavevector([3.0, 0.0, 0.0]), 4.0).unwrap();
        assert!((w.energy - 5.0).abs() < 1e-12 && (w.energy_negative + 5.0).abs() < 1e-12);
        assert!(w.mass_shell_defect.abs() < 1e-12);
        assert!(w.residual < 1e-12);
    }

    #[test]
    fn dirac_rejects_negative_mass() {
        assert!(dirac_mass_shell(&Wavevector([0.0; 3]), -1.0).is_err());
    }
}
