//! Dense complex linear algebra and the two-atom state space.
//!
//! Each atom carries five levels in the fixed order `0, 1, p, r, d`; a
//! two-atom basis state `|c t>` has flat index `5 * c + t`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub const LEVELS: usize = 5;
pub const TWO_ATOM_DIM: usize = LEVELS * LEVELS;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Single-atom level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    Zero = 0,
    One = 1,
    P = 2,
    R = 3,
    D = 4,
}

impl Level {
    pub const ALL: [Level; LEVELS] = [Level::Zero, Level::One, Level::P, Level::R, Level::D];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Level> {
        Level::ALL.get(i).copied()
    }

    pub fn label(self) -> &'static str {
        match self {
            Level::Zero => "0",
            Level::One => "1",
            Level::P => "p",
            Level::R => "r",
            Level::D => "d",
        }
    }
}

/// Which atom of the pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    Control = 0,
    Target = 1,
}

impl Atom {
    pub const BOTH: [Atom; 2] = [Atom::Control, Atom::Target];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// A two-atom basis label `|control target>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisIndex {
    pub control: Level,
    pub target: Level,
}

impl BasisIndex {
    pub const fn new(control: Level, target: Level) -> Self {
        Self { control, target }
    }

    pub fn flat(self) -> usize {
        LEVELS * self.control.index() + self.target.index()
    }

    pub fn from_flat(i: usize) -> Option<Self> {
        if i >= TWO_ATOM_DIM {
            return None;
        }
        Some(Self { control: Level::from_index(i / LEVELS)?, target: Level::from_index(i % LEVELS)? })
    }

    pub fn label(self) -> String {
        format!("{}{}", self.control.label(), self.target.label())
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}{}>", self.control.label(), self.target.label())
    }
}

/// Flat index of `|c t>`.
pub fn idx(control: Level, target: Level) -> usize {
    BasisIndex::new(control, target).flat()
}

/// The four computational inputs `|00>, |01>, |10>, |11>` in truth-table order.
pub const COMPUTATIONAL: [BasisIndex; 4] = [
    BasisIndex::new(Level::Zero, Level::Zero),
    BasisIndex::new(Level::Zero, Level::One),
    BasisIndex::new(Level::One, Level::Zero),
    BasisIndex::new(Level::One, Level::One),
];

/// Row-major dense square complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diag(&d)
    }

    /// Builds a matrix from row-major entries; `data.len()` must be a perfect square.
    pub fn from_vec(data: Vec<C64>) -> Result<Self> {
        let dim = (data.len() as f64).sqrt().round() as usize;
        if dim * dim != data.len() || dim == 0 {
            return Err(Error::Dimension(format!("{} entries do not form a square matrix", data.len())));
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::Dimension("ragged rows".into()));
            }
            data.extend(row.iter().map(|&x| C64::new(x, 0.0)));
        }
        Self::from_vec(data)
    }

    /// Outer product `|a><b|`.
    pub fn outer(a: &[C64], b: &[C64]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::Dimension("outer product of unequal lengths".into()));
        }
        let n = a.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = a[i] * b[j].conj();
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let (n, m) = (self.dim, other.dim);
        let dim = n * m;
        let mut out = ComplexMatrix::zeros(dim);
        for i in 0..n {
            for j in 0..n {
                let a = self.data[i * n + j];
                if a == ZERO {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        out.data[(i * m + k) * dim + j * m + l] = a * other.data[k * m + l];
                    }
                }
            }
        }
        out
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim);
        let n = self.dim;
        (0..n).map(|i| self.data[i * n..(i + 1) * n].iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn dagger(&self) -> ComplexMatrix {
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> ComplexMatrix {
        ComplexMatrix { dim: self.dim, data: self.data.iter().map(|&x| x * s).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn diag(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &ComplexMatrix) -> ComplexMatrix {
        &self.matmul(other) - &other.matmul(self)
    }

    /// `‖M - M†‖_F`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.data[i * n + j] - self.data[j * n + i].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Hermitian up to `tol` relative to the Frobenius norm (absolute for the zero matrix).
    pub fn is_hermitian(&self, tol: f64) -> bool {
        let scale = self.frobenius_norm().max(1.0);
        self.hermiticity_defect() <= tol * scale
    }

    /// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
    pub fn herm_eig(&self) -> Result<HermEigen> {
        if !self.is_hermitian(1e-10) {
            return Err(Error::NotHermitian(self.hermiticity_defect()));
        }
        let n = self.dim;
        let m = DMatrix::from_row_slice(n, n, &self.data);
        // Symmetrize to keep roundoff from leaking into the solver.
        let m = (&m + m.adjoint()).scale(0.5);
        let eig = m.symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let mut vectors = ComplexMatrix::zeros(n);
        for (col, &k) in order.iter().enumerate() {
            for row in 0..n {
                vectors.data[row * n + col] = eig.eigenvectors[(row, k)];
            }
        }
        Ok(HermEigen { values, vectors })
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// Eigenpairs with eigenvectors stored as columns.
#[derive(Clone, Debug)]
pub struct HermEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermEigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        let n = self.vectors.dim();
        (0..n).map(|row| self.vectors[(row, k)]).collect()
    }

    /// `V Λ V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let lambda = ComplexMatrix::from_real_diag(&self.values);
        self.vectors.matmul(&lambda).matmul(&self.vectors.dagger())
    }
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Unit vector on basis state `i` of dimension `dim`.
pub fn basis_vector(dim: usize, i: usize) -> Vec<C64> {
    let mut v = vec![ZERO; dim];
    v[i] = ONE;
    v
}

/// Single-atom `|i><j|` as a 5×5 matrix.
pub fn ket_bra(i: Level, j: Level) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(LEVELS);
    m[(i.index(), j.index())] = ONE;
    m
}

/// Two-atom density matrix over the 25-dimensional basis.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn from_matrix(m: ComplexMatrix) -> Result<Self> {
        if m.dim() != TWO_ATOM_DIM {
            return Err(Error::Dimension(format!(
                "density matrix must be {TWO_ATOM_DIM}x{TWO_ATOM_DIM}, got {}",
                m.dim()
            )));
        }
        Ok(Self(m))
    }

    /// `|psi><psi|` after normalizing `psi`.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let n = norm(psi);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidState("zero or non-finite state vector".into()));
        }
        let v: Vec<C64> = psi.iter().map(|z| z / n).collect();
        Self::from_matrix(ComplexMatrix::outer(&v, &v)?)
    }

    pub fn basis(state: BasisIndex) -> Self {
        let v = basis_vector(TWO_ATOM_DIM, state.flat());
        Self::pure(&v).expect("basis vectors are normalized")
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn population(&self, i: usize) -> f64 {
        self.0[(i, i)].re
    }

    pub fn populations(&self) -> Vec<f64> {
        self.0.diag().iter().map(|z| z.re).collect()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn purity(&self) -> f64 {
        // tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ
        self.0.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// `<v|ρ|v>`.
    pub fn expectation(&self, v: &[C64]) -> f64 {
        inner(v, &self.0.apply(v)).re
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.0.herm_eig()?.values[0])
    }

    /// Replaces ρ by (ρ + ρ†)/2.
    pub fn hermitize(&mut self) {
        hermitize_in_place(self.0.as_mut_slice(), TWO_ATOM_DIM);
    }

    /// Checks Hermiticity, unit trace and positivity at the stated tolerances.
    pub fn validate(&self) -> Result<()> {
        if !self.0.is_hermitian(1e-10) {
            return Err(Error::InvalidState(format!(
                "density matrix not Hermitian (defect {:.3e})",
                self.0.hermiticity_defect()
            )));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let lmin = self.min_eigenvalue()?;
        if lmin < -1e-8 {
            return Err(Error::InvalidState(format!("negative eigenvalue {lmin:.3e}")));
        }
        Ok(())
    }
}

pub(crate) fn hermitize_in_place(data: &mut [C64], n: usize) {
    for i in 0..n {
        data[i * n + i].im = 0.0;
        for j in (i + 1)..n {
            let avg = (data[i * n + j] + data[j * n + i].conj()) * 0.5;
            data[i * n + j] = avg;
            data[j * n + i] = avg.conj();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    #[test]
    fn kron_identity() {
        let i4 = ComplexMatrix::identity(2).kron(&ComplexMatrix::identity(2));
        assert_eq!(i4, ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_projectors() {
        let a = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        let b = ComplexMatrix::from_real_diag(&[0.0, 1.0]);
        assert_eq!(a.kron(&b), ComplexMatrix::from_real_diag(&[0.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn kron_sigma_x_flips_both() {
        // hand expansion: σx⊗σx maps e00 -> e11 (index 3 in the 2-level product basis)
        let xx = sigma_x().kron(&sigma_x());
        let out = xx.apply(&basis_vector(4, 0));
        assert_eq!(out, basis_vector(4, 3));
    }

    #[test]
    fn flat_index_bijection() {
        for i in 0..TWO_ATOM_DIM {
            let b = BasisIndex::from_flat(i).unwrap();
            assert_eq!(b.flat(), i);
        }
        assert!(BasisIndex::from_flat(25).is_none());
        assert_eq!(idx(Level::R, Level::R), 18);
        assert_eq!(idx(Level::One, Level::One), 6);
    }

    #[test]
    fn herm_eig_diagonal() {
        let m = ComplexMatrix::from_real_diag(&[3.0, 1.0, 2.0]);
        let e = m.herm_eig().unwrap();
        assert_abs_diff_eq!(e.values[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.values[1], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.values[2], 3.0, epsilon = 1e-12);
    }

    #[test]
    fn herm_eig_three_level_resonant() {
        // Ωp = Ωc = Ω, Δ0 = 0: characteristic polynomial λ(λ² - Ω²/2) = 0
        let om = 2.0;
        let h =
            ComplexMatrix::from_real_rows(&[&[0.0, om / 2.0, 0.0], &[om / 2.0, 0.0, om / 2.0], &[0.0, om / 2.0, 0.0]])
                .unwrap();
        let e = h.herm_eig().unwrap();
        let s = om / 2f64.sqrt();
        assert_abs_diff_eq!(e.values[0], -s, epsilon = 1e-12);
        assert_abs_diff_eq!(e.values[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.values[2], s, epsilon = 1e-12);
    }

    #[test]
    fn herm_eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(m.herm_eig(), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn density_matrix_checks() {
        let rho = DensityMatrix::basis(COMPUTATIONAL[3]);
        rho.validate().unwrap();
        assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-15);
        let bad = DensityMatrix::from_matrix(ComplexMatrix::identity(TWO_ATOM_DIM)).unwrap();
        assert!(bad.validate().is_err());
        assert!(DensityMatrix::from_matrix(ComplexMatrix::identity(4)).is_err());
    }
}
