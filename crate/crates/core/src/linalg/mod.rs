//! Small dense complex matrices (2×2 operators, 4×4 superoperators).
//!
//! Storage is a fixed inline array so matrices are `Copy` and never touch the
//! heap; the logical dimension is carried alongside and must be 2 or 4.

mod density;
mod eigen;
mod expm;

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

pub use num_complex::Complex64 as C64;

pub use density::{bloch_vector, DensityMatrix};
pub use eigen::{hermitian_eig, trace_norm_hermitian, EigenSystem, DEGENERACY_GAP};
pub use expm::{expm, unitary_2x2};

use crate::error::{Error, Result};

/// Entry-wise tolerance used when a caller must supply a Hermitian matrix.
pub const HERMITIAN_TOL: f64 = 1e-10;

const MAX_DIM: usize = 4;

/// A two-component ket.
pub type Ket = [C64; 2];

#[derive(Clone, Copy, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: [C64; MAX_DIM * MAX_DIM],
}

#[inline]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 4 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "matrix dimension must be 2 or 4, got {dim}"
        )))
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            data: [C64::new(0.0, 0.0); MAX_DIM * MAX_DIM],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m[(i, i)] = c(1.0, 0.0);
        }
        Ok(m)
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        Ok(m)
    }

    /// Builds a matrix from row-major entries; `entries.len()` must be 4 or 16.
    pub fn from_row_major(entries: &[C64]) -> Result<Self> {
        let dim = match entries.len() {
            4 => 2,
            16 => 4,
            n => return Err(Error::InvalidArgument(format!("expected 4 or 16 entries, got {n}"))),
        };
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("matrix entries must be finite".into()));
        }
        Self::from_fn(dim, |i, j| entries[i * dim + j])
    }

    /// 2×2 matrix from rows.
    pub fn mat2(a: C64, b: C64, c_: C64, d: C64) -> Self {
        let mut m = Self::zeros(2).expect("2 is a valid dimension");
        m[(0, 0)] = a;
        m[(0, 1)] = b;
        m[(1, 0)] = c_;
        m[(1, 1)] = d;
        m
    }

    pub fn pauli_x() -> Self {
        Self::mat2(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))
    }

    pub fn pauli_y() -> Self {
        Self::mat2(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0))
    }

    pub fn pauli_z() -> Self {
        Self::mat2(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0))
    }

    /// `n · σ` for a real 3-vector `n`.
    pub fn pauli_dot(n: [f64; 3]) -> Self {
        Self::mat2(c(n[2], 0.0), c(n[0], -n[1]), c(n[0], n[1]), c(-n[2], 0.0))
    }

    /// `|u⟩⟨v|`.
    pub fn outer(u: &Ket, v: &Ket) -> Self {
        Self::mat2(
            u[0] * v[0].conj(),
            u[0] * v[1].conj(),
            u[1] * v[0].conj(),
            u[1] * v[1].conj(),
        )
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn adjoint(&self) -> Self {
        let mut m = *self;
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(i, j)] = self[(j, i)].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = *self;
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(i, j)] = self[(j, i)];
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        let mut m = *self;
        for z in m.entries_mut() {
            *z = f(*z);
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    /// Row-major view of the active entries.
    pub fn entries(&self) -> &[C64] {
        &self.data[..self.dim * self.dim]
    }

    fn entries_mut(&mut self) -> &mut [C64] {
        let n = self.dim * self.dim;
        &mut self.data[..n]
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn norm_one(&self) -> f64 {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `max |A − A†|` entry-wise.
    pub fn hermiticity_defect(&self) -> f64 {
        (*self - self.adjoint()).max_abs()
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `max |A − B|` entry-wise; dimensions must agree.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        same_dim(self, rhs)?;
        Ok(*self * *rhs)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim, "vector length must match matrix dimension");
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Kronecker product of two 2×2 matrices.
    pub fn kron(a: &Self, b: &Self) -> Result<Self> {
        if a.dim != 2 || b.dim != 2 {
            return Err(Error::InvalidArgument(
                "kron is only defined for 2×2 factors here".into(),
            ));
        }
        Self::from_fn(4, |i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
    }

    pub(crate) fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()).scale(c(0.5, 0.0))
    }
}

fn same_dim(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.dim == b.dim {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "dimension mismatch: {}×{} vs {}×{}",
            a.dim, a.dim, b.dim, b.dim
        )))
    }
}

/// `AB − BA`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    same_dim(a, b)?;
    Ok(*a * *b - *b * *a)
}

/// `AB + BA`.
pub fn anticommutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    same_dim(a, b)?;
    Ok(*a * *b + *b * *a)
}

/// Conjugate transpose.
pub fn adjoint(a: &ComplexMatrix) -> ComplexMatrix {
    a.adjoint()
}

/// Column-stacking vectorisation: `vec(|i⟩⟨j|) = e_j ⊗ e_i`.
pub fn vectorize(rho: &ComplexMatrix) -> [C64; 4] {
    assert_eq!(rho.dim(), 2, "only 2×2 operators are vectorised");
    [rho[(0, 0)], rho[(1, 0)], rho[(0, 1)], rho[(1, 1)]]
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: &[C64]) -> ComplexMatrix {
    assert_eq!(v.len(), 4);
    ComplexMatrix::mat2(v[0], v[2], v[1], v[3])
}

/// Rescales `v` so its first component with modulus above `1e-12` is real and
/// positive.
pub fn fix_phase(v: &mut [C64]) {
    if let Some(first) = v.iter().find(|z| z.norm() > 1e-12).copied() {
        let phase = first.conj() / first.norm();
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.dim && j < self.dim);
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.dim && j < self.dim);
        &mut self.data[i * self.dim + j]
    }
}

impl Add for ComplexMatrix {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in add");
        let mut m = self;
        for (a, b) in m.entries_mut().iter_mut().zip(rhs.entries()) {
            *a += *b;
        }
        m
    }
}

impl AddAssign for ComplexMatrix {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for ComplexMatrix {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in sub");
        let mut m = self;
        for (a, b) in m.entries_mut().iter_mut().zip(rhs.entries()) {
            *a -= *b;
        }
        m
    }
}

impl Neg for ComplexMatrix {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|z| -z)
    }
}

impl Mul for ComplexMatrix {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in mul");
        let n = self.dim;
        let mut m = self;
        for i in 0..n {
            for j in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self[(i, k)] * rhs[(k, j)];
                }
                m[(i, j)] = acc;
            }
        }
        m
    }
}

impl Mul<f64> for ComplexMatrix {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.map(|z| z * s)
    }
}

impl Mul<C64> for ComplexMatrix {
    type Output = Self;
    fn mul(self, s: C64) -> Self {
        self.scale(s)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}×{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_commutator_and_anticommutator() {
        let x = ComplexMatrix::pauli_x();
        let y = ComplexMatrix::pauli_y();
        let z = ComplexMatrix::pauli_z();
        let comm = commutator(&x, &y).unwrap();
        assert!(comm.max_abs_diff(&z.scale(c(0.0, 2.0))) < 1e-15);
        let anti = anticommutator(&x, &x).unwrap();
        let two = ComplexMatrix::identity(2).unwrap() * 2.0;
        assert!(anti.max_abs_diff(&two) < 1e-15);
    }

    #[test]
    fn adjoint_of_ket_bra() {
        let k0 = [c(1.0, 0.0), c(0.0, 0.0)];
        let k1 = [c(0.0, 0.0), c(1.0, 0.0)];
        let m = ComplexMatrix::outer(&k0, &k1);
        assert_eq!(adjoint(&m), ComplexMatrix::outer(&k1, &k0));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = ComplexMatrix::identity(2).unwrap();
        let b = ComplexMatrix::identity(4).unwrap();
        assert!(matches!(commutator(&a, &b), Err(Error::InvalidArgument(_))));
        assert!(matches!(anticommutator(&a, &b), Err(Error::InvalidArgument(_))));
        assert!(a.checked_mul(&b).is_err());
        assert!(ComplexMatrix::zeros(3).is_err());
    }

    #[test]
    fn column_stacking_convention() {
        // vec(|i⟩⟨j|) = e_j ⊗ e_i  ⇒  index j*2 + i
        for i in 0..2 {
            for j in 0..2 {
                let mut m = ComplexMatrix::zeros(2).unwrap();
                m[(i, j)] = c(1.0, 0.0);
                let v = vectorize(&m);
                for (k, z) in v.iter().enumerate() {
                    let expected = if k == j * 2 + i { 1.0 } else { 0.0 };
                    assert_eq!(z.re, expected);
                }
                assert_eq!(unvectorize(&v), m);
            }
        }
    }

    #[test]
    fn kron_matches_block_structure() {
        let k = ComplexMatrix::kron(&ComplexMatrix::pauli_z(), &ComplexMatrix::pauli_x()).unwrap();
        assert_eq!(k[(0, 1)], c(1.0, 0.0));
        assert_eq!(k[(2, 3)], c(-1.0, 0.0));
        assert_eq!(k[(0, 2)], c(0.0, 0.0));
    }

    #[test]
    fn phase_fix_makes_first_component_positive() {
        let mut v = [c(0.0, 0.0), c(0.0, -2.0)];
        fix_phase(&mut v);
        assert!((v[1] - c(2.0, 0.0)).norm() < 1e-15);
    }
}
