//! Small dense complex matrices used for gate definitions, Kraus operators and
//! density matrices. Storage is row-major.

use std::fmt;
use std::ops::{Add, Mul};

use num_complex::Complex64;

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `e^{i theta}`
#[inline]
pub(crate) fn cis(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

#[derive(Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<C64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = *d;
        }
        m
    }

    /// Builds a square matrix from row-major data. Returns `None` when the
    /// length is not a perfect square.
    pub fn from_row_major(data: Vec<C64>) -> Option<Self> {
        let dim = (data.len() as f64).sqrt().round() as usize;
        (dim * dim == data.len()).then_some(Self { dim, data })
    }

    /// Builds a matrix from nested rows. Returns `None` for ragged or
    /// non-square input.
    pub fn from_rows(rows: &[Vec<C64>]) -> Option<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return None;
        }
        Some(Self {
            dim,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub(crate) fn from_real_rows<const N: usize>(rows: [[f64; N]; N]) -> Self {
        Self {
            dim: N,
            data: rows.iter().flatten().map(|&x| c(x, 0.0)).collect(),
        }
    }

    pub(crate) fn from_array<const N: usize>(rows: [[C64; N]; N]) -> Self {
        Self {
            dim: N,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn rows(&self) -> impl Iterator<Item = &[C64]> {
        self.data.chunks(self.dim)
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for col in 0..n {
                out.data[col * n + r] = self.data[r * n + col].conj();
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let (a, b) = (self.dim, other.dim);
        let n = a * b;
        let mut out = Matrix::zeros(n);
        for i in 0..a {
            for j in 0..a {
                let s = self.get(i, j);
                if s == ZERO {
                    continue;
                }
                for k in 0..b {
                    for l in 0..b {
                        out.data[(i * b + k) * n + j * b + l] = s * other.get(k, l);
                    }
                }
            }
        }
        out
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    /// Integer power by repeated squaring.
    pub fn pow(&self, mut exp: u64) -> Matrix {
        let mut base = self.clone();
        let mut acc = Matrix::identity(self.dim);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.matmul(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.matmul(&base);
            }
        }
        acc
    }

    /// Largest entry-wise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |U U^dagger - I|` over all entries.
    pub fn unitarity_deviation(&self) -> f64 {
        self.matmul(&self.adjoint())
            .max_abs_diff(&Matrix::identity(self.dim))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() < tol
    }

    /// `max |A - A^dagger|` over all entries.
    pub fn hermiticity_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// `|tr(A^dagger B)|`, used to compare operators up to global phase.
    pub fn overlap(&self, other: &Matrix) -> f64 {
        self.adjoint().matmul(other).trace().norm()
    }
}

impl Add for &Matrix {
    type Output = Matrix;

    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        Matrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        self.matmul(rhs)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.dim, self.dim)?;
        for row in self.rows() {
            let cells: Vec<String> = row
                .iter()
                .map(|z| format!("{:+.4}{:+.4}i", z.re, z.im))
                .collect();
            writeln!(f, "  {}", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_of_identities_is_identity() {
        let a = Matrix::identity(2);
        let b = Matrix::identity(4);
        assert_eq!(a.kron(&b), Matrix::identity(8));
    }

    #[test]
    fn kron_places_blocks_row_major() {
        let x = Matrix::from_real_rows([[0.0, 1.0], [1.0, 0.0]]);
        let z = Matrix::from_real_rows([[1.0, 0.0], [0.0, -1.0]]);
        let xz = x.kron(&z);
        assert_eq!(xz.get(0, 2), ONE);
        assert_eq!(xz.get(1, 3), -ONE);
        assert_eq!(xz.get(0, 0), ZERO);
    }

    #[test]
    fn pow_matches_repeated_product() {
        let t = Matrix::diagonal(&[ONE, cis(std::f64::consts::FRAC_PI_4)]);
        let mut manual = Matrix::identity(2);
        for _ in 0..5 {
            manual = manual.matmul(&t);
        }
        assert!(t.pow(5).max_abs_diff(&manual) < 1e-14);
        assert_eq!(t.pow(0), Matrix::identity(2));
    }

    #[test]
    fn from_rows_rejects_ragged() {
        assert!(Matrix::from_rows(&[vec![ONE, ZERO], vec![ONE]]).is_none());
        assert!(Matrix::from_row_major(vec![ONE; 3]).is_none());
    }
}
