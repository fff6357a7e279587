//! Small dense matrices over a [`Scalar`] plus the floating-point helpers
//! (eigenvalues, determinants, singular values) used across the crate.
//!
//! Exact matrices are stored row-major in [`Matrix`]; floating work is handed
//! to nalgebra.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{DelocError, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(DelocError::Schema("ragged matrix rows".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(T::is_zero)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matrix shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let prod = a.clone() * rhs[(k, j)].clone();
                    let slot = &mut out.data[i * rhs.cols + j];
                    *slot = slot.clone() + prod;
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    /// `self^k` by repeated squaring; `k = 0` gives the identity.
    pub fn pow(&self, mut k: u32) -> Self {
        assert!(self.is_square());
        let mut result = Self::identity(self.rows);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Gauss–Jordan inverse; `None` when singular (exactly singular over ℚ,
    /// or with a zero pivot over ℂ).
    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n).filter(|&r| !a[(r, col)].is_zero()).max_by(|&x, &y| {
                a[(x, col)]
                    .to_complex()
                    .norm()
                    .total_cmp(&a[(y, col)].to_complex().norm())
            })?;
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                    inv.data.swap(pivot * n + j, col * n + j);
                }
            }
            let p = a[(col, col)].inverse()?;
            for j in 0..n {
                a[(col, j)] = a[(col, j)].clone() * p.clone();
                inv[(col, j)] = inv[(col, j)].clone() * p.clone();
            }
            for r in (0..n).filter(|&r| r != col) {
                let factor = a[(r, col)].clone();
                if factor.is_zero() {
                    continue;
                }
                for j in 0..n {
                    a[(r, j)] = a[(r, j)].clone() - factor.clone() * a[(col, j)].clone();
                    inv[(r, j)] = inv[(r, j)].clone() - factor.clone() * inv[(col, j)].clone();
                }
            }
        }
        Some(inv)
    }

    /// `self^k` for any integer `k`; `None` if `k < 0` and `self` is singular.
    pub fn pow_signed(&self, k: i64) -> Option<Self> {
        let e = u32::try_from(k.unsigned_abs()).ok()?;
        if k >= 0 {
            Some(self.pow(e))
        } else {
            Some(self.inverse()?.pow(e))
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn near(&self, other: &Self, tol: f64) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data.iter().zip(&other.data).all(|(a, b)| a.near(b, tol))
    }

    pub fn to_complex(&self) -> Matrix<Complex64> {
        self.map(T::to_complex)
    }

    pub fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].to_complex())
    }

    /// Coefficients `c_0..c_n` (ascending) of `det(I - z A)`, computed with
    /// the division-free Berkowitz algorithm so it is exact over ℚ.
    pub fn reversed_charpoly(&self) -> Vec<T> {
        // det(zI - A) = Σ a_i z^{n-i}, so det(I - zA) = Σ a_i z^i.
        berkowitz(self)
    }
}

impl<T> core::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> core::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Characteristic polynomial `det(zI - A)` as coefficients of decreasing
/// powers `[1, a_1, ..., a_n]`, via Berkowitz's algorithm.
fn berkowitz<T: Scalar>(a: &Matrix<T>) -> Vec<T> {
    assert!(a.is_square());
    let n = a.rows();
    if n == 0 {
        return vec![T::one()];
    }
    // Start with the 1x1 leading block: z - a_00.
    let mut poly: Vec<T> = vec![T::one(), -a[(0, 0)].clone()];
    for r in 1..n {
        // Partition the leading (r+1)x(r+1) block as [[A_r, C], [R, a_rr]].
        let a_rr = a[(r, r)].clone();
        let row: Vec<T> = (0..r).map(|j| a[(r, j)].clone()).collect();
        let col: Vec<T> = (0..r).map(|i| a[(i, r)].clone()).collect();
        // Toeplitz column: 1, -a_rr, -R C, -R A C, -R A^2 C, ...
        let mut toeplitz = Vec::with_capacity(r + 2);
        toeplitz.push(T::one());
        toeplitz.push(-a_rr);
        let mut v = col;
        for _ in 0..r {
            let dot = row
                .iter()
                .zip(&v)
                .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone());
            toeplitz.push(-dot);
            v = (0..r)
                .map(|i| (0..r).fold(T::zero(), |acc, j| acc + a[(i, j)].clone() * v[j].clone()))
                .collect();
        }
        // New polynomial = Toeplitz (r+2 x r+1, lower triangular) * poly.
        let mut next = vec![T::zero(); r + 2];
        for (i, slot) in next.iter_mut().enumerate() {
            for (j, p) in poly.iter().enumerate() {
                if i >= j && i - j < toeplitz.len() {
                    *slot = slot.clone() + toeplitz[i - j].clone() * p.clone();
                }
            }
        }
        poly = next;
    }
    poly
}

/// Eigenvalues of a square complex matrix (complex Schur form).
pub fn eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    if m.nrows() != m.ncols() {
        return Err(DelocError::Schema("eigenvalues of a non-square matrix".into()));
    }
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let schur = m
        .clone()
        .try_schur(1e-15, 10_000)
        .ok_or_else(|| DelocError::Numeric("Schur iteration did not converge".into()))?;
    let values = schur
        .eigenvalues()
        .ok_or_else(|| DelocError::Numeric("Schur form is not triangular".into()))?;
    Ok(values.iter().copied().collect())
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    if m.nrows() == 1 {
        return Ok(vec![m[(0, 0)].re]);
    }
    let eig = nalgebra::SymmetricEigen::try_new(m.clone(), 1e-15, 10_000)
        .ok_or_else(|| DelocError::Numeric("Hermitian eigensolver did not converge".into()))?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

pub fn singular_values(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(Vec::new());
    }
    let svd = nalgebra::SVD::try_new(m.clone(), false, false, 1e-15, 10_000)
        .ok_or_else(|| DelocError::Numeric("SVD did not converge".into()))?;
    let mut values: Vec<f64> = svd.singular_values.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// 2-norm condition number; infinite for singular matrices.
pub fn condition_number(m: &DMatrix<Complex64>) -> Result<f64> {
    let sv = singular_values(m)?;
    match (sv.first(), sv.last()) {
        (Some(&max), Some(&min)) if min > 0.0 => Ok(max / min),
        (Some(_), Some(_)) => Ok(f64::INFINITY),
        _ => Ok(1.0),
    }
}

/// Numerical rank with threshold `tol * max(1, σ_max)`.
pub fn numerical_rank(m: &DMatrix<Complex64>, tol: f64) -> Result<usize> {
    let sv = singular_values(m)?;
    let scale = sv.first().copied().unwrap_or(0.0).max(1.0);
    Ok(sv.iter().filter(|&&s| s > tol * scale).count())
}

/// Unit-norm vector spanning the numerical null space direction of `m`
/// (right singular vector of the smallest singular value).
pub fn null_vector(m: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let svd = nalgebra::SVD::try_new(m.clone(), false, true, 1e-15, 10_000)
        .ok_or_else(|| DelocError::Numeric("SVD did not converge".into()))?;
    let v_t = svd
        .v_t
        .ok_or_else(|| DelocError::Numeric("SVD returned no right singular vectors".into()))?;
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| DelocError::Numeric("empty matrix".into()))?;
    Ok(v_t.row(idx).iter().map(|z| z.conj()).collect())
}

/// Determinant of a small complex matrix by Gaussian elimination with
/// partial pivoting. Operates on a scratch copy.
pub fn determinant(m: &[Complex64], n: usize, scratch: &mut Vec<Complex64>) -> Complex64 {
    scratch.clear();
    scratch.extend_from_slice(m);
    let a = scratch.as_mut_slice();
    let mut det = Complex64::new(1.0, 0.0);
    for c in 0..n {
        let mut pivot = c;
        let mut best = a[c * n + c].norm();
        for r in c + 1..n {
            let v = a[r * n + c].norm();
            if v > best {
                best = v;
                pivot = r;
            }
        }
        if best == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != c {
            for j in 0..n {
                a.swap(c * n + j, pivot * n + j);
            }
            det = -det;
        }
        let p = a[c * n + c];
        det *= p;
        for r in c + 1..n {
            let factor = a[r * n + c] / p;
            if factor.norm() == 0.0 {
                continue;
            }
            for j in c..n {
                let v = a[c * n + j];
                a[r * n + j] -= factor * v;
            }
        }
    }
    det
}

pub fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use num_rational::BigRational;

    fn int_matrix(rows: &[&[i64]]) -> Matrix<BigRational> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| BigRational::from_i64(v)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn berkowitz_matches_hand_expansion() {
        // det(I - zA) for A = [[2, 1], [1, 3]] is 1 - 5z + 5z^2.
        let a = int_matrix(&[&[2, 1], &[1, 3]]);
        let p = a.reversed_charpoly();
        assert_eq!(p, vec![rational(1, 1), rational(-5, 1), rational(5, 1)]);
    }

    #[test]
    fn berkowitz_three_by_three() {
        // A = [[0,1,0],[0,0,1],[1,0,0]] (cyclic permutation): det(I - zA) = 1 - z^3.
        let a = int_matrix(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]);
        assert_eq!(
            a.reversed_charpoly(),
            vec![rational(1, 1), rational(0, 1), rational(0, 1), rational(-1, 1)]
        );
        // Upper triangular with diagonal 1,2,3: (1-z)(1-2z)(1-3z).
        let b = int_matrix(&[&[1, 5, 7], &[0, 2, 4], &[0, 0, 3]]);
        assert_eq!(
            b.reversed_charpoly(),
            vec![rational(1, 1), rational(-6, 1), rational(11, 1), rational(-6, 1)]
        );
    }

    #[test]
    fn pow_and_trace() {
        let a = int_matrix(&[&[1, 1], &[1, 0]]);
        // Fibonacci: trace(A^10) = L_10 = 123.
        assert_eq!(a.pow(10).trace(), rational(123, 1));
        assert_eq!(a.pow(0), Matrix::identity(2));
    }

    #[test]
    fn exact_inverse() {
        let a = int_matrix(&[&[2, 1], &[7, 4]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(2));
        assert_eq!(a.pow_signed(-2).unwrap().mul(&a.pow(2)), Matrix::identity(2));
        assert!(int_matrix(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn determinant_by_elimination() {
        let m = [
            Complex64::new(0.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(3.0, 0.0),
            Complex64::new(1.0, 1.0),
        ];
        let mut scratch = Vec::new();
        let d = determinant(&m, 2, &mut scratch);
        assert!((d - Complex64::new(-6.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn eigenvalues_of_rotation() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(-1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        let mut ev = eigenvalues(&m).unwrap();
        ev.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((ev[0] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert!((ev[1] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    }
}
