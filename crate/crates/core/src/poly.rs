//! Polynomials and the factored rational functions
//! `ζ(z) = Π_p det(I - z A_p)^{(-1)^{p+1}}` that arise as Lefschetz zeta
//! functions.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use num_traits::Zero;

use crate::error::{DelocError, Result};
use crate::linalg::Matrix;
use crate::scalar::{rational, Scalar};

/// Polynomial with coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(T::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(T::zero());
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * z.clone() + c.clone())
    }

    /// `P(z^j)`.
    pub fn compose_power(&self, j: usize) -> Self {
        assert!(j >= 1);
        let mut out = vec![T::zero(); self.degree() * j + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i * j] = c.clone();
        }
        Self::new(out)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Poly<U> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    /// First `terms + 1` Taylor coefficients of `z P'(z) / P(z)`; requires
    /// `P(0) = 1`.
    fn log_derivative(&self, terms: usize) -> Vec<T> {
        assert!(self.coeff(0) == T::one(), "log-derivative needs P(0) = 1");
        // P · q = z P'  ⇒  q_k = k p_k - Σ_{i=1..k} p_i q_{k-i}.
        let mut q = vec![T::zero(); terms + 1];
        for k in 1..=terms {
            let mut acc = T::from_i64(k as i64) * self.coeff(k);
            for i in 1..=k {
                acc = acc - self.coeff(i) * q[k - i].clone();
            }
            q[k] = acc;
        }
        q
    }
}

impl Poly<Complex64> {
    /// Multiplicity of `z0` as a root, deciding vanishing remainders relative
    /// to the magnitude of the terms.
    pub fn root_multiplicity(&self, z0: Complex64, tol: f64) -> usize {
        let mut current = self.clone();
        let mut count = 0;
        while current.degree() > 0 {
            let (quotient, remainder) = current.deflate(z0);
            let scale: f64 = current
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c.norm() * z0.norm().powi(i as i32))
                .sum();
            if remainder.norm() > tol * scale.max(f64::MIN_POSITIVE) {
                break;
            }
            current = quotient;
            count += 1;
        }
        count
    }

    /// Synthetic division by `(z - z0)`.
    fn deflate(&self, z0: Complex64) -> (Self, Complex64) {
        let n = self.degree();
        let mut quotient = vec![Complex64::zero(); n];
        let mut carry = Complex64::zero();
        for i in (0..=n).rev() {
            let v = self.coeffs[i] + carry * z0;
            if i == 0 {
                return (Poly::new(quotient), v);
            }
            quotient[i - 1] = v;
            carry = v;
        }
        unreachable!()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZetaFactor<T> {
    pub poly: Poly<T>,
    pub exponent: i32,
}

/// Product of polynomial factors raised to `±1`, each normalised to
/// `P(0) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalZeta<T> {
    pub factors: Vec<ZetaFactor<T>>,
}

/// Relative threshold for deciding that a factor vanishes at a point.
const ROOT_TOL: f64 = 1e-10;

impl<T: Scalar> RationalZeta<T> {
    /// `Π_p det(I - z A_p)^{(-1)^{p+1}}` for the graded family `A_0, A_1, ...`.
    pub fn from_graded(matrices: &[Matrix<T>]) -> Result<Self> {
        let mut factors = Vec::with_capacity(matrices.len());
        for (p, m) in matrices.iter().enumerate() {
            if !m.is_square() {
                return Err(DelocError::Schema(alloc::format!(
                    "degree {p} matrix is {}x{}",
                    m.rows(),
                    m.cols()
                )));
            }
            factors.push(ZetaFactor {
                poly: Poly::new(m.reversed_charpoly()),
                exponent: if p % 2 == 0 { -1 } else { 1 },
            });
        }
        Ok(Self { factors })
    }

    /// `ζ(z^j)`.
    pub fn compose_power(&self, j: usize) -> Self {
        Self {
            factors: self
                .factors
                .iter()
                .map(|f| ZetaFactor {
                    poly: f.poly.compose_power(j),
                    exponent: f.exponent,
                })
                .collect(),
        }
    }

    /// Coefficients `a_1..a_terms` of `z ζ'(z)/ζ(z) = Σ a_k z^k`. When
    /// `ζ = exp(Σ z^k L_k / k)` these are the `L_k`.
    pub fn log_derivative_series(&self, terms: usize) -> Vec<T> {
        let mut out = vec![T::zero(); terms];
        for factor in &self.factors {
            let q = factor.poly.log_derivative(terms);
            let e = T::from_i64(factor.exponent as i64);
            for k in 1..=terms {
                out[k - 1] = out[k - 1].clone() + e.clone() * q[k].clone();
            }
        }
        out
    }

    /// Taylor coefficients `c_0..c_terms` of ζ itself.
    pub fn taylor_series(&self, terms: usize) -> Vec<T> {
        // ζ' = ζ · (Σ a_k z^{k-1})  ⇒  k c_k = Σ_{i=1..k} a_i c_{k-i}.
        let a = self.log_derivative_series(terms);
        let mut c = vec![T::zero(); terms + 1];
        c[0] = T::one();
        for k in 1..=terms {
            let mut acc = T::zero();
            for i in 1..=k {
                acc = acc + a[i - 1].clone() * c[k - i].clone();
            }
            c[k] = acc * T::from_rational(&rational(1, k as i64));
        }
        c
    }

    pub fn to_complex(&self) -> RationalZeta<Complex64> {
        RationalZeta {
            factors: self
                .factors
                .iter()
                .map(|f| ZetaFactor {
                    poly: f.poly.map(T::to_complex),
                    exponent: f.exponent,
                })
                .collect(),
        }
    }
}

impl RationalZeta<Complex64> {
    /// Order of vanishing at `z`: positive for a zero, negative for a pole.
    pub fn order_at(&self, z: Complex64) -> i32 {
        self.factors
            .iter()
            .map(|f| f.exponent * f.poly.root_multiplicity(z, ROOT_TOL) as i32)
            .sum()
    }

    /// Value at `z`; removable singularities between numerator and
    /// denominator factors are cancelled. Poles are reported with their order.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        let mut value = Complex64::new(1.0, 0.0);
        let mut order = 0i32;
        for f in &self.factors {
            let m = f.poly.root_multiplicity(z, ROOT_TOL);
            order += f.exponent * m as i32;
            let mut reduced = f.poly.clone();
            for _ in 0..m {
                reduced = reduced.deflate(z).0;
            }
            let v = reduced.eval(&z);
            value *= if f.exponent >= 0 {
                v.powi(f.exponent)
            } else {
                v.powi(f.exponent.abs()).inv()
            };
        }
        match order {
            0 => Ok(value),
            o if o > 0 => Ok(Complex64::zero()),
            o => Err(DelocError::Pole { at: z, order: -o }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn root_multiplicity_of_repeated_root() {
        // (1 - z)^2 = 1 - 2z + z^2
        let p = Poly::new(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(-2.0, 0.0),
            Complex64::new(1.0, 0.0),
        ]);
        assert_eq!(p.root_multiplicity(Complex64::new(1.0, 0.0), 1e-10), 2);
        assert_eq!(p.root_multiplicity(Complex64::new(-1.0, 0.0), 1e-10), 0);
    }

    #[test]
    fn log_derivative_of_geometric_factor() {
        // 1/(1 - 2z): z ζ'/ζ = Σ 2^k z^k.
        let zeta = RationalZeta {
            factors: vec![ZetaFactor {
                poly: Poly::new(vec![BigRational::from_i64(1), BigRational::from_i64(-2)]),
                exponent: -1,
            }],
        };
        let a = zeta.log_derivative_series(6);
        for (k, v) in a.iter().enumerate() {
            assert_eq!(*v, BigRational::from_i64(1 << (k + 1)));
        }
        let c = zeta.taylor_series(5);
        for (k, v) in c.iter().enumerate() {
            assert_eq!(*v, BigRational::from_i64(1 << k));
        }
    }

    #[test]
    fn removable_singularity_is_cancelled() {
        // (1 - z) / (1 - z) evaluated at 1.
        let f = Poly::new(vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]);
        let zeta = RationalZeta {
            factors: vec![
                ZetaFactor {
                    poly: f.clone(),
                    exponent: 1,
                },
                ZetaFactor { poly: f, exponent: -1 },
            ],
        };
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(zeta.order_at(one), 0);
        assert!((zeta.evaluate(one).unwrap() - one).norm() < 1e-15);
    }
}
