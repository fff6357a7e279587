//! Mapping tori `M = Z ×_φ S¹` at the class `⟨k⟩` of `ℤ = π_1(S¹)`: torsion
//! from the spectrum of `φ*` on `H*(Z; ℂ)`, the Lefschetz zeta function, the
//! Fourier-integral oracle for the torsion, and the Atiyah–Bott eta value.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{DelocError, Result};
use crate::linalg::{determinant, eigenvalues, numerical_rank, Matrix};
use crate::poly::RationalZeta;
use crate::scalar::Scalar;

/// Eigenvalues this close to the unit circle are treated as lying on it.
const UNIT_CIRCLE_TOL: f64 = 1e-8;
/// Eigenvalues this close together form one cluster for the Jordan check.
const CLUSTER_TOL: f64 = 1e-6;

/// `φ*_p ∈ Aut(H^p(Z; ℂ))` for `p = 0..=dim Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct CohomologyAction<T: Scalar> {
    matrices: Vec<Matrix<T>>,
}

impl<T: Scalar> CohomologyAction<T> {
    /// Degrees with vanishing cohomology are given as `0×0` matrices.
    pub fn new(matrices: Vec<Matrix<T>>) -> Result<Self> {
        if matrices.is_empty() {
            return Err(DelocError::Schema("cohomology action needs at least degree 0".into()));
        }
        let mut scratch = Vec::new();
        for (p, m) in matrices.iter().enumerate() {
            if !m.is_square() {
                return Err(DelocError::Schema(format!(
                    "φ*_{p} is {}×{}, not square",
                    m.rows(),
                    m.cols()
                )));
            }
            if m.rows() == 0 {
                continue;
            }
            let c = m.to_complex();
            let data: Vec<Complex64> = (0..c.rows()).flat_map(|i| c.row(i).to_vec()).collect();
            if determinant(&data, c.rows(), &mut scratch).norm() <= 1e-12 {
                return Err(DelocError::Validation(format!("φ*_{p} is not invertible")));
            }
        }
        Ok(Self { matrices })
    }

    /// Graded family without the invertibility check, for cochain-level
    /// actions that need not be automorphisms.
    pub(crate) fn from_graded_unchecked(matrices: Vec<Matrix<T>>) -> Self {
        Self { matrices }
    }

    pub fn matrices(&self) -> &[Matrix<T>] {
        &self.matrices
    }

    pub fn betti_numbers(&self) -> Vec<usize> {
        self.matrices.iter().map(Matrix::rows).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.matrices
            .iter()
            .enumerate()
            .map(|(p, m)| {
                if p % 2 == 0 {
                    m.rows() as i64
                } else {
                    -(m.rows() as i64)
                }
            })
            .sum()
    }

    pub fn to_complex(&self) -> CohomologyAction<Complex64> {
        CohomologyAction {
            matrices: self.matrices.iter().map(Matrix::to_complex).collect(),
        }
    }

    /// Eigenvalues of each `φ*_p`, with multiplicity.
    pub fn spectra(&self) -> Result<Vec<Vec<Complex64>>> {
        self.matrices.iter().map(|m| eigenvalues(&m.to_nalgebra())).collect()
    }
}

/// `f(λ) = λ` for `|λ| ≤ 1`, `conj(λ⁻¹)` otherwise.
pub fn clamp_spectrum(lambda: Complex64) -> Result<Complex64> {
    if lambda == Complex64::new(0.0, 0.0) {
        return Err(DelocError::Domain("f is undefined at 0".into()));
    }
    Ok(clamp(lambda))
}

fn clamp(lambda: Complex64) -> Complex64 {
    if lambda.norm() <= 1.0 {
        lambda
    } else {
        lambda.inv().conj()
    }
}

/// Rejects unit-circle eigenvalues with a nontrivial Jordan block, where the
/// spectral definition of `f(φ*_p)` has no canonical meaning.
fn check_semisimple_on_circle(m: &DMatrix<Complex64>, spectrum: &[Complex64], p: usize) -> Result<()> {
    let n = m.nrows();
    let mut handled: Vec<bool> = spectrum
        .iter()
        .map(|z| (z.norm() - 1.0).abs() > UNIT_CIRCLE_TOL)
        .collect();
    for i in 0..spectrum.len() {
        if handled[i] {
            continue;
        }
        let cluster: Vec<usize> = (i..spectrum.len())
            .filter(|&j| !handled[j] && (spectrum[j] - spectrum[i]).norm() < CLUSTER_TOL)
            .collect();
        for &j in &cluster {
            handled[j] = true;
        }
        let centre = cluster.iter().map(|&j| spectrum[j]).sum::<Complex64>() / cluster.len() as f64;
        let shifted = m - DMatrix::from_diagonal_element(n, n, centre);
        let geometric = n - numerical_rank(&shifted, 1e-7)?;
        if geometric < cluster.len() {
            return Err(DelocError::Domain(format!(
                "φ*_{p} has a Jordan block at the unit-circle eigenvalue {centre}; f(φ*_{p}) is ambiguous"
            )));
        }
    }
    Ok(())
}

/// `𝒯_⟨k⟩(M)`: `(1/k) Σ_p (-1)^p Tr f(φ*_p)^k` for `k > 0` and
/// `-(1/k) Σ_p (-1)^p Tr f(conj φ*_p)^{-k}` for `k < 0`.
pub fn torsion_k<T: Scalar>(action: &CohomologyAction<T>, k: i64) -> Result<Complex64> {
    if k == 0 {
        return Err(DelocError::Domain(
            "torsion at the trivial class ⟨0⟩ needs zeta regularization".into(),
        ));
    }
    let e = i32::try_from(k.unsigned_abs()).map_err(|_| DelocError::Domain(format!("|k| = {k} too large")))?;
    let mut total = Complex64::new(0.0, 0.0);
    for (p, m) in action.matrices.iter().enumerate() {
        let a = m.to_nalgebra();
        let spectrum = eigenvalues(&a)?;
        check_semisimple_on_circle(&a, &spectrum, p)?;
        let sum: Complex64 = spectrum
            .iter()
            .map(|&l| clamp(if k > 0 { l } else { l.conj() }).powi(e))
            .sum();
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        total += sum * sign;
    }
    Ok(if k > 0 { total / k as f64 } else { -total / k as f64 })
}

/// `L(φ^k) = Σ_p (-1)^p Tr (φ*_p)^k`, exact over the scalar type.
pub fn lefschetz_number<T: Scalar>(action: &CohomologyAction<T>, k: u32) -> T {
    action.matrices.iter().enumerate().fold(T::zero(), |acc, (p, m)| {
        let t = m.pow(k).trace();
        if p % 2 == 0 {
            acc + t
        } else {
            acc - t
        }
    })
}

/// `ζ(z) = Π_p det(I - z φ*_p)^{(-1)^{p+1}}`.
pub fn zeta_rational<T: Scalar>(action: &CohomologyAction<T>) -> Result<RationalZeta<T>> {
    RationalZeta::from_graded(&action.matrices)
}

/// `η_⟨k⟩(M) = (i/(kπ)) Tr_s(φ^k |_{Ker D_Z})`.
pub fn atiyah_bott_eta(supertrace: Complex64, k: i64) -> Result<Complex64> {
    if k == 0 {
        return Err(DelocError::Domain("k must be nonzero".into()));
    }
    Ok(Complex64::new(0.0, 1.0) * supertrace / (k as f64 * PI))
}

/// `Σ_p (-1)^{p+1} 2 Σ_λ ln max(1, |λ|)`: the zeroth Fourier coefficient of
/// `T(θ) = Σ_p (-1)^p ln|det(I - e^{iθ}φ*_p)|^{-2}` (Jensen's formula).
pub fn zeroth_fourier_coefficient<T: Scalar>(action: &CohomologyAction<T>) -> Result<f64> {
    let mut total = 0.0;
    for (p, spectrum) in action.spectra()?.into_iter().enumerate() {
        let mahler: f64 = spectrum.iter().map(|l| l.norm().max(1.0).ln()).sum();
        total += if p % 2 == 0 { -2.0 * mahler } else { 2.0 * mahler };
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierOptions {
    pub initial_grid: usize,
    /// Successive Richardson estimates must agree to this.
    pub tolerance: f64,
    /// Tolerance floor when some eigenvalue lies on the unit circle and the
    /// integrand has logarithmic singularities.
    pub singular_tolerance: f64,
    /// Number of grid triplings allowed.
    pub max_refinements: u32,
}

impl Default for FourierOptions {
    fn default() -> Self {
        Self {
            initial_grid: 256,
            tolerance: 1e-10,
            singular_tolerance: 1e-5,
            max_refinements: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierEstimate {
    pub k: i64,
    pub value: Complex64,
    /// Difference between the last two Richardson estimates.
    pub error: f64,
    pub grid: usize,
    /// Whether the integrand has unit-circle log singularities.
    pub singular: bool,
}

/// `𝒯_⟨k⟩ = ∫_{S¹} e^{-ikθ} T(θ) dθ/2π` by the midpoint rule on a tripling
/// grid with one Richardson step.
pub fn fourier_torsion_oracle<T: Scalar>(
    action: &CohomologyAction<T>,
    k: i64,
    options: &FourierOptions,
) -> Result<FourierEstimate> {
    fourier_torsion_coefficients(action, &[k], options).map(|mut v| v.remove(0))
}

/// Several Fourier coefficients from one set of `T(θ)` samples.
pub fn fourier_torsion_coefficients<T: Scalar>(
    action: &CohomologyAction<T>,
    ks: &[i64],
    options: &FourierOptions,
) -> Result<Vec<FourierEstimate>> {
    if options.initial_grid < 256 {
        return Err(DelocError::Domain(format!(
            "grid {} below the minimum 256",
            options.initial_grid
        )));
    }
    let complex = action.to_complex();
    let singular = complex
        .spectra()?
        .iter()
        .flatten()
        .any(|l| (l.norm() - 1.0).abs() <= UNIT_CIRCLE_TOL);
    let tol = if singular {
        options.tolerance.max(options.singular_tolerance)
    } else {
        options.tolerance
    };
    let grids: Vec<(usize, Vec<Complex64>)> = complex
        .matrices
        .iter()
        .filter(|m| m.rows() > 0)
        .map(|m| (m.rows(), (0..m.rows()).flat_map(|i| m.row(i).to_vec()).collect()))
        .collect();
    let degrees: Vec<usize> = complex
        .matrices
        .iter()
        .enumerate()
        .filter(|(_, m)| m.rows() > 0)
        .map(|(p, _)| p)
        .collect();
    let sample = |theta: f64| -> f64 {
        let z = Complex64::from_polar(1.0, theta);
        let mut scratch = Vec::new();
        let mut buf = Vec::new();
        grids.iter().zip(&degrees).fold(0.0, |acc, ((n, a), &p)| {
            buf.clear();
            buf.extend(a.iter().enumerate().map(|(idx, &x)| {
                let diag = if idx / n == idx % n { 1.0 } else { 0.0 };
                Complex64::new(diag, 0.0) - z * x
            }));
            let logdet = determinant(&buf, *n, &mut scratch).norm().ln();
            // (-1)^p ln|det|^{-2}
            if p % 2 == 0 {
                acc - 2.0 * logdet
            } else {
                acc + 2.0 * logdet
            }
        })
    };

    let mut n = options.initial_grid;
    let mut values: Vec<f64> = eval_points(&sample, n, None);
    let mut coarse: Vec<Complex64> = ks.iter().map(|&k| fourier_sum(&values, k)).collect();
    let mut previous: Option<Vec<Complex64>> = None;
    for _ in 0..options.max_refinements {
        values = eval_points(&sample, 3 * n, Some(&values));
        n *= 3;
        let fine: Vec<Complex64> = ks.iter().map(|&k| fourier_sum(&values, k)).collect();
        let richardson: Vec<Complex64> = fine.iter().zip(&coarse).map(|(f, c)| (f * 3.0 - c) / 2.0).collect();
        if let Some(prev) = &previous {
            let errors: Vec<f64> = richardson.iter().zip(prev).map(|(a, b)| (a - b).norm()).collect();
            if errors
                .iter()
                .zip(&richardson)
                .all(|(e, v)| *e <= tol * v.norm().max(1.0))
            {
                return Ok(ks
                    .iter()
                    .zip(richardson)
                    .zip(errors)
                    .map(|((&k, value), error)| FourierEstimate {
                        k,
                        value,
                        error,
                        grid: n,
                        singular,
                    })
                    .collect());
            }
        }
        previous = Some(richardson);
        coarse = fine;
    }
    let prev = previous.unwrap_or_default();
    let (worst, (a, b)) = prev
        .iter()
        .zip(&coarse)
        .map(|(p, c)| (*p, *c))
        .enumerate()
        .max_by(|x, y| (x.1 .0 - x.1 .1).norm().total_cmp(&(y.1 .0 - y.1 .1).norm()))
        .unwrap_or((0, (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))));
    Err(DelocError::Convergence {
        partial: a,
        tail: (a - b).norm(),
        detail: format!(
            "Fourier coefficient k = {} unconverged at grid {n}; last estimates {a} and {b}",
            ks.get(worst).copied().unwrap_or(0)
        ),
    })
}

/// `T` at the midpoints `2π(i + 1/2)/n`; a grid of size `n/3` is nested in it.
fn eval_points(sample: &(impl Fn(f64) -> f64 + Sync), n: usize, coarse: Option<&[f64]>) -> Vec<f64> {
    let theta = |i: usize| 2.0 * PI * (i as f64 + 0.5) / n as f64;
    let point = |i: usize| match coarse {
        Some(c) if i % 3 == 1 => c[i / 3],
        _ => sample(theta(i)),
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(point).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(point).collect()
    }
}

fn fourier_sum(values: &[f64], k: i64) -> Complex64 {
    let n = values.len();
    let sum: Complex64 = values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            // Reduce k·(i + 1/2) mod n before forming the angle.
            let phase = ((k.rem_euclid(2 * n as i64) as u128 * (2 * i as u128 + 1)) % (2 * n as u128)) as f64;
            Complex64::from_polar(v, -PI * phase / n as f64)
        })
        .sum();
    sum / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use num_rational::BigRational;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn action(degrees: &[&[&[f64]]]) -> CohomologyAction<Complex64> {
        CohomologyAction::new(
            degrees
                .iter()
                .map(|rows| {
                    if rows.is_empty() {
                        Matrix::zeros(0, 0)
                    } else {
                        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| c(x, 0.0)).collect()).collect())
                            .unwrap()
                    }
                })
                .collect(),
        )
        .unwrap()
    }

    fn sphere_identity() -> CohomologyAction<Complex64> {
        action(&[&[&[1.0]], &[], &[&[1.0]]])
    }

    fn antipodal() -> CohomologyAction<Complex64> {
        action(&[&[&[1.0]], &[], &[&[-1.0]]])
    }

    #[test]
    fn clamp_examples() {
        assert_eq!(clamp_spectrum(c(1.0, 0.0)).unwrap(), c(1.0, 0.0));
        assert_eq!(clamp_spectrum(c(2.0, 0.0)).unwrap(), c(0.5, 0.0));
        assert!((clamp_spectrum(c(0.0, 3.0)).unwrap() - c(0.0, 1.0 / 3.0)).norm() < 1e-16);
        assert!(clamp_spectrum(c(0.0, 0.0)).is_err());
    }

    #[test]
    fn torsion_examples() {
        assert!((torsion_k(&sphere_identity(), 3).unwrap() - c(2.0 / 3.0, 0.0)).norm() < 1e-14);
        assert!((torsion_k(&antipodal(), 2).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
        assert!(torsion_k(&antipodal(), 1).unwrap().norm() < 1e-14);
        let a = action(&[&[&[1.0]], &[], &[&[2.0]]]);
        assert!((torsion_k(&a, 1).unwrap() - c(1.5, 0.0)).norm() < 1e-14);
        assert!(torsion_k(&a, 0).is_err());
    }

    #[test]
    fn defective_unit_eigenvalue_is_rejected() {
        let a = action(&[&[&[1.0, 1.0], &[0.0, 1.0]]]);
        assert!(matches!(torsion_k(&a, 1), Err(DelocError::Domain(_))));
        // Off the circle a Jordan block is harmless.
        let b = action(&[&[&[2.0, 1.0], &[0.0, 2.0]]]);
        assert!((torsion_k(&b, 1).unwrap() - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn lefschetz_examples() {
        assert_eq!(lefschetz_number(&sphere_identity(), 5), c(2.0, 0.0));
        assert_eq!(lefschetz_number(&antipodal(), 1), c(0.0, 0.0));
        assert_eq!(lefschetz_number(&antipodal(), 2), c(2.0, 0.0));
        let rot = action(&[&[&[1.0]], &[&[0.0, -1.0], &[1.0, 0.0]], &[&[1.0]]]);
        assert_eq!(lefschetz_number(&rot, 1), c(2.0, 0.0));
    }

    #[test]
    fn zeta_examples() {
        let q = |n| Matrix::from_rows(vec![vec![rational(n, 1)]]).unwrap();
        let sphere = CohomologyAction::<BigRational>::new(vec![q(1), Matrix::zeros(0, 0), q(1)]).unwrap();
        let z = zeta_rational(&sphere).unwrap();
        // (1 - z)^{-2} = Σ (k+1) z^k
        let taylor = z.taylor_series(6);
        assert_eq!(taylor, (1..=7).map(|k| rational(k, 1)).collect::<Vec<_>>());
        let anti = CohomologyAction::<BigRational>::new(vec![q(1), Matrix::zeros(0, 0), q(-1)]).unwrap();
        let series = zeta_rational(&anti).unwrap().log_derivative_series(12);
        for k in 1..=12u32 {
            assert_eq!(series[k as usize - 1], lefschetz_number(&anti, k));
        }
        let zc = zeta_rational(&antipodal()).unwrap();
        let v = zc.evaluate(c(0.5, 0.0)).unwrap();
        assert!((v - c(1.0 / 0.75, 0.0)).norm() < 1e-14);
        assert!(matches!(
            zc.evaluate(c(1.0, 0.0)),
            Err(DelocError::Pole { order: 1, .. })
        ));
    }

    #[test]
    fn fourier_oracle_examples() {
        let opts = FourierOptions::default();
        let anti = fourier_torsion_oracle(&antipodal(), 2, &opts).unwrap();
        assert!((anti.value - c(1.0, 0.0)).norm() < 1e-6, "{anti:?}");
        let id = fourier_torsion_oracle(&sphere_identity(), 1, &opts).unwrap();
        assert!((id.value - c(2.0, 0.0)).norm() < 1e-4, "{id:?}");
        let off = action(&[&[&[2.0]], &[], &[&[1.0 / 3.0]]]);
        for k in [-1, 1] {
            let est = fourier_torsion_oracle(&off, k, &opts).unwrap();
            assert!(
                (est.value - torsion_k(&off, k).unwrap()).norm() < 1e-8,
                "k={k}: {est:?}"
            );
        }
    }

    #[test]
    fn zeroth_coefficient_is_mahler_measure() {
        let off = action(&[&[&[2.0]], &[], &[&[1.0 / 3.0]]]);
        let c0 = zeroth_fourier_coefficient(&off).unwrap();
        let est = fourier_torsion_oracle(&off, 0, &FourierOptions::default()).unwrap();
        assert!((est.value.re - c0).abs() < 1e-9);
        assert!((c0 + 2.0 * 2.0f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn atiyah_bott_examples() {
        assert_eq!(atiyah_bott_eta(c(0.0, 0.0), 1).unwrap(), c(0.0, 0.0));
        assert!((atiyah_bott_eta(c(3.0, 0.0), 2).unwrap() - c(0.0, 3.0 / (2.0 * PI))).norm() < 1e-16);
        assert!((atiyah_bott_eta(c(1.5, 0.0), -1).unwrap() - c(0.0, -1.5 / PI)).norm() < 1e-16);
        assert!(atiyah_bott_eta(c(1.0, 0.0), 0).is_err());
    }
}
