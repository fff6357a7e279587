//! The two integral transforms turning heat-kernel data into invariants,
//! and the Gaussian moment identity that the hyperbolic closed forms rest on.

use core::f64::consts::PI;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{DelocError, Result};
use crate::invariants::{EtaSampler, TorsionSeries};
use crate::quadrature::{integrate_half_line, HalfLineMeasure, HalfLineOptions, QuadEstimate};

/// `𝒯_⟨g⟩(M) = -∫_0^∞ (𝒯_⟨g⟩(t) - (1 - e^{-t}) 𝒯_⟨g⟩(∞)) dt/t`.
///
/// The subtraction of the large-time limit is always applied, also when the
/// limit is zero.
pub fn torsion_integral(series: &TorsionSeries, tolerance: f64) -> Result<QuadEstimate> {
    let limit = series.limit_at_infinity();
    let integrand = |t: f64| -> Complex64 {
        // 1 - e^{-t} without cancellation for small t.
        let damping = -(-t).exp_m1();
        -(series.value(t) - limit * damping)
    };
    integrate_half_line(
        &integrand,
        HalfLineMeasure::Logarithmic,
        &HalfLineOptions::with_tolerance(tolerance),
    )
}

/// `η_⟨g⟩(M) = (2/√π) ∫_0^∞ η_⟨g⟩(s) ds`.
pub fn eta_integral(sampler: &EtaSampler, tolerance: f64) -> Result<QuadEstimate> {
    let scale = 2.0 / PI.sqrt();
    // The driver's tolerance applies to the unscaled integral.
    let mut est = integrate_half_line(
        &|s| sampler.eval(s),
        HalfLineMeasure::Lebesgue,
        &HalfLineOptions::with_tolerance(tolerance / scale),
    )?;
    est.value *= scale;
    est.error *= scale;
    est.tail *= scale;
    Ok(est)
}

/// `(4πt)^{-1/2} e^{-l²/4t} e^{-tc²}`, the shape shared by all hyperbolic
/// heat-kernel contributions.
pub fn gaussian_kernel(length: f64, decay: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let exponent = -length * length / (4.0 * t) - t * decay * decay;
    exponent.exp() / (4.0 * PI * t).sqrt()
}

/// `∫_0^∞ (4πt)^{-1/2} e^{-l²/4t} e^{-tc²} dt/t = e^{-lc}/l`.
pub fn gaussian_moment(length: f64, decay: f64) -> Result<f64> {
    check_moment_args(length, decay)?;
    Ok((-length * decay).exp() / length)
}

/// The same moment computed by quadrature, for validation.
pub fn gaussian_moment_quadrature(length: f64, decay: f64, tolerance: f64) -> Result<QuadEstimate> {
    check_moment_args(length, decay)?;
    integrate_half_line(
        &|t| Complex64::new(gaussian_kernel(length, decay, t), 0.0),
        HalfLineMeasure::Logarithmic,
        &HalfLineOptions::with_tolerance(tolerance),
    )
}

fn check_moment_args(length: f64, decay: f64) -> Result<()> {
    if !length.is_finite() || length <= 0.0 {
        return Err(DelocError::Domain(alloc::format!(
            "length must be positive, got {length}"
        )));
    }
    if !decay.is_finite() || decay < 0.0 {
        return Err(DelocError::Domain(alloc::format!(
            "decay must be nonnegative, got {decay}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_TOLERANCE;

    #[test]
    fn gaussian_moment_values() {
        assert_eq!(gaussian_moment(1.0, 0.0).unwrap(), 1.0);
        let v = gaussian_moment(2.0, 1.0).unwrap();
        assert!((v - 0.067_667_641_618_306_35).abs() < 1e-15);
        assert!(gaussian_moment(0.0, 1.0).is_err());
        assert!(gaussian_moment(-1.0, 1.0).is_err());
    }

    #[test]
    fn gaussian_moment_by_quadrature() {
        let est = gaussian_moment_quadrature(1.0, 0.0, DEFAULT_TOLERANCE).unwrap();
        assert!((est.value.re - 1.0).abs() < 1e-10, "{est:?}");
    }

    #[test]
    fn zero_series_integrates_to_zero() {
        let series = TorsionSeries::from_fn(|_| Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        assert_eq!(
            torsion_integral(&series, DEFAULT_TOLERANCE).unwrap().value,
            Complex64::new(0.0, 0.0)
        );
        assert_eq!(
            eta_integral(&EtaSampler::zero(), DEFAULT_TOLERANCE).unwrap().value,
            Complex64::new(0.0, 0.0)
        );
    }

    #[test]
    fn gaussian_series_gives_minus_moment() {
        let series = TorsionSeries::from_fn(
            |t| Complex64::new(gaussian_kernel(1.0, 0.0, t), 0.0),
            Complex64::new(0.0, 0.0),
        );
        let est = torsion_integral(&series, DEFAULT_TOLERANCE).unwrap();
        assert!((est.value.re + 1.0).abs() < 1e-10, "{est:?}");
    }

    #[test]
    fn limit_subtraction_is_applied() {
        // 𝒯(t) = L (1 - e^{-t}) + kernel: the limit term cancels exactly.
        let limit = Complex64::new(0.75, -0.5);
        let series = TorsionSeries::from_fn(
            move |t| limit * -(-t).exp_m1() + Complex64::new(gaussian_kernel(2.0, 1.0, t), 0.0),
            limit,
        );
        let est = torsion_integral(&series, DEFAULT_TOLERANCE).unwrap();
        assert!((est.value.re + (-2.0f64).exp() / 2.0).abs() < 1e-10);
        assert!(est.value.im.abs() < 1e-12);
    }

    #[test]
    fn non_decaying_series_reports_tail() {
        // Missing limit subtraction: 𝒯(t) → 1 but 𝒯(∞) declared 0.
        let series = TorsionSeries::from_fn(|t| Complex64::new(-(-t).exp_m1(), 0.0), Complex64::new(0.0, 0.0));
        let err = torsion_integral(&series, DEFAULT_TOLERANCE).unwrap_err();
        match err {
            DelocError::Convergence { tail, .. } => assert!(tail > 1e-10),
            other => panic!("unexpected {other:?}"),
        }
    }
}
