//! Adaptive Gauss–Kronrod (7/15) quadrature for complex-valued integrands,
//! and an improper-integral driver on `(0, ∞)` working in `u = ln x`.
//!
//! The half-line driver integrates panels of fixed width outward from
//! `u = 0`. Each panel also yields its L¹ mass; once the masses of the
//! outermost panels decay geometrically the remaining tail is bounded by the
//! geometric extrapolation `m q / (1 - q)` and reported with the result.

use alloc::collections::BinaryHeap;
use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{DelocError, Result};

// Gauss–Kronrod 7/15 nodes and weights, quoted to the digits of the
// published tables.

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Result of one 15-point Kronrod panel.
#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    /// Kronrod estimate of ∫|f|.
    mass: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> Complex64 + ?Sized>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut mass = fc.norm() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += (f1 + f2) * WGK[j];
        mass += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let raw_error = ((kronrod - gauss) * half).norm();
    // QUADPACK-style rescaling of the Gauss/Kronrod difference.
    let mass_abs = mass * half.abs();
    let error = if mass_abs > 0.0 && raw_error > 0.0 {
        let scaled = mass_abs * (200.0 * raw_error / mass_abs).powf(1.5).min(1.0);
        scaled.max(50.0 * f64::EPSILON * mass_abs)
    } else {
        raw_error
    };
    Panel {
        a,
        b,
        value,
        mass: mass_abs,
        error,
    }
}

/// Outcome of a quadrature with its error budget split into the interior
/// error estimate and the extrapolated tails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadEstimate {
    pub value: Complex64,
    pub error: f64,
    pub tail: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl QuadOptions {
    pub fn with_tolerance(tol: f64) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: tol,
            ..Self::default()
        }
    }

    fn budget(&self, value: Complex64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.norm())
    }
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: crate::DEFAULT_TOLERANCE,
            rel_tol: crate::DEFAULT_TOLERANCE,
            max_panels: 2000,
        }
    }
}

/// Adaptive quadrature on a finite interval with global bisection of the
/// worst panel.
pub fn integrate<F>(f: &F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadEstimate>
where
    F: Fn(f64) -> Complex64 + ?Sized,
{
    let (est, _) = integrate_with_mass(f, a, b, opts)?;
    Ok(est)
}

fn integrate_with_mass<F>(f: &F, a: f64, b: f64, opts: &QuadOptions) -> Result<(QuadEstimate, f64)>
where
    F: Fn(f64) -> Complex64 + ?Sized,
{
    let first = kronrod(f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut value = first.value;
    let mut error = first.error;
    let mut mass = first.mass;
    let mut evaluations = 15;
    while error > opts.budget(value) {
        if heap.len() >= opts.max_panels {
            return Err(DelocError::Convergence {
                partial: value,
                tail: error,
                detail: format!("adaptive quadrature on [{a}, {b}] exhausted {} panels", opts.max_panels),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let left = kronrod(f, worst.a, mid);
        let right = kronrod(f, mid, worst.b);
        evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        mass += left.mass + right.mass - worst.mass;
        heap.push(left);
        heap.push(right);
        if error <= opts.budget(value) {
            break;
        }
        // Re-sum to shed accumulated cancellation once in a while.
        if heap.len() % 64 == 0 {
            value = heap.iter().map(|p| p.value).sum();
            error = heap.iter().map(|p| p.error).sum();
        }
    }
    value = heap.iter().map(|p| p.value).sum();
    error = heap.iter().map(|p| p.error).sum();
    Ok((
        QuadEstimate {
            value,
            error,
            tail: 0.0,
            evaluations,
        },
        mass,
    ))
}

/// Measure on the half line in which an integrand is given.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfLineMeasure {
    /// `∫_0^∞ h(x) dx/x`
    Logarithmic,
    /// `∫_0^∞ h(x) dx`
    Lebesgue,
}

/// Configuration of the half-line driver in `u = ln x`.
#[derive(Debug, Clone, Copy)]
pub struct HalfLineOptions {
    pub quad: QuadOptions,
    /// Width of each outward panel in `u`.
    pub panel_width: f64,
    /// Largest `|u|` reached before declaring a non-convergent tail.
    pub max_log_extent: f64,
}

impl Default for HalfLineOptions {
    fn default() -> Self {
        Self {
            quad: QuadOptions::default(),
            panel_width: 2.0,
            max_log_extent: 160.0,
        }
    }
}

impl HalfLineOptions {
    pub fn with_tolerance(tol: f64) -> Self {
        Self {
            quad: QuadOptions::with_tolerance(tol),
            ..Self::default()
        }
    }
}

/// Tracks the outward march on one side of the `u`-axis.
struct TailState {
    edge: f64,
    direction: f64,
    masses: Vec<f64>,
    tail: f64,
    done: bool,
}

impl TailState {
    fn new(direction: f64) -> Self {
        Self {
            edge: 0.0,
            direction,
            masses: Vec::new(),
            tail: f64::INFINITY,
            done: false,
        }
    }

    /// Geometric bound on the unexplored tail from the last panel masses.
    fn update_tail(&mut self) {
        let n = self.masses.len();
        if n < 3 {
            return;
        }
        let last = self.masses[n - 1];
        let prev = self.masses[n - 2];
        let prev2 = self.masses[n - 3];
        if last == 0.0 && prev == 0.0 {
            self.tail = 0.0;
            return;
        }
        if last < prev && prev <= prev2 {
            let q = (last / prev).max(if prev2 > 0.0 { prev / prev2 } else { 0.0 });
            self.tail = if q < 1.0 { last * q / (1.0 - q) } else { f64::INFINITY };
        } else {
            self.tail = f64::INFINITY;
        }
    }
}

/// `∫_0^∞ h(x) dμ(x)` through the substitution `x = e^u`.
///
/// The integrand must decay at both ends of the `u`-axis; the decay is
/// certified only by the observed geometric decrease of panel masses, and the
/// resulting tail bound is returned in [`QuadEstimate::tail`]. A tail that
/// does not fall below the budget before `|u|` reaches
/// `max_log_extent` is reported as a convergence error carrying the partial
/// value.
pub fn integrate_half_line<F>(h: &F, measure: HalfLineMeasure, opts: &HalfLineOptions) -> Result<QuadEstimate>
where
    F: Fn(f64) -> Complex64 + ?Sized,
{
    let g = |u: f64| -> Complex64 {
        let x = u.exp();
        if x == 0.0 || !x.is_finite() {
            return Complex64::new(0.0, 0.0);
        }
        let v = h(x);
        match measure {
            HalfLineMeasure::Logarithmic => v,
            HalfLineMeasure::Lebesgue => v * x,
        }
    };

    // Interior panel tolerances are a fraction of the global budget so that
    // the sum over many panels stays within it.
    let panel_opts = QuadOptions {
        abs_tol: opts.quad.abs_tol * 0.05,
        rel_tol: opts.quad.rel_tol * 0.05,
        max_panels: opts.quad.max_panels,
    };

    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut evaluations = 0;
    let mut sides = [TailState::new(-1.0), TailState::new(1.0)];

    loop {
        let mut progressed = false;
        for side in sides.iter_mut() {
            if side.done {
                continue;
            }
            let (a, b) = if side.direction > 0.0 {
                (side.edge, side.edge + opts.panel_width)
            } else {
                (side.edge - opts.panel_width, side.edge)
            };
            let (est, mass) = integrate_with_mass(&g, a, b, &panel_opts)?;
            value += est.value;
            error += est.error;
            evaluations += est.evaluations;
            side.edge = if side.direction > 0.0 { b } else { a };
            side.masses.push(mass);
            side.update_tail();
            progressed = true;
        }
        let budget = opts.quad.budget(value);
        for side in sides.iter_mut() {
            if !side.done && side.masses.len() >= 3 && side.tail <= 0.05 * budget {
                side.done = true;
            }
        }
        if sides.iter().all(|s| s.done) {
            break;
        }
        if sides.iter().any(|s| !s.done && s.edge.abs() >= opts.max_log_extent) || !progressed {
            let tail = sides.iter().map(|s| s.tail).fold(0.0, f64::max);
            return Err(DelocError::Convergence {
                partial: value,
                tail,
                detail: format!(
                    "half-line tail did not decay below {budget:e} within |ln x| <= {}",
                    opts.max_log_extent
                ),
            });
        }
    }

    let tail = sides[0].tail + sides[1].tail;
    Ok(QuadEstimate {
        value,
        error,
        tail,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn real(f: impl Fn(f64) -> f64) -> impl Fn(f64) -> Complex64 {
        move |x| Complex64::new(f(x), 0.0)
    }

    #[test]
    fn polynomial_is_exact() {
        let est = integrate(&real(|x| x * x * x - 2.0 * x), 0.0, 2.0, &QuadOptions::default()).unwrap();
        assert!((est.value.re - 0.0).abs() < 1e-14);
    }

    #[test]
    fn oscillatory_finite_interval() {
        let est = integrate(&real(|x| (10.0 * x).sin()), 0.0, PI, &QuadOptions::default()).unwrap();
        assert!((est.value.re - 0.0).abs() < 1e-10);
        let est = integrate(&real(|x| x.sqrt()), 0.0, 1.0, &QuadOptions::default()).unwrap();
        assert!((est.value.re - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn half_line_exponential() {
        let est = integrate_half_line(
            &real(|x| (-x).exp()),
            HalfLineMeasure::Lebesgue,
            &HalfLineOptions::default(),
        )
        .unwrap();
        assert!((est.value.re - 1.0).abs() < 1e-10, "{est:?}");
        assert!(est.tail < 1e-11);
    }

    #[test]
    fn half_line_power_decay_in_log_measure() {
        // ∫_0^∞ x/(1+x)^2 dx/x = 1
        let est = integrate_half_line(
            &real(|x| x / ((1.0 + x) * (1.0 + x))),
            HalfLineMeasure::Logarithmic,
            &HalfLineOptions::default(),
        )
        .unwrap();
        assert!((est.value.re - 1.0).abs() < 1e-9, "{est:?}");
    }

    #[test]
    fn non_integrable_tail_is_reported() {
        // ∫ dx/x diverges at both ends.
        let err = integrate_half_line(
            &real(|_| 1.0),
            HalfLineMeasure::Logarithmic,
            &HalfLineOptions::default(),
        )
        .unwrap_err();
        assert!(err.is_convergence());
    }
}
