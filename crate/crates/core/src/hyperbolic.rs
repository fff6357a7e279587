//! Closed hyperbolic manifolds of dimension `2n+1`: delocalized torsion and
//! eta at a loxodromic class from its geodesic data, the Selberg and Millson
//! heat-kernel representations they come from, and recovery of the geodesic
//! length from the torsion of powers.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{DelocError, Result};
use crate::integrals::gaussian_kernel;
use crate::invariants::{EtaSampler, HeatTraceSampler};

/// Conjugacy class of a loxodromic element `g` of `π_1(M)`, `M = Γ\H^{2n+1}`.
///
/// `g` is the `k`-th power of a primitive element; `l` is its translation
/// length and `angles` are the rotation angles of its holonomy `m ∈ SO(2n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicClass {
    n: usize,
    k: u32,
    l: f64,
    angles: Vec<f64>,
}

impl GeodesicClass {
    pub fn new(n: usize, k: u32, l: f64, angles: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(DelocError::Domain("n must be positive (d = 2n+1 ≥ 3)".into()));
        }
        if k == 0 {
            return Err(DelocError::Domain("multiplicity k must be at least 1".into()));
        }
        if !l.is_finite() || l <= 0.0 {
            return Err(DelocError::Domain(format!("length must be positive, got {l}")));
        }
        if angles.len() != n {
            return Err(DelocError::Domain(format!(
                "expected {n} holonomy angles, got {}",
                angles.len()
            )));
        }
        if let Some(a) = angles.iter().find(|a| !(**a > -PI && **a <= PI)) {
            return Err(DelocError::Domain(format!("angle {a} outside (-π, π]")));
        }
        Ok(Self { n, k, l, angles })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dimension(&self) -> usize {
        2 * self.n + 1
    }

    pub fn multiplicity(&self) -> u32 {
        self.k
    }

    pub fn length(&self) -> f64 {
        self.l
    }

    pub fn prime_length(&self) -> f64 {
        self.l / f64::from(self.k)
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// `det(I - e^{-l} m) = Π_j (1 - 2e^{-l} cos θ_j + e^{-2l})`.
    pub fn holonomy_determinant(&self) -> f64 {
        let q = (-self.l).exp();
        let det: f64 = self.angles.iter().map(|&a| 1.0 - 2.0 * q * a.cos() + q * q).product();
        debug_assert!(det > 0.0, "holonomy determinant must be positive");
        det
    }

    /// `μ_j = e^{(l + iθ_j)/2}`.
    pub fn mu(&self, j: usize) -> Complex64 {
        Complex64::new(self.l / 2.0, self.angles[j] / 2.0).exp()
    }

    /// `Π_j sin θ_j / Π_j |μ_j - μ_j^{-1}|²`, shared by the eta formulas.
    fn sine_ratio(&self) -> f64 {
        self.angles
            .iter()
            .map(|&a| a.sin() / (self.l.exp() + (-self.l).exp() - 2.0 * a.cos()))
            .product()
    }
}

/// `Tr σ_j(m)`: the `j`-th elementary symmetric polynomial of the
/// eigenvalues `e^{±iθ_1}, …, e^{±iθ_n}`.
pub fn sigma_trace(angles: &[f64], j: usize) -> Result<f64> {
    let traces = sigma_traces(angles);
    traces
        .get(j)
        .copied()
        .ok_or_else(|| DelocError::Domain(format!("exterior degree {j} exceeds {}", 2 * angles.len())))
}

/// `Tr σ_j(m)` for all `j ∈ 0..=2n`, as the coefficients of
/// `Π_j (1 + 2cos θ_j x + x²)`.
pub fn sigma_traces(angles: &[f64]) -> Vec<f64> {
    let mut coeffs = vec![1.0];
    for &a in angles {
        let c = 2.0 * a.cos();
        let mut next = vec![0.0; coeffs.len() + 2];
        for (i, &v) in coeffs.iter().enumerate() {
            next[i] += v;
            next[i + 1] += c * v;
            next[i + 2] += v;
        }
        coeffs = next;
    }
    coeffs
}

/// One term `coefficient · (4πt)^{-1/2} e^{-l²/4t} e^{-t c_j²}` of the
/// Selberg expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelbergKernel {
    pub degree: usize,
    pub coefficient: f64,
    pub exponent: f64,
    pub length: f64,
}

impl SelbergKernel {
    pub fn eval(&self, t: f64) -> f64 {
        self.coefficient * gaussian_kernel(self.length, self.exponent, t)
    }
}

/// Fried's kernels `G_t(σ_j)`, `j = 0..=2n`.
///
/// The coefficient is `l · Tr σ_j(m) e^{-nl} / (k det(I - e^{-l}m))`; the
/// extra factor `l` makes `∫ G_t dt/t` reproduce the closed-form torsion.
pub fn selberg_kernels(g: &GeodesicClass) -> Vec<SelbergKernel> {
    let scale = g.l * (-(g.n as f64) * g.l).exp() / (f64::from(g.k) * g.holonomy_determinant());
    sigma_traces(&g.angles)
        .into_iter()
        .enumerate()
        .map(|(j, tr)| SelbergKernel {
            degree: j,
            coefficient: scale * tr,
            exponent: (g.n as f64 - j as f64).abs(),
            length: g.l,
        })
        .collect()
}

/// `t ↦ Tr_⟨g⟩(e^{-tΔ̂_p}) = G_t(σ_p) + G_t(σ_{p-1})`.
pub fn selberg_heat_trace(g: &GeodesicClass, p: usize) -> Result<HeatTraceSampler> {
    let d = g.dimension();
    if p > d {
        return Err(DelocError::Domain(format!("form degree {p} exceeds dimension {d}")));
    }
    let kernels: Vec<SelbergKernel> = selberg_kernels(g)
        .into_iter()
        .filter(|k| k.degree == p || k.degree + 1 == p)
        .collect();
    HeatTraceSampler::new(p, d, move |t| {
        Complex64::new(kernels.iter().map(|k| k.eval(t)).sum(), 0.0)
    })
}

/// All `2n+2` heat-trace samplers of `g`, in degree order.
pub fn selberg_heat_traces(g: &GeodesicClass) -> Result<Vec<HeatTraceSampler>> {
    (0..=g.dimension()).map(|p| selberg_heat_trace(g, p)).collect()
}

/// `𝒯_⟨g⟩(M) = e^{-nl}/(k det(I - e^{-l}m)) Σ_j (-1)^j e^{-l|n-j|} Tr σ_j(m)`.
pub fn torsion_closed(g: &GeodesicClass) -> f64 {
    let n = g.n as f64;
    let sum: f64 = sigma_traces(&g.angles)
        .iter()
        .enumerate()
        .map(|(j, tr)| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * (-g.l * (n - j as f64).abs()).exp() * tr
        })
        .sum();
    (-n * g.l).exp() / (f64::from(g.k) * g.holonomy_determinant()) * sum
}

/// `η_⟨g⟩(M)`: zero for even `n`, otherwise
/// `(2i)^{n+1}/(2πk) · Π sin θ_j / Π |μ_j - μ_j^{-1}|²`.
pub fn eta_closed(g: &GeodesicClass) -> f64 {
    if g.n.is_multiple_of(2) {
        return 0.0;
    }
    // (2i)^{n+1} = (-4)^{(n+1)/2} for odd n.
    let prefactor = (-4.0f64).powi(g.n.div_ceil(2) as i32);
    prefactor / (2.0 * PI * f64::from(g.k)) * g.sine_ratio()
}

/// Millson's eta density
/// `(2i)^n (2πi/k) l² Π sin θ_j / Π |μ_j - μ_j^{-1}|² · e^{-l²/4s²} / ((4π)^{3/2} s³)`.
///
/// Only odd `n` is supported; for even `n` the invariant vanishes and no
/// kernel is available.
pub fn millson_eta_sampler(g: &GeodesicClass) -> Result<EtaSampler> {
    if g.n.is_multiple_of(2) {
        return Err(DelocError::Unsupported(format!(
            "no Millson kernel for n = {} (eta vanishes for even n)",
            g.n
        )));
    }
    // (2i)^n · i = 2^n i^{n+1}, real for odd n.
    let phase = (-1.0f64).powi(g.n.div_ceil(2) as i32) * 2.0f64.powi(g.n as i32);
    let l = g.l;
    let coefficient = phase * 2.0 * PI / f64::from(g.k) * l * l * g.sine_ratio() / (4.0 * PI).powf(1.5);
    Ok(EtaSampler::new(move |s| {
        if s <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::new(coefficient * (-l * l / (4.0 * s * s)).exp() / (s * s * s), 0.0)
    }))
}

/// Class of `g^r`: length `rl`, multiplicity `rk`, angles `rθ_j` reduced to
/// `(-π, π]`.
pub fn power_class(g: &GeodesicClass, r: u32) -> Result<GeodesicClass> {
    if r == 0 {
        return Err(DelocError::Domain("power must be at least 1".into()));
    }
    let rf = f64::from(r);
    let angles = g.angles.iter().map(|&a| reduce_angle(rf * a)).collect();
    GeodesicClass::new(g.n, g.k * r, g.l * rf, angles)
}

fn reduce_angle(a: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut x = a - two_pi * (a / two_pi).floor();
    if x > PI {
        x -= two_pi;
    }
    // floor can leave x = -π + ε·… on the boundary; map it to +π.
    if x <= -PI {
        x += two_pi;
    }
    x
}

/// Delocalized Betti numbers of a hyperbolic manifold vanish at every
/// nontrivial class.
pub fn hyperbolic_betti(g: &GeodesicClass, p: usize) -> Result<f64> {
    if p > g.dimension() {
        return Err(DelocError::Domain(format!(
            "form degree {p} exceeds dimension {}",
            g.dimension()
        )));
    }
    Ok(0.0)
}

/// Large-time behaviour of the degree-`p` heat trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LargeTimeDecay {
    /// `e^{-t c²}` up to the Gaussian prefactor.
    Exponential { rate: f64 },
    /// `t^{-1/2}`, from the `c_j = 0` kernel.
    Power { exponent: f64 },
}

pub fn large_time_decay(g: &GeodesicClass, p: usize) -> Result<LargeTimeDecay> {
    let d = g.dimension();
    if p > d {
        return Err(DelocError::Domain(format!("form degree {p} exceeds dimension {d}")));
    }
    let c = [Some(p), p.checked_sub(1)]
        .into_iter()
        .flatten()
        .filter(|&j| j <= 2 * g.n)
        .map(|j| (g.n as f64 - j as f64).abs())
        .fold(f64::INFINITY, f64::min);
    Ok(if c == 0.0 {
        LargeTimeDecay::Power { exponent: 0.5 }
    } else {
        LargeTimeDecay::Exponential { rate: c * c }
    })
}

/// Both sides of `𝒯_⟨g⟩ - iπ η_⟨g⟩ = (2/k) / (1 - μ_1²)` for `n = 1`.
pub fn n1_identity(g: &GeodesicClass) -> Result<(Complex64, Complex64)> {
    if g.n != 1 {
        return Err(DelocError::Domain(format!("identity requires n = 1, got n = {}", g.n)));
    }
    let lhs = Complex64::new(torsion_closed(g), -PI * eta_closed(g));
    let mu2 = g.mu(0) * g.mu(0);
    let rhs = Complex64::new(2.0 / f64::from(g.k), 0.0) / (Complex64::new(1.0, 0.0) - mu2);
    Ok((lhs, rhs))
}

/// Tunables for [`recover_length`].
#[derive(Debug, Clone, PartialEq)]
pub struct LengthFitOptions {
    /// Number of smallest powers to discard before fitting.
    pub drop_first: usize,
    /// Log-linear RMS residual above which the matrix-pencil fit is tried.
    pub residual_threshold: f64,
    /// Relative singular-value cutoff for the pencil's signal subspace.
    pub pencil_rank_tol: f64,
}

impl Default for LengthFitOptions {
    fn default() -> Self {
        Self {
            drop_first: 0,
            residual_threshold: 1e-6,
            pencil_rank_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LengthFitMethod {
    /// Least-squares slope of `ln|𝒯_r|` against `r`.
    LogLinear,
    /// Slowest decaying mode of a matrix-pencil fit to `r·𝒯_r` (or `𝒯_r`).
    MatrixPencil { multiplicity_scaled: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LengthFit {
    pub length: f64,
    /// RMS residual of the method that produced `length`.
    pub residual: f64,
    /// RMS residual of the log-linear fit, always computed.
    pub log_linear_residual: f64,
    pub method: LengthFitMethod,
    pub points_used: usize,
    pub warnings: Vec<String>,
}

/// Estimates `l` from values `(r, 𝒯_⟨g^r⟩)` using
/// `l = (1/n) sup{α : 𝒯_⟨g^r⟩ = O(e^{-αr})}`.
///
/// The log-linear regression is exact for a pure exponential. The holonomy
/// makes `|𝒯_r|` oscillate with `r`; when that leaves a large residual and the
/// powers are consecutive, the dominant decay rate is instead read off a
/// matrix-pencil (Prony) fit, which resolves the oscillating modes.
pub fn recover_length(values: &[(u32, f64)], n: usize, options: &LengthFitOptions) -> Result<LengthFit> {
    if n == 0 {
        return Err(DelocError::Domain("n must be positive".into()));
    }
    let mut pts: Vec<(u32, f64)> = values.to_vec();
    pts.sort_by_key(|p| p.0);
    if pts.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(DelocError::Schema("duplicate power r".into()));
    }
    if let Some(p) = pts.iter().find(|p| p.0 == 0 || !p.1.is_finite()) {
        return Err(DelocError::Schema(format!(
            "invalid sample (r = {}, value = {})",
            p.0, p.1
        )));
    }
    let pts: Vec<(u32, f64)> = pts.into_iter().skip(options.drop_first).collect();
    let usable: Vec<(f64, f64)> = pts
        .iter()
        .filter(|p| p.1 != 0.0)
        .map(|&(r, v)| (f64::from(r), v.abs().ln()))
        .collect();
    if usable.len() < 5 {
        return Err(DelocError::InsufficientData(format!(
            "{} nonzero samples after dropping, at least 5 required",
            usable.len()
        )));
    }
    let (slope, rms) = least_squares_slope(&usable);
    let mut warnings = Vec::new();
    let log_linear = LengthFit {
        length: -slope / n as f64,
        residual: rms,
        log_linear_residual: rms,
        method: LengthFitMethod::LogLinear,
        points_used: usable.len(),
        warnings: Vec::new(),
    };
    if rms <= options.residual_threshold {
        return Ok(log_linear);
    }
    let consecutive = pts.windows(2).all(|w| w[1].0 == w[0].0 + 1);
    if consecutive && pts.len() >= 8 {
        let best = [true, false]
            .into_iter()
            .filter_map(|scaled| {
                let series: Vec<f64> = pts
                    .iter()
                    .map(|&(r, v)| if scaled { f64::from(r) * v } else { v })
                    .collect();
                pencil_decay(&series, options.pencil_rank_tol).map(|fit| (scaled, fit))
            })
            .min_by(|a, b| a.1.relative_residual.total_cmp(&b.1.relative_residual));
        if let Some((scaled, fit)) = best {
            if fit.relative_residual < options.residual_threshold {
                return Ok(LengthFit {
                    length: -fit.dominant_modulus.ln() / n as f64,
                    residual: fit.relative_residual,
                    log_linear_residual: rms,
                    method: LengthFitMethod::MatrixPencil {
                        multiplicity_scaled: scaled,
                    },
                    points_used: pts.len(),
                    warnings,
                });
            }
            warnings.push(format!(
                "matrix-pencil reconstruction residual {:.3e} above threshold",
                fit.relative_residual
            ));
        }
    } else {
        warnings.push("powers are not consecutive; matrix-pencil fallback unavailable".into());
    }
    let rises = usable.windows(2).any(|w| w[1].1 > w[0].1 + 2.0 * rms);
    if rises {
        warnings.push(format!(
            "unreliable fit: |values| are non-monotone beyond the regression residual {rms:.3e}"
        ));
    } else {
        warnings.push(format!("unreliable fit: log-linear residual {rms:.3e}"));
    }
    Ok(LengthFit { warnings, ..log_linear })
}

fn least_squares_slope(pts: &[(f64, f64)]) -> (f64, f64) {
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / m, sy / m);
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), p| {
        (a + (p.0 - mx) * (p.1 - my), b + (p.0 - mx) * (p.0 - mx))
    });
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    (slope, (ss / m).sqrt())
}

struct PencilFit {
    dominant_modulus: f64,
    relative_residual: f64,
}

/// Matrix-pencil estimate of the slowest decaying mode with non-negligible
/// amplitude in `y_i = Σ a_m z_m^i`.
fn pencil_decay(y: &[f64], rank_tol: f64) -> Option<PencilFit> {
    let len = y.len();
    let pencil = (len / 3).clamp(2, 12);
    let rows = len - pencil;
    let hankel = DMatrix::from_fn(rows, pencil + 1, |i, j| y[i + j]);
    let svd = hankel.svd(false, true);
    let v_t = svd.v_t?;
    let sigma_max = svd.singular_values.max();
    if sigma_max == 0.0 {
        return None;
    }
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > rank_tol * sigma_max)
        .count();
    // Rows of v_t span the signal subspace; columns index the lag.
    let v = v_t.rows(0, rank).transpose();
    let v1 = v.rows(0, pencil).into_owned();
    let v2 = v.rows(1, pencil).into_owned();
    let pinv = v1.pseudo_inverse(1e-14).ok()?;
    let modes: Vec<Complex64> = (pinv * v2).complex_eigenvalues().iter().copied().collect();
    if modes.is_empty() {
        return None;
    }
    // Amplitudes by least squares on the Vandermonde system.
    let vander = DMatrix::from_fn(len, modes.len(), |i, m| modes[m].powu(i as u32));
    let rhs = DMatrix::from_fn(len, 1, |i, _| Complex64::new(y[i], 0.0));
    let amps = vander.clone().svd(true, true).solve(&rhs, 1e-14).ok()?;
    let recon = &vander * &amps;
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let residual = (0..len).map(|i| (recon[(i, 0)].re - y[i]).powi(2)).sum::<f64>().sqrt() / (len as f64).sqrt();
    let relative_residual = residual / scale;
    let dominant_modulus = modes
        .iter()
        .zip(amps.iter())
        .filter(|(_, a)| a.norm() > 1e-8 * scale)
        .map(|(z, _)| z.norm())
        .fold(0.0, f64::max);
    (dominant_modulus > 0.0 && dominant_modulus < 1.0).then_some(PencilFit {
        dominant_modulus,
        relative_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrals::{eta_integral, torsion_integral};
    use crate::invariants::assemble_torsion_series;
    use core::f64::consts::{E, FRAC_PI_2};

    fn g(n: usize, k: u32, l: f64, angles: &[f64]) -> GeodesicClass {
        GeodesicClass::new(n, k, l, angles.to_vec()).unwrap()
    }

    #[test]
    fn sigma_trace_examples() {
        assert_eq!(sigma_trace(&[0.0], 1).unwrap(), 2.0);
        assert!(sigma_trace(&[FRAC_PI_2], 1).unwrap().abs() < 1e-15);
        assert!((sigma_trace(&[FRAC_PI_2], 2).unwrap() - 1.0).abs() < 1e-15);
        assert!((sigma_trace(&[FRAC_PI_2, FRAC_PI_2], 2).unwrap() - 2.0).abs() < 1e-15);
        assert!(sigma_trace(&[0.0], 3).is_err());
    }

    #[test]
    fn torsion_examples() {
        let e1 = (-1.0f64).exp();
        assert!((torsion_closed(&g(1, 1, 1.0, &[0.0])) + 2.0 * e1 / (1.0 - e1)).abs() < 1e-14);
        assert!((torsion_closed(&g(1, 1, 1.0, &[PI])) - 2.0 * e1 / (1.0 + e1)).abs() < 1e-14);
        assert!((torsion_closed(&g(1, 3, 1.0, &[PI])) - 2.0 * e1 / (1.0 + e1) / 3.0).abs() < 1e-14);
    }

    #[test]
    fn eta_examples() {
        assert_eq!(eta_closed(&g(2, 1, 1.3, &[0.4, -1.0])), 0.0);
        assert!(eta_closed(&g(1, 1, 1.0, &[PI])).abs() < 1e-16);
        let v = eta_closed(&g(1, 1, 1.0, &[FRAC_PI_2]));
        assert!((v + 2.0 / (PI * (E + 1.0 / E))).abs() < 1e-15);
    }

    #[test]
    fn selberg_oracle_matches_closed_form() {
        let cls = g(1, 1, 1.0, &[0.0]);
        let series = assemble_torsion_series(selberg_heat_traces(&cls).unwrap(), Complex64::new(0.0, 0.0)).unwrap();
        let kernels = selberg_kernels(&cls);
        for t in [0.3, 1.0, 7.0] {
            let telescoped: f64 = kernels
                .iter()
                .map(|k| if k.degree % 2 == 0 { -k.eval(t) } else { k.eval(t) })
                .sum();
            assert!((series.value(t).re - telescoped).abs() < 1e-12);
        }
        let est = torsion_integral(&series, 1e-10).unwrap();
        assert!((est.value.re - torsion_closed(&cls)).abs() < 1e-9, "{est:?}");
        assert!(selberg_heat_trace(&cls, 4).is_err());
    }

    #[test]
    fn millson_oracle_matches_closed_form() {
        let cls = g(1, 1, 1.0, &[FRAC_PI_2]);
        let est = eta_integral(&millson_eta_sampler(&cls).unwrap(), 1e-10).unwrap();
        assert!((est.value.re - eta_closed(&cls)).abs() < 1e-9);
        let flat = millson_eta_sampler(&g(1, 1, 1.0, &[PI])).unwrap();
        assert!(flat.eval(0.7).norm() < 1e-16);
        assert!(millson_eta_sampler(&g(2, 1, 1.0, &[0.1, 0.2])).is_err());
    }

    #[test]
    fn power_class_examples() {
        let cls = g(1, 1, 1.0, &[FRAC_PI_2]);
        assert_eq!(power_class(&cls, 1).unwrap(), cls);
        let sq = power_class(&cls, 2).unwrap();
        assert_eq!((sq.length(), sq.multiplicity()), (2.0, 2));
        assert!((sq.angles()[0] - PI).abs() < 1e-15);
        assert!((reduce_angle(-PI) - PI).abs() < 1e-15);
        assert!((reduce_angle(3.0 * PI) - PI).abs() < 1e-12);
    }

    #[test]
    fn n1_identity_examples() {
        for (theta, expected) in [
            (0.0, Complex64::new(2.0 / (1.0 - E), 0.0)),
            (PI, Complex64::new(2.0 / (1.0 + E), 0.0)),
            (FRAC_PI_2, Complex64::new(2.0, 2.0 * E) / (1.0 + E * E)),
        ] {
            let (lhs, rhs) = n1_identity(&g(1, 1, 1.0, &[theta])).unwrap();
            assert!((lhs - rhs).norm() < 1e-12, "θ={theta}: {lhs} vs {rhs}");
            assert!((rhs - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn length_recovery() {
        let exact: Vec<(u32, f64)> = (1..=20).map(|r| (r, 3.0 * (-0.7 * f64::from(r)).exp())).collect();
        let fit = recover_length(&exact, 1, &LengthFitOptions::default()).unwrap();
        assert!((fit.length - 0.7).abs() < 1e-12);
        assert_eq!(fit.method, LengthFitMethod::LogLinear);

        let base = g(1, 1, 0.7, &[1.0]);
        let tors: Vec<(u32, f64)> = (1..=30)
            .map(|r| (r, torsion_closed(&power_class(&base, r).unwrap())))
            .collect();
        let fit = recover_length(&tors, 1, &LengthFitOptions::default()).unwrap();
        assert!((fit.length - 0.7).abs() < 1e-3, "{fit:?}");

        assert!(matches!(
            recover_length(&exact[..4], 1, &LengthFitOptions::default()),
            Err(DelocError::InsufficientData(_))
        ));
    }

    #[test]
    fn betti_vanishes_and_decays() {
        let cls = g(1, 1, 1.0, &[0.0]);
        assert_eq!(hyperbolic_betti(&cls, 1).unwrap(), 0.0);
        // Degree 0 carries only the c = 1 kernel; degree 1 also has c = 0.
        let s0 = selberg_heat_trace(&cls, 0).unwrap();
        assert!(s0.eval(100.0).norm() < 1e-10 * s0.eval(1.0).norm());
        let s1 = selberg_heat_trace(&cls, 1).unwrap();
        let ratio = s1.eval(4e4).re * 200.0 / (s1.eval(1e4).re * 100.0);
        assert!((ratio - 1.0).abs() < 1e-4);
        assert_eq!(
            large_time_decay(&cls, 1).unwrap(),
            LargeTimeDecay::Power { exponent: 0.5 }
        );
        assert_eq!(
            large_time_decay(&cls, 0).unwrap(),
            LargeTimeDecay::Exponential { rate: 1.0 }
        );
    }
}
