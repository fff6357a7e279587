//! Value types shared by every invariant family and the elementary
//! properties that hold independently of the geometry: conjugate duality,
//! product formulas and the dimension-parity vanishing rules.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::error::{DelocError, Result};

/// Reentrant scalar function of a positive time-like parameter.
pub type SamplerFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// `t ↦ Tr_⟨g⟩(e^{-tΔ̂_p})` in a fixed degree of a `d`-manifold.
#[derive(Clone)]
pub struct HeatTraceSampler {
    degree: usize,
    dimension: usize,
    eval: SamplerFn,
}

impl HeatTraceSampler {
    pub fn new<F>(degree: usize, dimension: usize, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        if dimension == 0 {
            return Err(DelocError::Domain("manifold dimension must be positive".into()));
        }
        if degree > dimension {
            return Err(DelocError::Domain(alloc::format!(
                "degree {degree} exceeds dimension {dimension}"
            )));
        }
        Ok(Self {
            degree,
            dimension,
            eval: Arc::new(f),
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        (self.eval)(t)
    }
}

impl fmt::Debug for HeatTraceSampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HeatTraceSampler")
            .field("degree", &self.degree)
            .field("dimension", &self.dimension)
            .finish_non_exhaustive()
    }
}

/// `𝒯_⟨g⟩(t) = Σ_p (-1)^p p Tr_⟨g⟩(e^{-tΔ̂_p})` together with its large-time
/// limit `𝒯_⟨g⟩(∞)`.
#[derive(Clone)]
pub struct TorsionSeries {
    value: SamplerFn,
    limit: Complex64,
}

impl TorsionSeries {
    /// Series given directly as a function of `t`.
    pub fn from_fn<F>(f: F, limit: Complex64) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            value: Arc::new(f),
            limit,
        }
    }

    pub fn value(&self, t: f64) -> Complex64 {
        (self.value)(t)
    }

    pub fn limit_at_infinity(&self) -> Complex64 {
        self.limit
    }
}

impl fmt::Debug for TorsionSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TorsionSeries")
            .field("limit", &self.limit)
            .finish_non_exhaustive()
    }
}

/// Builds the alternating degree-weighted sum from one sampler per degree
/// `0..=d`.
pub fn assemble_torsion_series(samplers: Vec<HeatTraceSampler>, limit: Complex64) -> Result<TorsionSeries> {
    let d = samplers
        .first()
        .map(HeatTraceSampler::dimension)
        .ok_or_else(|| DelocError::Schema("no heat-trace samplers supplied".into()))?;
    if samplers.iter().any(|s| s.dimension() != d) {
        return Err(DelocError::Schema("samplers disagree on the manifold dimension".into()));
    }
    let mut seen = alloc::vec![false; d + 1];
    for s in &samplers {
        if core::mem::replace(&mut seen[s.degree()], true) {
            return Err(DelocError::Schema(alloc::format!(
                "degree {} supplied twice",
                s.degree()
            )));
        }
    }
    if let Some(p) = seen.iter().position(|&b| !b) {
        return Err(DelocError::Schema(alloc::format!("degree {p} is missing")));
    }
    let terms: Vec<(f64, HeatTraceSampler)> = samplers
        .into_iter()
        .filter(|s| s.degree() > 0)
        .map(|s| {
            let p = s.degree();
            let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
            (sign * p as f64, s)
        })
        .collect();
    Ok(TorsionSeries::from_fn(
        move |t| terms.iter().map(|(w, s)| s.eval(t) * *w).sum(),
        limit,
    ))
}

/// `s ↦ η_⟨g⟩(s) = Tr_⟨g⟩(D̂ e^{-s²D̂²})`.
#[derive(Clone)]
pub struct EtaSampler {
    eval: SamplerFn,
}

impl EtaSampler {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        Self { eval: Arc::new(f) }
    }

    pub fn zero() -> Self {
        Self::new(|_| Complex64::new(0.0, 0.0))
    }

    pub fn eval(&self, s: f64) -> Complex64 {
        (self.eval)(s)
    }
}

impl fmt::Debug for EtaSampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EtaSampler").finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InvariantKind {
    Betti,
    Torsion,
    Eta,
}

/// Opaque conjugacy-class identifier.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassLabel(String);

impl ClassLabel {
    const INVERSE_SUFFIX: &'static str = "^-1";

    pub fn new(label: impl Into<String>) -> Self {
        Self(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Label of the inverse class; inverting twice returns the original.
    pub fn inverse(&self) -> Self {
        match self.0.strip_suffix(Self::INVERSE_SUFFIX) {
            Some(base) => Self(base.into()),
            None => Self(alloc::format!("{}{}", self.0, Self::INVERSE_SUFFIX)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantValue {
    pub kind: InvariantKind,
    pub class_label: ClassLabel,
    pub value: Complex64,
}

/// Value predicted for `⟨g⁻¹⟩` from the value at `⟨g⟩`: the complex
/// conjugate, for every kind.
pub fn dual_class_value(v: &InvariantValue) -> InvariantValue {
    InvariantValue {
        kind: v.kind,
        class_label: v.class_label.inverse(),
        value: v.value.conj(),
    }
}

/// One factor of a product manifold `M_1 × M_2` as seen by the product
/// formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductFactor {
    /// Euler characteristic (torsion) or `∫ Â(TM) ∪ ch(E)` (eta).
    pub weight: Complex64,
    /// Delocalized invariant of the factor at its class.
    pub value: Complex64,
    /// Whether the factor's class is the identity class.
    pub trivial_class: bool,
}

impl ProductFactor {
    pub fn torsion(euler_characteristic: i64, value: Complex64, trivial_class: bool) -> Self {
        Self {
            weight: Complex64::new(euler_characteristic as f64, 0.0),
            value,
            trivial_class,
        }
    }

    pub fn eta(a_hat_ch_integral: Complex64, value: Complex64, trivial_class: bool) -> Self {
        Self {
            weight: a_hat_ch_integral,
            value,
            trivial_class,
        }
    }
}

/// `δ_{g_1,e} w_1 x_2 + δ_{g_2,e} w_2 x_1`: the product formula for torsion
/// (weights are Euler characteristics) and for eta (weights are the
/// `Â · ch` integrals).
pub fn product_formula(first: &ProductFactor, second: &ProductFactor) -> Complex64 {
    let mut out = Complex64::new(0.0, 0.0);
    if first.trivial_class {
        out += first.weight * second.value;
    }
    if second.trivial_class {
        out += second.weight * first.value;
    }
    out
}

/// Torsion of `M_1 × M_2` at `⟨g_1, g_2⟩`.
pub fn product_torsion(
    chi1: i64,
    chi2: i64,
    t1: Complex64,
    t2: Complex64,
    g1_trivial: bool,
    g2_trivial: bool,
) -> Complex64 {
    product_formula(
        &ProductFactor::torsion(chi1, t1, g1_trivial),
        &ProductFactor::torsion(chi2, t2, g2_trivial),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VanishingKind {
    Torsion,
    /// Eta invariant of the tangential signature operator.
    SignatureEta,
}

/// `Some(0)` when the dimension alone forces the invariant to vanish.
pub fn vanishing_rule(dimension: u32, kind: VanishingKind) -> Option<Complex64> {
    let forced = match kind {
        VanishingKind::Torsion => dimension.is_multiple_of(2),
        VanishingKind::SignatureEta => dimension % 4 == 1,
    };
    forced.then(|| Complex64::new(0.0, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_samplers_give_zero_series() {
        let samplers = (0..=3)
            .map(|p| HeatTraceSampler::new(p, 3, |_| c(0.0, 0.0)).unwrap())
            .collect();
        let series = assemble_torsion_series(samplers, c(0.0, 0.0)).unwrap();
        for t in [0.01, 1.0, 50.0] {
            assert_eq!(series.value(t), c(0.0, 0.0));
        }
    }

    #[test]
    fn single_degree_sign() {
        let samplers = (0..=2)
            .map(|p| {
                if p == 1 {
                    HeatTraceSampler::new(p, 2, |t| c((-t).exp(), 0.0)).unwrap()
                } else {
                    HeatTraceSampler::new(p, 2, |_| c(0.0, 0.0)).unwrap()
                }
            })
            .collect();
        let series = assemble_torsion_series(samplers, c(0.0, 0.0)).unwrap();
        for t in [0.3, 1.0, 4.0] {
            assert!((series.value(t) - c(-(-t).exp(), 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn missing_or_duplicate_degree_is_schema_error() {
        let zero = |p| HeatTraceSampler::new(p, 2, |_| c(0.0, 0.0)).unwrap();
        let missing = assemble_torsion_series(alloc::vec![zero(0), zero(2)], c(0.0, 0.0));
        assert!(matches!(missing, Err(DelocError::Schema(_))));
        let dup = assemble_torsion_series(alloc::vec![zero(0), zero(1), zero(1), zero(2)], c(0.0, 0.0));
        assert!(matches!(dup, Err(DelocError::Schema(_))));
        assert!(HeatTraceSampler::new(3, 2, |_| c(0.0, 0.0)).is_err());
    }

    #[test]
    fn dual_values() {
        let v = |kind, value| InvariantValue {
            kind,
            class_label: ClassLabel::new("g"),
            value,
        };
        let torsion = dual_class_value(&v(InvariantKind::Torsion, c(2.0 / 3.0, 0.0)));
        assert_eq!(torsion.value, c(2.0 / 3.0, 0.0));
        assert_eq!(torsion.class_label.as_str(), "g^-1");
        assert_eq!(dual_class_value(&torsion).class_label.as_str(), "g");
        assert_eq!(
            dual_class_value(&v(InvariantKind::Betti, c(0.5, 0.0))).value,
            c(0.5, 0.0)
        );
        let z = dual_class_value(&v(InvariantKind::Torsion, c(1.5, -0.25)));
        assert_eq!(z.value, c(1.5, 0.25));
        assert_eq!(z.kind, InvariantKind::Torsion);
    }

    #[test]
    fn product_deltas() {
        assert_eq!(
            product_torsion(2, 3, c(1.0, 0.0), c(5.0, 0.0), false, false),
            c(0.0, 0.0)
        );
        assert_eq!(
            product_torsion(2, 7, c(9.0, 0.0), c(0.5, 0.0), true, false),
            c(1.0, 0.0)
        );
        assert_eq!(
            product_torsion(2, 0, c(3.0, 0.0), c(5.0, 0.0), true, true),
            c(10.0, 0.0)
        );
        let eta = product_formula(
            &ProductFactor::eta(c(2.0, 0.0), c(0.1, 0.0), true),
            &ProductFactor::eta(c(1.0, 0.0), c(0.25, 0.0), false),
        );
        assert!((eta - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn vanishing() {
        assert_eq!(vanishing_rule(4, VanishingKind::Torsion), Some(c(0.0, 0.0)));
        assert_eq!(vanishing_rule(5, VanishingKind::SignatureEta), Some(c(0.0, 0.0)));
        assert_eq!(vanishing_rule(3, VanishingKind::Torsion), None);
        assert_eq!(vanishing_rule(3, VanishingKind::SignatureEta), None);
        assert_eq!(vanishing_rule(7, VanishingKind::SignatureEta), None);
    }
}
