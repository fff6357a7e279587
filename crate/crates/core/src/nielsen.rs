//! Mapping tori whose fiber has finite fundamental group `F`: the universal
//! cover's cochains carry a free right `F`-action, and the monodromy lifts to
//! an `α`-equivariant cochain map `φ̂*`. From these come the Nielsen indices
//! `I_k(f)`, the Lefschetz numbers `L_μ(r)` twisted by induced
//! representations, the zeta functions `ζ_ρ` and the torsion pairing
//! `Σ χ_ρ(f,k) 𝒯_⟨f,k⟩ = ln|ζ_ρ(1)|²`.
//!
//! Basis cochains are indexed by `(orbit, g)` ↦ `orbit·|F| + g` with right
//! action `(o, g)·f = (o, gf)`. A cochain map is stored row-major with the
//! source in the row: `M[a][b]` is the coefficient of `e_b` in `φ̂*(e_a)`,
//! so `φ̂*` composed `k` times is the ordinary power `M^k`. The coboundary
//! `D_p` is stored the same way, so `d² = 0` reads `D_p D_{p+1} = 0` and the
//! chain-map condition reads `M_p D_p = D_p M_{p+1}`.
//!
//! Lefschetz numbers are computed on cochains rather than cohomology: the
//! determinant `det(I - zA)` is multiplicative over short exact sequences, so
//! the alternating product over the cochain complex equals the one over its
//! cohomology and the alternating traces agree.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_rational::BigRational;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use num_traits::Zero;

use crate::error::{DelocError, Result};
use crate::groups::{
    induced_character, twisted_classes, Automorphism, FiniteGroup, InducedRep, TwistedClassDecomposition,
};
use crate::linalg::Matrix;
use crate::mapping_torus::{fourier_torsion_coefficients, CohomologyAction, FourierEstimate, FourierOptions};
use crate::poly::{Poly, RationalZeta};
use crate::scalar::{rational_to_integer, Scalar};

/// Matrix `M[(o,g)][(o',h)] = c(o, o', h α(g)⁻¹)` from its first rows
/// `c(o, o', x) = M[(o,e)][(o',x)]`; every `α`-equivariant matrix has this form.
pub fn equivariant_matrix<T: Scalar>(
    group: &FiniteGroup,
    alpha: &Automorphism,
    source_orbits: usize,
    target_orbits: usize,
    coefficient: impl Fn(usize, usize, usize) -> T,
) -> Matrix<T> {
    let n = group.order();
    Matrix::from_fn(source_orbits * n, target_orbits * n, |a, b| {
        let (o, g) = (a / n, a % n);
        let (t, h) = (b / n, b % n);
        coefficient(o, t, group.mul(h, group.inv(alpha.apply(g))))
    })
}

/// Cellular cochains of the universal cover `Ẑ` with the free `F`-action,
/// the coboundary, and the lifted monodromy `φ̂*`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivariantComplex {
    group: FiniteGroup,
    alpha: Automorphism,
    orbits: Vec<usize>,
    diff: Vec<Matrix<BigRational>>,
    phi_hat: Vec<Matrix<BigRational>>,
}

/// Summary returned by a successful validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexReport {
    pub group_order: usize,
    pub orbits: Vec<usize>,
    pub cochain_ranks: Vec<usize>,
}

impl EquivariantComplex {
    /// `orbits[p]` free orbits of `p`-cells; `diff[p]: C^p → C^{p+1}` for
    /// `p < top`; `phi_hat[p]` acts on `C^p`. Validated on construction.
    pub fn new(
        group: FiniteGroup,
        alpha: Automorphism,
        orbits: Vec<usize>,
        diff: Vec<Matrix<BigRational>>,
        phi_hat: Vec<Matrix<BigRational>>,
    ) -> Result<Self> {
        let complex = Self {
            group,
            alpha,
            orbits,
            diff,
            phi_hat,
        };
        validate_complex(&complex)?;
        Ok(complex)
    }

    /// Complex with trivial `F` and zero coboundary carrying a cohomology
    /// action directly (given in the column convention of
    /// [`CohomologyAction`]).
    pub fn from_cohomology_action(action: &CohomologyAction<BigRational>) -> Result<Self> {
        let group = FiniteGroup::cyclic(1);
        let alpha = Automorphism::identity(&group);
        let orbits: Vec<usize> = action.betti_numbers();
        let diff = orbits.windows(2).map(|w| Matrix::zeros(w[0], w[1])).collect();
        let phi_hat = action.matrices().iter().map(Matrix::transpose).collect();
        Self::new(group, alpha, orbits, diff, phi_hat)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn alpha(&self) -> &Automorphism {
        &self.alpha
    }

    pub fn orbits(&self) -> &[usize] {
        &self.orbits
    }

    pub fn top_degree(&self) -> usize {
        self.orbits.len() - 1
    }

    pub fn diff(&self) -> &[Matrix<BigRational>] {
        &self.diff
    }

    pub fn phi_hat(&self) -> &[Matrix<BigRational>] {
        &self.phi_hat
    }

    fn rank(&self, p: usize) -> usize {
        self.orbits[p] * self.group.order()
    }
}

/// Checks shapes, the free-action equivariance of `φ̂*` and `d`, `d² = 0`
/// and `φ̂* d = d φ̂*`, reporting the first violation with its location.
pub fn validate_complex(x: &EquivariantComplex) -> Result<ComplexReport> {
    let n = x.group.order();
    let degrees = x.orbits.len();
    if degrees == 0 {
        return Err(DelocError::Schema("complex has no degrees".into()));
    }
    if x.alpha.map().len() != n {
        return Err(DelocError::Schema("automorphism does not match the group".into()));
    }
    if x.phi_hat.len() != degrees {
        return Err(DelocError::Schema(format!(
            "{} φ̂ matrices for {degrees} degrees",
            x.phi_hat.len()
        )));
    }
    if x.diff.len() + 1 != degrees {
        return Err(DelocError::Schema(format!(
            "{} coboundary matrices for {degrees} degrees",
            x.diff.len()
        )));
    }
    for p in 0..degrees {
        let r = x.rank(p);
        if x.phi_hat[p].rows() != r || x.phi_hat[p].cols() != r {
            return Err(DelocError::Schema(format!("φ̂*_{p} must be {r}×{r}")));
        }
        if p + 1 < degrees && (x.diff[p].rows() != r || x.diff[p].cols() != x.rank(p + 1)) {
            return Err(DelocError::Schema(format!("d_{p} must be {r}×{}", x.rank(p + 1))));
        }
    }
    let act = |a: usize, f: usize| (a / n) * n + x.group.mul(a % n, f);
    for p in 0..degrees {
        let m = &x.phi_hat[p];
        for f in x.group.elements() {
            let af = x.alpha.apply(f);
            for a in 0..m.rows() {
                for b in 0..m.cols() {
                    if m[(act(a, f), act(b, af))] != m[(a, b)] {
                        return Err(DelocError::Validation(format!(
                            "φ̂*_{p} is not equivariant: degree {p}, cell (orbit {}, element {}) → (orbit {}, element {}), group element {f}",
                            a / n,
                            a % n,
                            b / n,
                            b % n
                        )));
                    }
                }
            }
        }
    }
    for (p, d) in x.diff.iter().enumerate() {
        for f in x.group.elements() {
            for a in 0..d.rows() {
                for b in 0..d.cols() {
                    if d[(act(a, f), act(b, f))] != d[(a, b)] {
                        return Err(DelocError::Validation(format!(
                            "d_{p} does not commute with the F-action: cell (orbit {}, element {}), group element {f}",
                            a / n,
                            a % n
                        )));
                    }
                }
            }
        }
        if let Some(next) = x.diff.get(p + 1) {
            if !d.mul(next).is_zero() {
                return Err(DelocError::Validation(format!("d_{} ∘ d_{p} ≠ 0", p + 1)));
            }
        }
        if x.phi_hat[p].mul(d) != d.mul(&x.phi_hat[p + 1]) {
            return Err(DelocError::Validation(format!("φ̂* does not commute with d_{p}")));
        }
    }
    Ok(ComplexReport {
        group_order: n,
        orbits: x.orbits.clone(),
        cochain_ranks: (0..degrees).map(|p| x.rank(p)).collect(),
    })
}

/// `n_{p,k}(f)` for every `p` and `f` at one `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct NielsenTable {
    pub k: u32,
    pub classes: TwistedClassDecomposition,
    /// `coefficients[p][f] = n_{p,k}(f)`.
    pub coefficients: Vec<Vec<BigRational>>,
}

impl NielsenTable {
    /// `i_{p,k}(f) = n_{p,k}(f) · |[f]_k|`.
    pub fn partial_index(&self, p: usize, f: usize) -> BigRational {
        &self.coefficients[p][f] * BigRational::from_integer(self.classes.class_size_of(f).into())
    }

    /// `I_k(f) = Σ_p (-1)^p i_{p,k}(f)`; a non-integral `i_{p,k}(f)` means
    /// the action was not free and is reported as a consistency error.
    pub fn index(&self, f: usize) -> Result<i64> {
        let mut total = 0i64;
        for p in 0..self.coefficients.len() {
            let i = rational_to_integer(&self.partial_index(p, f)).ok_or_else(|| DelocError::Consistency {
                detail: format!("i_{{{p},{}}}({f}) is not an integer; the F-action is not free", self.k),
                difference: 0.0,
            })?;
            total += if p % 2 == 0 { i } else { -i };
        }
        Ok(total)
    }

    /// `I_k(f)` for every `f`.
    pub fn indices(&self) -> Result<Vec<i64>> {
        (0..self.classes.partition.class_of.len())
            .map(|f| self.index(f))
            .collect()
    }

    /// `Σ_p (-1)^p n_{p,k}(f)`.
    pub fn alternating_coefficient(&self, f: usize) -> BigRational {
        self.coefficients
            .iter()
            .enumerate()
            .fold(BigRational::zero(), |acc, (p, row)| {
                if p % 2 == 0 {
                    acc + &row[f]
                } else {
                    acc - &row[f]
                }
            })
    }
}

/// `n_{p,k}(f) = (1/|F|) Σ_i (φ̂^k)*_{e_i → e_i f}` for all `p` and `f`.
pub fn nielsen_table(x: &EquivariantComplex, k: u32) -> Result<NielsenTable> {
    let n = x.group.order();
    let classes = twisted_classes(&x.group, &x.alpha, i64::from(k));
    let order = BigRational::from_integer(n.into());
    let mut coefficients = Vec::with_capacity(x.orbits.len());
    for m in &x.phi_hat {
        let mk = m.pow(k);
        let row: Vec<BigRational> = x
            .group
            .elements()
            .map(|f| {
                let sum = (0..mk.rows()).fold(BigRational::zero(), |acc, a| {
                    let target = (a / n) * n + x.group.mul(a % n, f);
                    acc + &mk[(a, target)]
                });
                sum / &order
            })
            .collect();
        coefficients.push(row);
    }
    Ok(NielsenTable {
        k,
        classes,
        coefficients,
    })
}

/// `n_{p,k}(f)`.
pub fn twisted_coefficient_sum(x: &EquivariantComplex, p: usize, f: usize, k: u32) -> Result<BigRational> {
    check_element(x, f)?;
    let m = x
        .phi_hat
        .get(p)
        .ok_or_else(|| DelocError::Domain(format!("degree {p} exceeds {}", x.top_degree())))?;
    let n = x.group.order();
    let mk = m.pow(k);
    let sum = (0..mk.rows()).fold(BigRational::zero(), |acc, a| {
        acc + &mk[(a, (a / n) * n + x.group.mul(a % n, f))]
    });
    Ok(sum / BigRational::from_integer(n.into()))
}

/// `I_k(f) = Σ_p (-1)^p i_{p,k}(f)`.
pub fn nielsen_index(x: &EquivariantComplex, k: u32, f: usize) -> Result<i64> {
    check_element(x, f)?;
    nielsen_table(x, k)?.index(f)
}

fn check_element(x: &EquivariantComplex, f: usize) -> Result<()> {
    if f >= x.group.order() {
        return Err(DelocError::Domain(format!("{f} is not an element of F")));
    }
    Ok(())
}

fn check_rep<T: Scalar>(x: &EquivariantComplex, rep: &InducedRep<T>) -> Result<()> {
    if rep.alpha() != &x.alpha {
        return Err(DelocError::Validation(
            "representation was built for a different automorphism".into(),
        ));
    }
    Ok(())
}

/// Matrices of `φ^j` on `C^p(Ẑ) ⊗_F ℂ^N = ⊕_o ē_o ⊗ ℂ^N`: block `(o', o)` is
/// `Σ_h (φ̂^j)*_{(o,e) → (o',h)} μ(h) U`.
pub fn twisted_cochain_maps<T: Scalar>(x: &EquivariantComplex, rep: &InducedRep<T>) -> Result<Vec<Matrix<T>>> {
    check_rep(x, rep)?;
    let n = x.group.order();
    let dim = rep.dimension();
    let mu_u: Vec<Matrix<T>> = x.group.elements().map(|h| rep.mu(h).mul(rep.u())).collect();
    Ok(x.phi_hat
        .iter()
        .zip(&x.orbits)
        .map(|(m, &orbits)| {
            let mj = m.pow(rep.period());
            let mut a = Matrix::<T>::zeros(orbits * dim, orbits * dim);
            for o in 0..orbits {
                for t in 0..orbits {
                    for h in 0..n {
                        let c = &mj[(o * n, t * n + h)];
                        if c.is_zero() {
                            continue;
                        }
                        let coeff = T::from_rational(c);
                        for r in 0..dim {
                            for s in 0..dim {
                                let entry =
                                    a[(t * dim + r, o * dim + s)].clone() + coeff.clone() * mu_u[h][(r, s)].clone();
                                a[(t * dim + r, o * dim + s)] = entry;
                            }
                        }
                    }
                }
            }
            a
        })
        .collect())
}

/// `L_μ(r) = Tr_s(φ^{jr})` on the twisted cochains.
pub fn twisted_lefschetz_direct<T: Scalar>(x: &EquivariantComplex, rep: &InducedRep<T>, r: u32) -> Result<T> {
    Ok(alternating_trace(&twisted_cochain_maps(x, rep)?, r))
}

fn alternating_trace<T: Scalar>(maps: &[Matrix<T>], r: u32) -> T {
    maps.iter().enumerate().fold(T::zero(), |acc, (p, a)| {
        let t = a.pow(r).trace();
        if p % 2 == 0 {
            acc + t
        } else {
            acc - t
        }
    })
}

/// `L_μ(r) = (1/j) Σ_f χ_ρ(f, jr) Σ_p (-1)^p n_{p,jr}(f)`.
pub fn twisted_lefschetz_nielsen<T: Scalar>(x: &EquivariantComplex, rep: &InducedRep<T>, r: u32) -> Result<T> {
    check_rep(x, rep)?;
    let k = rep
        .period()
        .checked_mul(r)
        .ok_or_else(|| DelocError::Domain("jr overflows".into()))?;
    let table = nielsen_table(x, k)?;
    let total = x.group.elements().fold(T::zero(), |acc, f| {
        acc + induced_character(rep, f, i64::from(k)) * T::from_rational(&table.alternating_coefficient(f))
    });
    let inv_j = BigRational::new(1.into(), rep.period().into());
    Ok(total * T::from_rational(&inv_j))
}

/// `L_μ(r)` by both routes; a disagreement beyond `1e-9` (exactly, over ℚ)
/// is a consistency error.
pub fn twisted_lefschetz<T: Scalar>(x: &EquivariantComplex, rep: &InducedRep<T>, r: u32) -> Result<T> {
    if r == 0 {
        return Err(DelocError::Domain("r must be positive".into()));
    }
    let direct = twisted_lefschetz_direct(x, rep, r)?;
    let nielsen = twisted_lefschetz_nielsen(x, rep, r)?;
    if !direct.near(&nielsen, 1e-9 * direct.to_complex().norm().max(1.0)) {
        return Err(DelocError::Consistency {
            detail: format!("L_μ({r}) differs between the cochain trace and the Nielsen sum"),
            difference: (direct.to_complex() - nielsen.to_complex()).norm(),
        });
    }
    Ok(direct)
}

/// Number of series terms checked against the defining exponential.
const ZETA_CHECK_TERMS: u32 = 10;

/// `ζ_ν(z) = Π_p det(I - zA_p)^{(-1)^{p+1}}` with `A_p` the twisted `φ^j`.
pub fn zeta_nu<T: Scalar>(x: &EquivariantComplex, rep: &InducedRep<T>) -> Result<RationalZeta<T>> {
    RationalZeta::from_graded(&twisted_cochain_maps(x, rep)?)
}

/// `ζ_ρ(z) = ζ_ν(z^j)`, with the log-derivative coefficients of `ζ_ν`
/// checked against the Nielsen-route `L_μ(r)` for the first ten `r`.
pub fn zeta_rho<T: Scalar>(x: &EquivariantComplex, rep: &InducedRep<T>) -> Result<RationalZeta<T>> {
    let nu = zeta_nu(x, rep)?;
    let series = nu.log_derivative_series(ZETA_CHECK_TERMS as usize);
    for (idx, coeff) in series.iter().enumerate() {
        let r = idx as u32 + 1;
        let expected = twisted_lefschetz_nielsen(x, rep, r)?;
        if !coeff.near(&expected, 1e-9 * expected.to_complex().norm().max(1.0)) {
            return Err(DelocError::Consistency {
                detail: format!("series coefficient {r} of ln ζ_ν disagrees with L_μ({r})"),
                difference: (coeff.to_complex() - expected.to_complex()).norm(),
            });
        }
    }
    Ok(nu.compose_power(rep.period() as usize))
}

/// Value at `z = 1` together with the order of vanishing there, computed
/// by deflating each factor by `(1 - z)` in the scalar type.
pub fn value_at_one<T: Scalar>(zeta: &RationalZeta<T>) -> (T, i32) {
    let mut value = T::one();
    let mut order = 0i32;
    for factor in &zeta.factors {
        let (mut poly, mut m) = (factor.poly.clone(), 0i32);
        while poly.degree() > 0 || !poly.coeffs()[0].is_zero() {
            let at_one = poly.coeffs().iter().fold(T::zero(), |acc, c| acc + c.clone());
            let scale: f64 = poly.coeffs().iter().map(|c| c.to_complex().norm()).sum();
            let vanishes = if T::is_exact() {
                at_one.is_zero()
            } else {
                at_one.to_complex().norm() <= 1e-10 * scale.max(1.0)
            };
            if !vanishes {
                value = if factor.exponent >= 0 {
                    value * at_one
                } else {
                    value * at_one.inverse().expect("nonzero")
                };
                break;
            }
            poly = divide_by_root_one(&poly);
            m += 1;
        }
        order += factor.exponent * m;
    }
    (value, order)
}

/// `P(z)/(z - 1)` by synthetic division, assuming `P(1) = 0`.
fn divide_by_root_one<T: Scalar>(p: &Poly<T>) -> Poly<T> {
    let c = p.coeffs();
    let d = c.len() - 1;
    let mut q = vec![T::zero(); d];
    let mut carry = T::zero();
    for i in (1..=d).rev() {
        carry = carry + c[i].clone();
        q[i - 1] = carry.clone();
    }
    Poly::new(q)
}

/// `Σ_{f,k} χ_ρ(f,k) 𝒯_⟨f,k⟩(M) = ln|ζ_ρ(1)|²`.
///
/// A zero or pole of `ζ_ρ` at 1 (non-acyclic twisted cohomology) leaves the
/// pairing undefined: a pole is reported with its order, a zero as a domain
/// error naming the order.
pub fn zeta_torsion_pairing<T: Scalar>(x: &EquivariantComplex, rep: &InducedRep<T>) -> Result<f64> {
    let zeta = zeta_rho(x, rep)?;
    let (value, order) = value_at_one(&zeta);
    match order {
        0 => Ok(value.to_complex().norm_sqr().ln()),
        o if o < 0 => Err(DelocError::Pole {
            at: Complex64::new(1.0, 0.0),
            order: -o,
        }),
        o => Err(DelocError::Domain(format!(
            "ζ_ρ has a zero of order {o} at z = 1; the pairing is undefined"
        ))),
    }
}

/// Individual torsions `𝒯_⟨k⟩` recovered from the pairings for trivial `F`,
/// where the irreducible representations are the characters `U = e^{iθ}` and
/// the pairing is `θ ↦ ln|ζ(e^{iθ})|²`; inversion is the Fourier transform
/// over the circle.
pub fn invert_pairing_trivial_group(
    x: &EquivariantComplex,
    ks: &[i64],
    options: &FourierOptions,
) -> Result<Vec<FourierEstimate>> {
    if x.group.order() != 1 {
        return Err(DelocError::Unsupported(
            "recovering individual torsions from the pairing is implemented only for trivial F".into(),
        ));
    }
    let action = CohomologyAction::from_graded_unchecked(x.phi_hat.iter().map(Matrix::transpose).collect());
    fourier_torsion_coefficients(&action, ks, options)
}

/// Cochain-level action `φ̂*` for trivial `F`, in the column convention.
pub fn trivial_group_action(x: &EquivariantComplex) -> Result<CohomologyAction<BigRational>> {
    if x.group.order() != 1 {
        return Err(DelocError::Unsupported("F must be trivial".into()));
    }
    Ok(CohomologyAction::from_graded_unchecked(
        x.phi_hat.iter().map(Matrix::transpose).collect(),
    ))
}

/// Trivial representation of `F ⋊_α ℤ` (`j = 1`, `μ = 1`, `U = 1`) over ℚ.
pub fn trivial_rep(x: &EquivariantComplex) -> Result<InducedRep<BigRational>> {
    InducedRep::new(
        &x.group,
        &x.alpha,
        1,
        x.group.elements().map(|_| Matrix::identity(1)).collect(),
        Matrix::identity(1),
    )
}

/// One-dimensional representation of trivial `F` with `U = e^{iθ}`.
pub fn circle_rep(x: &EquivariantComplex, theta: f64) -> Result<InducedRep<Complex64>> {
    if x.group.order() != 1 {
        return Err(DelocError::Unsupported("circle characters need trivial F".into()));
    }
    InducedRep::new(
        &x.group,
        &x.alpha,
        1,
        vec![Matrix::identity(1)],
        Matrix::from_fn(1, 1, |_, _| Complex64::from_polar(1.0, theta)),
    )
}

impl NielsenTable {
    /// Whether every `n_{p,k}` is constant on each twisted class.
    pub fn is_class_function(&self) -> bool {
        self.coefficients.iter().all(|row| {
            self.classes
                .partition
                .classes
                .iter()
                .all(|c| c.iter().all(|&f| row[f] == row[c[0]]))
        })
    }
}
