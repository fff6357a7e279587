//! Fixtures and independent oracles shared by the integration tests and the
//! acceptance harness.

#![allow(dead_code)]

use std::f64::consts::PI;

use deloc_core::groups::{Automorphism, CharacterTable, FiniteGroup, InducedRep};
use deloc_core::hyperbolic::GeodesicClass;
use deloc_core::linalg::{eigenvalues, Matrix};
use deloc_core::mapping_torus::CohomologyAction;
use deloc_core::nielsen::{equivariant_matrix, EquivariantComplex};
use deloc_core::scalar::rational;
use deloc_core::{BigRational, Complex64};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64) -> BigRational {
    rational(n, 1)
}

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn geodesic(n: usize, k: u32, l: f64, angles: &[f64]) -> GeodesicClass {
    GeodesicClass::new(n, k, l, angles.to_vec()).unwrap()
}

pub fn random_angle(rng: &mut impl Rng) -> f64 {
    // (-π, π]
    PI - rng.gen::<f64>() * 2.0 * PI
}

pub fn random_geodesic(rng: &mut impl Rng, n: usize) -> GeodesicClass {
    let k = rng.gen_range(1..=3);
    let l = rng.gen_range(0.5..3.0);
    let angles: Vec<f64> = (0..n).map(|_| random_angle(rng)).collect();
    GeodesicClass::new(n, k, l, angles).unwrap()
}

/// `e^{-2t} I_m(2t)` from the power series of `I_m`, summed until the terms
/// stop contributing.
pub fn bessel_oracle(m: u32, t: f64) -> f64 {
    let x = t;
    let mut term = (-2.0 * t).exp();
    for i in 1..=m {
        term *= x / f64::from(i);
    }
    let mut sum = 0.0;
    let mut k = 0u32;
    loop {
        sum += term;
        term *= x * x / (f64::from(k + 1) * f64::from(k + 1 + m));
        k += 1;
        if term < 1e-18 * sum && f64::from(k) > x {
            return sum;
        }
    }
}

fn rational_matrix(rows: &[&[i64]]) -> Matrix<BigRational> {
    Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()).unwrap()
}

/// Finite-order integer matrices, diagonalizable with spectrum on the circle.
fn unit_circle_blocks() -> Vec<Matrix<BigRational>> {
    vec![
        rational_matrix(&[&[1]]),
        rational_matrix(&[&[-1]]),
        rational_matrix(&[&[0, -1], &[1, 0]]),
        rational_matrix(&[&[0, 1], &[1, 0]]),
        rational_matrix(&[&[0, -1], &[1, -1]]),
        rational_matrix(&[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]]),
    ]
}

fn block_diagonal(a: &Matrix<BigRational>, b: &Matrix<BigRational>) -> Matrix<BigRational> {
    let (m, n) = (a.rows(), b.rows());
    Matrix::from_fn(m + n, m + n, |i, j| match (i < m, j < m) {
        (true, true) => a[(i, j)].clone(),
        (false, false) => b[(i - m, j - m)].clone(),
        _ => q(0),
    })
}

/// Integer matrix of size `n` whose eigenvalues all lie at least `margin`
/// away from the unit circle in modulus.
fn hyperbolic_integer_matrix(rng: &mut impl Rng, n: usize, margin: f64) -> Matrix<BigRational> {
    loop {
        let m = Matrix::from_fn(n, n, |_, _| q(rng.gen_range(-3..=3)));
        let Ok(spec) = eigenvalues(&m.to_nalgebra()) else {
            continue;
        };
        if spec
            .iter()
            .all(|l| l.norm() > margin && (l.norm() - 1.0).abs() > margin)
        {
            return m;
        }
    }
}

/// Random invertible integer action on cohomology in degrees 0, 1, 2. With
/// `on_circle`, one degree also carries a finite-order block.
pub fn random_integer_action(rng: &mut impl Rng, on_circle: bool) -> CohomologyAction<BigRational> {
    let mut degrees: Vec<Matrix<BigRational>> = (0..3)
        .map(|_| {
            let size = rng.gen_range(1..=2);
            hyperbolic_integer_matrix(rng, size, 0.1)
        })
        .collect();
    if on_circle {
        let p = rng.gen_range(0..3);
        let block = unit_circle_blocks().choose(rng).unwrap().clone();
        degrees[p] = block_diagonal(&degrees[p], &block);
    }
    CohomologyAction::new(degrees).unwrap()
}

/// `α`-equivariant matrix with small random integer first rows.
fn random_equivariant(
    rng: &mut impl Rng,
    group: &FiniteGroup,
    alpha: &Automorphism,
    src: usize,
    tgt: usize,
) -> Matrix<BigRational> {
    let n = group.order();
    let coeffs: Vec<i64> = (0..src * tgt * n).map(|_| rng.gen_range(-2..=2)).collect();
    equivariant_matrix(group, alpha, src, tgt, |o, t, x| q(coeffs[(o * tgt + t) * n + x]))
}

/// Randomized equivariant cochain complex in degrees `0..=top`. Each degree
/// has a free part with a random `φ̂*`, and one pair of adjacent degrees
/// `(w, w+1)` shares a block `W` joined by an invertible equivariant
/// coboundary `E`, with `φ̂*` equal to `P` on the lower copy and `E⁻¹PE` on the upper.
pub fn random_equivariant_complex(rng: &mut impl Rng, group: &FiniteGroup, alpha: &Automorphism) -> EquivariantComplex {
    let n = group.order();
    let identity = Automorphism::identity(group);
    let top = rng.gen_range(1..=2usize);
    let free: Vec<usize> = (0..=top).map(|_| rng.gen_range(0..=2)).collect();
    let w = rng.gen_range(0..top);
    let wsize = rng.gen_range(1..=2usize);
    let e = loop {
        let e = random_equivariant(rng, group, &identity, wsize, wsize);
        if e.inverse().is_some() {
            break e;
        }
    };
    let p_low = random_equivariant(rng, group, alpha, wsize, wsize);
    let p_high = e.inverse().unwrap().mul(&p_low).mul(&e);
    let orbits: Vec<usize> = (0..=top)
        .map(|p| free[p] + if p == w || p == w + 1 { wsize } else { 0 })
        .collect();
    let phi_hat = (0..=top)
        .map(|p| {
            let base = random_equivariant(rng, group, alpha, free[p], free[p]);
            match p {
                _ if p == w => block_diagonal(&base, &p_low),
                _ if p == w + 1 => block_diagonal(&base, &p_high),
                _ => base,
            }
        })
        .collect();
    let diff = (0..top)
        .map(|p| {
            let (rows, cols) = (orbits[p] * n, orbits[p + 1] * n);
            if p != w {
                return Matrix::zeros(rows, cols);
            }
            let (r0, c0) = (free[p] * n, free[p + 1] * n);
            Matrix::from_fn(rows, cols, |i, j| {
                if i >= r0 && j >= c0 {
                    e[(i - r0, j - c0)].clone()
                } else {
                    q(0)
                }
            })
        })
        .collect();
    EquivariantComplex::new(group.clone(), alpha.clone(), orbits, diff, phi_hat).unwrap()
}

fn permutation_matrix(size: usize, image: impl Fn(usize) -> usize) -> Matrix<BigRational> {
    Matrix::from_fn(size, size, |i, j| if image(j) == i { q(1) } else { q(0) })
}

/// Regular representation `μ(f)e_x = e_{fx}` with `U e_x = e_{α^j(x) h}`.
pub fn regular_rep(group: &FiniteGroup, alpha: &Automorphism, j: u32, h: usize) -> InducedRep<BigRational> {
    let n = group.order();
    let mu = group
        .elements()
        .map(|f| permutation_matrix(n, |x| group.mul(f, x)))
        .collect();
    let aj = alpha.power(i64::from(j));
    let u = permutation_matrix(n, |x| group.mul(aj.apply(x), h));
    InducedRep::new(group, alpha, j, mu, u).unwrap()
}

/// One-dimensional rational representation `μ = χ` with `U = [u]`.
pub fn scalar_rep(
    group: &FiniteGroup,
    alpha: &Automorphism,
    j: u32,
    chi: impl Fn(usize) -> i64,
    u: i64,
) -> Option<InducedRep<BigRational>> {
    let mu = group.elements().map(|f| rational_matrix(&[&[chi(f)]])).collect();
    InducedRep::new(group, alpha, j, mu, rational_matrix(&[&[u]])).ok()
}

/// `ℤ/3` with `α` the inversion and its faithful two-dimensional integer
/// representation, which `α` fixes up to the swap `U`.
pub fn z3_inversion_reps() -> (FiniteGroup, Automorphism, Vec<InducedRep<BigRational>>) {
    let g = FiniteGroup::cyclic(3);
    let alpha = Automorphism::new(&g, vec![0, 2, 1]).unwrap();
    let rho = rational_matrix(&[&[0, -1], &[1, -1]]);
    let mu = vec![Matrix::identity(2), rho.clone(), rho.mul(&rho)];
    let swap = rational_matrix(&[&[0, 1], &[1, 0]]);
    let reps = vec![
        InducedRep::new(&g, &alpha, 1, mu.clone(), swap).unwrap(),
        InducedRep::new(&g, &alpha, 2, mu.clone(), Matrix::identity(2)).unwrap(),
        InducedRep::new(&g, &alpha, 2, mu, rho).unwrap(),
    ];
    (g, alpha, reps)
}

/// Sign of a permutation-group element read off the regular representation.
fn regular_sign(group: &FiniteGroup, f: usize) -> i64 {
    let n = group.order();
    let mut seen = vec![false; n];
    let mut sign = 1;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = group.mul(f, x);
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// The groups and automorphisms exercised by the dual-route checks, each with
/// a list of rational induced representations.
pub fn nielsen_fixtures() -> Vec<(&'static str, FiniteGroup, Automorphism, Vec<InducedRep<BigRational>>)> {
    let mut out = Vec::new();

    let z2 = FiniteGroup::cyclic(2);
    let id2 = Automorphism::identity(&z2);
    let mut reps = vec![
        regular_rep(&z2, &id2, 1, 0),
        regular_rep(&z2, &id2, 1, 1),
        regular_rep(&z2, &id2, 2, 1),
    ];
    reps.extend(scalar_rep(&z2, &id2, 1, |f| if f == 1 { -1 } else { 1 }, 1));
    reps.extend(scalar_rep(&z2, &id2, 1, |_| 1, -1));
    out.push(("Z/2", z2, id2, reps));

    let (z3, inversion, mut reps) = z3_inversion_reps();
    reps.push(regular_rep(&z3, &inversion, 1, 1));
    reps.push(regular_rep(&z3, &inversion, 2, 2));
    out.push(("Z/3 (inversion)", z3.clone(), inversion, reps));
    let id3 = Automorphism::identity(&z3);
    out.push((
        "Z/3",
        z3.clone(),
        id3.clone(),
        vec![regular_rep(&z3, &id3, 1, 1), regular_rep(&z3, &id3, 3, 0)],
    ));

    let s3 = FiniteGroup::symmetric(3);
    for (name, alpha) in [
        ("S3", Automorphism::identity(&s3)),
        ("S3 (inner)", Automorphism::inner(&s3, 1)),
    ] {
        // Left multiplication by a transposition is three disjoint swaps.
        let sign = |f: usize| regular_sign(&s3, f);
        let mut reps = vec![regular_rep(&s3, &alpha, 1, 0), regular_rep(&s3, &alpha, 2, 3)];
        reps.extend(scalar_rep(&s3, &alpha, 1, sign, -1));
        reps.extend(scalar_rep(&s3, &alpha, 2, sign, 1));
        out.push((name, s3.clone(), alpha, reps));
    }
    out
}

/// Groups of order at most 48 built from the catalog constructors.
pub fn catalog_groups() -> Vec<(String, FiniteGroup)> {
    let z = FiniteGroup::cyclic;
    let x = FiniteGroup::direct_product;
    let mut groups: Vec<(String, FiniteGroup)> = (1..=48).map(|n| (format!("Z/{n}"), z(n))).collect();
    groups.extend((2..=24).map(|n| (format!("D{n}"), FiniteGroup::dihedral(n))));
    groups.extend((2..=12).map(|n| (format!("Dic{n}"), FiniteGroup::dicyclic(n))));
    groups.push(("S3".into(), FiniteGroup::symmetric(3)));
    groups.push(("S4".into(), FiniteGroup::symmetric(4)));
    groups.push(("A4".into(), FiniteGroup::alternating(4)));
    let s3 = FiniteGroup::symmetric(3);
    let a4 = FiniteGroup::alternating(4);
    let q8 = FiniteGroup::quaternion();
    let k4 = x(&z(2), &z(2));
    for (name, g) in [
        ("Z/2^3", x(&k4, &z(2))),
        ("Z/2^4", x(&k4, &k4)),
        ("Z/2^5", x(&x(&k4, &k4), &z(2))),
        ("Z/2xZ/4", x(&z(2), &z(4))),
        ("Z/4xZ/4", x(&z(4), &z(4))),
        ("Z/3xZ/3", x(&z(3), &z(3))),
        ("Z/2xQ8", x(&z(2), &q8)),
        ("Z/3xQ8", x(&z(3), &q8)),
        ("Z/2xD4", x(&z(2), &FiniteGroup::dihedral(4))),
        ("Z/3xS3", x(&z(3), &s3)),
        ("Z/4xS3", x(&z(4), &s3)),
        ("K4xS3", x(&k4, &s3)),
        ("S3xS3", x(&s3, &s3)),
        ("Z/2xA4", x(&z(2), &a4)),
        ("Z/3xA4", x(&z(3), &a4)),
        ("Z/4xA4", x(&z(4), &a4)),
        ("K4xA4", x(&k4, &a4)),
        ("Z/2xS4", x(&z(2), &FiniteGroup::symmetric(4))),
        ("Z/2xD12", x(&z(2), &FiniteGroup::dihedral(12))),
        ("Z/3xD8", x(&z(3), &FiniteGroup::dihedral(8))),
    ] {
        groups.push((name.into(), g));
    }
    groups
}

/// Character table of `ℤ/2`, written out by hand.
pub fn z2_table() -> CharacterTable {
    CharacterTable {
        representatives: vec![0, 1],
        class_sizes: vec![1, 1],
        rows: vec![vec![c(1.0), c(1.0)], vec![c(1.0), c(-1.0)]],
    }
}
