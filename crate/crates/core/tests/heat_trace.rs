mod common;

use std::f64::consts::PI;

use deloc_core::heat_trace::{
    delocalized_betti, delocalized_heat_trace, lattice_heat_trace, spectral_gap, twisted_heat_trace, DecayModel,
    LaurentMatrix, LaurentMatrixComplex, LaurentPoly, TorusQuadOptions,
};
use deloc_core::{Complex64, DelocError};
use proptest::prelude::*;

use common::c;

/// The circle subdivided into two vertices and two edges,
/// `e₀ = v₁ - v₀` and `e₁ = z v₀ - v₁`.
fn two_cell_circle() -> LaurentMatrixComplex {
    let mono = |e: i64, coeff: f64| LaurentPoly::monomial(vec![e], c(coeff));
    let d0 = LaurentMatrix::from_rows(vec![
        vec![mono(0, -1.0), mono(0, 1.0)],
        vec![mono(1, 1.0), mono(0, -1.0)],
    ])
    .unwrap();
    LaurentMatrixComplex::new(1, vec![2, 2], vec![d0]).unwrap()
}

#[test]
fn subdivided_circle_sees_even_bessel_modes() {
    // The twisted trace is g(θ/2) + g(θ/2 + π) with g(φ) = e^{-t(2-2cos φ)},
    // which keeps the even Fourier modes of g: Tr_⟨m⟩ = 2e^{-2t}I_{2m}(2t).
    let x = two_cell_circle();
    let opts = TorusQuadOptions::default();
    for m in 0..=3i64 {
        for t in [0.5, 2.0, 7.0] {
            let v = delocalized_heat_trace(&x, 0, &[m], t, &opts).unwrap();
            let oracle = 2.0 * common::bessel_oracle(2 * m as u32, t);
            assert!(
                (v.value - c(oracle)).norm() < 1e-10,
                "m = {m}, t = {t}: {} vs {oracle}",
                v.value
            );
        }
    }
}

#[test]
fn rejects_bad_complexes_and_inputs() {
    let mono = |e: i64| LaurentPoly::monomial(vec![e], c(1.0));
    let d = LaurentMatrix::from_rows(vec![vec![mono(0)]]).unwrap();
    // d∘d ≠ 0 with three degrees and identity maps.
    let err = LaurentMatrixComplex::new(1, vec![1, 1, 1], vec![d.clone(), d]).unwrap_err();
    assert!(matches!(err, DelocError::Validation(_)), "{err:?}");
    let circle = LaurentMatrixComplex::circle();
    assert!(delocalized_heat_trace(&circle, 0, &[1, 1], 1.0, &TorusQuadOptions::default()).is_err());
    assert!(delocalized_heat_trace(&circle, 2, &[1], 1.0, &TorusQuadOptions::default()).is_err());
}

#[test]
fn torus_betti_vanishes() {
    // At m = (1, 0) the θ₂ integral contributes (4πt)^{-1/2} and the θ₁
    // integral another e^{-2t}I₁(2t), so the decay is a power law t^{-1}.
    let t2 = LaurentMatrixComplex::torus(2);
    let report = delocalized_betti(&t2, 0, &[1, 0], 1024.0, &TorusQuadOptions::default()).unwrap();
    assert!(report.anomaly.is_none(), "{report:?}");
    assert_eq!(report.preferred, DecayModel::Power);
    assert!((report.power_exponent - 1.0).abs() < 0.05, "{report:?}");
    assert!(report.extrapolated_limit.norm() < 1e-3);
}

#[test]
fn spectral_gap_of_the_circle() {
    // λ_min(θ) = 2 - 2cos θ vanishes at θ = 0.
    assert!(spectral_gap(&LaurentMatrixComplex::circle(), 0, 64).unwrap() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn conjugate_symmetry(m1 in -4i64..=4, m2 in -4i64..=4, t in 0.1f64..5.0, p in 0usize..=2) {
        let t2 = LaurentMatrixComplex::torus(2);
        let opts = TorusQuadOptions::default();
        let a = delocalized_heat_trace(&t2, p, &[m1, m2], t, &opts).unwrap().value;
        let b = delocalized_heat_trace(&t2, p, &[-m1, -m2], t, &opts).unwrap().value;
        prop_assert!((a - b.conj()).norm() < 1e-12);
    }

    #[test]
    fn grid_doubling_is_stable(m in 0i64..=6, t in 0.1f64..100.0) {
        let circle = LaurentMatrixComplex::circle();
        let coarse = TorusQuadOptions::default();
        let fine = TorusQuadOptions { initial_grid: 2 * coarse.initial_grid, ..coarse.clone() };
        let a = delocalized_heat_trace(&circle, 0, &[m], t, &coarse).unwrap();
        let b = delocalized_heat_trace(&circle, 0, &[m], t, &fine).unwrap();
        prop_assert!((a.value - b.value).norm() < 1e-10);
        prop_assert!((a.value.re - common::bessel_oracle(m as u32, t)).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn parseval_bound(t in 0.2f64..3.0) {
        let t2 = LaurentMatrixComplex::torus(2);
        let opts = TorusQuadOptions::default();
        let mut partial = 0.0;
        for m1 in -2i64..=2 {
            for m2 in -2i64..=2 {
                partial += delocalized_heat_trace(&t2, 1, &[m1, m2], t, &opts).unwrap().value.norm_sqr();
            }
        }
        let n = 128;
        let mut full = 0.0;
        for i in 0..n {
            for j in 0..n {
                let theta = [2.0 * PI * i as f64 / n as f64, 2.0 * PI * j as f64 / n as f64];
                full += twisted_heat_trace(&t2, 1, &theta, t).unwrap().powi(2);
            }
        }
        full /= (n * n) as f64;
        prop_assert!(partial <= full * (1.0 + 1e-10), "{} > {}", partial, full);
    }
}

#[test]
fn bessel_oracle_sanity() {
    // I_0(2) e^{-2}, I_1(2) e^{-2} to published digits.
    assert!((common::bessel_oracle(0, 1.0) - 0.308_508_322_553_671).abs() < 1e-14);
    assert!((common::bessel_oracle(1, 1.0) - 0.215_269_289_248_937).abs() < 1e-14);
}

#[test]
fn lattice_oracle_matches_bessel_and_fourier() {
    let circle = LaurentMatrixComplex::circle();
    for (m, t) in [(0i64, 1.0), (1, 1.0), (-3, 2.5), (5, 20.0)] {
        let v = lattice_heat_trace(&circle, 0, &[m], t).unwrap();
        let exact = common::bessel_oracle(m.unsigned_abs() as u32, t);
        assert!(
            (v.value.re - exact).abs() < 1e-12 && v.value.im.abs() < 1e-12,
            "{v:?} vs {exact}"
        );
        assert!(v.aliasing_bound <= 1e-14);
    }
    // Complex coefficients and a two-step exponent pin down the sign of m.
    let d = LaurentPoly::from_terms([
        (vec![2], Complex64::new(0.5, 0.3)),
        (vec![0], Complex64::new(-1.0, 0.0)),
        (vec![-1], Complex64::new(0.0, 0.4)),
    ]);
    let x = LaurentMatrixComplex::new(1, vec![1, 1], vec![LaurentMatrix::from_rows(vec![vec![d]]).unwrap()]).unwrap();
    for (p, m) in [(0usize, 1i64), (0, -2), (1, 3)] {
        let a = lattice_heat_trace(&x, p, &[m], 1.5).unwrap().value;
        let b = delocalized_heat_trace(&x, p, &[m], 1.5, &TorusQuadOptions::default())
            .unwrap()
            .value;
        assert!((a - b).norm() < 1e-11, "p={p} m={m}: {a} vs {b}");
    }
    let torus = LaurentMatrixComplex::torus(2);
    let a = lattice_heat_trace(&torus, 1, &[1, -1], 1.0).unwrap().value;
    let b = delocalized_heat_trace(&torus, 1, &[1, -1], 1.0, &TorusQuadOptions::default())
        .unwrap()
        .value;
    assert!((a - b).norm() < 1e-11, "{a} vs {b}");
}
