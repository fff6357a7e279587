mod common;

use deloc_core::linalg::Matrix;
use deloc_core::mapping_torus::{
    clamp_spectrum, fourier_torsion_coefficients, lefschetz_number, torsion_k, zeta_rational, CohomologyAction,
    FourierOptions,
};
use deloc_core::scalar::rational_to_f64;
use deloc_core::{Complex64, DelocError};
use proptest::prelude::*;

use common::{q, rng};

/// `Σ_p (-1)^p Tr(φ_p^k)` by repeated multiplication in floating point.
fn lefschetz_by_powers(action: &CohomologyAction<deloc_core::BigRational>, k: u32) -> f64 {
    action
        .matrices()
        .iter()
        .enumerate()
        .map(|(p, m)| {
            let f = m.to_complex();
            let mut acc = Matrix::<Complex64>::identity(f.rows());
            for _ in 0..k {
                acc = acc.mul(&f);
            }
            let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
            sign * acc.trace().re
        })
        .sum()
}

#[test]
fn singular_actions_are_rejected() {
    let singular = Matrix::from_rows(vec![vec![q(1), q(2)], vec![q(2), q(4)]]).unwrap();
    assert!(matches!(
        CohomologyAction::new(vec![singular]),
        Err(DelocError::Validation(_))
    ));
}

#[test]
fn random_actions_fourier_and_zeta() {
    let mut rng = rng(5);
    let ks: Vec<i64> = (-5..=5).collect();
    for i in 0..6 {
        let on_circle = i % 3 == 0;
        let action = common::random_integer_action(&mut rng, on_circle);
        let tol = if on_circle { 1e-4 } else { 1e-8 };
        for est in fourier_torsion_coefficients(&action, &ks, &FourierOptions::default()).unwrap() {
            let exact = if est.k == 0 {
                Complex64::new(
                    deloc_core::mapping_torus::zeroth_fourier_coefficient(&action).unwrap(),
                    0.0,
                )
            } else {
                torsion_k(&action, est.k).unwrap()
            };
            assert!((est.value - exact).norm() < tol, "action {i}: {est:?} vs {exact}");
            assert_eq!(est.singular, on_circle);
        }
        let series = zeta_rational(&action).unwrap().log_derivative_series(8);
        for k in 1..=8u32 {
            let l = lefschetz_number(&action, k);
            assert_eq!(series[k as usize - 1], l);
            assert!(
                (rational_to_f64(&l) - lefschetz_by_powers(&action, k)).abs()
                    < 1e-6 * (1.0 + rational_to_f64(&l).abs())
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn clamp_is_idempotent(re in -5.0f64..5.0, im in -5.0f64..5.0) {
        prop_assume!(re.abs() + im.abs() > 1e-6);
        let z = clamp_spectrum(Complex64::new(re, im)).unwrap();
        prop_assert!(z.norm() <= 1.0 + 1e-15);
        prop_assert_eq!(clamp_spectrum(z).unwrap(), z);
    }

    #[test]
    fn real_actions_are_symmetric_in_k(seed in any::<u64>(), k in 1i64..=8) {
        let action = common::random_integer_action(&mut rng(seed), seed % 2 == 0);
        let plus = torsion_k(&action, k).unwrap();
        let minus = torsion_k(&action, -k).unwrap();
        prop_assert!((plus - minus).norm() <= 1e-12 * (1.0 + plus.norm()), "{} vs {}", plus, minus);
        prop_assert!(plus.im.abs() <= 1e-12 * (1.0 + plus.norm()));
    }

    #[test]
    fn complex_actions_are_conjugate_in_k(
        a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0, d in -3.0f64..3.0, k in 1i64..=6,
    ) {
        let z = Complex64::new(a, b);
        let w = Complex64::new(c, d);
        prop_assume!(z.norm() > 0.1 && w.norm() > 0.1);
        prop_assume!((z.norm() - 1.0).abs() > 0.05 && (w.norm() - 1.0).abs() > 0.05);
        let one = |x: Complex64| Matrix::from_rows(vec![vec![x]]).unwrap();
        let action = CohomologyAction::new(vec![one(z), one(w)]).unwrap();
        let minus = torsion_k(&action, -k).unwrap();
        let expected = torsion_k(&action, k).unwrap().conj();
        prop_assert!((minus - expected).norm() < 1e-12);
        // T(θ) is real, so the Fourier side must agree.
        let fourier = fourier_torsion_coefficients(&action, &[-k], &FourierOptions::default()).unwrap();
        prop_assert!((fourier[0].value - minus).norm() < 1e-8, "{:?} vs {}", fourier[0], minus);
    }
}
