mod common;

use deloc_core::groups::{
    character_table, conjugacy_classes, induced_character, twisted_classes, verify_character_table, Automorphism,
    FiniteGroup,
};
use deloc_core::DelocError;

use common::q;

/// Automorphisms worth exercising: the identity, a few inner ones, and for
/// abelian groups the inversion.
fn automorphisms(g: &FiniteGroup) -> Vec<Automorphism> {
    let mut out = vec![Automorphism::identity(g)];
    for x in [1, g.order() / 2, g.order() - 1] {
        if x < g.order() {
            out.push(Automorphism::inner(g, x));
        }
    }
    if g.is_abelian() {
        out.push(Automorphism::new(g, g.elements().map(|x| g.inv(x)).collect()).unwrap());
    }
    out
}

#[test]
fn orbit_stabilizer_on_the_catalog() {
    for (name, g) in common::catalog_groups() {
        for alpha in automorphisms(&g) {
            for k in -3..=3i64 {
                let d = twisted_classes(&g, &alpha, k);
                assert_eq!(d.sizes.iter().sum::<usize>(), g.order(), "{name}, k = {k}");
                for (size, stab) in d.sizes.iter().zip(&d.stabilizer_orders) {
                    assert_eq!(size * stab, g.order(), "{name}, k = {k}");
                }
            }
        }
        if g.order() <= 24 {
            // α = identity, k = 0 gives ordinary conjugacy.
            let plain = conjugacy_classes(&g);
            let twisted = twisted_classes(&g, &Automorphism::identity(&g), 0);
            assert_eq!(plain.sizes(), twisted.sizes, "{name}");
        }
    }
}

#[test]
fn character_tables_on_the_catalog() {
    for (name, g) in common::catalog_groups() {
        let table = character_table(&g).unwrap_or_else(|e| panic!("{name}: {e}"));
        let report = verify_character_table(&table).unwrap();
        assert!(report.max_orthogonality_error < 1e-9, "{name}: {report:?}");
        let degrees = table.degrees();
        assert_eq!(degrees[0], 1.0);
        let sum_sq: f64 = degrees.iter().map(|d| d * d).sum();
        assert_eq!(sum_sq, g.order() as f64, "{name}");
        // The regular character Σ_ρ χ_ρ(1) χ_ρ is |G| at e and 0 elsewhere.
        for i in 0..table.representatives.len() {
            let regular: deloc_core::Complex64 = table.rows.iter().zip(&degrees).map(|(row, d)| row[i] * d).sum();
            let expected = if table.representatives[i] == g.identity() {
                g.order() as f64
            } else {
                0.0
            };
            assert!(
                (regular.re - expected).abs() < 1e-9 && regular.im.abs() < 1e-9,
                "{name}, class {i}"
            );
        }
        assert_eq!(conjugacy_classes(&g).len(), table.representatives.len());
    }
}

#[test]
fn character_table_limits_and_errors() {
    let big = FiniteGroup::cyclic(49);
    assert!(matches!(character_table(&big), Err(DelocError::Unsupported(_))));
    let mut table = character_table(&FiniteGroup::symmetric(3)).unwrap();
    table.rows[2][1] += deloc_core::Complex64::new(0.5, 0.0);
    match verify_character_table(&table) {
        Err(DelocError::Validation(msg)) => assert!(msg.contains("row"), "{msg}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn automorphism_validation() {
    let g = FiniteGroup::cyclic(4);
    assert!(Automorphism::new(&g, vec![0, 2, 1, 3]).is_err());
    let inv = Automorphism::new(&g, vec![0, 3, 2, 1]).unwrap();
    assert_eq!(inv.order(), 2);
    assert_eq!(inv.power(-1), inv);
    assert_eq!(inv.power(2), Automorphism::identity(&g));
}

#[test]
fn induced_characters_are_twisted_class_functions() {
    for (name, g, alpha, reps) in common::nielsen_fixtures() {
        for rep in &reps {
            let j = i64::from(rep.period());
            for k in (-6..=6i64).filter(|k| *k != 0) {
                let ak = alpha.power(k);
                for f in g.elements() {
                    let chi = induced_character(rep, f, k);
                    if k % j != 0 {
                        assert_eq!(chi, q(0), "{name}");
                        continue;
                    }
                    for gamma in g.elements() {
                        let moved = g.mul(g.mul(gamma, f), ak.apply(g.inv(gamma)));
                        assert_eq!(induced_character(rep, moved, k), chi, "{name}, f = {f}, k = {k}");
                    }
                }
            }
        }
    }
}
