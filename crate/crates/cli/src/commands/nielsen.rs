use std::path::Path;

use deloc_core::groups::InducedRep;
use deloc_core::linalg::Matrix;
use deloc_core::mapping_torus::{torsion_k, zeroth_fourier_coefficient};
use deloc_core::nielsen::{
    nielsen_table, trivial_group_action, trivial_rep, twisted_cochain_maps, twisted_lefschetz_direct,
    twisted_lefschetz_nielsen, validate_complex, value_at_one, zeta_rho, zeta_torsion_pairing, EquivariantComplex,
};
use deloc_core::scalar::Scalar;
use deloc_core::{BigRational, Complex64};
use serde_json::{json, Value};

use crate::args::NielsenCmd;
use crate::error::CliError;
use crate::input::{read_json, ComplexDto, Rep, RepDto};
use crate::output::{complex, rational, real};
use crate::record::{Comparison, Context};

/// Torsions summed on each side of the Fourier series of the pairing.
const FOURIER_TERMS: i64 = 4000;
/// Agreement of the pairing with its Fourier series, on top of the tail bound.
const FOURIER_AGREEMENT: f64 = 1e-8;

pub fn run(cmd: &NielsenCmd, ctx: &mut Context) -> Result<Value, CliError> {
    match cmd {
        NielsenCmd::Index { file, k } => index(&load(file, ctx)?, *k, ctx),
        NielsenCmd::Zeta { file, rep, terms } => {
            let x = load(file, ctx)?;
            match representation(&x, rep.as_deref(), ctx)? {
                Rep::Exact(r) => zeta(&x, &r, *terms, ctx, rational),
                Rep::Complex(r) => zeta(&x, &r, *terms, ctx, |z: &Complex64| complex(*z)),
            }
        }
        NielsenCmd::Pairing { file, rep } => {
            let x = load(file, ctx)?;
            match representation(&x, rep.as_deref(), ctx)? {
                Rep::Exact(r) => pairing(&x, &r, ctx),
                Rep::Complex(r) => pairing(&x, &r, ctx),
            }
        }
    }
}

fn load(path: &Path, ctx: &mut Context) -> Result<EquivariantComplex, CliError> {
    let x = read_json::<ComplexDto>(ctx, path)?.build()?;
    let report = validate_complex(&x)?;
    ctx.note("group_order", report.group_order);
    ctx.note("cochain_ranks", report.cochain_ranks);
    Ok(x)
}

fn representation(x: &EquivariantComplex, path: Option<&Path>, ctx: &mut Context) -> Result<Rep, CliError> {
    match path {
        Some(p) => read_json::<RepDto>(ctx, p)?.build(x),
        None => {
            ctx.note("representation", "trivial");
            Ok(Rep::Exact(trivial_rep(x)?))
        }
    }
}

fn label(x: &EquivariantComplex, f: usize) -> Value {
    json!(x.group().labels()[f])
}

fn index(x: &EquivariantComplex, k: u32, ctx: &mut Context) -> Result<Value, CliError> {
    ctx.formula("nielsen-index");
    let table = nielsen_table(x, k)?;
    let mut total = 0i64;
    let mut classes = Vec::new();
    for (c, members) in table.classes.partition.classes.iter().enumerate() {
        let index = table.index(members[0])?;
        total += index;
        classes.push(json!({
            "representative": label(x, members[0]),
            "elements": members.iter().map(|&f| label(x, f)).collect::<Vec<_>>(),
            "stabilizer_order": table.classes.stabilizer_orders[c],
            "index": index,
        }));
    }
    if ctx.oracle {
        ctx.formula("quotient-lefschetz");
        let direct = twisted_lefschetz_direct(x, &trivial_rep(x)?, k)?;
        let total = BigRational::from_i64(total);
        ctx.compare(Comparison::exact(
            "sum of indices",
            "quotient-lefschetz",
            &total,
            &direct,
            rational,
        ));
    }
    Ok(json!({ "k": k, "classes": classes, "total": total }))
}

fn zeta<T: Scalar>(
    x: &EquivariantComplex,
    rep: &InducedRep<T>,
    terms: u32,
    ctx: &mut Context,
    show: impl Fn(&T) -> Value + Copy,
) -> Result<Value, CliError> {
    ctx.formula("twisted-lefschetz-nielsen");
    ctx.formula("twisted-zeta");
    let lefschetz = (1..=terms)
        .map(|r| twisted_lefschetz_nielsen(x, rep, r))
        .collect::<Result<Vec<T>, _>>()?;
    if ctx.oracle {
        ctx.formula("twisted-lefschetz-cochain-trace");
        for (i, l) in lefschetz.iter().enumerate() {
            let r = i as u32 + 1;
            let direct = twisted_lefschetz_direct(x, rep, r)?;
            let c = if T::is_exact() {
                Comparison::exact(format!("L({r})"), "cochain-trace", l, &direct, show)
            } else {
                let (a, b) = (l.to_complex(), direct.to_complex());
                Comparison::numeric(format!("L({r})"), "cochain-trace", a, b, 1e-9 * (1.0 + a.norm()))
            };
            ctx.compare(c);
        }
    }
    let zeta = zeta_rho(x, rep)?;
    let (leading, order) = value_at_one(&zeta);
    Ok(json!({
        "period": rep.period(),
        "dimension": rep.dimension(),
        "lefschetz": lefschetz.iter().map(show).collect::<Vec<_>>(),
        "order_at_one": order,
        "value_at_one": if order == 0 { show(&leading) } else { Value::Null },
        "leading_coefficient_at_one": show(&leading),
    }))
}

fn pairing<T: Scalar>(x: &EquivariantComplex, rep: &InducedRep<T>, ctx: &mut Context) -> Result<Value, CliError> {
    ctx.formula("torsion-pairing");
    let value = zeta_torsion_pairing(x, rep)?;
    if ctx.oracle {
        let maps = twisted_cochain_maps(x, rep)?;
        let dets: Vec<Complex64> = maps
            .iter()
            .map(|a| {
                Matrix::identity(a.rows())
                    .sub(&a.to_complex())
                    .to_nalgebra()
                    .determinant()
            })
            .collect();
        if dets.iter().any(|d| d.norm() < 1e-12) {
            // Cancelling zeros at 1 need the exact deflation of the primary route.
            ctx.note(
                "oracle",
                "some det(I - A_p) vanishes; the determinant route does not apply",
            );
        } else {
            ctx.formula("twisted-determinants");
            let zeta_one =
                dets.iter().enumerate().fold(
                    Complex64::new(1.0, 0.0),
                    |acc, (p, d)| if p % 2 == 0 { acc / d } else { acc * d },
                );
            let tol = ctx.fixed_tolerance("determinant_agreement", 1e-9);
            ctx.compare(Comparison::numeric(
                "pairing",
                "twisted-determinants",
                Complex64::new(value, 0.0),
                Complex64::new(zeta_one.norm_sqr().ln(), 0.0),
                tol * (1.0 + value.abs()),
            ));
        }
        if let Some(theta) = circle_character(x, rep) {
            ctx.formula("circle-fourier-integral");
            let action = trivial_group_action(x)?;
            let mut series = zeroth_fourier_coefficient(&action)?;
            for k in 1..=FOURIER_TERMS {
                let e = Complex64::from_polar(1.0, k as f64 * theta);
                series += (e * torsion_k(&action, k)? + e.conj() * torsion_k(&action, -k)?).re;
            }
            let tol = ctx.fixed_tolerance("fourier_series_agreement", FOURIER_AGREEMENT);
            let tail = unit_circle_tail(&action.to_complex().spectra()?, theta);
            ctx.note("fourier_terms", FOURIER_TERMS);
            ctx.note("fourier_tail_bound", real(tail));
            ctx.compare(Comparison::numeric(
                "pairing",
                "torsion-fourier-series",
                Complex64::new(value, 0.0),
                Complex64::new(series, 0.0),
                tol * (1.0 + value.abs()) + tail,
            ));
        }
    }
    Ok(real(value))
}

/// Bound on the truncated Fourier tail. An eigenvalue `λ` on the unit circle
/// contributes `2 Re Σ_{k>K} w^k/k` with `w = λe^{iθ}`, and Abel summation
/// bounds that by `4/((K+1)|1 - w|)`; eigenvalues off the circle leave a
/// geometric tail that is negligible after `K` terms.
fn unit_circle_tail(spectra: &[Vec<Complex64>], theta: f64) -> f64 {
    let rotation = Complex64::from_polar(1.0, theta);
    spectra
        .iter()
        .flatten()
        .filter(|l| (l.norm() - 1.0).abs() < 1e-8)
        .map(|l| 4.0 / ((FOURIER_TERMS + 1) as f64 * (Complex64::new(1.0, 0.0) - l * rotation).norm()))
        .sum()
}

/// `θ` when `F` is trivial and the representation is the character
/// `U = e^{iθ}` of the base circle.
fn circle_character<T: Scalar>(x: &EquivariantComplex, rep: &InducedRep<T>) -> Option<f64> {
    let u = rep.u().to_complex();
    let unit = x.group().order() == 1 && rep.period() == 1 && rep.dimension() == 1;
    (unit && (u[(0, 0)].norm() - 1.0).abs() < 1e-12).then(|| u[(0, 0)].arg())
}
