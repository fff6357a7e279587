use std::path::Path;

use deloc_core::mapping_torus::{
    atiyah_bott_eta, fourier_torsion_oracle, lefschetz_number, torsion_k, zeta_rational, CohomologyAction,
    FourierOptions,
};
use deloc_core::poly::RationalZeta;
use deloc_core::scalar::Scalar;
use deloc_core::Complex64;
use serde_json::{json, Value};

use super::agreement;
use crate::args::MappingTorusCmd;
use crate::error::CliError;
use crate::input::{read_json, Action, ActionDto};
use crate::output::{complex, rational, real};
use crate::record::{Comparison, Context};

/// Largest number of terms of the exponential series used as the zeta oracle.
const SERIES_TERMS: u32 = 20_000;

pub fn run(cmd: &MappingTorusCmd, ctx: &mut Context) -> Result<Value, CliError> {
    match cmd {
        MappingTorusCmd::Torsion { file, k } => torsion(&load(file, ctx)?, *k, ctx),
        MappingTorusCmd::Zeta { file, at, terms } => zeta(&load(file, ctx)?, *at, *terms, ctx),
        MappingTorusCmd::Eta { supertrace, k } => {
            ctx.formula("atiyah-bott-eta");
            if ctx.oracle {
                ctx.note("oracle", "closed form in the supplied supertrace; no second route");
            }
            Ok(complex(atiyah_bott_eta(*supertrace, *k)?))
        }
    }
}

fn load(path: &Path, ctx: &mut Context) -> Result<Action, CliError> {
    let action = read_json::<ActionDto>(ctx, path)?.build()?;
    let c = action.complex();
    ctx.note("betti_numbers", c.betti_numbers());
    ctx.note("euler_characteristic", c.euler_characteristic());
    Ok(action)
}

fn torsion(action: &Action, k: i64, ctx: &mut Context) -> Result<Value, CliError> {
    ctx.formula("mapping-torus-torsion-spectral");
    let c = action.complex();
    let value = torsion_k(&c, k)?;
    if ctx.oracle {
        ctx.formula("circle-fourier-integral");
        let defaults = FourierOptions::default();
        let options = FourierOptions {
            tolerance: ctx.tolerance("fourier", defaults.tolerance),
            ..defaults
        };
        let est = fourier_torsion_oracle(&c, k, &options)?;
        // Unit-circle eigenvalues leave log singularities and a coarser floor.
        let tol = if est.singular {
            ctx.fixed_tolerance("fourier_singular", options.singular_tolerance);
            10.0 * options.singular_tolerance.max(options.tolerance) * (1.0 + value.norm())
        } else {
            agreement(options.tolerance, value.norm())
        };
        ctx.note(
            "fourier",
            json!({ "grid": est.grid, "error": real(est.error), "singular": est.singular }),
        );
        ctx.compare(Comparison::numeric("torsion", "fourier", value, est.value, tol));
    }
    Ok(complex(value))
}

fn zeta(action: &Action, at: Option<Complex64>, terms: usize, ctx: &mut Context) -> Result<Value, CliError> {
    ctx.formula("lefschetz-zeta-rational");
    let mut result = match action {
        Action::Exact(a) => zeta_terms(a, terms, ctx, rational)?,
        Action::Complex(a) => zeta_terms(a, terms, ctx, |z: &Complex64| complex(*z))?,
    };
    if let Some(z) = at {
        let c = action.complex();
        let rz = zeta_rational(&c)?;
        let order = rz.order_at(z);
        let value = if order < 0 { None } else { Some(rz.evaluate(z)?) };
        result["at"] = complex(z);
        result["order_at"] = json!(order);
        result["value"] = value.map_or(Value::Null, complex);
        if ctx.oracle {
            series_oracle(&c, z, value, ctx)?;
        }
    }
    Ok(result)
}

/// Lefschetz numbers from powers and, under `--oracle`, the log-derivative
/// coefficients of the rational form checked against them.
fn zeta_terms<T: Scalar>(
    action: &CohomologyAction<T>,
    terms: usize,
    ctx: &mut Context,
    show: impl Fn(&T) -> Value + Copy,
) -> Result<Value, CliError> {
    let rz: RationalZeta<T> = zeta_rational(action)?;
    let lefschetz: Vec<T> = (1..=terms as u32).map(|k| lefschetz_number(action, k)).collect();
    if ctx.oracle {
        ctx.formula("zeta-log-derivative");
        let series = rz.log_derivative_series(terms);
        for (i, (l, s)) in lefschetz.iter().zip(&series).enumerate() {
            let c = if T::is_exact() {
                Comparison::exact(format!("L({})", i + 1), "zeta-log-derivative", l, s, show)
            } else {
                let (a, b) = (l.to_complex(), s.to_complex());
                Comparison::numeric(
                    format!("L({})", i + 1),
                    "zeta-log-derivative",
                    a,
                    b,
                    1e-9 * (1.0 + a.norm()),
                )
            };
            ctx.compare(c);
        }
    }
    let factors: Vec<Value> = rz
        .factors
        .iter()
        .map(
            |f| json!({ "exponent": f.exponent, "coefficients": f.poly.coeffs().iter().map(show).collect::<Vec<_>>() }),
        )
        .collect();
    Ok(json!({
        "exact": T::is_exact(),
        "lefschetz": lefschetz.iter().map(show).collect::<Vec<_>>(),
        "factors": factors,
    }))
}

/// `exp(Σ_k L_k z^k / k)` with `L_k` from the spectra, inside the disc of
/// convergence `|z| < 1/max|λ|`.
fn series_oracle(
    action: &CohomologyAction<Complex64>,
    z: Complex64,
    value: Option<Complex64>,
    ctx: &mut Context,
) -> Result<(), CliError> {
    let spectra = action.spectra()?;
    let radius = spectra.iter().flatten().fold(0.0f64, |a, l| a.max(l.norm()));
    let Some(value) = value else {
        ctx.note("oracle", "ζ has a pole at the requested point");
        return Ok(());
    };
    if z.norm() * radius >= 0.95 {
        ctx.note("oracle", format!("the exponential series needs |z| < 0.95/{radius:.6}"));
        return Ok(());
    }
    ctx.formula("zeta-exponential-series");
    let tol = ctx.tolerance("series", deloc_core::DEFAULT_TOLERANCE);
    let count = spectra.iter().map(Vec::len).sum::<usize>() as f64;
    let mut log = Complex64::new(0.0, 0.0);
    let mut powers: Vec<Vec<Complex64>> = spectra.clone();
    for k in 1..=SERIES_TERMS {
        let l_k: Complex64 = powers
            .iter()
            .enumerate()
            .map(|(p, ls)| ls.iter().sum::<Complex64>() * if p % 2 == 0 { 1.0 } else { -1.0 })
            .sum();
        log += l_k * z.powu(k) / f64::from(k);
        // Zero terms happen (L_1 of the antipodal map), so stop on the bound.
        let bound = count * (z.norm() * radius).powi(k as i32) / f64::from(k);
        if bound < 1e-18 * (1.0 + log.norm()) {
            break;
        }
        for (ps, ls) in powers.iter_mut().zip(&spectra) {
            ps.iter_mut().zip(ls).for_each(|(a, b)| *a *= b);
        }
    }
    ctx.compare(Comparison::numeric(
        "zeta",
        "exponential-series",
        value,
        log.exp(),
        agreement(tol, value.norm()),
    ));
    Ok(())
}
