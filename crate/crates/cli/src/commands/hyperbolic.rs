use deloc_core::hyperbolic::{
    eta_closed, millson_eta_sampler, power_class, recover_length, selberg_heat_traces, torsion_closed, GeodesicClass,
    LengthFitMethod, LengthFitOptions,
};
use deloc_core::integrals::{eta_integral, torsion_integral};
use deloc_core::invariants::assemble_torsion_series;
use deloc_core::{Complex64, DEFAULT_TOLERANCE};
use serde_json::{json, Value};

use super::agreement;
use crate::args::{GeodesicArgs, HyperbolicCmd};
use crate::error::CliError;
use crate::input::{read_json, GeodesicDto};
use crate::output::real;
use crate::record::{Comparison, Context};

/// Recovered lengths within this of the input count as agreeing.
const LENGTH_AGREEMENT: f64 = 1e-3;

pub fn run(cmd: &HyperbolicCmd, ctx: &mut Context) -> Result<Value, CliError> {
    match cmd {
        HyperbolicCmd::Torsion(args) => torsion(&geodesic(args, ctx)?, ctx),
        HyperbolicCmd::Eta(args) => eta(&geodesic(args, ctx)?, ctx),
        HyperbolicCmd::LengthSpectrum {
            geodesic: args,
            r_min,
            r_max,
        } => length_spectrum(&geodesic(args, ctx)?, *r_min, *r_max, ctx),
    }
}

fn geodesic(args: &GeodesicArgs, ctx: &mut Context) -> Result<GeodesicClass, CliError> {
    if let Some(path) = &args.file {
        return read_json::<GeodesicDto>(ctx, path)?.build();
    }
    let (Some(n), Some(l)) = (args.n, args.l) else {
        return Err(CliError::Input(
            "give the class with --file, or with --n and --l".into(),
        ));
    };
    let angles = args.angles.clone().unwrap_or_else(|| vec![0.0; n]);
    Ok(GeodesicClass::new(n, args.k.unwrap_or(1), l, angles)?)
}

fn describe(g: &GeodesicClass, ctx: &mut Context) {
    ctx.note("dimension", g.dimension());
    ctx.note("prime_length", real(g.prime_length()));
    ctx.note("holonomy_determinant", real(g.holonomy_determinant()));
}

fn torsion(g: &GeodesicClass, ctx: &mut Context) -> Result<Value, CliError> {
    ctx.formula("hyperbolic-torsion-closed-form");
    describe(g, ctx);
    let value = torsion_closed(g);
    if ctx.oracle {
        ctx.formula("selberg-heat-kernel");
        ctx.formula("torsion-mellin-integral");
        let tol = ctx.tolerance("quadrature", DEFAULT_TOLERANCE);
        let series = assemble_torsion_series(selberg_heat_traces(g)?, Complex64::new(0.0, 0.0))?;
        let est = torsion_integral(&series, tol)?;
        ctx.note("quadrature_error", real(est.error));
        ctx.compare(Comparison::numeric(
            "torsion",
            "selberg-quadrature",
            Complex64::new(value, 0.0),
            est.value,
            agreement(tol, value),
        ));
    }
    Ok(real(value))
}

fn eta(g: &GeodesicClass, ctx: &mut Context) -> Result<Value, CliError> {
    ctx.formula("hyperbolic-eta-closed-form");
    describe(g, ctx);
    let value = eta_closed(g);
    if ctx.oracle {
        if g.n().is_multiple_of(2) {
            ctx.note(
                "oracle",
                "no heat-kernel route exists for even n; the value vanishes by parity",
            );
        } else {
            ctx.formula("millson-heat-kernel");
            ctx.formula("eta-integral");
            let tol = ctx.tolerance("quadrature", DEFAULT_TOLERANCE);
            let est = eta_integral(&millson_eta_sampler(g)?, tol)?;
            ctx.note("quadrature_error", real(est.error));
            ctx.compare(Comparison::numeric(
                "eta",
                "millson-quadrature",
                Complex64::new(value, 0.0),
                est.value,
                agreement(tol, value),
            ));
        }
    }
    Ok(real(value))
}

fn length_spectrum(g: &GeodesicClass, r_min: u32, r_max: u32, ctx: &mut Context) -> Result<Value, CliError> {
    if r_min == 0 || r_max < r_min {
        return Err(CliError::Input(format!("need 1 ≤ r-min ≤ r-max, got {r_min}..{r_max}")));
    }
    ctx.formula("hyperbolic-torsion-closed-form");
    ctx.formula("torsion-length-asymptotics");
    describe(g, ctx);
    let samples = (r_min..=r_max)
        .map(|r| Ok((r, torsion_closed(&power_class(g, r)?))))
        .collect::<Result<Vec<_>, CliError>>()?;
    let fit = recover_length(&samples, g.n(), &LengthFitOptions::default())?;
    let method = match fit.method {
        LengthFitMethod::LogLinear => "log-linear",
        LengthFitMethod::MatrixPencil {
            multiplicity_scaled: true,
        } => "matrix-pencil (r-scaled)",
        LengthFitMethod::MatrixPencil {
            multiplicity_scaled: false,
        } => "matrix-pencil",
    };
    ctx.note("log_linear_residual", real(fit.log_linear_residual));
    if !fit.warnings.is_empty() {
        ctx.note("warnings", fit.warnings.clone());
    }
    if ctx.oracle {
        let tol = ctx.fixed_tolerance("length_agreement", LENGTH_AGREEMENT);
        ctx.compare(Comparison::numeric(
            "length",
            "input-length",
            Complex64::new(fit.length, 0.0),
            Complex64::new(g.length(), 0.0),
            tol,
        ));
    }
    Ok(json!({
        "length": real(fit.length),
        "method": method,
        "residual": real(fit.residual),
        "points_used": fit.points_used,
        "samples": samples.iter().map(|&(r, v)| json!({ "r": r, "torsion": real(v) })).collect::<Vec<_>>(),
    }))
}
