use deloc_core::heat_trace::{
    delocalized_betti, delocalized_heat_trace, lattice_heat_trace, DecayModel, LaurentMatrixComplex, TorusQuadOptions,
};
use deloc_core::Complex64;
use serde_json::{json, Value};

use super::agreement;
use crate::args::HeatTraceArgs;
use crate::error::CliError;
use crate::input::{read_json, LaurentComplexDto};
use crate::output::{complex, real};
use crate::record::{Comparison, Context};

pub fn run(args: &HeatTraceArgs, ctx: &mut Context) -> Result<Value, CliError> {
    let (x, real_coefficients) = match &args.file {
        Some(path) => {
            let dto = read_json::<LaurentComplexDto>(ctx, path)?;
            let real = dto.diff.iter().flatten().flatten().flatten().all(|t| t.coeff[1] == 0.0);
            (dto.build()?, real)
        }
        None => {
            ctx.note("complex", format!("standard torus T^{}", args.m.len()));
            (LaurentMatrixComplex::torus(args.m.len()), true)
        }
    };
    let defaults = TorusQuadOptions::default();
    let options = TorusQuadOptions {
        tolerance: ctx.tolerance("torus_quadrature", defaults.tolerance),
        ..defaults
    };
    ctx.formula("delocalized-heat-trace-fourier");
    match args.t {
        Some(t) => {
            let value = trace(&x, args, t, &options, ctx)?;
            if real_coefficients {
                ctx.note("imaginary_residual", real(value.im));
            }
            Ok(render(value, real_coefficients))
        }
        None => betti(&x, args, &options, real_coefficients, ctx),
    }
}

/// Real coefficients make Tr(θ) even in θ, so every Tr_⟨m⟩ is real and the
/// imaginary part is rounding noise.
fn render(v: Complex64, real_coefficients: bool) -> Value {
    if real_coefficients {
        real(v.re)
    } else {
        complex(v)
    }
}

fn trace(
    x: &LaurentMatrixComplex,
    args: &HeatTraceArgs,
    t: f64,
    options: &TorusQuadOptions,
    ctx: &mut Context,
) -> Result<Complex64, CliError> {
    let v = delocalized_heat_trace(x, args.p, &args.m, t, options)?;
    ctx.note("grid", v.grid);
    ctx.note("refinement_error", real(v.error));
    if ctx.oracle {
        ctx.formula("finite-quotient-propagation");
        let lattice = lattice_heat_trace(x, args.p, &args.m, t)?;
        ctx.note(
            "lattice",
            json!({ "period": lattice.period, "aliasing_bound": real(lattice.aliasing_bound) }),
        );
        let tol = agreement(options.tolerance, v.value.norm());
        ctx.compare(Comparison::numeric(
            "heat trace",
            "finite-quotient",
            v.value,
            lattice.value,
            tol,
        ));
    }
    Ok(v.value)
}

fn betti(
    x: &LaurentMatrixComplex,
    args: &HeatTraceArgs,
    options: &TorusQuadOptions,
    real_coefficients: bool,
    ctx: &mut Context,
) -> Result<Value, CliError> {
    ctx.formula("delocalized-betti-extrapolation");
    ctx.fixed_tolerance("t_max", args.t_max);
    let report = delocalized_betti(x, args.p, &args.m, args.t_max, options)?;
    if ctx.oracle {
        ctx.formula("finite-quotient-propagation");
        let &(t, last) = report.ladder.last().expect("at least five ladder points");
        let lattice = lattice_heat_trace(x, args.p, &args.m, t)?;
        ctx.note(
            "lattice",
            json!({ "t": real(t), "period": lattice.period, "aliasing_bound": real(lattice.aliasing_bound) }),
        );
        let tol = agreement(options.tolerance, last.norm());
        ctx.compare(Comparison::numeric(
            "heat trace at t_max",
            "finite-quotient",
            last,
            lattice.value,
            tol,
        ));
    }
    Ok(json!({
        "limit": render(report.extrapolated_limit, real_coefficients),
        "anomaly": report.anomaly,
        "preferred_decay": match report.preferred {
            DecayModel::Exponential => "exponential",
            DecayModel::Power => "power",
        },
        "exponential_rate": real(report.exponential_rate),
        "exponential_residual": real(report.exponential_residual),
        "power_exponent": real(report.power_exponent),
        "power_residual": real(report.power_residual),
        "ladder": report.ladder.iter().map(|&(t, v)| json!({ "t": real(t), "trace": render(v, real_coefficients) })).collect::<Vec<_>>(),
    }))
}
