//! One module per subcommand family. Each returns the `result` value and
//! records formulas, tolerances and oracle comparisons in the context.

use serde_json::Value;

use crate::args::Command;
use crate::error::CliError;
use crate::record::Context;

mod core;
mod finite_cover;
mod heat_trace;
mod hyperbolic;
mod mapping_torus;
mod nielsen;

pub fn run(command: &Command, ctx: &mut Context) -> Result<Value, CliError> {
    match command {
        Command::Hyperbolic(cmd) => hyperbolic::run(cmd, ctx),
        Command::MappingTorus(cmd) => mapping_torus::run(cmd, ctx),
        Command::Nielsen(cmd) => nielsen::run(cmd, ctx),
        Command::HeatTrace(args) => heat_trace::run(args, ctx),
        Command::FiniteCover(cmd) => finite_cover::run(cmd, ctx),
        Command::Core(cmd) => core::run(cmd, ctx),
    }
}

/// Agreement threshold for a quadrature-backed oracle run at tolerance `tol`.
fn agreement(tol: f64, value: f64) -> f64 {
    100.0 * tol * (1.0 + value.abs())
}
