//! Command-line front end for `deloc-core`: JSON input formats, one JSON
//! document per run with a reproducible run record, and exit statuses that
//! separate bad input (2) from numerical failure (3).
//!
//! [`dispatch`] does everything except touching the process streams, so the
//! binary is a thin wrapper and tests can drive it in-process.

use std::ffi::OsString;

use clap::error::ErrorKind;
use clap::Parser;
use serde::Serialize;
use serde_json::{json, Value};

pub mod args;
mod commands;
pub mod error;
pub mod input;
pub mod output;
pub mod record;

use args::Cli;
use error::CliError;
use record::{Context, RunRecord};

/// Environment variable capping the worker threads of the parallel paths.
pub const THREADS_ENV: &str = "DELOC_THREADS";

/// What a run printed and how it ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Serialize)]
struct Document {
    result: Value,
    diagnostics: Value,
    run_record: RunRecord,
}

/// Parses `args` (program name first), runs the command and renders the
/// output document.
pub fn dispatch<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    if let Err(message) = configure_threads() {
        return Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        };
    }
    let argv: Vec<String> = std::iter::once("deloc".to_string())
        .chain(args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()))
        .collect();
    let mut ctx = Context::new(argv, cli.oracle, cli.tolerance);
    let outcome = commands::run(&cli.command, &mut ctx);
    let mismatches: Vec<String> = ctx
        .comparisons()
        .iter()
        .filter(|c| !c.agrees)
        .map(|c| {
            format!(
                "{} via {}: difference {:e} exceeds {:e}",
                c.quantity, c.route, c.difference, c.tolerance
            )
        })
        .collect();
    // A disagreeing oracle keeps the result so both values stay visible.
    let (result, failure) = match outcome {
        Ok(v) if mismatches.is_empty() => (v, None),
        Ok(v) => (v, Some(CliError::OracleMismatch(mismatches.join("; ")))),
        Err(e) => (Value::Null, Some(e)),
    };
    let table = cli.table.then(|| output::text_table(&result));
    let (mut diagnostics, run_record) = ctx.finish(&result);
    let mut stderr = table.unwrap_or_default();
    let code = match &failure {
        Some(e) => {
            diagnostics["error"] = json!({ "kind": e.kind(), "message": e.to_string() });
            stderr.push_str(&format!("error: {e}\n"));
            e.exit_code()
        }
        None => 0,
    };
    let doc = Document {
        result,
        diagnostics,
        run_record,
    };
    Outcome {
        code,
        stdout: output::to_json(&doc),
        stderr,
    }
}

/// Caps the global rayon pool at `DELOC_THREADS` workers when set.
fn configure_threads() -> Result<(), String> {
    let Some(raw) = std::env::var_os(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .to_str()
        .and_then(|s| s.trim().parse().ok())
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got {raw:?}"))?;
    // A second dispatch in the same process finds the pool already built.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}
