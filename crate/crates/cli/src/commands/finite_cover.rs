use deloc_core::finite_cover::{delocalized_from_twisted, twisted_from_delocalized, ClassValueVector};
use deloc_core::groups::{character_table, CharacterTable};
use deloc_core::invariants::InvariantKind;
use deloc_core::Complex64;
use serde_json::{json, Value};

use crate::args::{FiniteCoverCmd, TableSource};
use crate::error::CliError;
use crate::input::{read_json, GroupDto, KindDto, TableDto, ValuesDto};
use crate::output::{complex, real};
use crate::record::{Comparison, Context};

/// Round trips must reproduce the input to this (absolute, per entry).
const ROUND_TRIP: f64 = 1e-10;

pub fn run(cmd: &FiniteCoverCmd, ctx: &mut Context) -> Result<Value, CliError> {
    match cmd {
        FiniteCoverCmd::ToTwisted(src) => to_twisted(src, ctx),
        FiniteCoverCmd::FromTwisted(src) => from_twisted(src, ctx),
    }
}

fn load(src: &TableSource, ctx: &mut Context) -> Result<(CharacterTable, InvariantKind, Vec<Complex64>), CliError> {
    let table = match (&src.character_table, &src.group) {
        (Some(path), _) => read_json::<TableDto>(ctx, path)?.build()?,
        (None, Some(path)) => {
            ctx.formula("burnside-character-table");
            character_table(&read_json::<GroupDto>(ctx, path)?.build()?)?
        }
        (None, None) => return Err(CliError::Input("give --character-table or --group".into())),
    };
    let values = read_json::<ValuesDto>(ctx, &src.values)?;
    let kind = match values.kind {
        KindDto::Betti => InvariantKind::Betti,
        KindDto::Torsion => InvariantKind::Torsion,
        KindDto::Eta => InvariantKind::Eta,
    };
    let v = values.complex_values()?;
    if v.len() != table.class_sizes.len() {
        return Err(CliError::Input(format!(
            "{}: {} values for {} conjugacy classes",
            src.values.display(),
            v.len(),
            table.class_sizes.len()
        )));
    }
    ctx.note("class_sizes", table.class_sizes.clone());
    Ok((table, kind, v))
}

fn kind_name(kind: InvariantKind) -> &'static str {
    match kind {
        InvariantKind::Betti => "betti",
        InvariantKind::Torsion => "torsion",
        InvariantKind::Eta => "eta",
    }
}

fn worst(a: &[Complex64], b: &[Complex64]) -> (usize, f64) {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .enumerate()
        .fold((0, 0.0), |acc, (i, d)| if d > acc.1 { (i, d) } else { acc })
}

fn to_twisted(src: &TableSource, ctx: &mut Context) -> Result<Value, CliError> {
    ctx.formula("twisted-from-class-values");
    let (table, kind, values) = load(src, ctx)?;
    let results = twisted_from_delocalized(&ClassValueVector::new(table.clone(), values.clone(), kind)?);
    if ctx.oracle {
        ctx.formula("class-values-from-twisted");
        let back = delocalized_from_twisted(&table, &results, kind)?;
        let (i, _) = worst(back.values.values(), &values);
        let tol = ctx.fixed_tolerance("round_trip", ROUND_TRIP);
        ctx.compare(Comparison::numeric(
            format!("class value {i}"),
            "inverse-transform",
            values[i],
            back.values.values()[i],
            tol,
        ));
    }
    Ok(json!({ "kind": kind_name(kind), "results": results.into_iter().map(complex).collect::<Vec<_>>() }))
}

fn from_twisted(src: &TableSource, ctx: &mut Context) -> Result<Value, CliError> {
    ctx.formula("class-values-from-twisted");
    let (table, kind, per_rep) = load(src, ctx)?;
    let inversion = delocalized_from_twisted(&table, &per_rep, kind)?;
    if let Some(w) = &inversion.warning {
        ctx.note("warning", w.clone());
    }
    if ctx.oracle {
        ctx.formula("twisted-from-class-values");
        let forward =
            twisted_from_delocalized(&ClassValueVector::new(table, inversion.values.values().to_vec(), kind)?);
        let (i, _) = worst(&forward, &per_rep);
        let tol = ctx.fixed_tolerance("round_trip", ROUND_TRIP);
        ctx.compare(Comparison::numeric(
            format!("representation {i}"),
            "forward-transform",
            per_rep[i],
            forward[i],
            tol,
        ));
    }
    Ok(json!({
        "kind": kind_name(kind),
        "results": inversion.values.values().iter().copied().map(complex).collect::<Vec<_>>(),
        "condition_number": real(inversion.condition_number),
    }))
}
