use deloc_core::integrals::{gaussian_moment, gaussian_moment_quadrature};
use deloc_core::invariants::{
    dual_class_value, vanishing_rule, ClassLabel, InvariantKind, InvariantValue, VanishingKind,
};
use deloc_core::{Complex64, DEFAULT_TOLERANCE};
use serde_json::{json, Value};

use super::agreement;
use crate::args::{CoreCmd, KindArg, VanishingArg};
use crate::error::CliError;
use crate::output::{complex, real};
use crate::record::{Comparison, Context};

pub fn run(cmd: &CoreCmd, ctx: &mut Context) -> Result<Value, CliError> {
    match *cmd {
        CoreCmd::GaussianMoment { l, c } => {
            ctx.formula("gaussian-moment");
            let value = gaussian_moment(l, c)?;
            if ctx.oracle {
                ctx.formula("torsion-mellin-integral");
                let tol = ctx.tolerance("quadrature", DEFAULT_TOLERANCE);
                let est = gaussian_moment_quadrature(l, c, tol)?;
                ctx.compare(Comparison::numeric(
                    "moment",
                    "quadrature",
                    Complex64::new(value, 0.0),
                    est.value,
                    agreement(tol, value),
                ));
            }
            Ok(real(value))
        }
        CoreCmd::Vanishing { dimension, kind } => {
            ctx.formula("dimension-vanishing");
            let kind = match kind {
                VanishingArg::Torsion => VanishingKind::Torsion,
                VanishingArg::SignatureEta => VanishingKind::SignatureEta,
            };
            let forced = vanishing_rule(dimension, kind);
            Ok(json!({ "forced": forced.is_some(), "value": forced.map_or(Value::Null, complex) }))
        }
        CoreCmd::Dual { kind, ref label, value } => {
            ctx.formula("inverse-class-conjugation");
            let kind = match kind {
                KindArg::Betti => InvariantKind::Betti,
                KindArg::Torsion => InvariantKind::Torsion,
                KindArg::Eta => InvariantKind::Eta,
            };
            let dual = dual_class_value(&InvariantValue {
                kind,
                class_label: ClassLabel::new(label.clone()),
                value,
            });
            Ok(json!({ "label": dual.class_label.as_str(), "value": complex(dual.value) }))
        }
    }
}
