//! Finite `Γ`: twisted invariants `X(M; E_ρ) = Σ_i χ_ρ(g_i) X_⟨g_i⟩(M)` and the
//! inverse passage from per-representation values back to class values.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{DelocError, Result};
use crate::groups::CharacterTable;
use crate::invariants::InvariantKind;
use crate::linalg::condition_number;

/// Condition numbers above this attach a warning to the inversion.
pub const CONDITION_WARNING: f64 = 1e8;

/// One delocalized value per conjugacy class of the table.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassValueVector {
    table: CharacterTable,
    values: Vec<Complex64>,
    kind: InvariantKind,
}

impl ClassValueVector {
    pub fn new(table: CharacterTable, values: Vec<Complex64>, kind: InvariantKind) -> Result<Self> {
        if values.len() != table.class_sizes.len() {
            return Err(DelocError::Schema(format!(
                "{} values for {} conjugacy classes",
                values.len(),
                table.class_sizes.len()
            )));
        }
        Ok(Self { table, values, kind })
    }

    pub fn table(&self) -> &CharacterTable {
        &self.table
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn kind(&self) -> InvariantKind {
        self.kind
    }
}

/// `Σ_i χ_ρ(g_i) v_i` for every irreducible `ρ`, in table row order.
pub fn twisted_from_delocalized(v: &ClassValueVector) -> Vec<Complex64> {
    v.table
        .rows
        .iter()
        .map(|row| row.iter().zip(&v.values).map(|(chi, x)| chi * x).sum())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Inversion {
    pub values: ClassValueVector,
    pub condition_number: f64,
    pub warning: Option<String>,
}

/// Solves `Σ_i χ_ρ(g_i) v_i = per_rep[ρ]` by LU, so supplied tables need no
/// canonical ordering of classes or representations.
pub fn delocalized_from_twisted(
    table: &CharacterTable,
    per_rep: &[Complex64],
    kind: InvariantKind,
) -> Result<Inversion> {
    let r = table.class_sizes.len();
    if table.rows.len() != r || table.rows.iter().any(|row| row.len() != r) {
        return Err(DelocError::Schema("character table must be square".into()));
    }
    if per_rep.len() != r {
        return Err(DelocError::Schema(format!(
            "{} values for {r} representations",
            per_rep.len()
        )));
    }
    let chi = table.as_matrix();
    let cond = condition_number(&chi)?;
    let solution = chi
        .clone()
        .lu()
        .solve(&DVector::from_column_slice(per_rep))
        .ok_or_else(|| DelocError::Numeric("character table is singular".into()))?;
    let warning = (cond > CONDITION_WARNING).then(|| format!("character table condition number {cond:.3e}"));
    Ok(Inversion {
        values: ClassValueVector::new(table.clone(), solution.iter().copied().collect(), kind)?,
        condition_number: cond,
        warning,
    })
}
