//! Per-run bookkeeping: tolerances, formulas, oracle comparisons and input
//! digests, gathered into the `run_record` of the output document.

use std::collections::BTreeMap;
use std::path::Path;

use deloc_core::scalar::Scalar;
use deloc_core::Complex64;
use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::output;

/// One comparison of a primary value with its independent route.
#[derive(Debug, Clone, Serialize)]
pub struct Comparison {
    pub quantity: String,
    pub route: &'static str,
    pub value: Value,
    pub oracle: Value,
    pub difference: f64,
    pub tolerance: f64,
    pub agrees: bool,
}

impl Comparison {
    /// `|value - oracle| ≤ tolerance`.
    pub fn numeric(
        quantity: impl Into<String>,
        route: &'static str,
        value: Complex64,
        oracle: Complex64,
        tolerance: f64,
    ) -> Self {
        let difference = (value - oracle).norm();
        Self {
            quantity: quantity.into(),
            route,
            value: output::complex(value),
            oracle: output::complex(oracle),
            difference,
            tolerance,
            agrees: difference <= tolerance,
        }
    }

    /// Exact equality in the scalar type; the difference is reported as a
    /// float for reference.
    pub fn exact<T: Scalar>(
        quantity: impl Into<String>,
        route: &'static str,
        value: &T,
        oracle: &T,
        show: impl Fn(&T) -> Value,
    ) -> Self {
        Self {
            quantity: quantity.into(),
            route,
            value: show(value),
            oracle: show(oracle),
            difference: (value.to_complex() - oracle.to_complex()).norm(),
            tolerance: 0.0,
            agrees: value == oracle,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RunRecord {
    pub program: String,
    pub command_line: Vec<String>,
    /// SHA-256 over the input files, each prefixed by its length.
    pub input_digest: String,
    pub input_files: Vec<String>,
    pub tolerances: BTreeMap<String, f64>,
    /// Neutral tags naming the formulas evaluated.
    pub formulas: Vec<&'static str>,
    pub oracle_comparisons: Vec<Comparison>,
    /// SHA-256 of the rendered `result`.
    pub output_digest: String,
}

/// State threaded through a command.
#[derive(Debug)]
pub struct Context {
    pub argv: Vec<String>,
    pub oracle: bool,
    pub tolerance: Option<f64>,
    inputs: Vec<(String, Vec<u8>)>,
    tolerances: BTreeMap<String, f64>,
    formulas: Vec<&'static str>,
    comparisons: Vec<Comparison>,
    diagnostics: Map<String, Value>,
}

impl Context {
    pub fn new(argv: Vec<String>, oracle: bool, tolerance: Option<f64>) -> Self {
        Self {
            argv,
            oracle,
            tolerance,
            inputs: Vec::new(),
            tolerances: BTreeMap::new(),
            formulas: Vec::new(),
            comparisons: Vec::new(),
            diagnostics: Map::new(),
        }
    }

    pub fn add_input(&mut self, path: &Path, bytes: &[u8]) {
        self.inputs.push((path.display().to_string(), bytes.to_vec()));
    }

    /// The `--tolerance` override if given, else `default`; recorded under `name`.
    pub fn tolerance(&mut self, name: &str, default: f64) -> f64 {
        let v = self.tolerance.unwrap_or(default);
        self.tolerances.insert(name.into(), v);
        v
    }

    /// Records a tolerance that `--tolerance` does not override.
    pub fn fixed_tolerance(&mut self, name: &str, v: f64) -> f64 {
        self.tolerances.insert(name.into(), v);
        v
    }

    pub fn formula(&mut self, tag: &'static str) {
        if !self.formulas.contains(&tag) {
            self.formulas.push(tag);
        }
    }

    pub fn note(&mut self, key: &str, value: impl Into<Value>) {
        self.diagnostics.insert(key.into(), value.into());
    }

    pub fn compare(&mut self, c: Comparison) {
        self.comparisons.push(c);
    }

    pub fn comparisons(&self) -> &[Comparison] {
        &self.comparisons
    }

    pub fn finish(self, result: &Value) -> (Value, RunRecord) {
        let mut hasher = Sha256::new();
        for (_, bytes) in &self.inputs {
            hasher.update((bytes.len() as u64).to_le_bytes());
            hasher.update(bytes);
        }
        let input_digest = format!("sha256:{:x}", hasher.finalize());
        let output_digest = format!("sha256:{:x}", Sha256::digest(output::to_json(result).as_bytes()));
        let record = RunRecord {
            program: format!("deloc {}", env!("CARGO_PKG_VERSION")),
            command_line: self.argv,
            input_digest,
            input_files: self.inputs.into_iter().map(|(name, _)| name).collect(),
            tolerances: self.tolerances,
            formulas: self.formulas,
            oracle_comparisons: self.comparisons,
            output_digest,
        };
        (Value::Object(self.diagnostics), record)
    }
}
