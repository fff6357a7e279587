//! JSON input formats and their conversion into core types.

use std::path::Path;

use deloc_core::groups::{verify_character_table, Automorphism, CharacterTable, FiniteGroup, InducedRep};
use deloc_core::heat_trace::{LaurentMatrix, LaurentMatrixComplex, LaurentPoly};
use deloc_core::hyperbolic::GeodesicClass;
use deloc_core::linalg::Matrix;
use deloc_core::mapping_torus::CohomologyAction;
use deloc_core::nielsen::EquivariantComplex;
use deloc_core::scalar::Scalar;
use deloc_core::{BigRational, Complex64};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::CliError;
use crate::record::Context;

/// Reads `path`, records its bytes for the input digest and deserializes it,
/// reporting schema violations with the JSON path of the offending value.
pub fn read_json<T: DeserializeOwned>(ctx: &mut Context, path: &Path) -> Result<T, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    ctx.add_input(path, &bytes);
    let de = &mut serde_json::Deserializer::from_slice(&bytes);
    serde_path_to_error::deserialize(de).map_err(|e| CliError::Schema {
        file: path.display().to_string(),
        pointer: json_path(e.path()),
        message: e.inner().to_string(),
    })
}

fn json_path(path: &serde_path_to_error::Path) -> String {
    let p = path.to_string();
    if p == "." {
        "$".into()
    } else {
        format!("$.{p}")
    }
}

/// Matrix entry: an integer, a rational `"p/q"`, a float or `[re, im]`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Integer(i64),
    Real(f64),
    Pair([f64; 2]),
    Ratio(String),
}

/// Exact matrix entry: an integer or a rational `"p/q"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ExactEntry {
    Integer(i64),
    Ratio(String),
}

fn parse_ratio(s: &str, at: &str) -> Result<BigRational, CliError> {
    s.trim()
        .parse::<BigRational>()
        .map_err(|e| CliError::Input(format!("{at}: {s:?} is not a rational number ({e})")))
}

impl ExactEntry {
    fn to_rational(&self, at: &str) -> Result<BigRational, CliError> {
        match self {
            ExactEntry::Integer(v) => Ok(BigRational::from_i64(*v)),
            ExactEntry::Ratio(s) => parse_ratio(s, at),
        }
    }
}

impl Entry {
    fn to_rational(&self, at: &str) -> Result<Option<BigRational>, CliError> {
        match self {
            Entry::Integer(v) => Ok(Some(BigRational::from_i64(*v))),
            Entry::Ratio(s) => parse_ratio(s, at).map(Some),
            Entry::Real(_) | Entry::Pair(_) => Ok(None),
        }
    }

    fn to_complex(&self, at: &str) -> Result<Complex64, CliError> {
        Ok(match self {
            Entry::Integer(v) => Complex64::new(*v as f64, 0.0),
            Entry::Real(v) => Complex64::new(*v, 0.0),
            Entry::Pair([re, im]) => Complex64::new(*re, *im),
            Entry::Ratio(s) => parse_ratio(s, at)?.to_complex(),
        })
    }
}

type Rows<E> = Vec<Vec<E>>;

fn matrix_from<E, T: Scalar>(
    rows: &Rows<E>,
    at: &str,
    f: impl Fn(&E, &str) -> Result<T, CliError>,
) -> Result<Matrix<T>, CliError> {
    let converted = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, e)| f(e, &format!("{at}[{i}][{j}]")))
                .collect()
        })
        .collect::<Result<Vec<Vec<T>>, CliError>>()?;
    Matrix::from_rows(converted).map_err(|e| CliError::Input(format!("{at}: {e}")))
}

/// The same matrices over ℚ when every entry is exact, otherwise over ℂ.
pub enum Matrices {
    Exact(Vec<Matrix<BigRational>>),
    Complex(Vec<Matrix<Complex64>>),
}

fn matrices(list: &[(String, &Rows<Entry>)]) -> Result<Matrices, CliError> {
    let exact = list.iter().all(|(_, rows)| {
        rows.iter()
            .flatten()
            .all(|e| matches!(e, Entry::Integer(_) | Entry::Ratio(_)))
    });
    if exact {
        let rational = |e: &Entry, at: &str| Ok(e.to_rational(at)?.expect("checked exact"));
        list.iter()
            .map(|(at, rows)| matrix_from(rows, at, rational))
            .collect::<Result<Vec<_>, _>>()
            .map(Matrices::Exact)
    } else {
        list.iter()
            .map(|(at, rows)| matrix_from(rows, at, Entry::to_complex))
            .collect::<Result<Vec<_>, _>>()
            .map(Matrices::Complex)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeodesicDto {
    pub n: usize,
    pub k: u32,
    pub l: f64,
    pub angles: Vec<f64>,
}

impl GeodesicDto {
    pub fn build(self) -> Result<GeodesicClass, CliError> {
        Ok(GeodesicClass::new(self.n, self.k, self.l, self.angles)?)
    }
}

/// `{matrices: [φ*_0, φ*_1, …]}`, each a list of rows.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionDto {
    pub matrices: Vec<Rows<Entry>>,
}

pub enum Action {
    Exact(CohomologyAction<BigRational>),
    Complex(CohomologyAction<Complex64>),
}

impl Action {
    pub fn complex(&self) -> CohomologyAction<Complex64> {
        match self {
            Action::Exact(a) => a.to_complex(),
            Action::Complex(a) => a.clone(),
        }
    }
}

impl ActionDto {
    pub fn build(&self) -> Result<Action, CliError> {
        let list: Vec<(String, &Rows<Entry>)> = self
            .matrices
            .iter()
            .enumerate()
            .map(|(p, m)| (format!("$.matrices[{p}]"), m))
            .collect();
        Ok(match matrices(&list)? {
            Matrices::Exact(m) => Action::Exact(CohomologyAction::new(m)?),
            Matrices::Complex(m) => Action::Complex(CohomologyAction::new(m)?),
        })
    }
}

/// `{order, mul_table, labels}` with `mul_table[a·order + b] = ab`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupDto {
    pub order: usize,
    pub mul_table: Vec<usize>,
    #[serde(default)]
    pub labels: Option<Vec<String>>,
}

impl GroupDto {
    pub fn build(self) -> Result<FiniteGroup, CliError> {
        Ok(FiniteGroup::from_table(self.order, self.mul_table, self.labels)?)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegreeDto {
    pub orbits: usize,
    /// Coboundary to the next degree; absent in the top degree.
    #[serde(default)]
    pub diff: Option<Rows<ExactEntry>>,
    pub phi_hat: Rows<ExactEntry>,
}

/// `{group, automorphism, degrees}`; matrices use the row convention, with
/// row `a` holding the image of the basis cochain `a`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDto {
    pub group: GroupDto,
    pub automorphism: Vec<usize>,
    pub degrees: Vec<DegreeDto>,
}

impl ComplexDto {
    pub fn build(self) -> Result<EquivariantComplex, CliError> {
        let group = self.group.build()?;
        let alpha = Automorphism::new(&group, self.automorphism)?;
        let top = self
            .degrees
            .len()
            .checked_sub(1)
            .ok_or_else(|| CliError::Input("$.degrees is empty".into()))?;
        let mut orbits = Vec::new();
        let mut diff = Vec::new();
        let mut phi_hat = Vec::new();
        for (p, d) in self.degrees.iter().enumerate() {
            orbits.push(d.orbits);
            phi_hat.push(matrix_from(
                &d.phi_hat,
                &format!("$.degrees[{p}].phi_hat"),
                ExactEntry::to_rational,
            )?);
            match (&d.diff, p < top) {
                (Some(rows), true) => diff.push(matrix_from(
                    rows,
                    &format!("$.degrees[{p}].diff"),
                    ExactEntry::to_rational,
                )?),
                (None, false) => {}
                (None, true) => {
                    return Err(CliError::Input(format!(
                        "$.degrees[{p}].diff is required below the top degree"
                    )))
                }
                (Some(_), false) => {
                    return Err(CliError::Input(format!(
                        "$.degrees[{p}].diff must be absent in the top degree"
                    )))
                }
            }
        }
        Ok(EquivariantComplex::new(group, alpha, orbits, diff, phi_hat)?)
    }
}

/// `{j, mu, u}`: `mu[f]` for every element of `F` and the intertwiner `U`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepDto {
    pub j: u32,
    pub mu: Vec<Rows<Entry>>,
    pub u: Rows<Entry>,
}

pub enum Rep {
    Exact(InducedRep<BigRational>),
    Complex(InducedRep<Complex64>),
}

impl RepDto {
    pub fn build(&self, x: &EquivariantComplex) -> Result<Rep, CliError> {
        let mut list: Vec<(String, &Rows<Entry>)> = self
            .mu
            .iter()
            .enumerate()
            .map(|(f, m)| (format!("$.mu[{f}]"), m))
            .collect();
        list.push(("$.u".into(), &self.u));
        Ok(match matrices(&list)? {
            Matrices::Exact(mut m) => {
                let u = m.pop().expect("u is last");
                Rep::Exact(InducedRep::new(x.group(), x.alpha(), self.j, m, u)?)
            }
            Matrices::Complex(mut m) => {
                let u = m.pop().expect("u is last");
                Rep::Complex(InducedRep::new(x.group(), x.alpha(), self.j, m, u)?)
            }
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDto {
    pub exponent: Vec<i64>,
    pub coeff: [f64; 2],
}

/// `{rank, cells, diff}`: `diff[p]` is a `cells[p+1] × cells[p]` matrix whose
/// entries are lists of Laurent terms.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaurentComplexDto {
    pub rank: usize,
    pub cells: Vec<usize>,
    pub diff: Vec<Rows<Vec<TermDto>>>,
}

impl LaurentComplexDto {
    pub fn build(self) -> Result<LaurentMatrixComplex, CliError> {
        let diff = self
            .diff
            .into_iter()
            .map(|rows| {
                let rows = rows
                    .into_iter()
                    .map(|row| {
                        row.into_iter()
                            .map(|terms| {
                                LaurentPoly::from_terms(
                                    terms
                                        .into_iter()
                                        .map(|t| (t.exponent, Complex64::new(t.coeff[0], t.coeff[1]))),
                                )
                            })
                            .collect()
                    })
                    .collect();
                LaurentMatrix::from_rows(rows)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(LaurentMatrixComplex::new(self.rank, self.cells, diff)?)
    }
}

/// `{class_sizes, rows, representatives?}` with `rows[ρ][i] = [re, im]`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableDto {
    pub class_sizes: Vec<usize>,
    pub rows: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    pub representatives: Option<Vec<usize>>,
}

impl TableDto {
    pub fn build(self) -> Result<CharacterTable, CliError> {
        let table = CharacterTable {
            representatives: self
                .representatives
                .unwrap_or_else(|| (0..self.class_sizes.len()).collect()),
            class_sizes: self.class_sizes,
            rows: self
                .rows
                .into_iter()
                .map(|r| r.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
                .collect(),
        };
        verify_character_table(&table)?;
        Ok(table)
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindDto {
    Betti,
    Torsion,
    Eta,
}

/// `{kind, values}`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValuesDto {
    pub kind: KindDto,
    pub values: Vec<Entry>,
}

impl ValuesDto {
    pub fn complex_values(&self) -> Result<Vec<Complex64>, CliError> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, e)| e.to_complex(&format!("$.values[{i}]")))
            .collect()
    }
}
