//! JSON files for coefficients, correlation tables, realizations and
//! embedding specs.
//!
//! Reals are written with shortest round-trip formatting, so parse after
//! serialize reproduces every stored value bit for bit.

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::correlations::CorrelationTables;
use crate::error::{Error, Result};
use crate::ideal::{Measurement, Realization, ALICE_SETTINGS, BOB_SETTINGS};
use crate::qlinalg::{Operator, StateVector, C64};
use crate::schmidt::SchmidtCoefficients;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientsFile {
    pub d: usize,
    pub c: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TablesFile {
    pub d: usize,
    pub tables: BTreeMap<String, Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stderr_max: Option<f64>,
}

type Matrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationFile {
    #[serde(rename = "dimA")]
    pub dim_a: usize,
    #[serde(rename = "dimB")]
    pub dim_b: usize,
    pub state: Vec<[f64; 2]>,
    pub alice: Vec<Vec<Matrix>>,
    pub bob: Vec<Vec<Matrix>>,
}

fn parse_error(origin: &str, message: impl Into<String>) -> Error {
    Error::Parse { origin: origin.to_string(), message: message.into() }
}

/// Deserializes `text`, reporting the failing field path and line/column.
pub fn from_json<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            parse_error(origin, inner.to_string())
        } else {
            parse_error(origin, format!("field `{path}`: {inner}"))
        }
    })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("file types serialize without error")
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })
}

impl CoefficientsFile {
    pub fn from_coefficients(sc: &SchmidtCoefficients) -> Self {
        CoefficientsFile { d: sc.d(), c: sc.as_slice().to_vec() }
    }

    pub fn into_coefficients(self) -> Result<SchmidtCoefficients> {
        SchmidtCoefficients::validate(self.d, self.c)
    }
}

pub fn parse_coefficients(text: &str, origin: &str) -> Result<SchmidtCoefficients> {
    from_json::<CoefficientsFile>(text, origin)?.into_coefficients()
}

pub fn coefficients_to_json(sc: &SchmidtCoefficients) -> String {
    to_json(&CoefficientsFile::from_coefficients(sc))
}

fn parse_key(key: &str) -> Option<(usize, usize)> {
    let (x, y) = key.split_once(',')?;
    let (x, y) = (x.trim().parse().ok()?, y.trim().parse().ok()?);
    (x < ALICE_SETTINGS && y < BOB_SETTINGS).then_some((x, y))
}

impl TablesFile {
    pub fn from_tables(t: &CorrelationTables) -> Self {
        let d = t.d();
        let tables = t
            .present_pairs()
            .into_iter()
            .map(|(x, y)| {
                let flat = t.get(x, y).expect("present");
                (format!("{x},{y}"), flat.chunks(d).map(<[f64]>::to_vec).collect())
            })
            .collect();
        TablesFile { d, tables, shots: None, seed: None, stderr_max: None }
    }

    pub fn into_tables(self, origin: &str) -> Result<CorrelationTables> {
        let d = self.d;
        if d < 2 {
            return Err(parse_error(origin, format!("field `d`: must be at least 2, got {d}")));
        }
        let mut out = CorrelationTables::empty(d);
        for (key, rows) in self.tables {
            let (x, y) = parse_key(&key)
                .ok_or_else(|| parse_error(origin, format!("field `tables.{key}`: key must be \"x,y\" with x<3, y<4")))?;
            if rows.len() != d || rows.iter().any(|row| row.len() != d) {
                return Err(parse_error(origin, format!("field `tables.{key}`: expected a {d}x{d} table")));
            }
            out.set(x, y, rows.concat()).map_err(|e| parse_error(origin, format!("field `tables.{key}`: {e}")))?;
        }
        Ok(out)
    }
}

pub fn parse_tables(text: &str, origin: &str) -> Result<CorrelationTables> {
    from_json::<TablesFile>(text, origin)?.into_tables(origin)
}

pub fn tables_to_json(t: &CorrelationTables) -> String {
    to_json(&TablesFile::from_tables(t))
}

fn matrix_to_file(op: &Operator) -> Matrix {
    (0..op.dim()).map(|i| op.row(i).iter().map(|z| [z.re, z.im]).collect()).collect()
}

fn matrix_from_file(m: &Matrix, dim: usize, field: &str, origin: &str) -> Result<Operator> {
    if m.len() != dim || m.iter().any(|row| row.len() != dim) {
        return Err(parse_error(origin, format!("field `{field}`: expected a {dim}x{dim} matrix")));
    }
    let data = m.iter().flatten().map(|&[re, im]| C64::new(re, im)).collect();
    Operator::from_row_major(dim, data).map_err(|e| parse_error(origin, format!("field `{field}`: {e}")))
}

impl RealizationFile {
    pub fn from_realization(r: &Realization) -> Self {
        let side = |ms: &[Measurement]| -> Vec<Vec<Matrix>> {
            ms.iter().map(|m| m.projectors().iter().map(matrix_to_file).collect()).collect()
        };
        RealizationFile {
            dim_a: r.dim_a(),
            dim_b: r.dim_b(),
            state: r.state().amplitudes().iter().map(|z| [z.re, z.im]).collect(),
            alice: side(r.alice_measurements()),
            bob: side(r.bob_measurements()),
        }
    }

    /// Shape problems are parse errors; invalid projectors or an
    /// unnormalized state are constraint errors.
    pub fn into_realization(self, origin: &str) -> Result<Realization> {
        let (da, db) = (self.dim_a, self.dim_b);
        if da == 0 || db == 0 {
            return Err(parse_error(origin, "fields `dimA`, `dimB`: must be positive"));
        }
        if self.state.len() != da * db {
            return Err(parse_error(
                origin,
                format!("field `state`: has {} amplitudes, expected dimA*dimB = {}", self.state.len(), da * db),
            ));
        }
        let side = |name: &str, settings: &[Vec<Matrix>], count: usize, dim: usize| -> Result<Vec<Measurement>> {
            if settings.len() != count {
                return Err(parse_error(origin, format!("field `{name}`: expected {count} settings, got {}", settings.len())));
            }
            settings
                .iter()
                .enumerate()
                .map(|(s, projs)| {
                    let ops = projs
                        .iter()
                        .enumerate()
                        .map(|(a, m)| matrix_from_file(m, dim, &format!("{name}[{s}][{a}]"), origin))
                        .collect::<Result<Vec<_>>>()?;
                    Measurement::new(ops).map_err(|e| match e {
                        Error::Measurement { reason, .. } => {
                            Error::Measurement { context: format!("{origin}: {name}[{s}]"), reason }
                        }
                        other => other,
                    })
                })
                .collect()
        };
        let alice = side("alice", &self.alice, ALICE_SETTINGS, da)?;
        let bob = side("bob", &self.bob, BOB_SETTINGS, db)?;
        let state = StateVector::new(self.state.iter().map(|&[re, im]| C64::new(re, im)).collect())?;
        Realization::new(da, db, state, alice, bob)
    }
}

pub fn parse_realization(text: &str, origin: &str) -> Result<Realization> {
    from_json::<RealizationFile>(text, origin)?.into_realization(origin)
}

pub fn realization_to_json(r: &Realization) -> String {
    to_json(&RealizationFile::from_realization(r))
}
