//! JSON core format:
//! `{"L": int, "kind": "vector"|"matrix", "cores": [...]}` where each vector
//! core is a `[r_left][2][r_right]` nesting and each matrix core a
//! `[r_left][2][2][r_right]` nesting of `[re, im]` pairs.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{json, Value};

use super::{MatrixCore, QttMatrix, QttVector, VectorCore};
use crate::error::{Error, Result};

fn pair(c: Complex64) -> Value {
    json!([c.re, c.im])
}

fn parse_pair(v: &Value) -> Result<Complex64> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::InvalidInput("expected [re, im] pair".into()))?;
    let re = arr[0]
        .as_f64()
        .ok_or_else(|| Error::InvalidInput("re must be a number".into()))?;
    let im = arr[1]
        .as_f64()
        .ok_or_else(|| Error::InvalidInput("im must be a number".into()))?;
    Ok(Complex64::new(re, im))
}

fn parse_array(v: &Value, what: &str) -> Result<Vec<Value>> {
    v.as_array()
        .cloned()
        .ok_or_else(|| Error::InvalidInput(format!("expected array for {what}")))
}

impl QttVector {
    pub fn to_json(&self) -> Value {
        let cores: Vec<Value> = self
            .cores()
            .iter()
            .map(|core| {
                let rows: Vec<Value> = (0..core.left_rank())
                    .map(|alpha| {
                        let modes: Vec<Value> = (0..2)
                            .map(|i| {
                                let cols: Vec<Value> = (0..core.right_rank())
                                    .map(|beta| pair(core.slice(i)[(alpha, beta)]))
                                    .collect();
                                Value::Array(cols)
                            })
                            .collect();
                        Value::Array(modes)
                    })
                    .collect();
                Value::Array(rows)
            })
            .collect();
        json!({"L": self.levels(), "kind": "vector", "cores": cores})
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let (levels, cores) = parse_header(value, "vector")?;
        let mut out = Vec::with_capacity(levels);
        for core in cores {
            let rows = parse_array(&core, "core")?;
            let r_left = rows.len();
            let mut slices: Option<[DMatrix<Complex64>; 2]> = None;
            for (alpha, row) in rows.iter().enumerate() {
                let modes = parse_array(row, "mode axis")?;
                if modes.len() != 2 {
                    return Err(Error::InvalidInput(
                        "vector core mode size must be 2".into(),
                    ));
                }
                for (i, mode) in modes.iter().enumerate() {
                    let cols = parse_array(mode, "rank axis")?;
                    let slices = slices.get_or_insert_with(|| {
                        [
                            DMatrix::zeros(r_left, cols.len()),
                            DMatrix::zeros(r_left, cols.len()),
                        ]
                    });
                    if cols.len() != slices[0].ncols() {
                        return Err(Error::InvalidInput("ragged core array".into()));
                    }
                    for (beta, entry) in cols.iter().enumerate() {
                        slices[i][(alpha, beta)] = parse_pair(entry)?;
                    }
                }
            }
            let slices = slices.ok_or_else(|| Error::InvalidInput("core has zero rank".into()))?;
            out.push(VectorCore::new(slices)?);
        }
        QttVector::new(out)
    }
}

impl QttMatrix {
    pub fn to_json(&self) -> Value {
        let cores: Vec<Value> = self
            .cores()
            .iter()
            .map(|core| {
                let rows: Vec<Value> = (0..core.left_rank())
                    .map(|alpha| {
                        let row_modes: Vec<Value> = (0..2)
                            .map(|i| {
                                let col_modes: Vec<Value> = (0..2)
                                    .map(|j| {
                                        let cols: Vec<Value> = (0..core.right_rank())
                                            .map(|beta| pair(core.slice(i, j)[(alpha, beta)]))
                                            .collect();
                                        Value::Array(cols)
                                    })
                                    .collect();
                                Value::Array(col_modes)
                            })
                            .collect();
                        Value::Array(row_modes)
                    })
                    .collect();
                Value::Array(rows)
            })
            .collect();
        json!({"L": self.levels(), "kind": "matrix", "cores": cores})
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let (levels, cores) = parse_header(value, "matrix")?;
        let mut out = Vec::with_capacity(levels);
        for core in cores {
            let rows = parse_array(&core, "core")?;
            let r_left = rows.len();
            let mut slices: Option<[DMatrix<Complex64>; 4]> = None;
            for (alpha, row) in rows.iter().enumerate() {
                let row_modes = parse_array(row, "row mode axis")?;
                if row_modes.len() != 2 {
                    return Err(Error::InvalidInput("matrix core row mode must be 2".into()));
                }
                for (i, row_mode) in row_modes.iter().enumerate() {
                    let col_modes = parse_array(row_mode, "column mode axis")?;
                    if col_modes.len() != 2 {
                        return Err(Error::InvalidInput(
                            "matrix core column mode must be 2".into(),
                        ));
                    }
                    for (j, col_mode) in col_modes.iter().enumerate() {
                        let cols = parse_array(col_mode, "rank axis")?;
                        let slices = slices.get_or_insert_with(|| {
                            std::array::from_fn(|_| DMatrix::zeros(r_left, cols.len()))
                        });
                        if cols.len() != slices[0].ncols() {
                            return Err(Error::InvalidInput("ragged core array".into()));
                        }
                        for (beta, entry) in cols.iter().enumerate() {
                            slices[2 * i + j][(alpha, beta)] = parse_pair(entry)?;
                        }
                    }
                }
            }
            let slices = slices.ok_or_else(|| Error::InvalidInput("core has zero rank".into()))?;
            out.push(MatrixCore::new(slices)?);
        }
        QttMatrix::new(out)
    }
}

fn parse_header(value: &Value, expected_kind: &str) -> Result<(usize, Vec<Value>)> {
    let levels = value
        .get("L")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::InvalidInput("missing integer field 'L'".into()))?
        as usize;
    let kind = value
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::InvalidInput("missing string field 'kind'".into()))?;
    if kind != expected_kind {
        return Err(Error::InvalidInput(format!(
            "kind mismatch: expected {expected_kind}, got {kind}"
        )));
    }
    let cores = parse_array(
        value
            .get("cores")
            .ok_or_else(|| Error::InvalidInput("missing field 'cores'".into()))?,
        "cores",
    )?;
    if cores.len() != levels {
        return Err(Error::InvalidInput(format!(
            "L = {levels} but {} cores present",
            cores.len()
        )));
    }
    Ok((levels, cores))
}
