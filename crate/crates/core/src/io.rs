//! JSON formats for pure states and density matrices.
//!
//! A state is `{"dims": [2, 2, 3], "amps": [[re, im], ...]}` with amplitudes in
//! A-major order; a density matrix is `{"dims": [2, 2], "mat": [[re, im], ...]}`
//! with entries row-major.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::numerics::{norm_sqr, ComplexMatrix};
use crate::states::{DensityMatrix, PureState};

/// Files whose squared norm is within this of 1 are renormalized on load, so
/// that amplitudes written with a few decimals are accepted.
pub const FILE_NORM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub amps: Vec<[f64; 2]>,
}

impl From<&PureState> for StateFile {
    fn from(s: &PureState) -> Self {
        Self {
            dims: s.dims().to_vec(),
            amps: s.amps().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityFile {
    pub dims: Vec<usize>,
    pub mat: Vec<[f64; 2]>,
}

impl From<&DensityMatrix> for DensityFile {
    fn from(rho: &DensityMatrix) -> Self {
        Self {
            dims: rho.dims().to_vec(),
            mat: rho.matrix().as_slice().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

fn parse_err(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        field: field.into(),
        message: message.into(),
    }
}

fn parse_object(text: &str) -> Result<serde_json::Map<String, Value>> {
    match serde_json::from_str::<Value>(text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(parse_err("document", "expected a JSON object")),
        Err(e) => Err(parse_err("document", e.to_string())),
    }
}

fn field<'a>(map: &'a serde_json::Map<String, Value>, name: &str) -> Result<&'a Value> {
    map.get(name).ok_or_else(|| parse_err(name, "missing field"))
}

fn parse_dims(map: &serde_json::Map<String, Value>) -> Result<Vec<usize>> {
    let arr = field(map, "dims")?
        .as_array()
        .ok_or_else(|| parse_err("dims", "expected a list of integers"))?;
    if arr.is_empty() {
        return Err(parse_err("dims", "empty list"));
    }
    arr.iter()
        .enumerate()
        .map(|(i, v)| match v.as_u64() {
            Some(n) if n >= 1 => Ok(n as usize),
            _ => Err(parse_err(format!("dims[{i}]"), format!("expected a positive integer, got {v}"))),
        })
        .collect()
}

fn parse_complex_list(map: &serde_json::Map<String, Value>, name: &str) -> Result<Vec<Complex64>> {
    let arr = field(map, name)?
        .as_array()
        .ok_or_else(|| parse_err(name, "expected a list of [re, im] pairs"))?;
    arr.iter()
        .enumerate()
        .map(|(i, v)| {
            let pair = v.as_array().filter(|p| p.len() == 2);
            let nums = pair.and_then(|p| Some((p[0].as_f64()?, p[1].as_f64()?)));
            match nums {
                Some((re, im)) if re.is_finite() && im.is_finite() => Ok(Complex64::new(re, im)),
                _ => Err(parse_err(format!("{name}[{i}]"), format!("expected [re, im], got {v}"))),
            }
        })
        .collect()
}

/// Parses a pure state from JSON text.
pub fn parse_state(text: &str) -> Result<PureState> {
    let map = parse_object(text)?;
    let dims = parse_dims(&map)?;
    let amps = parse_complex_list(&map, "amps")?;
    let total: usize = dims.iter().product();
    if amps.len() != total {
        return Err(parse_err(
            "amps",
            format!("{} entries, dims {dims:?} need {total}", amps.len()),
        ));
    }
    let n2 = norm_sqr(&amps);
    if (n2 - 1.0).abs() > FILE_NORM_TOL {
        return Err(parse_err("amps", format!("not normalized (squared norm {n2})")));
    }
    PureState::normalized(dims, amps)
}

/// Parses a density matrix from JSON text; the matrix is validated.
pub fn parse_density(text: &str) -> Result<DensityMatrix> {
    let map = parse_object(text)?;
    let dims = parse_dims(&map)?;
    let entries = parse_complex_list(&map, "mat")?;
    let n: usize = dims.iter().product();
    if entries.len() != n * n {
        return Err(parse_err(
            "mat",
            format!("{} entries, dims {dims:?} need {}", entries.len(), n * n),
        ));
    }
    let mat = ComplexMatrix::from_vec(n, n, entries)?;
    DensityMatrix::new(dims, mat).map_err(|e| parse_err("mat", e.to_string()))
}

pub fn state_to_json(state: &PureState) -> String {
    serde_json::to_string_pretty(&StateFile::from(state)).expect("state serializes")
}

pub fn density_to_json(rho: &DensityMatrix) -> String {
    serde_json::to_string_pretty(&DensityFile::from(rho)).expect("density serializes")
}
