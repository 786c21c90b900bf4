//! JSON file format for measurement models and states.
//!
//! Matrices are row-major nested arrays with complex entries encoded as
//! `[re, im]` pairs; the top-level `dims` array gives the tensor structure
//! `[dim_S, dim_A]`. Outcome labels are strings, or arrays of strings for
//! composite outcomes.
//!
//! Parsing and shape checking are separated from model validation so a
//! caller can distinguish a malformed file (bad JSON, non-square matrix)
//! from a well-formed file describing an invalid model (non-unitary U,
//! effects that do not sum to the identity).

use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::measurement::{MeasurementModel, Outcome, PointerObservable};
use crate::opcore::{DensityState, Operator};

/// Complex number as a `[re, im]` pair.
pub type ComplexPair = (f64, f64);
/// Row-major complex matrix.
pub type MatrixData = Vec<Vec<ComplexPair>>;

/// What went wrong with a file: a parse/shape problem or an invalid model.
#[derive(Debug)]
pub enum FileError {
    /// I/O, JSON syntax, or structural shape errors (non-square matrices,
    /// mismatched lengths). The string names the offending field.
    Parse(String),
    /// The file was well-formed but describes an object violating a model
    /// invariant.
    Validation(Error),
}

impl std::fmt::Display for FileError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FileError::Parse(msg) => write!(f, "parse error: {msg}"),
            FileError::Validation(e) => write!(f, "validation error: {e}"),
        }
    }
}

impl std::error::Error for FileError {}

fn matrix_from_data(field: &str, data: &MatrixData) -> Result<DMatrix<C64>, FileError> {
    let n = data.len();
    if n == 0 {
        return Err(FileError::Parse(format!("{field}: empty matrix")));
    }
    for (i, row) in data.iter().enumerate() {
        if row.len() != n {
            return Err(FileError::Parse(format!(
                "{field}: row {i} has {} entries, expected {n} (matrix must be square)",
                row.len()
            )));
        }
    }
    Ok(DMatrix::from_fn(n, n, |i, j| {
        C64::new(data[i][j].0, data[i][j].1)
    }))
}

fn matrix_to_data(m: &DMatrix<C64>) -> MatrixData {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| (m[(i, j)].re, m[(i, j)].im)).collect())
        .collect()
}

/// Pointer observable section of a model file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointerData {
    pub outcomes: Vec<Outcome>,
    pub projectors: Vec<MatrixData>,
}

/// On-disk measurement model.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelFile {
    /// `[dim_S, dim_A]`.
    pub dims: Vec<usize>,
    pub xi: MatrixData,
    #[serde(rename = "U")]
    pub u: MatrixData,
    pub pointer: PointerData,
    #[serde(rename = "H_S0")]
    pub h_s0: MatrixData,
    #[serde(rename = "H_S_tau")]
    pub h_s_tau: MatrixData,
    #[serde(rename = "H_A0")]
    pub h_a0: MatrixData,
    #[serde(rename = "H_A_tau")]
    pub h_a_tau: MatrixData,
}

impl ModelFile {
    pub fn from_model(model: &MeasurementModel) -> Self {
        ModelFile {
            dims: vec![model.dim_s(), model.dim_a()],
            xi: matrix_to_data(model.xi().matrix()),
            u: matrix_to_data(model.premeasurement_unitary().matrix()),
            pointer: PointerData {
                outcomes: model.outcomes().to_vec(),
                projectors: model
                    .pointer()
                    .projectors()
                    .iter()
                    .map(|p| matrix_to_data(p.matrix()))
                    .collect(),
            },
            h_s0: matrix_to_data(model.h_s0().matrix()),
            h_s_tau: matrix_to_data(model.h_s_tau().matrix()),
            h_a0: matrix_to_data(model.h_a0().matrix()),
            h_a_tau: matrix_to_data(model.h_a_tau().matrix()),
        }
    }

    /// Shape-checks every field and then runs the model validators.
    pub fn into_model(&self) -> Result<MeasurementModel, FileError> {
        if self.dims.len() != 2 || self.dims.contains(&0) {
            return Err(FileError::Parse(format!(
                "dims: expected two positive entries [dim_S, dim_A], got {:?}",
                self.dims
            )));
        }
        let (dim_s, dim_a) = (self.dims[0], self.dims[1]);
        let expect = |field: &str, data: &MatrixData, side: usize| -> Result<DMatrix<C64>, FileError> {
            let m = matrix_from_data(field, data)?;
            if m.nrows() != side {
                return Err(FileError::Parse(format!(
                    "{field}: matrix side {} does not match the declared dims ({side})",
                    m.nrows()
                )));
            }
            Ok(m)
        };
        let xi_mat = expect("xi", &self.xi, dim_a)?;
        let u_mat = expect("U", &self.u, dim_s * dim_a)?;
        if self.pointer.outcomes.len() != self.pointer.projectors.len() {
            return Err(FileError::Parse(format!(
                "pointer: {} outcomes for {} projectors",
                self.pointer.outcomes.len(),
                self.pointer.projectors.len()
            )));
        }
        let mut projectors = Vec::with_capacity(self.pointer.projectors.len());
        for (i, p) in self.pointer.projectors.iter().enumerate() {
            let mat = expect(&format!("pointer.projectors[{i}]"), p, dim_a)?;
            projectors.push(Operator::new(vec![dim_a], mat).map_err(FileError::Validation)?);
        }
        let h_s0 = expect("H_S0", &self.h_s0, dim_s)?;
        let h_s_tau = expect("H_S_tau", &self.h_s_tau, dim_s)?;
        let h_a0 = expect("H_A0", &self.h_a0, dim_a)?;
        let h_a_tau = expect("H_A_tau", &self.h_a_tau, dim_a)?;

        let xi = DensityState::from_matrix(vec![dim_a], xi_mat).map_err(FileError::Validation)?;
        let u = Operator::new(vec![dim_s, dim_a], u_mat).map_err(FileError::Validation)?;
        let pointer = PointerObservable::new(self.pointer.outcomes.clone(), projectors)
            .map_err(FileError::Validation)?;
        MeasurementModel::new(
            xi,
            u,
            pointer,
            Operator::new(vec![dim_s], h_s0).map_err(FileError::Validation)?,
            Operator::new(vec![dim_s], h_s_tau).map_err(FileError::Validation)?,
            Operator::new(vec![dim_a], h_a0).map_err(FileError::Validation)?,
            Operator::new(vec![dim_a], h_a_tau).map_err(FileError::Validation)?,
        )
        .map_err(FileError::Validation)
    }
}

/// On-disk system state.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateFile {
    pub rho: MatrixData,
}

impl StateFile {
    pub fn from_state(rho: &DensityState) -> Self {
        StateFile {
            rho: matrix_to_data(rho.matrix()),
        }
    }

    pub fn into_state(&self, dim_s: usize) -> Result<DensityState, FileError> {
        let m = matrix_from_data("rho", &self.rho)?;
        if m.nrows() != dim_s {
            return Err(FileError::Parse(format!(
                "rho: matrix side {} does not match the model's dim_S ({dim_s})",
                m.nrows()
            )));
        }
        DensityState::from_matrix(vec![dim_s], m).map_err(FileError::Validation)
    }
}

pub fn load_model(path: &Path) -> Result<MeasurementModel, FileError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| FileError::Parse(format!("{}: {e}", path.display())))?;
    let file: ModelFile = serde_json::from_str(&text)
        .map_err(|e| FileError::Parse(format!("{}: {e}", path.display())))?;
    file.into_model()
}

pub fn load_state(path: &Path, dim_s: usize) -> Result<DensityState, FileError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| FileError::Parse(format!("{}: {e}", path.display())))?;
    let file: StateFile = serde_json::from_str(&text)
        .map_err(|e| FileError::Parse(format!("{}: {e}", path.display())))?;
    file.into_state(dim_s)
}

pub fn save_model(path: &Path, model: &MeasurementModel) -> std::io::Result<()> {
    let file = ModelFile::from_model(model);
    std::fs::write(path, serde_json::to_string_pretty(&file).expect("serializable"))
}

pub fn save_state(path: &Path, rho: &DensityState) -> std::io::Result<()> {
    let file = StateFile::from_state(rho);
    std::fs::write(path, serde_json::to_string_pretty(&file).expect("serializable"))
}
