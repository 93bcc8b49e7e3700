//! Instance files.
//!
//! Three JSON shapes are accepted:
//!
//! ```json
//! {"dim": 2, "entries": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]]}
//! {"operators": [{"dim": 2, "entries": ...}, ...], "factor_dims": [2, 2]}
//! {"variables": [{"outcomes": [[-1, 1, 2], [1, 1, 2]]}, ...]}
//! ```
//!
//! `entries` holds rows of `[re, im]` pairs. With `factor_dims` the operators
//! are local factors placed on distinct tensor slots; without it they are
//! members acting on one common space.

use std::fs;
use std::path::Path;

use qprob_core::classical::{diagonal_embedding, ClassicalInstance};
use qprob_core::independence::tensor_family;
use qprob_core::operator::{CMatrix, C64};
use qprob_core::{Caps, HermitianOperator, Tolerances};
use serde::{Deserialize, Serialize};

use crate::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum InstanceFile {
    Single(MatrixFile),
    Family {
        operators: Vec<MatrixFile>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        factor_dims: Option<Vec<usize>>,
    },
    Classical(ClassicalInstance),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Operators { operators: Vec<HermitianOperator>, factor_dims: Option<Vec<usize>> },
    Classical(ClassicalInstance),
}

impl MatrixFile {
    pub fn from_operator(x: &HermitianOperator) -> Self {
        let m = x.matrix();
        let entries = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
        Self { dim: x.dim(), entries }
    }

    pub fn to_operator(&self, tol_herm: f64) -> Result<HermitianOperator, HarnessError> {
        if self.entries.len() != self.dim || self.entries.iter().any(|r| r.len() != self.dim) {
            return Err(HarnessError::Input(format!("matrix entries do not form a {0}x{0} array", self.dim)));
        }
        let flat: Vec<C64> = self.entries.iter().flatten().map(|[re, im]| C64::new(*re, *im)).collect();
        if flat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(HarnessError::Input("matrix entries must be finite".into()));
        }
        Ok(HermitianOperator::new(CMatrix::from_row_slice(self.dim, self.dim, &flat), tol_herm)?)
    }
}

impl Instance {
    /// Members `x_1, ..., x_n` on the common space.
    pub fn members(&self, caps: &Caps) -> Result<Vec<HermitianOperator>, HarnessError> {
        match self {
            Self::Operators { operators, factor_dims: None } => Ok(operators.clone()),
            Self::Operators { operators, factor_dims: Some(dims) } => {
                let actual: Vec<usize> = operators.iter().map(HermitianOperator::dim).collect();
                if &actual != dims {
                    return Err(HarnessError::Input(format!("factor_dims {dims:?} do not match operator dims {actual:?}")));
                }
                Ok(tensor_family(operators, caps.dim_cap)?.members().to_vec())
            }
            Self::Classical(inst) => Ok(diagonal_embedding(inst, caps.dim_cap)?.members().to_vec()),
        }
    }

    pub fn as_classical(&self) -> Option<&ClassicalInstance> {
        match self {
            Self::Classical(inst) => Some(inst),
            Self::Operators { .. } => None,
        }
    }

    fn to_file(&self) -> InstanceFile {
        match self {
            Self::Operators { operators, factor_dims } => InstanceFile::Family {
                operators: operators.iter().map(MatrixFile::from_operator).collect(),
                factor_dims: factor_dims.clone(),
            },
            Self::Classical(inst) => InstanceFile::Classical(inst.clone()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("instances serialize")
    }

    pub fn from_json(text: &str, tol: &Tolerances) -> Result<Self, HarnessError> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| HarnessError::Input(format!("instance file: {e}")))?;
        match file {
            InstanceFile::Single(m) => Ok(Self::Operators { operators: vec![m.to_operator(tol.tol_herm)?], factor_dims: None }),
            InstanceFile::Family { operators, factor_dims } => {
                if operators.is_empty() {
                    return Err(HarnessError::Input("instance has no operators".into()));
                }
                let operators = operators.iter().map(|m| m.to_operator(tol.tol_herm)).collect::<Result<_, _>>()?;
                Ok(Self::Operators { operators, factor_dims })
            }
            InstanceFile::Classical(inst) => {
                inst.validate()?;
                Ok(Self::Classical(inst))
            }
        }
    }

    pub fn read(path: &Path, tol: &Tolerances) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text, tol)
    }

    pub fn write(&self, path: &Path) -> Result<(), HarnessError> {
        fs::write(path, self.to_json() + "\n").map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))
    }
}
