//! JSON form of correlation matrices: `{n_modes, re, im}` with `re` and `im`
//! as row-major nested arrays.

use serde::{Deserialize, Serialize};

use crate::error::{FgsError, Result};
use crate::linalg::{C64, CMat};
use crate::state::CorrelationMatrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n_modes: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(n_modes: usize, m: &CMat) -> Self {
        let rows = |f: fn(&C64) -> f64| (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect();
        Self { n_modes, re: rows(|z| z.re), im: rows(|z| z.im) }
    }

    pub fn to_matrix(&self) -> Result<CMat> {
        let n = self.re.len();
        let square = |a: &Vec<Vec<f64>>| a.len() == n && a.iter().all(|r| r.len() == n);
        if !square(&self.re) || !square(&self.im) {
            return Err(FgsError::InvalidInput("re and im must be equal square arrays".into()));
        }
        Ok(CMat::from_fn(n, n, |i, j| C64::new(self.re[i][j], self.im[i][j])))
    }
}

pub fn gamma_to_json(g: &CorrelationMatrix) -> Result<String> {
    serde_json::to_string_pretty(&MatrixJson::from_matrix(g.n_modes(), g.matrix()))
        .map_err(|e| FgsError::InvalidInput(e.to_string()))
}

pub fn gamma_from_json(text: &str) -> Result<CorrelationMatrix> {
    let parsed: MatrixJson = serde_json::from_str(text).map_err(|e| FgsError::InvalidInput(e.to_string()))?;
    let m = parsed.to_matrix()?;
    if m.nrows() != 2 * parsed.n_modes {
        return Err(FgsError::InvalidInput(format!(
            "n_modes = {} but the matrix is {}x{}",
            parsed.n_modes,
            m.nrows(),
            m.ncols()
        )));
    }
    CorrelationMatrix::new(m)
}
