//! JSON documents read and written by the `locc` binary.
//!
//! Complex numbers are `[re, im]` pairs. State amplitudes are a flat list in
//! `μ = i + d·j` order; matrices are lists of rows.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::NumericConfig;
use crate::error::{LoccError, Result};
use crate::kernel::ComplexMatrix;
use crate::locc::CopyProtocol;
use crate::states::{BipartiteState, SchmidtVector, UnitaryMatrix};

fn pair(z: &Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn complex(p: &[f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

/// `{ "d": int, "amplitudes": [[re, im], ...] }`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    pub d: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

impl StateJson {
    pub fn from_state(s: &BipartiteState) -> Self {
        Self { d: s.dim(), amplitudes: s.amplitudes().iter().map(pair).collect() }
    }

    pub fn to_state(&self, config: &NumericConfig) -> Result<BipartiteState> {
        let amps: Vec<Complex64> = self.amplitudes.iter().map(complex).collect();
        BipartiteState::from_flat(self.d, &amps, config)
    }
}

/// `{ "probs": [...] }` or `{ "coeffs": [...] }`; coefficients are squared.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SchmidtJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probs: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<f64>>,
}

impl SchmidtJson {
    pub fn to_vector(&self, tol: f64) -> Result<SchmidtVector> {
        match (&self.probs, &self.coeffs) {
            (Some(p), None) => SchmidtVector::new(p.clone(), tol),
            (None, Some(c)) => SchmidtVector::from_coeffs(c, tol),
            (Some(_), Some(_)) => Err(LoccError::Domain("give either \"probs\" or \"coeffs\", not both".into())),
            (None, None) => Err(LoccError::Domain("Schmidt document needs \"probs\" or \"coeffs\"".into())),
        }
    }

    pub fn from_vector(v: &SchmidtVector) -> Self {
        Self { probs: Some(v.probs().to_vec()), coeffs: None }
    }
}

/// Rows of `[re, im]` pairs.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &ComplexMatrix) -> MatrixJson {
    m.row_iter().map(|row| row.iter().map(pair).collect()).collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<ComplexMatrix> {
    let n = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    if let Some((k, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
        return Err(LoccError::Shape(format!("matrix row {k} has {} entries, expected {cols}", r.len())));
    }
    Ok(ComplexMatrix::from_fn(n, cols, |i, j| complex(&rows[i][j])))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolJson {
    pub d: usize,
    pub blank: StateJson,
    #[serde(rename = "A")]
    pub a: MatrixJson,
    #[serde(rename = "B")]
    pub b: MatrixJson,
    pub phases: Vec<f64>,
    pub wiring: String,
}

impl ProtocolJson {
    pub fn from_protocol(p: &CopyProtocol) -> Self {
        Self {
            d: p.d,
            blank: StateJson::from_state(&p.blank),
            a: matrix_to_json(p.a_op.matrix()),
            b: matrix_to_json(p.b_op.matrix()),
            phases: p.phases.clone(),
            wiring: p.wiring.clone(),
        }
    }

    pub fn to_protocol(&self, config: &NumericConfig) -> Result<CopyProtocol> {
        let blank = self.blank.to_state(config)?;
        if blank.dim() != self.d {
            return Err(LoccError::Shape(format!("blank has d = {}, protocol says {}", blank.dim(), self.d)));
        }
        let d2 = self.d * self.d;
        let a_op = UnitaryMatrix::new(matrix_from_json(&self.a)?, config.unitarity_tol)?;
        let b_op = UnitaryMatrix::new(matrix_from_json(&self.b)?, config.unitarity_tol)?;
        if a_op.dim() != d2 || b_op.dim() != d2 {
            return Err(LoccError::Shape(format!("A and B must be {d2}x{d2}")));
        }
        Ok(CopyProtocol { d: self.d, blank, a_op, b_op, phases: self.phases.clone(), wiring: self.wiring.clone() })
    }
}

/// A generated pair of states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairJson {
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub psi1: StateJson,
    pub psi2: StateJson,
}

impl PairJson {
    pub fn new(psi1: &BipartiteState, psi2: &BipartiteState, family: Option<String>, seed: Option<u64>) -> Self {
        Self { d: psi1.dim(), family, seed, psi1: StateJson::from_state(psi1), psi2: StateJson::from_state(psi2) }
    }

    pub fn to_states(&self, config: &NumericConfig) -> Result<(BipartiteState, BipartiteState)> {
        Ok((self.psi1.to_state(config)?, self.psi2.to_state(config)?))
    }
}
