//! Bipartite pure states of two `d`-level systems, their Schmidt
//! decomposition, and the unitary parameterization of maximally entangled
//! states, `|ψ⟩ = (U ⊗ 1)|ψ_max⟩`.

use nalgebra::SVD;
use num_complex::Complex64;

use crate::config::NumericConfig;
use crate::error::{LoccError, Result};
use crate::kernel::{all_finite, unitarity_defect, ComplexMatrix, ComplexVector};

/// A unitary `d×d` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    matrix: ComplexMatrix,
}

impl UnitaryMatrix {
    /// Validates unitarity to within `tol` (Frobenius norm of `U†U − I`).
    pub fn new(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(LoccError::Shape(format!("unitary must be square, got {}x{}", matrix.nrows(), matrix.ncols())));
        }
        if !all_finite(matrix.as_slice()) {
            return Err(LoccError::Precondition("matrix has non-finite entries".into()));
        }
        let defect = unitarity_defect(&matrix);
        if defect >= tol {
            return Err(LoccError::Precondition(format!("matrix is not unitary: ‖U†U − I‖_F = {defect:.3e}")));
        }
        Ok(Self { matrix })
    }

    pub fn identity(d: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(d, d) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint() }
    }

    /// `e^{iφ}·U`.
    pub fn with_phase(&self, phi: f64) -> Self {
        Self { matrix: &self.matrix * Complex64::from_polar(1.0, phi) }
    }

    /// Product of two unitaries; stays unitary up to rounding.
    pub fn mul(&self, rhs: &UnitaryMatrix) -> Self {
        Self { matrix: &self.matrix * &rhs.matrix }
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }
}

/// Pure state `Σ c_ij |x_i⟩⊗|x_j⟩` stored as the `d×d` grid `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    amplitudes: ComplexMatrix,
}

impl BipartiteState {
    pub fn new(amplitudes: ComplexMatrix, config: &NumericConfig) -> Result<Self> {
        if !amplitudes.is_square() || amplitudes.nrows() == 0 {
            return Err(LoccError::Shape(format!(
                "amplitude grid must be a non-empty square, got {}x{}",
                amplitudes.nrows(),
                amplitudes.ncols()
            )));
        }
        if !all_finite(amplitudes.as_slice()) {
            return Err(LoccError::Precondition("state has non-finite amplitudes".into()));
        }
        let norm_sq = amplitudes.norm_squared();
        if (norm_sq - 1.0).abs() > config.normalization_tol {
            return Err(LoccError::Precondition(format!("state is not normalized: Σ|c_ij|² = {norm_sq}")));
        }
        Ok(Self { amplitudes })
    }

    /// Builds a state from `d²` amplitudes listed in `μ = i + d·j` order.
    pub fn from_flat(d: usize, amplitudes: &[Complex64], config: &NumericConfig) -> Result<Self> {
        if amplitudes.len() != d * d {
            return Err(LoccError::Shape(format!(
                "expected {} amplitudes for d = {d}, got {}",
                d * d,
                amplitudes.len()
            )));
        }
        Self::new(ComplexMatrix::from_column_slice(d, d, amplitudes), config)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.nrows()
    }

    pub fn amplitudes(&self) -> &ComplexMatrix {
        &self.amplitudes
    }

    /// Amplitudes as a `d²` vector in `μ` order.
    pub fn to_vector(&self) -> ComplexVector {
        ComplexVector::from_column_slice(self.amplitudes.as_slice())
    }
}

/// Squared Schmidt coefficients, sorted non-increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtVector {
    probs: Vec<f64>,
}

impl SchmidtVector {
    /// Accepts any ordering; negative entries and sums off 1 by more than
    /// `tol` are rejected.
    pub fn new(mut probs: Vec<f64>, tol: f64) -> Result<Self> {
        if probs.is_empty() {
            return Err(LoccError::Domain("Schmidt vector is empty".into()));
        }
        if let Some(bad) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(LoccError::Domain(format!("Schmidt probability {bad} is not a non-negative number")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > tol {
            return Err(LoccError::Domain(format!("Schmidt probabilities sum to {total}, not 1")));
        }
        probs.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { probs })
    }

    /// From Schmidt coefficients `√λ_i`; they are squared on load.
    pub fn from_coeffs(coeffs: &[f64], tol: f64) -> Result<Self> {
        if let Some(bad) = coeffs.iter().find(|c| !c.is_finite() || **c < 0.0) {
            return Err(LoccError::Domain(format!("Schmidt coefficient {bad} is not a non-negative number")));
        }
        Self::new(coeffs.iter().map(|c| c * c).collect(), tol)
    }

    pub fn uniform(d: usize) -> Self {
        Self { probs: vec![1.0 / d as f64; d] }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Largest `|λ_i − 1/d|`.
    pub fn spread_from_uniform(&self) -> f64 {
        let u = 1.0 / self.probs.len() as f64;
        self.probs.iter().map(|p| (p - u).abs()).fold(0.0, f64::max)
    }
}

/// Result of [`schmidt`]: `|ψ⟩ = Σ_k √λ_k |left_k⟩⊗|right_k⟩` with
/// `left_k`, `right_k` the columns of the two bases.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub vector: SchmidtVector,
    pub left: ComplexMatrix,
    pub right: ComplexMatrix,
}

/// `(|00⟩ + |11⟩ + … )/√d`.
pub fn max_entangled(d: usize) -> Result<BipartiteState> {
    if d < 2 {
        return Err(LoccError::Domain(format!("maximally entangled state needs d ≥ 2, got {d}")));
    }
    let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    Ok(BipartiteState { amplitudes: ComplexMatrix::identity(d, d) * amp })
}

/// `(U ⊗ 1)|ψ_max⟩`, i.e. `c_ij = U_ij/√d`.
pub fn from_unitary(u: &UnitaryMatrix) -> BipartiteState {
    let d = u.dim();
    BipartiteState { amplitudes: u.matrix() / Complex64::new((d as f64).sqrt(), 0.0) }
}

/// Recovers `U` with `from_unitary(U) == s`. Fails unless `s` is maximally
/// entangled.
pub fn unitary_of_state(s: &BipartiteState, config: &NumericConfig) -> Result<UnitaryMatrix> {
    let d = s.dim();
    let spread = schmidt(s).vector.spread_from_uniform();
    if spread > config.max_entangled_tol {
        return Err(LoccError::Precondition(format!(
            "state is not maximally entangled: Schmidt probabilities deviate from 1/{d} by up to {spread:.3e}"
        )));
    }
    UnitaryMatrix::new(s.amplitudes() * Complex64::new((d as f64).sqrt(), 0.0), config.unitarity_tol)
}

/// Schmidt decomposition through the SVD of the amplitude grid.
pub fn schmidt(s: &BipartiteState) -> SchmidtDecomposition {
    let svd = SVD::new(s.amplitudes.clone(), true, true);
    let u = svd.u.expect("SVD computed with U");
    let v_t = svd.v_t.expect("SVD computed with V^T");

    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

    let d = s.dim();
    let left = ComplexMatrix::from_fn(d, d, |i, k| u[(i, order[k])]);
    // c = U Σ V†, so the right-hand Schmidt vectors are the rows of V†.
    let right = ComplexMatrix::from_fn(d, d, |j, k| v_t[(order[k], j)]);

    let mut probs: Vec<f64> = order.iter().map(|&k| svd.singular_values[k].powi(2)).collect();
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    SchmidtDecomposition { vector: SchmidtVector { probs }, left, right }
}

/// `⟨b|a⟩ = Σ conj(b_ij)·a_ij`.
pub fn overlap(a: &BipartiteState, b: &BipartiteState) -> Result<Complex64> {
    if a.dim() != b.dim() {
        return Err(LoccError::Shape(format!("overlap of states with d = {} and d = {}", a.dim(), b.dim())));
    }
    Ok(b.amplitudes.iter().zip(a.amplitudes.iter()).map(|(bb, aa)| bb.conj() * aa).sum())
}
