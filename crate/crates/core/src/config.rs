use serde::{Deserialize, Serialize};

/// Every numeric tolerance used by the library, in one place.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericConfig {
    /// Bound on `‖U†U − I‖_F` for a matrix to count as unitary.
    pub unitarity_tol: f64,
    /// Bound on `‖V·diag(λ)·V† − M‖_F` accepted from the eigensolver.
    pub eig_reconstruction_tol: f64,
    /// Eigenphase clustering gap, radians.
    pub phase_tol: f64,
    /// Relative trace threshold used by the orthogonality classifier.
    pub ortho_tol: f64,
    /// One-sided slack on majorization partial sums.
    pub sum_tol: f64,
    /// A copy succeeds when fidelity ≥ 1 − `fidelity_tol`.
    pub fidelity_tol: f64,
    /// Max deviation of Schmidt probabilities from 1/d for a maximally entangled state.
    pub max_entangled_tol: f64,
    /// Allowed deviation of a state's norm (and of Schmidt sums) from 1.
    pub normalization_tol: f64,
    /// Largest total dimension any dense object may have.
    pub max_dim: usize,
}

impl Default for NumericConfig {
    fn default() -> Self {
        Self {
            unitarity_tol: 1e-9,
            eig_reconstruction_tol: 1e-10,
            phase_tol: 1e-7,
            ortho_tol: 1e-9,
            sum_tol: 1e-10,
            fidelity_tol: 1e-9,
            max_entangled_tol: 1e-8,
            normalization_tol: 1e-10,
            max_dim: 20_736,
        }
    }
}
