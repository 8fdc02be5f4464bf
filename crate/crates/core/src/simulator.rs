//! Four-particle simulation of a copy protocol.
//!
//! Particles are ordered (1,2,3,4) with particle 1 the fastest index; pair
//! (1,2) holds the state being copied and (3,4) the blank. Alice owns
//! particles 1 and 3, Bob owns 2 and 4.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LoccError, Result};
use crate::kernel::{kron_vec, permute_factors, ComplexMatrix, ComplexVector};
use crate::locc::CopyProtocol;
use crate::states::{BipartiteState, UnitaryMatrix};

/// Reorders (1,2,3,4) into (1,3,2,4); it is its own inverse.
pub const ALICE_BOB_ORDER: [usize; 4] = [0, 2, 1, 3];

#[derive(Debug, Clone, PartialEq)]
pub struct FourPartyState {
    d: usize,
    vector: ComplexVector,
}

impl FourPartyState {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn vector(&self) -> &ComplexVector {
        &self.vector
    }

    /// Wraps a `d⁴` vector in particle order (1,2,3,4).
    pub fn from_vector(d: usize, vector: ComplexVector) -> Result<Self> {
        if vector.len() != d.pow(4) {
            return Err(LoccError::Shape(format!("expected {} amplitudes, got {}", d.pow(4), vector.len())));
        }
        Ok(Self { d, vector })
    }
}

/// `|ψ^{12}⟩⊗|b^{34}⟩`.
pub fn assemble(psi: &BipartiteState, blank: &BipartiteState) -> Result<FourPartyState> {
    if psi.dim() != blank.dim() {
        return Err(LoccError::Shape(format!("cannot assemble d = {} with d = {}", psi.dim(), blank.dim())));
    }
    Ok(FourPartyState { d: psi.dim(), vector: kron_vec(&psi.to_vector(), &blank.to_vector()) })
}

/// Applies `A^{13}⊗B^{24}`.
pub fn apply_local(state: &FourPartyState, a_op: &UnitaryMatrix, b_op: &UnitaryMatrix) -> Result<FourPartyState> {
    let d = state.d;
    let d2 = d * d;
    if a_op.dim() != d2 || b_op.dim() != d2 {
        return Err(LoccError::Shape(format!(
            "local operators must be {d2}x{d2}, got {} and {}",
            a_op.dim(),
            b_op.dim()
        )));
    }
    let dims = [d; 4];
    let alice_first = permute_factors(&state.vector, &dims, &ALICE_BOB_ORDER)?;
    // Index μ13 + D²·μ24 is entry (μ13, μ24) of a column-major D²×D² grid,
    // and (A⊗B) acts on that grid as A·X·Bᵀ.
    let grid = ComplexMatrix::from_column_slice(d2, d2, alice_first.as_slice());
    let out = a_op.matrix() * grid * b_op.matrix().transpose();
    let flat = ComplexVector::from_column_slice(out.as_slice());
    Ok(FourPartyState { d, vector: permute_factors(&flat, &dims, &ALICE_BOB_ORDER)? })
}

/// Fidelity and phase of one simulated copy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CopyOutcome {
    /// `|⟨ψ⊗ψ|output⟩|²`.
    pub fidelity: f64,
    /// `arg⟨ψ⊗ψ|output⟩`, the `θ_j` of the copy.
    pub theta: f64,
}

pub fn copy_outcome(protocol: &CopyProtocol, psi: &BipartiteState) -> Result<CopyOutcome> {
    if psi.dim() != protocol.d {
        return Err(LoccError::Shape(format!("protocol is for d = {}, state has d = {}", protocol.d, psi.dim())));
    }
    let input = assemble(psi, &protocol.blank)?;
    let output = apply_local(&input, &protocol.a_op, &protocol.b_op)?;
    let target = assemble(psi, psi)?;
    let amp: Complex64 = target.vector.dotc(&output.vector);
    Ok(CopyOutcome { fidelity: amp.norm_sqr().min(1.0), theta: amp.arg() })
}

/// Phase-insensitive fidelity of copying `psi` with `protocol`.
pub fn verify_copy(protocol: &CopyProtocol, psi: &BipartiteState) -> Result<f64> {
    Ok(copy_outcome(protocol, psi)?.fidelity)
}

/// How the two parties run a synthesized protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoccTranscript {
    /// Number of Kraus branches `K`; the shared random variable has `K` values.
    pub branches: usize,
    /// Probability `(f_k g_k)²` of each branch.
    pub branch_probabilities: Vec<f64>,
    pub communication_rounds: usize,
    pub wiring: String,
    pub steps: Vec<String>,
}

impl fmt::Display for LoccTranscript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "wiring: {}", self.wiring)?;
        writeln!(f, "branches K = {}, classical communication rounds = {}", self.branches, self.communication_rounds)?;
        for (k, step) in self.steps.iter().enumerate() {
            writeln!(f, "{}. {step}", k + 1)?;
        }
        Ok(())
    }
}

/// A synthesized protocol is one unitary pair, so `K = 1` with `f_1 g_1 = 1`
/// and nothing needs to be communicated.
pub fn emit_locc_transcript(protocol: &CopyProtocol) -> LoccTranscript {
    LoccTranscript {
        branches: 1,
        branch_probabilities: vec![1.0],
        communication_rounds: 0,
        wiring: protocol.wiring.clone(),
        steps: vec![
            "Alice applies A¹³".to_string(),
            "Alice sends nothing required".to_string(),
            "Bob applies B²⁴".to_string(),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{ONE, ZERO};
    use crate::locc::WIRING;
    use crate::states::max_entangled;

    fn basis_state(d: usize, labels: [usize; 4]) -> FourPartyState {
        let mut v = ComplexVector::zeros(d.pow(4));
        let idx = labels[0] + d * (labels[1] + d * (labels[2] + d * labels[3]));
        v[idx] = ONE;
        FourPartyState::from_vector(d, v).unwrap()
    }

    #[test]
    fn assemble_two_phi_plus() {
        let phi = max_entangled(2).unwrap();
        let s = assemble(&phi, &phi).unwrap();
        assert_eq!(s.vector().len(), 16);
        let nonzero: Vec<usize> = (0..16).filter(|&k| s.vector()[k] != ZERO).collect();
        // |i i k k⟩ sits at i + 2i + 4k + 8k.
        assert_eq!(nonzero, vec![0, 3, 12, 15]);
        assert!(nonzero.iter().all(|&k| (s.vector()[k].re - 0.5).abs() < 1e-15));
    }

    #[test]
    fn assemble_rejects_mismatched_dims() {
        assert!(assemble(&max_entangled(2).unwrap(), &max_entangled(3).unwrap()).is_err());
    }

    #[test]
    fn identity_operators_leave_state_unchanged() {
        let phi = max_entangled(3).unwrap();
        let s = assemble(&phi, &phi).unwrap();
        let id = UnitaryMatrix::identity(9);
        assert_eq!(apply_local(&s, &id, &id).unwrap(), s);
    }

    #[test]
    fn swap_on_alice_exchanges_particles_one_and_three() {
        let d = 3;
        // SWAP on (1,3): |i⟩_1|k⟩_3 -> |k⟩_1|i⟩_3, index i + d·k.
        let swap = ComplexMatrix::from_fn(d * d, d * d, |row, col| {
            let (i, k) = (col % d, col / d);
            if row == k + d * i {
                ONE
            } else {
                ZERO
            }
        });
        let swap = UnitaryMatrix::new(swap, 1e-12).unwrap();
        let input = basis_state(d, [2, 0, 1, 1]);
        let out = apply_local(&input, &swap, &UnitaryMatrix::identity(d * d)).unwrap();
        assert_eq!(out, basis_state(d, [1, 0, 2, 1]));
    }

    #[test]
    fn bob_operator_acts_on_particles_two_and_four() {
        let d = 2;
        // X on particle 2 only: X ⊗ 1 in Bob's (2,4) ordering.
        let x_on_2 = ComplexMatrix::from_fn(4, 4, |row, col| {
            let (i, k) = (col % 2, col / 2);
            if row == (1 - i) + 2 * k {
                ONE
            } else {
                ZERO
            }
        });
        let x_on_2 = UnitaryMatrix::new(x_on_2, 1e-12).unwrap();
        let out = apply_local(&basis_state(d, [1, 0, 1, 1]), &UnitaryMatrix::identity(4), &x_on_2).unwrap();
        assert_eq!(out, basis_state(d, [1, 1, 1, 1]));
    }

    #[test]
    fn transcript_is_single_branch() {
        let phi = max_entangled(2).unwrap();
        let protocol = CopyProtocol {
            d: 2,
            blank: phi.clone(),
            a_op: UnitaryMatrix::identity(4),
            b_op: UnitaryMatrix::identity(4),
            phases: vec![0.0],
            wiring: WIRING.to_string(),
        };
        let t = emit_locc_transcript(&protocol);
        assert_eq!(t.branches, 1);
        assert_eq!(t.communication_rounds, 0);
        assert_eq!(t.branch_probabilities, vec![1.0]);
        assert!(t.to_string().contains(WIRING));
        assert!((verify_copy(&protocol, &phi).unwrap() - 1.0).abs() < 1e-14);
    }
}
