//! Copying orthogonal maximally entangled states by local operations and
//! classical communication.
//!
//! The crate decides whether a pair of orthogonal maximally entangled states
//! of two `D`-level systems can be copied onto a maximally entangled blank
//! by local unitaries, synthesizes those unitaries, checks them by
//! simulating all four particles, and provides the majorization tools for
//! copying a single partially entangled state (possibly catalytically).
//!
//! Modules, bottom-up:
//! - [`kernel`]: dense complex linear algebra and the global index convention.
//! - [`states`]: bipartite states, Schmidt vectors, unitary parameterization.
//! - [`majorization`]: majorization, convertibility, catalytic copying.
//! - [`locc`]: pair operator, spectral verdict, synthesis of `A` and `B`.
//! - [`simulator`]: four-particle verification and protocol transcripts.
//! - [`generators`]: seeded families of test pairs.
//! - [`io`]: JSON formats used by the `locc` binary.

pub mod config;
pub mod error;
pub mod generators;
pub mod io;
pub mod kernel;
pub mod locc;
pub mod majorization;
pub mod simulator;
pub mod states;

pub use config::NumericConfig;
pub use error::{LoccError, Result};
pub use locc::{
    degeneracy_form_check, orthogonality, pair_operator, spectral_verdict, synthesize_a, synthesize_protocol,
    CopyProtocol, Orthogonality, SpectrumReport,
};
pub use majorization::{catalytic_copy_check, find_catalytic_pair, majorizes, nielsen_transformable, CopyVerdict};
pub use simulator::{apply_local, assemble, emit_locc_transcript, verify_copy, FourPartyState};
pub use states::{
    from_unitary, max_entangled, overlap, schmidt, unitary_of_state, BipartiteState, SchmidtVector, UnitaryMatrix,
};
