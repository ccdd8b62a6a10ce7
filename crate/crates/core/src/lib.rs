//! Dissipative dynamics through a complex Hamiltonian: phase-space flows,
//! non-hermitian quantization on a grid, the dissipative WKB exponent and a
//! comparison with the ohmic bath model's bounce.

pub mod classical;
pub mod error;
pub mod instanton;
mod linalg;
pub mod phase;
pub mod quantum;
pub mod wkb;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use phase::{Dissipation, PhaseState, Potential, ShiftedState, SystemSpec};

/// Runs dense linear algebra on the calling thread only, so eigensolves and
/// factorisations give the same bits whatever thread pool is active.
pub fn use_sequential_linalg() {
    faer::set_global_parallelism(faer::Par::Seq);
}
