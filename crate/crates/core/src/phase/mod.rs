//! Phase-space types, the complex structure `J`, shifted momenta and the
//! complex Hamiltonian `ℋ = H₁ + iH₂`.

mod equilibrium;
mod hamiltonian;
mod structure;
mod system;

pub use equilibrium::{find_equilibrium, natural_omega2};
pub use hamiltonian::{
    complex_hamiltonian, effective_potential, shift_state, shifted_momentum, unshift_state,
    ComplexHamiltonianValue,
};
pub(crate) use hamiltonian::{effective_potential_gradient, hamiltonian_gradients};
pub use structure::{
    dsho_normal_form, from_complex, poisson_bracket, shifted_to_complex, to_complex,
    ComplexCoordinates, ComplexStructure, LinearForm,
};
pub use system::{Dissipation, PhaseState, Potential, ShiftedState, SystemSpec};
