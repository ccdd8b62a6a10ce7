//! Classical dissipative dynamics: direct and canonical vector fields, the
//! exact damped-oscillator solution, fixed-step integrators and energy
//! diagnostics.

mod energy;
mod exact;
mod fields;
mod integrate;

pub use energy::{dissipation_residual, energy_series, EnergySeries};
pub use exact::dsho_exact;
pub use fields::{canonical_vector_field, direct_vector_field, pull_back_velocity, PhaseVelocity};
pub use integrate::{integrate, Integrator, Trajectory};
