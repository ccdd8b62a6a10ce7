//! Non-hermitian one-dimensional Hamiltonians on a finite-difference grid.

mod evolve;
mod grid;
mod operator;
mod spectrum;
mod wave;

pub use evolve::{evolve, Propagator, Snapshot};
pub use grid::{Grid, Stencil};
pub use operator::{
    build_dsho_hamiltonian, build_general_hamiltonian, build_schrodinger_dsho, momentum_operator,
    OperatorKind, OperatorMatrix, OperatorMeta,
};
pub use spectrum::{choose_c, eigenvalues, spectrum, spectrum_of, ChosenC, ComplexSpectrum};
pub use wave::WaveFunction;
