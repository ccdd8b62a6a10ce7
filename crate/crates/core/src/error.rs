use num_complex::Complex64;
use thiserror::Error;

use crate::instanton::PathProfile;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("overdamped: gamma^2 = {gamma_sq} is not below the curvature {curvature}")]
    Overdamped { gamma_sq: f64, curvature: f64 },

    #[error("equilibrium is not a minimum (smallest curvature {curvature})")]
    UnstableEquilibrium { curvature: f64 },

    #[error("dissipation Hessian is not positive semidefinite at x = {x:?} (smallest eigenvalue {min_eigenvalue:e})")]
    NonConvexDissipation { x: Vec<f64>, min_eigenvalue: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("state became non-finite at t = {time}")]
    BlowUp { time: f64 },

    #[error("square-root branch point at s = {at} lies on the open integration path")]
    BranchPoint { at: Complex64 },

    #[error("instanton relaxation did not converge after {iterations} iterations (residual {residual:e})")]
    RelaxationStalled {
        iterations: usize,
        residual: f64,
        last: Box<PathProfile>,
    },

    #[error("no instanton found: {0}")]
    NoInstanton(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures of a numerical method on valid input, as opposed to
    /// input that violates a precondition.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::BlowUp { .. }
                | Error::BranchPoint { .. }
                | Error::RelaxationStalled { .. }
                | Error::NoInstanton(_)
                | Error::Numerical(_)
        )
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
