use crate::error::{check_dim, Result};
use crate::linalg;
use crate::phase::{hamiltonian_gradients, ComplexStructure, PhaseState, ShiftedState, SystemSpec};

/// Time derivative of a phase-space point. `dp` is `dp/dt` or `dp̃/dt`
/// depending on which variables produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVelocity {
    pub dp: Vec<f64>,
    pub dx: Vec<f64>,
}

/// `dp/dt = −∇V − 2γ(x)p`, `dx/dt = p`.
pub fn direct_vector_field(state: &PhaseState, sys: &SystemSpec) -> Result<PhaseVelocity> {
    check_dim(sys.dim(), state.x.len())?;
    check_dim(sys.dim(), state.p.len())?;
    let g = sys.dissipation_tensor(&state.x)?;
    let friction = linalg::mat_vec(&g, &state.p);
    let dp = sys
        .potential()
        .gradient(&state.x)
        .into_iter()
        .zip(friction)
        .map(|(dv, f)| -dv - 2.0 * f)
        .collect();
    Ok(PhaseVelocity {
        dp,
        dx: state.p.clone(),
    })
}

/// `d/dt (p̃, x) = ({H₁,p̃}, {H₁,x}) + J ({H₂,p̃}, {H₂,x})` with
/// `{H, p̃} = −∂H/∂x` and `{H, x} = ∂H/∂p̃`.
pub fn canonical_vector_field(
    state: &ShiftedState,
    sys: &SystemSpec,
    j: &ComplexStructure,
) -> Result<PhaseVelocity> {
    let n = sys.dim();
    check_dim(n, state.x.len())?;
    check_dim(n, state.p_tilde.len())?;
    check_dim(n, j.dim())?;
    let grads = hamiltonian_gradients(state, sys, j)?;
    let bracket_h2: Vec<f64> = grads
        .h2_x
        .iter()
        .map(|v| -v)
        .chain(grads.h2_p.iter().copied())
        .collect();
    let twisted = j.apply(&bracket_h2)?;
    let dp = (0..n).map(|a| -grads.h1_x[a] + twisted[a]).collect();
    let dx = (0..n).map(|a| grads.h1_p[a] + twisted[n + a]).collect();
    Ok(PhaseVelocity { dp, dx })
}

/// Converts a velocity in `(p̃, x)` back to `(p, x)` using
/// `dp/dt = dp̃/dt − γ(x) dx/dt`.
pub fn pull_back_velocity(v: &PhaseVelocity, x: &[f64], sys: &SystemSpec) -> Result<PhaseVelocity> {
    check_dim(sys.dim(), x.len())?;
    let g = sys.dissipation_tensor(x)?;
    let corr = linalg::mat_vec(&g, &v.dx);
    Ok(PhaseVelocity {
        dp: v.dp.iter().zip(corr).map(|(a, b)| a - b).collect(),
        dx: v.dx.clone(),
    })
}
