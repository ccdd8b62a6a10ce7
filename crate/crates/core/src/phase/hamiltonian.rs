use super::structure::ComplexStructure;
use super::system::{PhaseState, ShiftedState, SystemSpec};
use crate::error::{check_dim, Result};
use crate::linalg;

/// Real and imaginary parts of `ℋ = H₁ + iH₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexHamiltonianValue {
    pub h1: f64,
    pub h2: f64,
}

/// `p̃ = p + ∇W(x)`; for scalar friction this is `p + γx`.
pub fn shifted_momentum(state: &PhaseState, sys: &SystemSpec) -> Result<Vec<f64>> {
    check_dim(sys.dim(), state.x.len())?;
    check_dim(sys.dim(), state.p.len())?;
    let grad_w = sys.dissipation().gradient(&state.x);
    Ok(state.p.iter().zip(grad_w).map(|(p, g)| p + g).collect())
}

pub fn shift_state(state: &PhaseState, sys: &SystemSpec) -> Result<ShiftedState> {
    Ok(ShiftedState {
        p_tilde: shifted_momentum(state, sys)?,
        x: state.x.clone(),
        t: state.t,
    })
}

pub fn unshift_state(state: &ShiftedState, sys: &SystemSpec) -> Result<PhaseState> {
    check_dim(sys.dim(), state.x.len())?;
    check_dim(sys.dim(), state.p_tilde.len())?;
    let grad_w = sys.dissipation().gradient(&state.x);
    Ok(PhaseState {
        p: state
            .p_tilde
            .iter()
            .zip(grad_w)
            .map(|(p, g)| p - g)
            .collect(),
        x: state.x.clone(),
        t: state.t,
    })
}

/// `V₁(x) = V(x) − ½|∇W(x)|²`, which is `V − ½γ²x²` for scalar friction.
pub fn effective_potential(x: &[f64], sys: &SystemSpec) -> Result<f64> {
    check_dim(sys.dim(), x.len())?;
    let grad_w = sys.dissipation().gradient(x);
    Ok(sys.potential().value(x) - 0.5 * linalg::dot(&grad_w, &grad_w))
}

/// `∇V₁ = ∇V − γ(x)·∇W`.
pub(crate) fn effective_potential_gradient(x: &[f64], sys: &SystemSpec) -> Vec<f64> {
    let grad_w = sys.dissipation().gradient(x);
    let g = sys.dissipation().hessian(x);
    let corr = linalg::mat_vec(&g, &grad_w);
    sys.potential()
        .gradient(x)
        .into_iter()
        .zip(corr)
        .map(|(a, b)| a - b)
        .collect()
}

/// Evaluates `H₁ = ½|p̃|² + V − ½|∇W|²` and
/// `H₂ = (1/ω₂)[½ p̃ᵀγ(x)p̃ + ω₂² W]` at a shifted state.
pub fn complex_hamiltonian(
    state: &ShiftedState,
    sys: &SystemSpec,
    j: &ComplexStructure,
) -> Result<ComplexHamiltonianValue> {
    check_dim(sys.dim(), state.dim())?;
    check_dim(sys.dim(), state.p_tilde.len())?;
    check_dim(sys.dim(), j.dim())?;
    let w2 = j.omega2();
    let p = &state.p_tilde;
    let h1 = 0.5 * linalg::dot(p, p) + effective_potential(&state.x, sys)?;
    let g = sys.dissipation().hessian(&state.x);
    let h2 = (0.5 * linalg::quad_form(&g, p, p) + w2 * w2 * sys.dissipation().w(&state.x)) / w2;
    Ok(ComplexHamiltonianValue { h1, h2 })
}

/// Partial derivatives of `H₁` and `H₂` in `(p̃, x)`.
#[derive(Debug, Clone)]
pub(crate) struct HamiltonianGradients {
    pub h1_p: Vec<f64>,
    pub h1_x: Vec<f64>,
    pub h2_p: Vec<f64>,
    pub h2_x: Vec<f64>,
}

pub(crate) fn hamiltonian_gradients(
    state: &ShiftedState,
    sys: &SystemSpec,
    j: &ComplexStructure,
) -> Result<HamiltonianGradients> {
    let w2 = j.omega2();
    let x = &state.x;
    let p = &state.p_tilde;
    let g = sys.dissipation_tensor(x)?;
    let grad_w = sys.dissipation().gradient(x);
    let form_grad = sys.dissipation().hessian_form_gradient(x, p);
    let h2_p = linalg::mat_vec(&g, p).into_iter().map(|v| v / w2).collect();
    let h2_x = form_grad
        .iter()
        .zip(&grad_w)
        .map(|(f, gw)| (f + w2 * w2 * gw) / w2)
        .collect();
    Ok(HamiltonianGradients {
        h1_p: p.clone(),
        h1_x: effective_potential_gradient(x, sys),
        h2_p,
        h2_x,
    })
}
