use num_complex::Complex64;

use crate::error::{Error, Result};

/// Closed-form normal-mode evolution of the damped oscillator,
/// `z(t) = exp((−γ + iω₁)t) z₀` with `ω₁ = √(ω² − γ²)`.
pub fn dsho_exact(omega: f64, gamma: f64, z0: Complex64, t: f64) -> Result<Complex64> {
    if !(omega > 0.0) {
        return Err(Error::invalid("omega", "must be positive"));
    }
    if gamma >= omega {
        return Err(Error::Overdamped {
            gamma_sq: gamma * gamma,
            curvature: omega * omega,
        });
    }
    let omega1 = (omega * omega - gamma * gamma).sqrt();
    Ok((Complex64::new(-gamma, omega1) * t).exp() * z0)
}
