use faer::Mat;

use super::system::SystemSpec;
use crate::error::{check_dim, Error, Result};
use crate::linalg;

const MAX_ITERATIONS: usize = 100;
const GRADIENT_TOL: f64 = 1e-10;
const MAX_HALVINGS: usize = 60;

fn norm(v: &[f64]) -> f64 {
    linalg::dot(v, v).sqrt()
}

/// Damped Newton search for a stationary point of `V` near `guess`.
///
/// The full Newton step is halved until the gradient norm no longer
/// increases.
pub fn find_equilibrium(sys: &SystemSpec, guess: &[f64]) -> Result<Vec<f64>> {
    check_dim(sys.dim(), guess.len())?;
    let v = sys.potential();
    let mut x = guess.to_vec();
    let mut grad = v.gradient(&x);
    let mut res = norm(&grad);
    for _ in 0..MAX_ITERATIONS {
        if res <= GRADIENT_TOL {
            return Ok(x);
        }
        let step = linalg::solve(&v.hessian(&x), &grad)?;
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<f64> = x.iter().zip(&step).map(|(a, s)| a - scale * s).collect();
            let g = v.gradient(&trial);
            let r = norm(&g);
            if r.is_finite() && r <= res {
                x = trial;
                grad = g;
                res = r;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if res <= GRADIENT_TOL {
        Ok(x)
    } else {
        Err(Error::NoConvergence {
            iterations: MAX_ITERATIONS,
            residual: res,
        })
    }
}

/// The natural frequency `ω₂ = √(V''(x₀) − γ²)` at the equilibrium nearest
/// `guess`.
///
/// In several dimensions the curvature is the smallest eigenvalue of
/// `Hess V(x₀) − γ(x₀)²`, which reduces to the one-dimensional formula for
/// scalar friction.
pub fn natural_omega2(sys: &SystemSpec, guess: &[f64]) -> Result<f64> {
    let x0 = find_equilibrium(sys, guess)?;
    let hess_v = sys.potential().hessian(&x0);
    let curvature = linalg::sym_eigenvalues(&hess_v)?[0];
    if curvature <= 0.0 {
        return Err(Error::UnstableEquilibrium { curvature });
    }
    let g = sys.dissipation_tensor(&x0)?;
    let n = sys.dim();
    let g2 = Mat::from_fn(n, n, |i, j| {
        (0..n).map(|k| g[(i, k)] * g[(k, j)]).sum::<f64>()
    });
    let shifted = Mat::from_fn(n, n, |i, j| hess_v[(i, j)] - g2[(i, j)]);
    let radicand = linalg::sym_eigenvalues(&shifted)?[0];
    if radicand <= 0.0 {
        return Err(Error::Overdamped {
            gamma_sq: curvature - radicand,
            curvature,
        });
    }
    Ok(radicand.sqrt())
}
