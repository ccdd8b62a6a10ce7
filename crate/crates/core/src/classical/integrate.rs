use std::fmt;
use std::str::FromStr;

use faer::Mat;

use super::fields::direct_vector_field;
use crate::error::{check_dim, Error, Result};
use crate::linalg;
use crate::phase::{effective_potential_gradient, PhaseState, SystemSpec};

/// One-step methods for the dissipative flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrator {
    /// Classical fourth-order Runge–Kutta on the direct field.
    Rk4,
    /// Strang splitting in `(p̃, x)`: half a dissipative sub-step, a leapfrog
    /// step of `H₁`, then the other half of the dissipative sub-step.
    Split,
}

impl Integrator {
    pub fn tag(self) -> &'static str {
        match self {
            Integrator::Rk4 => "rk4",
            Integrator::Split => "split",
        }
    }
}

impl fmt::Display for Integrator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Integrator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rk4" => Ok(Integrator::Rk4),
            "split" => Ok(Integrator::Split),
            other => Err(Error::invalid(
                "method",
                format!("unknown integrator `{other}` (rk4|split)"),
            )),
        }
    }
}

/// Uniform-step samples of a classical trajectory.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<PhaseState>,
    pub step: f64,
    pub method: Integrator,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

fn axpy(y: &[f64], a: f64, x: &[f64]) -> Vec<f64> {
    y.iter().zip(x).map(|(yi, xi)| yi + a * xi).collect()
}

fn rk4_step(sys: &SystemSpec, s: &PhaseState, h: f64) -> Result<PhaseState> {
    let k1 = direct_vector_field(s, sys)?;
    let mid = |k: &super::PhaseVelocity, a: f64| PhaseState {
        x: axpy(&s.x, a, &k.dx),
        p: axpy(&s.p, a, &k.dp),
        t: s.t + a,
    };
    let k2 = direct_vector_field(&mid(&k1, 0.5 * h), sys)?;
    let k3 = direct_vector_field(&mid(&k2, 0.5 * h), sys)?;
    let k4 = direct_vector_field(&mid(&k3, h), sys)?;
    let comb = |a: &[f64], b: &[f64], c: &[f64], d: &[f64]| -> Vec<f64> {
        (0..a.len())
            .map(|i| h / 6.0 * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i]))
            .collect()
    };
    let dx = comb(&k1.dx, &k2.dx, &k3.dx, &k4.dx);
    let dp = comb(&k1.dp, &k2.dp, &k3.dp, &k4.dp);
    Ok(PhaseState {
        x: axpy(&s.x, 1.0, &dx),
        p: axpy(&s.p, 1.0, &dp),
        t: s.t + h,
    })
}

/// The dissipative sub-flow `d/dt (p̃, x) = (−γ(x) p̃, −∇W(x))`.
enum DissipativeFlow {
    /// `exp(−G τ)` applied to both blocks, for constant `G`.
    Linear(Mat<f64>),
    Implicit {
        tau: f64,
    },
}

impl DissipativeFlow {
    fn new(sys: &SystemSpec, tau: f64) -> Result<Self> {
        if sys.dissipation().has_constant_hessian() {
            let g = sys.dissipation().hessian(&vec![0.0; sys.dim()]);
            Ok(DissipativeFlow::Linear(linalg::sym_exp_neg(&g, tau)?))
        } else {
            Ok(DissipativeFlow::Implicit { tau })
        }
    }

    fn apply(&self, sys: &SystemSpec, x: &mut Vec<f64>, p: &mut Vec<f64>) -> Result<()> {
        match self {
            DissipativeFlow::Linear(e) => {
                *x = linalg::mat_vec(e, x);
                *p = linalg::mat_vec(e, p);
                Ok(())
            }
            DissipativeFlow::Implicit { tau } => implicit_midpoint(sys, *tau, x, p),
        }
    }
}

fn implicit_midpoint(sys: &SystemSpec, tau: f64, x: &mut Vec<f64>, p: &mut Vec<f64>) -> Result<()> {
    let n = x.len();
    let w = sys.dissipation();
    let mut y = x.clone();
    let mut converged = false;
    let mut res = f64::INFINITY;
    for _ in 0..50 {
        let m: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 0.5 * (a + b)).collect();
        let gw = w.gradient(&m);
        let f: Vec<f64> = (0..n).map(|i| y[i] - x[i] + tau * gw[i]).collect();
        res = f.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let scale = 1.0 + x.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if res <= 1e-15 * scale {
            converged = true;
            break;
        }
        let g = sys.dissipation_tensor(&m)?;
        let jac = Mat::from_fn(n, n, |i, j| {
            (if i == j { 1.0 } else { 0.0 }) + 0.5 * tau * g[(i, j)]
        });
        let delta = linalg::solve(&jac, &f)?;
        for i in 0..n {
            y[i] -= delta[i];
        }
        if delta.iter().map(|v| v.abs()).fold(0.0, f64::max) <= 1e-16 * scale {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            iterations: 50,
            residual: res,
        });
    }
    let m: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 0.5 * (a + b)).collect();
    let g = sys.dissipation_tensor(&m)?;
    let lhs = Mat::from_fn(n, n, |i, j| {
        (if i == j { 1.0 } else { 0.0 }) + 0.5 * tau * g[(i, j)]
    });
    let gp = linalg::mat_vec(&g, p);
    let rhs: Vec<f64> = (0..n).map(|i| p[i] - 0.5 * tau * gp[i]).collect();
    *p = linalg::solve(&lhs, &rhs)?;
    *x = y;
    Ok(())
}

fn leapfrog(sys: &SystemSpec, h: f64, x: &mut [f64], p: &mut [f64]) {
    let g = effective_potential_gradient(x, sys);
    for (pi, gi) in p.iter_mut().zip(&g) {
        *pi -= 0.5 * h * gi;
    }
    for (xi, pi) in x.iter_mut().zip(p.iter()) {
        *xi += h * pi;
    }
    let g = effective_potential_gradient(x, sys);
    for (pi, gi) in p.iter_mut().zip(&g) {
        *pi -= 0.5 * h * gi;
    }
}

/// Integrates from `state0` with a fixed `step` until at least `horizon`
/// has elapsed. The returned trajectory includes the initial state.
pub fn integrate(
    sys: &SystemSpec,
    state0: &PhaseState,
    step: f64,
    horizon: f64,
    method: Integrator,
) -> Result<Trajectory> {
    check_dim(sys.dim(), state0.x.len())?;
    check_dim(sys.dim(), state0.p.len())?;
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::invalid("step", "must be positive and finite"));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::invalid("horizon", "must be positive and finite"));
    }
    if !state0.is_finite() {
        return Err(Error::invalid("state", "initial state must be finite"));
    }
    let steps = (horizon / step - 1e-9).ceil().max(1.0) as usize;
    let t0 = state0.t;
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(state0.clone());

    match method {
        Integrator::Rk4 => {
            let mut s = state0.clone();
            for k in 1..=steps {
                s = rk4_step(sys, &s, step)?;
                s.t = t0 + k as f64 * step;
                if !s.is_finite() {
                    return Err(Error::BlowUp { time: s.t });
                }
                samples.push(s.clone());
            }
        }
        Integrator::Split => {
            let half = DissipativeFlow::new(sys, 0.5 * step)?;
            let mut x = state0.x.clone();
            let grad_w = sys.dissipation().gradient(&x);
            let mut p: Vec<f64> = state0.p.iter().zip(&grad_w).map(|(a, b)| a + b).collect();
            for k in 1..=steps {
                half.apply(sys, &mut x, &mut p)?;
                leapfrog(sys, step, &mut x, &mut p);
                half.apply(sys, &mut x, &mut p)?;
                let t = t0 + k as f64 * step;
                let grad_w = sys.dissipation().gradient(&x);
                let s = PhaseState {
                    p: p.iter().zip(&grad_w).map(|(a, b)| a - b).collect(),
                    x: x.clone(),
                    t,
                };
                if !s.is_finite() {
                    return Err(Error::BlowUp { time: t });
                }
                samples.push(s);
            }
        }
    }
    Ok(Trajectory {
        samples,
        step,
        method,
    })
}
