use super::action::{
    check_potential, potential_sum, quadratic_parts, residual_values, OhmicKernel,
};
use super::path::{Fourier, PathProfile};
use crate::error::{Error, Result};
use crate::phase::Potential;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxOptions {
    /// Stop when `max_k |residual_k| ≤ tol`.
    pub tol: f64,
    pub max_iter: usize,
    /// `μ` in the preconditioner `1/(ν² + γ|ν| + μ)`; defaults to `V″(0)`.
    pub curvature_floor: Option<f64>,
}

impl Default for RelaxOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 10_000,
            curvature_floor: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Relaxed {
    pub path: PathProfile,
    /// `S_eff[x] − T·V(0)`, the action relative to the resting path.
    pub action: f64,
    pub iterations: usize,
    pub residual_norm: f64,
    /// Action after every accepted step, starting from the rescaled guess.
    pub history: Vec<f64>,
}

const ARMIJO: f64 = 1e-4;

struct Problem<'a> {
    v: &'a Potential,
    kernel: &'a OhmicKernel,
    fourier: Fourier,
    offset: f64,
}

impl Problem<'_> {
    fn action(&self, x: &[f64]) -> f64 {
        let (kin, nl) = quadratic_parts(&self.fourier, self.kernel, x);
        kin + nl + potential_sum(self.v, self.fourier.grid(), x) - self.offset
    }

    /// Maximiser `t*` of `S(t·x)` over `t > 0` and the maximal value.
    ///
    /// The bounce is a saddle of `S` with a single unstable direction that
    /// points along the path itself; maximising along the ray removes it,
    /// so the outer iteration only ever descends.
    fn ray(&self, x: &[f64]) -> Result<(f64, f64)> {
        let dtau = self.fourier.grid().spacing();
        let (kin, nl) = quadratic_parts(&self.fourier, self.kernel, x);
        let q = kin + nl;
        let df = |t: f64| {
            2.0 * t * q
                + dtau
                    * x.iter()
                        .map(|&xk| self.v.derivative_1d(t * xk) * xk)
                        .sum::<f64>()
        };
        let d2f = |t: f64| {
            2.0 * q
                + dtau
                    * x.iter()
                        .map(|&xk| self.v.second_derivative_1d(t * xk) * xk * xk)
                        .sum::<f64>()
        };

        let (mut lo, mut hi) = (0.0, 1.0);
        while df(hi) > 0.0 {
            lo = hi;
            hi *= 2.0;
            if hi > 1e12 {
                return Err(Error::NoInstanton(
                    "action grows without bound along the path direction".into(),
                ));
            }
        }
        let mut t = 0.5 * (lo + hi);
        for _ in 0..200 {
            let g = df(t);
            if g.abs() <= 1e-14 * (q * t).abs().max(f64::MIN_POSITIVE) {
                break;
            }
            if g > 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
            let h = d2f(t);
            let newton = t - g / h;
            t = if h < 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        let peak = x.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        if !(t * peak > 1e-10) {
            return Err(Error::NoInstanton(
                "path collapsed to the resting point".into(),
            ));
        }
        let y: Vec<f64> = x.iter().map(|v| t * v).collect();
        Ok((t, self.action(&y)))
    }
}

/// Relaxes `x_init` to a bounce of the effective action by preconditioned
/// descent with Armijo backtracking, keeping the iterate on the ridge
/// `t ↦ S(t·x)` maximal.
pub fn relax_instanton(
    v: &Potential,
    kernel: &OhmicKernel,
    x_init: &PathProfile,
    opts: &RelaxOptions,
) -> Result<Relaxed> {
    check_potential(v)?;
    if x_init.grid() != kernel.grid() {
        return Err(Error::invalid(
            "x_init",
            "grid differs from the kernel's grid",
        ));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::invalid("tol", "must be positive"));
    }
    if x_init.max_abs() == 0.0 {
        return Err(Error::NoInstanton(
            "initial path is identically zero".into(),
        ));
    }
    let grid = *x_init.grid();
    let mu = match opts.curvature_floor {
        Some(mu) if mu > 0.0 => mu,
        Some(_) => return Err(Error::invalid("curvature_floor", "must be positive")),
        None => {
            let c = v.second_derivative_1d(0.0);
            if c > 0.0 {
                c
            } else {
                1.0
            }
        }
    };
    let problem = Problem {
        v,
        kernel,
        fourier: Fourier::new(grid),
        offset: grid.period() * v.value_1d(0.0),
    };
    let precond: Vec<f64> = (0..grid.nodes())
        .map(|j| {
            let nu = grid.frequency(j);
            1.0 / (nu * nu + 2.0 * kernel.multipliers()[j] + mu)
        })
        .collect();
    let dtau = grid.spacing();

    let (t0, mut action) = problem.ray(x_init.values())?;
    let mut x: Vec<f64> = x_init.values().iter().map(|v| t0 * v).collect();
    let mut history = vec![action];
    let mut alpha: f64 = 0.5;
    let mut iterations = 0;
    loop {
        let res = residual_values(&problem.fourier, kernel, v, &x);
        let rn = res.iter().fold(0.0, |m: f64, r| m.max(r.abs()));
        if rn <= opts.tol {
            return Ok(Relaxed {
                path: PathProfile::new(grid, x)?,
                action,
                iterations,
                residual_norm: rn,
                history,
            });
        }
        if iterations >= opts.max_iter || !rn.is_finite() {
            return Err(Error::RelaxationStalled {
                iterations,
                residual: rn,
                last: Box::new(PathProfile::new(grid, x)?),
            });
        }
        let d = problem.fourier.multiply(&res, |j| precond[j]);
        let slope = dtau * res.iter().zip(&d).map(|(r, q)| r * q).sum::<f64>();
        // Differences below this are rounding noise in the action itself.
        let noise = 8.0 * f64::EPSILON * action.abs().max(1.0);
        alpha = (2.0 * alpha).min(1.0);
        loop {
            let y: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + alpha * b).collect();
            match problem.ray(&y) {
                Ok((t, ry)) if ry <= action - ARMIJO * alpha * slope + noise => {
                    x = y.into_iter().map(|v| t * v).collect();
                    action = ry;
                    break;
                }
                Ok(_) | Err(Error::NoInstanton(_)) => {
                    alpha *= 0.5;
                    if alpha < 1e-14 {
                        return Err(Error::RelaxationStalled {
                            iterations,
                            residual: rn,
                            last: Box::new(PathProfile::new(grid, x)?),
                        });
                    }
                }
                Err(e) => return Err(e),
            }
        }
        iterations += 1;
        history.push(action);
    }
}

/// Localised starting guess `amplitude·exp(−(τ − T/2)²/width²)`.
pub fn bump_guess(grid: super::PathGrid, amplitude: f64, width: f64) -> Result<PathProfile> {
    if !(width > 0.0) {
        return Err(Error::invalid("width", "must be positive"));
    }
    let c = 0.5 * grid.period();
    PathProfile::from_fn(grid, |t| amplitude * (-((t - c) / width).powi(2)).exp())
}
