use num_complex::Complex64;

use super::path::{Fourier, PathGrid, PathProfile};
use crate::error::{check_dim, Error, Result};
use crate::phase::Potential;

/// Ohmic bath `ρ(ω) = γω` on a periodic grid: multipliers `γ|ν_j|/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct OhmicKernel {
    gamma: f64,
    grid: PathGrid,
    multipliers: Vec<f64>,
}

impl OhmicKernel {
    pub fn new(gamma: f64, grid: PathGrid) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::invalid("gamma", "must be nonnegative and finite"));
        }
        let multipliers = (0..grid.nodes())
            .map(|j| 0.5 * gamma * grid.frequency(j).abs())
            .collect();
        Ok(Self {
            gamma,
            grid,
            multipliers,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn grid(&self) -> &PathGrid {
        &self.grid
    }

    pub fn multipliers(&self) -> &[f64] {
        &self.multipliers
    }

    fn check(&self, x: &PathProfile) -> Result<()> {
        if x.grid() != &self.grid {
            return Err(Error::invalid(
                "path",
                "grid differs from the kernel's grid",
            ));
        }
        Ok(())
    }
}

/// Output of [`hilbert_transform`]: the transform of the zero-mean part and
/// the mean that was projected out.
#[derive(Debug, Clone, PartialEq)]
pub struct HilbertOutput {
    pub profile: PathProfile,
    pub removed_mean: f64,
}

/// Periodic Hilbert transform, multiplier `−i·sign(ν_j)`. The constant and
/// Nyquist modes map to zero, so the output stays real.
pub fn hilbert_transform(f: &PathProfile) -> Result<HilbertOutput> {
    let grid = *f.grid();
    let fourier = Fourier::new(grid);
    let mut c = fourier.coefficients(f.values());
    let removed_mean = c[0].re;
    for (j, v) in c.iter_mut().enumerate() {
        let s = if j == 0 || grid.is_nyquist(j) {
            0.0
        } else {
            grid.mode(j).signum() as f64
        };
        *v *= Complex64::new(0.0, -s);
    }
    Ok(HilbertOutput {
        profile: PathProfile::new(grid, fourier.synthesize(c))?,
        removed_mean,
    })
}

/// Separate contributions to the euclidean effective action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionParts {
    /// `∫ ½ẋ² dτ`.
    pub kinetic: f64,
    /// `∫ V(x) dτ`.
    pub potential: f64,
    /// `½∫∫ [x(τ) − x(τ′)]² a(τ − τ′) dτ dτ′`.
    pub nonlocal: f64,
}

impl ActionParts {
    pub fn total(&self) -> f64 {
        self.kinetic + self.potential + self.nonlocal
    }
}

pub(crate) fn check_potential(v: &Potential) -> Result<()> {
    check_dim(1, v.dim())
}

/// Kinetic plus nonlocal quadratic form `T Σ_j ½(ν_j² + γ|ν_j|)|c_j|²`,
/// split into its two parts.
pub(crate) fn quadratic_parts(fourier: &Fourier, kernel: &OhmicKernel, x: &[f64]) -> (f64, f64) {
    let grid = fourier.grid();
    let c = fourier.coefficients(x);
    let t = grid.period();
    let mut kin = 0.0;
    let mut nonlocal = 0.0;
    for (j, cj) in c.iter().enumerate() {
        let nu = grid.frequency(j);
        kin += 0.5 * nu * nu * cj.norm_sqr();
        nonlocal += kernel.multipliers[j] * cj.norm_sqr();
    }
    (t * kin, t * nonlocal)
}

pub(crate) fn potential_sum(v: &Potential, grid: &PathGrid, x: &[f64]) -> f64 {
    grid.spacing() * x.iter().map(|&xk| v.value_1d(xk)).sum::<f64>()
}

/// Effective action with every term on the periodic grid. The kinetic and
/// nonlocal parts are evaluated mode by mode (Parseval), the potential by
/// the periodic trapezoidal rule.
pub fn action_parts(x: &PathProfile, v: &Potential, kernel: &OhmicKernel) -> Result<ActionParts> {
    check_potential(v)?;
    kernel.check(x)?;
    let fourier = Fourier::new(*x.grid());
    let (kinetic, nonlocal) = quadratic_parts(&fourier, kernel, x.values());
    Ok(ActionParts {
        kinetic,
        potential: potential_sum(v, x.grid(), x.values()),
        nonlocal,
    })
}

pub fn effective_action(x: &PathProfile, v: &Potential, kernel: &OhmicKernel) -> Result<f64> {
    Ok(action_parts(x, v, kernel)?.total())
}

/// `ẍ − V′(x) − γ|∂|x`, i.e. `−(1/Δτ) ∂S/∂x_k`.
pub(crate) fn residual_values(
    fourier: &Fourier,
    kernel: &OhmicKernel,
    v: &Potential,
    x: &[f64],
) -> Vec<f64> {
    let grid = *fourier.grid();
    let k = fourier.multiply(x, |j| {
        let nu = grid.frequency(j);
        nu * nu + 2.0 * kernel.multipliers[j]
    });
    x.iter()
        .zip(k)
        .map(|(&xk, kx)| -kx - v.derivative_1d(xk))
        .collect()
}

/// Euler–Lagrange residual of the effective action.
pub fn instanton_residual(
    x: &PathProfile,
    v: &Potential,
    kernel: &OhmicKernel,
) -> Result<PathProfile> {
    check_potential(v)?;
    kernel.check(x)?;
    let fourier = Fourier::new(*x.grid());
    PathProfile::new(*x.grid(), residual_values(&fourier, kernel, v, x.values()))
}
