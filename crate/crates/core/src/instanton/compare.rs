use rayon::prelude::*;

use super::action::OhmicKernel;
use super::path::PathGrid;
use super::relax::{bump_guess, relax_instanton, RelaxOptions, Relaxed};
use crate::error::Result;
use crate::wkb::{closed_form_exponent, BarrierSpec};

/// One friction value: bath-model bounce action and complex-Hamiltonian WKB
/// exponent, both in units of `ħ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentRow {
    pub gamma: f64,
    pub cl_action: f64,
    pub ch_exponent: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentTable {
    pub rows: Vec<ExponentRow>,
    /// Signs of consecutive differences of `cl_action` (−1, 0, +1).
    pub cl_trend: Vec<i8>,
    pub ch_trend: Vec<i8>,
}

/// Signs of `values[i+1] − values[i]`, with differences inside a relative
/// `1e-12` band counted as zero.
pub fn trend_signs(values: &[f64]) -> Vec<i8> {
    values
        .windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            if d.abs() <= 1e-12 * w[0].abs().max(w[1].abs()) {
                0
            } else if d > 0.0 {
                1
            } else {
                -1
            }
        })
        .collect()
}

/// Bounce for the barrier at friction `gamma` on `grid`, from a bump guess.
pub fn relax_barrier(
    barrier: &BarrierSpec,
    gamma: f64,
    grid: PathGrid,
    opts: &RelaxOptions,
) -> Result<Relaxed> {
    let v = barrier.potential();
    let kernel = OhmicKernel::new(gamma, grid)?;
    let guess = bump_guess(grid, 0.5 * barrier.a(), 2.0 / barrier.omega())?;
    relax_instanton(&v, &kernel, &guess, opts)
}

/// For each `γ` (independently, in parallel) the relaxed bath-model action
/// and the closed-form complex-Hamiltonian exponent. The barrier's own `γ`
/// is ignored; `ω`, `a`, `ħ` are shared.
pub fn compare_exponents(
    barrier: &BarrierSpec,
    gammas: &[f64],
    grid: PathGrid,
    opts: &RelaxOptions,
) -> Result<ExponentTable> {
    let rows = gammas
        .par_iter()
        .map(|&gamma| {
            let b = BarrierSpec::new(barrier.omega(), barrier.a(), gamma, barrier.hbar())?;
            let relaxed = relax_barrier(&b, gamma, grid, opts)?;
            Ok(ExponentRow {
                gamma,
                cl_action: relaxed.action / b.hbar(),
                ch_exponent: closed_form_exponent(&b),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let cl: Vec<f64> = rows.iter().map(|r| r.cl_action).collect();
    let ch: Vec<f64> = rows.iter().map(|r| r.ch_exponent).collect();
    Ok(ExponentTable {
        cl_trend: trend_signs(&cl),
        ch_trend: trend_signs(&ch),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodCheck {
    pub action: f64,
    /// Action on a grid with both period and node count doubled.
    pub doubled_action: f64,
    pub relative_change: f64,
}

pub fn period_convergence(
    barrier: &BarrierSpec,
    grid: PathGrid,
    opts: &RelaxOptions,
) -> Result<PeriodCheck> {
    let wide = PathGrid::new(2.0 * grid.period(), 2 * grid.nodes())?;
    let (a, b) = rayon::join(
        || relax_barrier(barrier, barrier.gamma(), grid, opts),
        || relax_barrier(barrier, barrier.gamma(), wide, opts),
    );
    let (a, b) = (a?.action, b?.action);
    Ok(PeriodCheck {
        action: a,
        doubled_action: b,
        relative_change: (b - a).abs() / a.abs().max(f64::MIN_POSITIVE),
    })
}
