use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{check_dim, Error, Result};

/// Periodic imaginary-time grid `τ_k = kT/m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathGrid {
    period: f64,
    nodes: usize,
}

impl PathGrid {
    /// `nodes` must be a power of two, at least 64.
    pub fn new(period: f64, nodes: usize) -> Result<Self> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::invalid("period", "must be positive and finite"));
        }
        if nodes < 64 || !nodes.is_power_of_two() {
            return Err(Error::invalid(
                "nodes",
                format!("need a power of two ≥ 64, got {nodes}"),
            ));
        }
        Ok(Self { period, nodes })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn spacing(&self) -> f64 {
        self.period / self.nodes as f64
    }

    pub fn tau(&self, k: usize) -> f64 {
        k as f64 * self.spacing()
    }

    /// Signed mode number of FFT bin `j`; the Nyquist bin maps to `+m/2`.
    pub(crate) fn mode(&self, j: usize) -> i64 {
        if j <= self.nodes / 2 {
            j as i64
        } else {
            j as i64 - self.nodes as i64
        }
    }

    /// `ν_j = 2π·mode(j)/T`.
    pub fn frequency(&self, j: usize) -> f64 {
        2.0 * PI * self.mode(j) as f64 / self.period
    }

    pub(crate) fn is_nyquist(&self, j: usize) -> bool {
        j == self.nodes / 2
    }
}

/// A real path sampled on a [`PathGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct PathProfile {
    grid: PathGrid,
    values: Vec<f64>,
}

impl PathProfile {
    pub fn new(grid: PathGrid, values: Vec<f64>) -> Result<Self> {
        check_dim(grid.nodes(), values.len())?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("path", "values must be finite"));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: PathGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, (0..grid.nodes()).map(|k| f(grid.tau(k))).collect())
    }

    pub fn grid(&self) -> &PathGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Cyclic shift by `k` nodes: `x'_i = x_{i−k}`.
    pub fn shifted(&self, k: usize) -> Self {
        let mut values = self.values.clone();
        values.rotate_right(k % self.values.len());
        Self {
            grid: self.grid,
            values,
        }
    }
}

/// Cached forward and inverse FFT plans for one grid size.
#[derive(Clone)]
pub(crate) struct Fourier {
    grid: PathGrid,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Fourier {
    pub(crate) fn new(grid: PathGrid) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            grid,
            fwd: planner.plan_fft_forward(grid.nodes()),
            inv: planner.plan_fft_inverse(grid.nodes()),
        }
    }

    pub(crate) fn grid(&self) -> &PathGrid {
        &self.grid
    }

    /// Coefficients `c_j` with `x_k = Σ_j c_j e^{2πijk/m}`.
    pub(crate) fn coefficients(&self, x: &[f64]) -> Vec<Complex64> {
        let m = x.len() as f64;
        let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fwd.process(&mut buf);
        for c in buf.iter_mut() {
            *c /= m;
        }
        buf
    }

    /// Real part of `Σ_j c_j e^{2πijk/m}`.
    pub(crate) fn synthesize(&self, mut c: Vec<Complex64>) -> Vec<f64> {
        self.inv.process(&mut c);
        c.into_iter().map(|v| v.re).collect()
    }

    /// Applies a real, even multiplier `k(j)` to `x`.
    pub(crate) fn multiply(&self, x: &[f64], k: impl Fn(usize) -> f64) -> Vec<f64> {
        let mut c = self.coefficients(x);
        for (j, v) in c.iter_mut().enumerate() {
            *v *= k(j);
        }
        self.synthesize(c)
    }
}
