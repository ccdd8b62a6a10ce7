use num_complex::Complex64;

use super::grid::Grid;
use crate::error::{check_dim, Error, Result};

/// A wavefunction sampled on every grid node, zero at both endpoints.
/// Norm convention: `Σ|ψ_i|² h`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: Grid,
    values: Vec<Complex64>,
}

impl WaveFunction {
    pub fn from_interior(grid: Grid, interior: &[Complex64]) -> Result<Self> {
        check_dim(grid.interior_len(), interior.len())?;
        if interior.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("psi", "values must be finite"));
        }
        let mut values = Vec::with_capacity(grid.n());
        values.push(Complex64::new(0.0, 0.0));
        values.extend_from_slice(interior);
        values.push(Complex64::new(0.0, 0.0));
        Ok(Self { grid, values })
    }

    /// Samples `f` at the interior nodes.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let interior: Vec<Complex64> = (0..grid.interior_len())
            .map(|k| f(grid.interior_node(k)))
            .collect();
        Self::from_interior(grid, &interior)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn interior(&self) -> &[Complex64] {
        &self.values[1..self.values.len() - 1]
    }

    /// `⟨self|other⟩ = Σ conj(self_i) other_i h`.
    pub fn inner(&self, other: &WaveFunction) -> Result<Complex64> {
        check_dim(self.values.len(), other.values.len())?;
        let h = self.grid.spacing();
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * h)
    }

    pub fn norm(&self) -> f64 {
        let h = self.grid.spacing();
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * h).sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) {
            return Err(Error::invalid(
                "psi",
                "cannot normalize a zero wavefunction",
            ));
        }
        Ok(Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v / n).collect(),
        })
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: Complex64, other: &WaveFunction, b: Complex64) -> Result<Self> {
        check_dim(self.values.len(), other.values.len())?;
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        })
    }
}
