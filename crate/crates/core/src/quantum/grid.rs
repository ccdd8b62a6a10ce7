use std::str::FromStr;

use crate::error::{Error, Result};

/// Finite-difference order of the Laplacian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stencil {
    /// Three-point `[1, −2, 1]/h²`.
    SecondOrder,
    /// Five-point `[−1, 16, −30, 16, −1]/(12h²)`.
    #[default]
    FourthOrder,
}

impl Stencil {
    /// Laplacian coefficients by offset `|i − j|`, before dividing by `h²`.
    pub(crate) fn laplacian(self) -> &'static [f64] {
        match self {
            Stencil::SecondOrder => &[-2.0, 1.0],
            Stencil::FourthOrder => &[-30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0],
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Stencil::SecondOrder => "2",
            Stencil::FourthOrder => "4",
        }
    }
}

impl FromStr for Stencil {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2" => Ok(Stencil::SecondOrder),
            "4" => Ok(Stencil::FourthOrder),
            other => Err(Error::invalid(
                "stencil",
                format!("unsupported order `{other}` (2|4)"),
            )),
        }
    }
}

/// Uniform grid on `[x_min, x_max]` with `n` nodes including both
/// Dirichlet endpoints. Operators act on the `n − 2` interior nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n: usize,
    stencil: Stencil,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(Error::invalid("grid", "need finite x_min < x_max"));
        }
        if n < 16 {
            return Err(Error::invalid("n", "grid needs at least 16 nodes"));
        }
        Ok(Self {
            x_min,
            x_max,
            n,
            stencil: Stencil::default(),
        })
    }

    pub fn with_stencil(mut self, stencil: Stencil) -> Self {
        self.stencil = stencil;
        self
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn stencil(&self) -> Stencil {
        self.stencil
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.spacing()
    }

    pub fn interior_len(&self) -> usize {
        self.n - 2
    }

    /// Position of interior unknown `k`, i.e. node `k + 1`.
    pub fn interior_node(&self, k: usize) -> f64 {
        self.node(k + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_nodes() {
        let g = Grid::new(-12.0, 12.0, 800).unwrap();
        assert!((g.spacing() - 24.0 / 799.0).abs() < 1e-15);
        assert_eq!(g.node(0), -12.0);
        assert!((g.node(799) - 12.0).abs() < 1e-12);
        assert_eq!(g.interior_len(), 798);
        assert!(Grid::new(1.0, 0.0, 100).is_err());
        assert!(Grid::new(0.0, 1.0, 15).is_err());
    }
}
