use faer::Mat;
use num_complex::Complex64;

use super::grid::Grid;
use super::wave::WaveFunction;
use crate::error::{check_dim, Error, Result};
use crate::phase::SystemSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    /// `(1 + iγ/ω₁)[−ħ²/2 ∂² + ½ω₁²x² − ½ħω₁]`
    Dsho,
    /// `−ħ²/2 ∂² + V − ½γ²x² + i(γ/ω₂)[−ħ²/2 ∂² + ½ω₂²x² + c]`
    General,
    /// `−iħ ∂ − γx`
    Momentum,
}

/// Parameters an operator was built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorMeta {
    pub kind: OperatorKind,
    pub omega: Option<f64>,
    pub gamma: f64,
    pub omega2: Option<f64>,
    pub c: Option<f64>,
    pub hbar: f64,
}

/// Dense complex operator on the interior nodes of a grid.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    matrix: Mat<Complex64>,
    grid: Grid,
    meta: OperatorMeta,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Kinetic entry `(−ħ²/2 D₂)_ij`, zero outside the stencil.
fn kinetic(grid: &Grid, hbar: f64, i: usize, j: usize) -> f64 {
    let coeffs = grid.stencil().laplacian();
    let d = i.abs_diff(j);
    match coeffs.get(d) {
        Some(k) => -0.5 * hbar * hbar * k / (grid.spacing() * grid.spacing()),
        None => 0.0,
    }
}

impl OperatorMatrix {
    pub fn matrix(&self) -> &Mat<Complex64> {
        &self.matrix
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn meta(&self) -> &OperatorMeta {
        &self.meta
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Mat<Complex64> {
        let n = self.dim();
        Mat::from_fn(n, n, |i, j| self.matrix[(j, i)].conj())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm_l2()
    }

    /// Largest `|i − j|` with a nonzero entry.
    pub fn bandwidth(&self) -> usize {
        let n = self.dim();
        let zero = c(0.0, 0.0);
        let mut bw = 0;
        for i in 0..n {
            for j in 0..n {
                if self.matrix[(i, j)] != zero {
                    bw = bw.max(i.abs_diff(j));
                }
            }
        }
        bw
    }

    pub fn apply_interior(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        check_dim(self.dim(), v.len())?;
        let n = self.dim();
        Ok((0..n)
            .map(|i| (0..n).map(|j| self.matrix[(i, j)] * v[j]).sum())
            .collect())
    }

    pub fn apply(&self, psi: &WaveFunction) -> Result<WaveFunction> {
        WaveFunction::from_interior(self.grid, &self.apply_interior(psi.interior())?)
    }

    /// `⟨ψ|Ôψ⟩ / ⟨ψ|ψ⟩`.
    pub fn expectation(&self, psi: &WaveFunction) -> Result<Complex64> {
        let o = self.apply(psi)?;
        let den = psi.inner(psi)?;
        if den.re <= 0.0 {
            return Err(Error::invalid("psi", "zero wavefunction"));
        }
        Ok(psi.inner(&o)? / den)
    }

    /// Adds `i(γ/ω₂)·delta` to the diagonal, i.e. shifts the constant `c`.
    pub fn shift_c(&self, delta: f64) -> Result<Self> {
        let omega2 = self
            .meta
            .omega2
            .ok_or_else(|| Error::invalid("operator", "has no omega2; c is undefined"))?;
        let shift = c(0.0, self.meta.gamma / omega2 * delta);
        let mut matrix = self.matrix.clone();
        for i in 0..self.dim() {
            matrix[(i, i)] += shift;
        }
        let mut meta = self.meta;
        meta.c = Some(meta.c.unwrap_or(0.0) + delta);
        Ok(Self {
            matrix,
            grid: self.grid,
            meta,
        })
    }
}

fn check_hbar(hbar: f64) -> Result<()> {
    if hbar > 0.0 && hbar.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("hbar", "must be positive and finite"))
    }
}

/// The normal damped-oscillator operator
/// `(1 + iγ/ω₁)[−ħ²/2 ∂² + ½ω₁²x² − ½ħω₁]` whose ground eigenvalue is ~0.
///
/// Negative `γ` gives the time-reversed operator.
pub fn build_dsho_hamiltonian(
    omega: f64,
    gamma: f64,
    hbar: f64,
    grid: &Grid,
) -> Result<OperatorMatrix> {
    check_hbar(hbar)?;
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::invalid("omega", "must be positive and finite"));
    }
    if !(gamma.abs() < omega) {
        return Err(Error::Overdamped {
            gamma_sq: gamma * gamma,
            curvature: omega * omega,
        });
    }
    let omega1 = (omega * omega - gamma * gamma).sqrt();
    let ratio = gamma / omega1;
    let n = grid.interior_len();
    let matrix = Mat::from_fn(n, n, |i, j| {
        let mut m = kinetic(grid, hbar, i, j);
        if i == j {
            let x = grid.interior_node(i);
            m += 0.5 * omega1 * omega1 * x * x - 0.5 * hbar * omega1;
        }
        c(m, ratio * m)
    });
    Ok(OperatorMatrix {
        matrix,
        grid: *grid,
        meta: OperatorMeta {
            kind: OperatorKind::Dsho,
            omega: Some(omega),
            gamma,
            omega2: Some(omega1),
            c: None,
            hbar,
        },
    })
}

/// `Ĥ = [−ħ²/2 D₂ + V − ½γ²x²] + i(γ/ω₂)[−ħ²/2 D₂ + ½ω₂²x² + c]` for a
/// one-dimensional system with scalar friction.
pub fn build_general_hamiltonian(
    sys: &SystemSpec,
    omega2: f64,
    c_const: f64,
    grid: &Grid,
) -> Result<OperatorMatrix> {
    check_dim(1, sys.dim())?;
    let gamma = sys
        .dissipation()
        .scalar_gamma()
        .ok_or_else(|| Error::invalid("dissipation", "quantization needs scalar friction"))?;
    if !(omega2 > 0.0 && omega2.is_finite()) {
        return Err(Error::invalid("omega2", "must be positive and finite"));
    }
    if !c_const.is_finite() {
        return Err(Error::invalid("c", "must be finite"));
    }
    let hbar = sys.hbar();
    let v = sys.potential();
    let ratio = gamma / omega2;
    let n = grid.interior_len();
    let matrix = Mat::from_fn(n, n, |i, j| {
        let t = kinetic(grid, hbar, i, j);
        if i == j {
            let x = grid.interior_node(i);
            let re = t + v.value_1d(x) - 0.5 * gamma * gamma * x * x;
            let im = ratio * (t + 0.5 * omega2 * omega2 * x * x + c_const);
            c(re, im)
        } else {
            c(t, ratio * t)
        }
    });
    Ok(OperatorMatrix {
        matrix,
        grid: *grid,
        meta: OperatorMeta {
            kind: OperatorKind::General,
            omega: None,
            gamma,
            omega2: Some(omega2),
            c: Some(c_const),
            hbar,
        },
    })
}

/// `Ĥ_Schr = Ĥ + Ĥ_diss` for the damped oscillator: the general operator
/// with `V = ½ω²x²`, `ω₂ = ω₁` and `c = −½ħω₁`. Differs from
/// [`build_dsho_hamiltonian`] by the real constant `½ħω₁`.
pub fn build_schrodinger_dsho(
    omega: f64,
    gamma: f64,
    hbar: f64,
    grid: &Grid,
) -> Result<OperatorMatrix> {
    if !(gamma.abs() < omega) {
        return Err(Error::Overdamped {
            gamma_sq: gamma * gamma,
            curvature: omega * omega,
        });
    }
    let omega1 = (omega * omega - gamma * gamma).sqrt();
    let sys = SystemSpec::dsho(omega, gamma.abs())?.with_hbar(hbar)?;
    let sys = if gamma < 0.0 {
        sys.time_reversed()
    } else {
        sys
    };
    let mut op = build_general_hamiltonian(&sys, omega1, -0.5 * hbar * omega1, grid)?;
    op.meta.omega = Some(omega);
    Ok(op)
}

/// `p̂ = −iħ ∂ − γx` with a central first difference.
pub fn momentum_operator(gamma: f64, hbar: f64, grid: &Grid) -> Result<OperatorMatrix> {
    check_hbar(hbar)?;
    let n = grid.interior_len();
    let k = hbar / (2.0 * grid.spacing());
    let matrix = Mat::from_fn(n, n, |i, j| {
        if i == j {
            c(-gamma * grid.interior_node(i), 0.0)
        } else if j == i + 1 {
            c(0.0, -k)
        } else if i == j + 1 {
            c(0.0, k)
        } else {
            c(0.0, 0.0)
        }
    });
    Ok(OperatorMatrix {
        matrix,
        grid: *grid,
        meta: OperatorMeta {
            kind: OperatorKind::Momentum,
            omega: None,
            gamma,
            omega2: None,
            c: None,
            hbar,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::Stencil;

    fn grid() -> Grid {
        Grid::new(-8.0, 8.0, 120).unwrap()
    }

    #[test]
    fn general_is_dsho_plus_constant() {
        let (omega, gamma, hbar) = (1.0, 0.1, 1.0);
        let w1 = (omega * omega - gamma * gamma as f64).sqrt();
        let g = grid();
        let dsho = build_dsho_hamiltonian(omega, gamma, hbar, &g).unwrap();
        let schr = build_schrodinger_dsho(omega, gamma, hbar, &g).unwrap();
        let n = dsho.dim();
        for i in 0..n {
            for j in 0..n {
                let shift = if i == j { 0.5 * hbar * w1 } else { 0.0 };
                let d = schr.matrix()[(i, j)] - dsho.matrix()[(i, j)] - c(shift, 0.0);
                assert!(
                    d.norm() <= 1e-12 * (1.0 + dsho.matrix()[(i, j)].norm()),
                    "({i},{j}) {d}"
                );
            }
        }
    }

    #[test]
    fn conservative_operator_is_real() {
        let sys = SystemSpec::cubic_barrier(1.0, 1.0, 0.0).unwrap();
        let op = build_general_hamiltonian(&sys, 1.0, 0.3, &grid()).unwrap();
        let m = op.matrix();
        assert!((0..op.dim()).all(|i| (0..op.dim()).all(|j| m[(i, j)].im == 0.0)));
    }

    #[test]
    fn dsho_operator_is_scaled_real_matrix() {
        let op = build_dsho_hamiltonian(1.0, 0.1, 1.0, &grid()).unwrap();
        let w1 = 0.99f64.sqrt();
        let m = op.matrix();
        for i in 0..op.dim() {
            for j in 0..op.dim() {
                assert!(
                    (m[(i, j)].im - 0.1 / w1 * m[(i, j)].re).abs()
                        < 1e-15 * (1.0 + m[(i, j)].norm())
                );
            }
        }
    }

    #[test]
    fn band_structure() {
        let g = grid();
        assert_eq!(
            build_dsho_hamiltonian(1.0, 0.1, 1.0, &g)
                .unwrap()
                .bandwidth(),
            2
        );
        let g2 = g.with_stencil(Stencil::SecondOrder);
        assert_eq!(
            build_dsho_hamiltonian(1.0, 0.1, 1.0, &g2)
                .unwrap()
                .bandwidth(),
            1
        );
        assert_eq!(momentum_operator(0.1, 1.0, &g).unwrap().bandwidth(), 1);
    }

    #[test]
    fn rejects_overdamped_and_vector_friction() {
        assert!(matches!(
            build_dsho_hamiltonian(1.0, 1.2, 1.0, &grid()),
            Err(Error::Overdamped { .. })
        ));
        let sys = SystemSpec::new(
            1,
            crate::phase::Potential::harmonic(1.0),
            crate::phase::Dissipation::Quartic {
                gamma: 0.1,
                beta: 0.1,
            },
            1.0,
        )
        .unwrap();
        assert!(build_general_hamiltonian(&sys, 1.0, 0.0, &grid()).is_err());
    }

    #[test]
    fn shift_c_moves_diagonal() {
        let sys = SystemSpec::cubic_barrier(1.0, 1.0, 0.2).unwrap();
        let op = build_general_hamiltonian(&sys, 0.5, 0.0, &grid()).unwrap();
        let shifted = op.shift_c(1.5).unwrap();
        assert_eq!(shifted.meta().c, Some(1.5));
        let d = shifted.matrix()[(3, 3)] - op.matrix()[(3, 3)];
        assert!((d - c(0.0, 0.2 / 0.5 * 1.5)).norm() < 1e-14);
        assert_eq!(shifted.matrix()[(3, 4)], op.matrix()[(3, 4)]);
    }
}
