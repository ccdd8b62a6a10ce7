use faer::Mat;
use num_complex::Complex64;

use super::hamiltonian::shifted_momentum;
use super::system::{PhaseState, ShiftedState, SystemSpec};
use crate::error::{check_dim, Error, Result};

/// The constant complex structure on phase space,
///
/// ```text
/// J = [[ 0,      −ω₂·I ],
///      [ I/ω₂,    0    ]]
/// ```
///
/// acting on stacked `(p̃, x)` vectors. `J² = −I` for every `ω₂ > 0`.
#[derive(Debug, Clone)]
pub struct ComplexStructure {
    omega2: f64,
    dim: usize,
    matrix: Mat<f64>,
}

impl ComplexStructure {
    pub fn new(omega2: f64, dim: usize) -> Result<Self> {
        if !(omega2 > 0.0 && omega2.is_finite()) {
            return Err(Error::invalid("omega2", "must be positive and finite"));
        }
        if dim == 0 {
            return Err(Error::invalid("dim", "must be positive"));
        }
        let matrix = Mat::from_fn(2 * dim, 2 * dim, |i, j| {
            if i < dim && j == i + dim {
                -omega2
            } else if i >= dim && j + dim == i {
                1.0 / omega2
            } else {
                0.0
            }
        });
        Ok(Self {
            omega2,
            dim,
            matrix,
        })
    }

    pub fn omega2(&self) -> f64 {
        self.omega2
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &Mat<f64> {
        &self.matrix
    }

    /// `J·v` for a stacked `(p̃, x)` vector.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_dim(2 * self.dim, v.len())?;
        let (p, x) = v.split_at(self.dim);
        Ok(x.iter()
            .map(|xa| -self.omega2 * xa)
            .chain(p.iter().map(|pa| pa / self.omega2))
            .collect())
    }
}

/// Complex normal coordinates `z_a = (ω₂ x_a − i p̃_a)/√(2ω₂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexCoordinates {
    pub z: Vec<Complex64>,
}

pub fn to_complex(
    state: &PhaseState,
    sys: &SystemSpec,
    j: &ComplexStructure,
) -> Result<ComplexCoordinates> {
    let p_tilde = shifted_momentum(state, sys)?;
    check_dim(j.dim(), state.dim())?;
    Ok(shifted_to_complex(
        &ShiftedState {
            x: state.x.clone(),
            p_tilde,
            t: state.t,
        },
        j,
    ))
}

pub fn shifted_to_complex(state: &ShiftedState, j: &ComplexStructure) -> ComplexCoordinates {
    let w = j.omega2();
    let s = (2.0 * w).sqrt();
    ComplexCoordinates {
        z: state
            .x
            .iter()
            .zip(&state.p_tilde)
            .map(|(x, p)| Complex64::new(w * x, -p) / s)
            .collect(),
    }
}

/// Inverse of [`to_complex`]: recovers `(x, p)` with `p = p̃ − ∇W(x)`.
pub fn from_complex(
    coords: &ComplexCoordinates,
    t: f64,
    sys: &SystemSpec,
    j: &ComplexStructure,
) -> Result<PhaseState> {
    check_dim(sys.dim(), coords.z.len())?;
    check_dim(j.dim(), coords.z.len())?;
    let w = j.omega2();
    let s = (2.0 * w).sqrt();
    let x: Vec<f64> = coords.z.iter().map(|z| s * z.re / w).collect();
    let grad_w = sys.dissipation().gradient(&x);
    let p = coords
        .z
        .iter()
        .zip(&grad_w)
        .map(|(z, gw)| -s * z.im - gw)
        .collect();
    Ok(PhaseState { x, p, t })
}

/// A complex linear function `f = Σ a_i p_i + b_i x_i` on phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearForm {
    pub p: Vec<Complex64>,
    pub x: Vec<Complex64>,
}

impl LinearForm {
    pub fn conj(&self) -> Self {
        Self {
            p: self.p.iter().map(|c| c.conj()).collect(),
            x: self.x.iter().map(|c| c.conj()).collect(),
        }
    }
}

/// Poisson bracket of two linear forms under `{p_a, x_b} = δ_ab`:
/// `{f, g} = Σ (a_f b_g − b_f a_g)`.
pub fn poisson_bracket(f: &LinearForm, g: &LinearForm) -> Result<Complex64> {
    check_dim(f.p.len(), g.p.len())?;
    check_dim(f.x.len(), g.x.len())?;
    check_dim(f.p.len(), f.x.len())?;
    Ok((0..f.p.len())
        .map(|i| f.p[i] * g.x[i] - f.x[i] * g.p[i])
        .sum())
}

/// The damped oscillator's normal coordinate
/// `z = A[−i(p + γx) + ω₁x]` as a linear form in `(p, x)`.
pub fn dsho_normal_form(omega: f64, gamma: f64, amplitude: f64) -> Result<LinearForm> {
    if gamma.abs() >= omega {
        return Err(Error::Overdamped {
            gamma_sq: gamma * gamma,
            curvature: omega * omega,
        });
    }
    let omega1 = (omega * omega - gamma * gamma).sqrt();
    Ok(LinearForm {
        p: vec![Complex64::new(0.0, -amplitude)],
        x: vec![Complex64::new(amplitude * omega1, -amplitude * gamma)],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    #[test]
    fn j_applied_to_unit_x() {
        let j = ComplexStructure::new(2.0, 1).unwrap();
        assert_eq!(j.apply(&[0.0, 1.0]).unwrap(), vec![-2.0, 0.0]);
        let j1 = ComplexStructure::new(1.0, 1).unwrap();
        assert_eq!(j1.apply(&[1.0, 0.0]).unwrap(), vec![0.0, 1.0]);
        assert!(matches!(
            j.apply(&[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn j_squares_to_minus_identity() {
        for &w in &[0.3, 1.0, 2.0, 7.5] {
            let j = ComplexStructure::new(w, 3).unwrap();
            let m = j.matrix();
            let n = m.nrows();
            for r in 0..n {
                for c in 0..n {
                    let v: f64 = (0..n).map(|k| m[(r, k)] * m[(k, c)]).sum();
                    let expect = if r == c { -1.0 } else { 0.0 };
                    assert!((v - expect).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn origin_and_unit_coordinates() {
        let sys = SystemSpec::dsho(1.0, 0.1).unwrap();
        let j = ComplexStructure::new(1.0, 1).unwrap();
        let z0 = to_complex(&PhaseState::point(0.0, 0.0), &sys, &j).unwrap();
        assert_eq!(z0.z[0], Complex64::new(0.0, 0.0));
        // p̃ = 0 requires p = −γx.
        let z1 = to_complex(&PhaseState::point(SQRT_2, -0.1 * SQRT_2), &sys, &j).unwrap();
        assert!((z1.z[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn normal_coordinate_bracket() {
        let omega = 1.0;
        let gamma = 0.1;
        let omega1 = (omega * omega - gamma * gamma as f64).sqrt();
        let amp = 0.7;
        let z = dsho_normal_form(omega, gamma, amp).unwrap();
        let general = poisson_bracket(&z.conj(), &z).unwrap();
        assert!((general - Complex64::new(0.0, 2.0 * omega1 * amp * amp)).norm() < 1e-15);

        let z = dsho_normal_form(omega, gamma, 1.0 / (2.0 * omega1).sqrt()).unwrap();
        let b = poisson_bracket(&z.conj(), &z).unwrap();
        assert!((b - Complex64::new(0.0, 1.0)).norm() < 1e-14);
    }
}
