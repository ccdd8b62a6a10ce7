use faer::Mat;

use crate::error::{check_dim, Error, Result};
use crate::linalg;

/// Registered analytic potential families. Every family has exact gradients
/// and Hessians.
#[derive(Debug, Clone)]
pub enum Potential {
    /// `V(x) = ½ xᵀ K x` with symmetric stiffness `K`.
    Quadratic { stiffness: Mat<f64> },
    /// `V(x) = ½ ω² x² (1 − x/a)`, one-dimensional.
    CubicBarrier { omega: f64, a: f64 },
    /// `V(x) = Σ_k c_k x^k`, one-dimensional.
    Polynomial { coeffs: Vec<f64> },
}

impl Potential {
    /// One-dimensional harmonic well `½ ω² x²`.
    pub fn harmonic(omega: f64) -> Self {
        Potential::Quadratic {
            stiffness: Mat::from_fn(1, 1, |_, _| omega * omega),
        }
    }

    pub fn quadratic(stiffness: Mat<f64>) -> Result<Self> {
        if !linalg::is_symmetric(&stiffness, 0.0) {
            return Err(Error::invalid(
                "stiffness",
                "matrix must be square and symmetric",
            ));
        }
        Ok(Potential::Quadratic { stiffness })
    }

    pub fn cubic_barrier(omega: f64, a: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::invalid("omega", "must be positive and finite"));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::invalid("a", "must be positive and finite"));
        }
        Ok(Potential::CubicBarrier { omega, a })
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("coeffs", "must be finite"));
        }
        Ok(Potential::Polynomial { coeffs })
    }

    /// Configuration dimension the family is defined on.
    pub fn dim(&self) -> usize {
        match self {
            Potential::Quadratic { stiffness } => stiffness.nrows(),
            Potential::CubicBarrier { .. } | Potential::Polynomial { .. } => 1,
        }
    }

    /// `V(x)` for one-dimensional families.
    pub fn value_1d(&self, x: f64) -> f64 {
        match self {
            Potential::Quadratic { stiffness } => 0.5 * stiffness[(0, 0)] * x * x,
            Potential::CubicBarrier { omega, a } => 0.5 * omega * omega * x * x * (1.0 - x / a),
            Potential::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c),
        }
    }

    /// `V'(x)` for one-dimensional families.
    pub fn derivative_1d(&self, x: f64) -> f64 {
        match self {
            Potential::Quadratic { stiffness } => stiffness[(0, 0)] * x,
            Potential::CubicBarrier { omega, a } => omega * omega * (x - 1.5 * x * x / a),
            Potential::Polynomial { coeffs } => coeffs
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (k, c)| acc * x + k as f64 * c),
        }
    }

    /// `V''(x)` for one-dimensional families.
    pub fn second_derivative_1d(&self, x: f64) -> f64 {
        match self {
            Potential::Quadratic { stiffness } => stiffness[(0, 0)],
            Potential::CubicBarrier { omega, a } => omega * omega * (1.0 - 3.0 * x / a),
            Potential::Polynomial { coeffs } => coeffs
                .iter()
                .enumerate()
                .skip(2)
                .rev()
                .fold(0.0, |acc, (k, c)| acc * x + (k * (k - 1)) as f64 * c),
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            Potential::Quadratic { stiffness } => 0.5 * linalg::quad_form(stiffness, x, x),
            _ => self.value_1d(x[0]),
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Potential::Quadratic { stiffness } => linalg::mat_vec(stiffness, x),
            _ => vec![self.derivative_1d(x[0])],
        }
    }

    pub fn hessian(&self, x: &[f64]) -> Mat<f64> {
        match self {
            Potential::Quadratic { stiffness } => stiffness.clone(),
            _ => Mat::from_fn(1, 1, |_, _| self.second_derivative_1d(x[0])),
        }
    }
}

/// Dissipation models. The friction force is `−2 γ_ab(x) ẋ_b` with
/// `γ_ab = ∂_a ∂_b W` for a convex `W`.
#[derive(Debug, Clone)]
pub enum Dissipation {
    /// Constant rate `γ`: `W = ½ γ |x|²`.
    Scalar(f64),
    /// `W = ½ xᵀ G x` with symmetric positive semidefinite `G`.
    Quadratic(Mat<f64>),
    /// `W = Σ_a (½ γ x_a² + ¼ β x_a⁴)` with `γ, β ≥ 0`.
    Quartic { gamma: f64, beta: f64 },
}

impl Dissipation {
    pub fn w(&self, x: &[f64]) -> f64 {
        match self {
            Dissipation::Scalar(g) => 0.5 * g * linalg::dot(x, x),
            Dissipation::Quadratic(m) => 0.5 * linalg::quad_form(m, x, x),
            Dissipation::Quartic { gamma, beta } => x
                .iter()
                .map(|v| 0.5 * gamma * v * v + 0.25 * beta * v.powi(4))
                .sum(),
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Dissipation::Scalar(g) => x.iter().map(|v| g * v).collect(),
            Dissipation::Quadratic(m) => linalg::mat_vec(m, x),
            Dissipation::Quartic { gamma, beta } => {
                x.iter().map(|v| gamma * v + beta * v.powi(3)).collect()
            }
        }
    }

    /// The dissipation tensor `γ_ab(x) = ∂_a ∂_b W`.
    pub fn hessian(&self, x: &[f64]) -> Mat<f64> {
        let n = x.len();
        match self {
            Dissipation::Scalar(g) => Mat::from_fn(n, n, |i, j| if i == j { *g } else { 0.0 }),
            Dissipation::Quadratic(m) => m.clone(),
            Dissipation::Quartic { gamma, beta } => Mat::from_fn(n, n, |i, j| {
                if i == j {
                    gamma + 3.0 * beta * x[i] * x[i]
                } else {
                    0.0
                }
            }),
        }
    }

    /// `∂_a (½ γ_bc(x) v_b v_c)`, the position gradient of the friction
    /// quadratic form at fixed `v`. Zero for constant-Hessian families.
    pub fn hessian_form_gradient(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        match self {
            Dissipation::Scalar(_) | Dissipation::Quadratic(_) => vec![0.0; x.len()],
            Dissipation::Quartic { beta, .. } => x
                .iter()
                .zip(v)
                .map(|(xa, va)| 3.0 * beta * xa * va * va)
                .collect(),
        }
    }

    pub fn has_constant_hessian(&self) -> bool {
        !matches!(self, Dissipation::Quartic { beta, .. } if *beta != 0.0)
    }

    /// Scalar rate when this is the `Scalar` form.
    pub fn scalar_gamma(&self) -> Option<f64> {
        match self {
            Dissipation::Scalar(g) => Some(*g),
            _ => None,
        }
    }

    fn negated(&self) -> Self {
        match self {
            Dissipation::Scalar(g) => Dissipation::Scalar(-g),
            Dissipation::Quadratic(m) => {
                Dissipation::Quadratic(Mat::from_fn(m.nrows(), m.ncols(), |i, j| -m[(i, j)]))
            }
            Dissipation::Quartic { gamma, beta } => Dissipation::Quartic {
                gamma: -gamma,
                beta: -beta,
            },
        }
    }
}

/// A classical dissipative system: potential, dissipation model, dimension
/// and action scale.
#[derive(Debug, Clone)]
pub struct SystemSpec {
    dim: usize,
    potential: Potential,
    dissipation: Dissipation,
    hbar: f64,
}

impl SystemSpec {
    pub fn new(
        dim: usize,
        potential: Potential,
        dissipation: Dissipation,
        hbar: f64,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dim", "must be positive"));
        }
        check_dim(dim, potential.dim())?;
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::invalid("hbar", "must be positive and finite"));
        }
        match &dissipation {
            Dissipation::Scalar(g) => {
                if !(*g >= 0.0 && g.is_finite()) {
                    return Err(Error::invalid("gamma", "must be non-negative and finite"));
                }
            }
            Dissipation::Quadratic(m) => {
                check_dim(dim, m.nrows())?;
                if !linalg::is_symmetric(m, 0.0) {
                    return Err(Error::invalid(
                        "dissipation",
                        "Hessian of W must be symmetric",
                    ));
                }
                let min = linalg::sym_eigenvalues(m)?[0];
                if min < -1e-12 {
                    return Err(Error::NonConvexDissipation {
                        x: vec![0.0; dim],
                        min_eigenvalue: min,
                    });
                }
            }
            Dissipation::Quartic { gamma, beta } => {
                if !(*gamma >= 0.0 && *beta >= 0.0 && gamma.is_finite() && beta.is_finite()) {
                    return Err(Error::invalid(
                        "dissipation",
                        "quartic W needs gamma, beta >= 0",
                    ));
                }
            }
        }
        Ok(Self {
            dim,
            potential,
            dissipation,
            hbar,
        })
    }

    /// Damped simple harmonic oscillator `ẍ + 2γẋ + ω²x = 0` with `ħ = 1`.
    pub fn dsho(omega: f64, gamma: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::invalid("omega", "must be positive and finite"));
        }
        Self::new(
            1,
            Potential::harmonic(omega),
            Dissipation::Scalar(gamma),
            1.0,
        )
    }

    /// Cubic barrier `½ω²x²(1 − x/a)` with scalar friction and `ħ = 1`.
    pub fn cubic_barrier(omega: f64, a: f64, gamma: f64) -> Result<Self> {
        Self::new(
            1,
            Potential::cubic_barrier(omega, a)?,
            Dissipation::Scalar(gamma),
            1.0,
        )
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::invalid("hbar", "must be positive and finite"));
        }
        self.hbar = hbar;
        Ok(self)
    }

    /// The time-reversed system, with every dissipation coefficient negated.
    /// Only meaningful as the partner in adjoint-symmetry checks.
    pub fn time_reversed(&self) -> Self {
        Self {
            dissipation: self.dissipation.negated(),
            ..self.clone()
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn dissipation(&self) -> &Dissipation {
        &self.dissipation
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// `γ_ab(x)`, checked for positive semidefiniteness when it varies with x.
    pub fn dissipation_tensor(&self, x: &[f64]) -> Result<Mat<f64>> {
        check_dim(self.dim, x.len())?;
        let g = self.dissipation.hessian(x);
        if !self.dissipation.has_constant_hessian() {
            let min = (0..self.dim)
                .map(|i| g[(i, i)])
                .fold(f64::INFINITY, f64::min);
            // Quartic family is diagonal; the diagonal is the spectrum.
            if min < 0.0 {
                return Err(Error::NonConvexDissipation {
                    x: x.to_vec(),
                    min_eigenvalue: min,
                });
            }
        }
        Ok(g)
    }
}

/// A point in physical phase space `(x, p)` at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    pub t: f64,
}

impl PhaseState {
    pub fn new(x: Vec<f64>, p: Vec<f64>, t: f64) -> Result<Self> {
        check_dim(x.len(), p.len())?;
        if x.iter()
            .chain(&p)
            .chain(std::iter::once(&t))
            .any(|v| !v.is_finite())
        {
            return Err(Error::invalid("state", "entries must be finite"));
        }
        Ok(Self { x, p, t })
    }

    /// One-dimensional state at `t = 0`.
    pub fn point(x: f64, p: f64) -> Self {
        Self {
            x: vec![x],
            p: vec![p],
            t: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(&self.p).all(|v| v.is_finite())
    }
}

/// A phase-space point in the shifted variables `(x, p̃)`, `p̃ = p + ∇W(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedState {
    pub x: Vec<f64>,
    pub p_tilde: Vec<f64>,
    pub t: f64,
}

impl ShiftedState {
    pub fn dim(&self) -> usize {
        self.x.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_derivatives_match_cubic_family() {
        // ½x²(1 − x) = ½x² − ½x³
        let poly = Potential::polynomial(vec![0.0, 0.0, 0.5, -0.5]).unwrap();
        let cubic = Potential::cubic_barrier(1.0, 1.0).unwrap();
        for &x in &[-1.3, 0.0, 0.25, 0.8, 2.0] {
            assert!((poly.value_1d(x) - cubic.value_1d(x)).abs() < 1e-15);
            assert!((poly.derivative_1d(x) - cubic.derivative_1d(x)).abs() < 1e-14);
            assert!((poly.second_derivative_1d(x) - cubic.second_derivative_1d(x)).abs() < 1e-14);
        }
    }

    #[test]
    fn quartic_form_gradient_matches_finite_difference() {
        let d = Dissipation::Quartic {
            gamma: 0.2,
            beta: 0.7,
        };
        let x = [0.3, -0.9];
        let v = [1.1, 0.4];
        let form = |x: &[f64]| 0.5 * linalg::quad_form(&d.hessian(x), &v, &v);
        let g = d.hessian_form_gradient(&x, &v);
        for a in 0..2 {
            let eps = 1e-6;
            let mut xp = x;
            let mut xm = x;
            xp[a] += eps;
            xm[a] -= eps;
            let fd = (form(&xp) - form(&xm)) / (2.0 * eps);
            assert!((fd - g[a]).abs() < 1e-8, "{fd} vs {}", g[a]);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(SystemSpec::dsho(1.0, -0.1).is_err());
        assert!(SystemSpec::dsho(0.0, 0.1).is_err());
        assert!(
            SystemSpec::new(1, Potential::harmonic(1.0), Dissipation::Scalar(0.1), 0.0).is_err()
        );
        let not_psd = Mat::from_fn(2, 2, |i, j| if i == j { 0.0 } else { 1.0 });
        let err = SystemSpec::new(
            2,
            Potential::quadratic(Mat::identity(2, 2)).unwrap(),
            Dissipation::Quadratic(not_psd),
            1.0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonConvexDissipation { .. }));
        assert!(matches!(
            SystemSpec::new(2, Potential::harmonic(1.0), Dissipation::Scalar(0.1), 1.0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn time_reversal_flips_gamma() {
        let sys = SystemSpec::dsho(1.0, 0.1).unwrap().time_reversed();
        assert_eq!(sys.dissipation().scalar_gamma(), Some(-0.1));
    }
}
