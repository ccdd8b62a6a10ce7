//! Dissipative WKB exponent for the cubic barrier `V(x) = ½ω²x²(1 − x/a)`.
//!
//! The action is `φ(x) = ∫₀^x √[(2V₁(s) + iγω₂s²)/(1 + iγ/ω₂)] ds` with
//! `V₁ = V − ½γ²s²`. Writing the radicand as `s²·h(s)`, the integrand is
//! `s·√h(s)` with the branch of `√h` followed continuously from `s = 0`.

mod quadrature;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phase::{Potential, SystemSpec};
use quadrature::{integrate_unit, Integrand};

const QUAD_TOL: f64 = 1e-10;
const BRANCH_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierSpec {
    omega: f64,
    a: f64,
    gamma: f64,
    hbar: f64,
}

impl BarrierSpec {
    /// Requires `a > 0`, `ħ > 0` and `0 ≤ γ < ω/√2`.
    pub fn new(omega: f64, a: f64, gamma: f64, hbar: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::invalid("omega", "must be positive and finite"));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::invalid("a", "must be positive and finite"));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::invalid("hbar", "must be positive and finite"));
        }
        if !(gamma >= 0.0 && 2.0 * gamma * gamma < omega * omega) {
            return Err(Error::invalid(
                "gamma",
                format!("need 0 ≤ γ < ω/√2, got γ = {gamma}"),
            ));
        }
        Ok(Self {
            omega,
            a,
            gamma,
            hbar,
        })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// `ω₁ = √(ω² − γ²)`.
    pub fn omega1(&self) -> f64 {
        (self.omega * self.omega - self.gamma * self.gamma).sqrt()
    }

    pub fn potential(&self) -> Potential {
        Potential::CubicBarrier {
            omega: self.omega,
            a: self.a,
        }
    }

    pub fn system(&self) -> Result<SystemSpec> {
        SystemSpec::cubic_barrier(self.omega, self.a, self.gamma)?.with_hbar(self.hbar)
    }

    /// `h(s)`, the radicand divided by `s²`.
    fn h(&self, s: Complex64, omega2: f64) -> Complex64 {
        let (w, g) = (self.omega, self.gamma);
        let num = w * w * (1.0 - s / self.a) - g * g + Complex64::new(0.0, g * omega2);
        num / Complex64::new(1.0, g / omega2)
    }

    /// Zero of `h`: `a(ω² − γ² + iγω₂)/ω²`.
    pub fn branch_point(&self, omega2: f64) -> Complex64 {
        let (w, g) = (self.omega, self.gamma);
        Complex64::new(w * w - g * g, g * omega2) * (self.a / (w * w))
    }
}

/// Where the tunneling path leaves the barrier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EscapeConvention {
    /// `b = a`, the conservative turning point.
    RealA,
    /// `b = (ω₁²/ω²)a`.
    Scaled,
    /// `b = ω₁(ω₁ + iγ)a/ω²`, the zero of the integrand at `ω₂ = ω₁`.
    #[default]
    ComplexZero,
}

impl EscapeConvention {
    pub const ALL: [EscapeConvention; 3] = [
        EscapeConvention::RealA,
        EscapeConvention::Scaled,
        EscapeConvention::ComplexZero,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            EscapeConvention::RealA => "real_a",
            EscapeConvention::Scaled => "scaled",
            EscapeConvention::ComplexZero => "complex_zero",
        }
    }
}

impl fmt::Display for EscapeConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for EscapeConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EscapeConvention::ALL
            .into_iter()
            .find(|c| c.tag() == s)
            .ok_or_else(|| {
                Error::invalid(
                    "convention",
                    format!("unknown `{s}` (real_a|scaled|complex_zero)"),
                )
            })
    }
}

pub fn escape_point(barrier: &BarrierSpec, convention: EscapeConvention) -> Complex64 {
    let (w, g, a) = (barrier.omega, barrier.gamma, barrier.a);
    let w1 = barrier.omega1();
    match convention {
        EscapeConvention::RealA => Complex64::new(a, 0.0),
        EscapeConvention::Scaled => Complex64::new(w1 * w1 / (w * w) * a, 0.0),
        EscapeConvention::ComplexZero => Complex64::new(w1, g) * (w1 * a / (w * w)),
    }
}

/// `(8/15)·(a²ω²/(ħω))·(ω² − γ²)^{3/2}(ω² − 2γ²)/ω⁵`.
pub fn closed_form_exponent(barrier: &BarrierSpec) -> f64 {
    let (w, g, a, hbar) = (barrier.omega, barrier.gamma, barrier.a, barrier.hbar);
    let w2 = w * w;
    8.0 / 15.0
        * (a * a * w2 / (hbar * w))
        * ((w2 - g * g).powf(1.5) * (w2 - 2.0 * g * g) / w.powi(5))
}

/// One straight leg `s = from + (to − from)·(1 − (1 − u)²)`. The substitution
/// flattens the square-root behaviour at a branch-point endpoint.
struct Leg<'a> {
    barrier: &'a BarrierSpec,
    omega2: f64,
    from: Complex64,
    delta: Complex64,
}

impl Integrand for Leg<'_> {
    /// Previous value of `√h`.
    type State = Complex64;

    fn eval(&self, u: f64, prev: &mut Complex64) -> Result<Complex64> {
        let v = 1.0 - u;
        let s = self.from + self.delta * (1.0 - v * v);
        let mut w = self.barrier.h(s, self.omega2).sqrt();
        if (w * prev.conj()).re < 0.0 {
            w = -w;
        }
        if w.norm() > 0.0 {
            *prev = w;
        }
        Ok(s * w * self.delta * (2.0 * v))
    }
}

fn check_leg(
    barrier: &BarrierSpec,
    omega2: f64,
    from: Complex64,
    to: Complex64,
    last: bool,
) -> Result<()> {
    let s0 = barrier.branch_point(omega2);
    let d = to - from;
    if d.norm() == 0.0 {
        return Ok(());
    }
    let t = (s0 - from) / d;
    let dist = if t.re <= 0.0 {
        (s0 - from).norm()
    } else if t.re >= 1.0 {
        (s0 - to).norm()
    } else {
        t.im.abs() * d.norm()
    };
    let scale = barrier.a.max(1.0);
    let at_end = last && (s0 - to).norm() <= BRANCH_EPS * scale;
    if dist <= BRANCH_EPS * scale && !at_end {
        return Err(Error::BranchPoint { at: s0 });
    }
    Ok(())
}

/// `φ` along straight legs `0 → waypoints[0] → … → waypoints[last]`.
/// Only the final endpoint may coincide with the branch point.
pub fn phi_along(waypoints: &[Complex64], barrier: &BarrierSpec, omega2: f64) -> Result<Complex64> {
    if !(omega2 > 0.0 && omega2.is_finite()) {
        return Err(Error::invalid("omega2", "must be positive and finite"));
    }
    if waypoints.iter().any(|w| !w.is_finite()) {
        return Err(Error::invalid("waypoints", "must be finite"));
    }
    let mut from = Complex64::new(0.0, 0.0);
    let mut branch = barrier.h(from, omega2).sqrt();
    if branch.norm() == 0.0 {
        return Err(Error::BranchPoint { at: from });
    }
    let mut total = Complex64::new(0.0, 0.0);
    let n = waypoints.len();
    let tol = QUAD_TOL / n.max(1) as f64;
    for (k, &to) in waypoints.iter().enumerate() {
        check_leg(barrier, omega2, from, to, k + 1 == n)?;
        if to != from {
            let leg = Leg {
                barrier,
                omega2,
                from,
                delta: to - from,
            };
            let (v, b) = integrate_unit(&leg, tol, branch)?;
            total += v;
            branch = b;
        }
        from = to;
    }
    Ok(total)
}

/// `φ(x)` along the straight segment from 0.
pub fn phi(x: Complex64, barrier: &BarrierSpec, omega2: f64) -> Result<Complex64> {
    phi_along(&[x], barrier, omega2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TunnelingResult {
    pub phi_at_b: Complex64,
    /// `2·Re φ(b)/ħ`.
    pub exponent: f64,
    /// `e^{−exponent}`.
    pub probability: f64,
    pub escape_point: Complex64,
    pub omega2: f64,
    pub convention: EscapeConvention,
}

/// WKB tunneling probability; `ω₂` defaults to `ω₁`.
pub fn tunneling_probability(
    barrier: &BarrierSpec,
    omega2: Option<f64>,
    convention: EscapeConvention,
) -> Result<TunnelingResult> {
    let omega2 = omega2.unwrap_or_else(|| barrier.omega1());
    let b = escape_point(barrier, convention);
    let phi_at_b = phi(b, barrier, omega2)?;
    let exponent = 2.0 * phi_at_b.re / barrier.hbar;
    Ok(TunnelingResult {
        phi_at_b,
        exponent,
        probability: (-exponent).exp(),
        escape_point: b,
        omega2,
        convention,
    })
}
