//! Adaptive Gauss–Kronrod (7/15) quadrature of a complex integrand whose
//! evaluation carries state (a square-root branch) that must be visited
//! left to right.

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: usize = 48;

/// Integrand with state `S` threaded through evaluations in ascending order.
pub(crate) trait Integrand {
    type State: Clone;
    fn eval(&self, u: f64, state: &mut Self::State) -> Result<Complex64>;
}

/// Result of one panel: Kronrod value, |K − G| and the state after its
/// right-most node.
fn panel<F: Integrand>(
    f: &F,
    l: f64,
    r: f64,
    state: &F::State,
) -> Result<(Complex64, f64, F::State)> {
    let c = 0.5 * (l + r);
    let hw = 0.5 * (r - l);
    let mut st = state.clone();
    // Nodes left to right: −XGK[0..7], 0, +XGK[6..0].
    let mut vals = [Complex64::new(0.0, 0.0); 15];
    for (k, v) in vals.iter_mut().enumerate() {
        let x = if k < 7 {
            -XGK[k]
        } else if k == 7 {
            0.0
        } else {
            XGK[14 - k]
        };
        *v = f.eval(c + hw * x, &mut st)?;
    }
    let mut kr = vals[7] * WGK[7];
    let mut ga = vals[7] * WG[3];
    for k in 0..7 {
        let pair = vals[k] + vals[14 - k];
        kr += pair * WGK[k];
        if k % 2 == 1 {
            ga += pair * WG[k / 2];
        }
    }
    Ok((kr * hw, ((kr - ga) * hw).norm(), st))
}

fn recurse<F: Integrand>(
    f: &F,
    l: f64,
    r: f64,
    tol: f64,
    state: F::State,
    depth: usize,
) -> Result<(Complex64, F::State)> {
    let (value, err, after) = panel(f, l, r, &state)?;
    if err <= tol || (r - l) < 1e-14 {
        return Ok((value, after));
    }
    if depth >= MAX_DEPTH {
        return Err(Error::NoConvergence {
            iterations: depth,
            residual: err,
        });
    }
    let m = 0.5 * (l + r);
    let (left, mid_state) = recurse(f, l, m, 0.5 * tol, state, depth + 1)?;
    let (right, end_state) = recurse(f, m, r, 0.5 * tol, mid_state, depth + 1)?;
    Ok((left + right, end_state))
}

/// `∫_0^1 f(u) du` to absolute tolerance `tol`.
pub(crate) fn integrate_unit<F: Integrand>(
    f: &F,
    tol: f64,
    state: F::State,
) -> Result<(Complex64, F::State)> {
    recurse(f, 0.0, 1.0, tol, state, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Plain<G: Fn(f64) -> Complex64>(G);

    impl<G: Fn(f64) -> Complex64> Integrand for Plain<G> {
        type State = usize;
        fn eval(&self, u: f64, calls: &mut usize) -> Result<Complex64> {
            *calls += 1;
            Ok((self.0)(u))
        }
    }

    #[test]
    fn polynomial_exact_on_one_panel() {
        let f = Plain(|u: f64| Complex64::new(u.powi(10), -3.0 * u * u));
        let (v, calls) = integrate_unit(&f, 1e-12, 0).unwrap();
        assert_eq!(calls, 15);
        assert!((v - Complex64::new(1.0 / 11.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn square_root_endpoint() {
        // ∫₀¹ √u du = 2/3, singular derivative at 0.
        let f = Plain(|u: f64| Complex64::new(u.sqrt(), 0.0));
        let (v, _) = integrate_unit(&f, 1e-12, 0).unwrap();
        assert!((v.re - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn oscillatory() {
        let f = Plain(|u: f64| Complex64::new(0.0, 40.0 * u).exp());
        let (v, _) = integrate_unit(&f, 1e-12, 0).unwrap();
        let exact = (Complex64::new(0.0, 40.0).exp() - 1.0) / Complex64::new(0.0, 40.0);
        assert!((v - exact).norm() < 1e-12);
    }
}
