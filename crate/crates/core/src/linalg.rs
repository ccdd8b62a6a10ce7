//! Small dense helpers over `faer` for configuration-space matrices.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};

use crate::error::{Error, Result};

pub(crate) fn mat_vec(m: &Mat<f64>, v: &[f64]) -> Vec<f64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum())
        .collect()
}

pub(crate) fn quad_form(m: &Mat<f64>, u: &[f64], v: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            acc += u[i] * m[(i, j)] * v[j];
        }
    }
    acc
}

pub(crate) fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

pub(crate) fn is_symmetric(m: &Mat<f64>, tol: f64) -> bool {
    m.nrows() == m.ncols()
        && (0..m.nrows()).all(|i| (0..i).all(|j| (m[(i, j)] - m[(j, i)]).abs() <= tol))
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub(crate) fn sym_eigenvalues(m: &Mat<f64>) -> Result<Vec<f64>> {
    if m.nrows() == 1 {
        return Ok(vec![m[(0, 0)]]);
    }
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Numerical(format!("symmetric eigensolver: {e:?}")))
}

/// `exp(-t M)` for symmetric `M`, via its eigendecomposition.
pub(crate) fn sym_exp_neg(m: &Mat<f64>, t: f64) -> Result<Mat<f64>> {
    let n = m.nrows();
    if n == 1 {
        return Ok(Mat::from_fn(1, 1, |_, _| (-t * m[(0, 0)]).exp()));
    }
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numerical(format!("symmetric eigensolver: {e:?}")))?;
    let u = evd.U();
    let s = evd.S();
    Ok(Mat::from_fn(n, n, |i, j| {
        (0..n)
            .map(|k| u[(i, k)] * (-t * s[k]).exp() * u[(j, k)])
            .sum()
    }))
}

pub(crate) fn solve(m: &Mat<f64>, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = m.nrows();
    if n == 1 {
        let d = m[(0, 0)];
        if d == 0.0 {
            return Err(Error::Numerical("singular 1x1 system".into()));
        }
        return Ok(vec![rhs[0] / d]);
    }
    let b = Mat::from_fn(n, 1, |i, _| rhs[i]);
    let x = m.partial_piv_lu().solve(&b);
    let out: Vec<f64> = (0..n).map(|i| x[(i, 0)]).collect();
    if out.iter().all(|v| v.is_finite()) {
        Ok(out)
    } else {
        Err(Error::Numerical("singular linear system".into()))
    }
}
