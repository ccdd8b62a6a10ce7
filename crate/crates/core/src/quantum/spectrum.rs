use std::cmp::Ordering;

use faer::Mat;
use num_complex::Complex64;

use super::operator::OperatorMatrix;
use crate::error::{Error, Result};

/// Eigenpairs sorted by ascending imaginary part, then real part.
/// Eigenvectors are unit Euclidean vectors over the interior nodes, phased
/// so their largest component is real and positive.
#[derive(Debug, Clone)]
pub struct ComplexSpectrum {
    pub eigenvalues: Vec<Complex64>,
    pub eigenvectors: Vec<Vec<Complex64>>,
    /// `‖Ĥv − λv‖` per pair.
    pub residuals: Vec<f64>,
}

impl ComplexSpectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

fn order(a: &Complex64, b: &Complex64) -> Ordering {
    a.im.total_cmp(&b.im).then(a.re.total_cmp(&b.re))
}

pub(crate) fn sort_eigenvalues(values: &mut [Complex64]) {
    values.sort_by(order);
}

fn residual(m: &Mat<Complex64>, lambda: Complex64, v: &[Complex64]) -> f64 {
    let n = v.len();
    (0..n)
        .map(|i| {
            let mut acc = -lambda * v[i];
            for (j, vj) in v.iter().enumerate() {
                acc += m[(i, j)] * vj;
            }
            acc.norm_sqr()
        })
        .sum::<f64>()
        .sqrt()
}

/// The `k` eigenpairs with smallest imaginary part, from a dense
/// eigendecomposition.
pub fn spectrum(op: &OperatorMatrix, k: usize) -> Result<ComplexSpectrum> {
    spectrum_of(op.matrix(), k)
}

/// [`spectrum`] for a bare square matrix.
pub fn spectrum_of(m: &Mat<Complex64>, k: usize) -> Result<ComplexSpectrum> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::invalid("matrix", "must be square"));
    }
    if k == 0 || k > n {
        return Err(Error::invalid("k", format!("must be in 1..={n}")));
    }
    let evd = m
        .eigen()
        .map_err(|e| Error::Numerical(format!("complex eigensolver: {e:?}")))?;
    let u = evd.U();
    let s = evd.S();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| order(&s[a], &s[b]));

    let scale = m.norm_l2().max(f64::MIN_POSITIVE);
    let mut out = ComplexSpectrum {
        eigenvalues: Vec::with_capacity(k),
        eigenvectors: Vec::with_capacity(k),
        residuals: Vec::with_capacity(k),
    };
    for &col in idx.iter().take(k) {
        let lambda = s[col];
        let mut v: Vec<Complex64> = (0..n).map(|i| u[(i, col)]).collect();
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let big = v
            .iter()
            .copied()
            .max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()))
            .unwrap_or(Complex64::new(1.0, 0.0));
        if !(norm > 0.0) || !lambda.is_finite() {
            return Err(Error::Numerical(
                "eigensolver returned a degenerate pair".into(),
            ));
        }
        let phase = big.conj() / big.norm() / norm;
        for c in v.iter_mut() {
            *c *= phase;
        }
        let r = residual(m, lambda, &v);
        if !(r <= 1e-8 * scale) {
            return Err(Error::Numerical(format!(
                "eigenpair residual {r:.3e} exceeds 1e-8·‖H‖ = {:.3e}",
                1e-8 * scale
            )));
        }
        out.eigenvalues.push(lambda);
        out.eigenvectors.push(v);
        out.residuals.push(r);
    }
    Ok(out)
}

/// All eigenvalues, sorted, without eigenvectors.
pub fn eigenvalues(op: &OperatorMatrix) -> Result<Vec<Complex64>> {
    let mut ev = op
        .matrix()
        .eigenvalues()
        .map_err(|e| Error::Numerical(format!("complex eigensolver: {e:?}")))?;
    if ev.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite eigenvalue".into()));
    }
    sort_eigenvalues(&mut ev);
    Ok(ev)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChosenC {
    pub c: f64,
    /// Two eigenvalues share the minimal imaginary part within 1e-10;
    /// the first (smaller real part) was used.
    pub degenerate: bool,
}

/// Picks `c` so the eigenvalue with smallest imaginary part becomes real.
/// `op` is taken as built with `c = 0`.
pub fn choose_c(op: &OperatorMatrix, gamma: f64, omega2: f64) -> Result<ChosenC> {
    if gamma == 0.0 {
        return Err(Error::invalid(
            "gamma",
            "c only enters through γ/ω₂; γ = 0 leaves it undetermined",
        ));
    }
    if !(omega2 > 0.0) {
        return Err(Error::invalid("omega2", "must be positive"));
    }
    let ev = eigenvalues(op)?;
    let min = ev[0].im;
    let degenerate = ev.len() > 1 && (ev[1].im - min).abs() <= 1e-10;
    Ok(ChosenC {
        c: -(omega2 / gamma) * min,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorting_contract() {
        let mut v = vec![
            Complex64::new(1.0, 2.0),
            Complex64::new(3.0, 0.0),
            Complex64::new(-1.0, 0.0),
        ];
        sort_eigenvalues(&mut v);
        assert_eq!(
            v,
            vec![
                Complex64::new(-1.0, 0.0),
                Complex64::new(3.0, 0.0),
                Complex64::new(1.0, 2.0)
            ]
        );
    }

    #[test]
    fn diagonal_matrix() {
        let m = Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => Complex64::new(1.0, 2.0),
            (1, 1) => Complex64::new(3.0, 0.0),
            _ => Complex64::new(0.0, 0.0),
        });
        let s = spectrum_of(&m, 2).unwrap();
        assert!((s.eigenvalues[0] - Complex64::new(3.0, 0.0)).norm() < 1e-14);
        assert!((s.eigenvalues[1] - Complex64::new(1.0, 2.0)).norm() < 1e-14);
        assert!((s.eigenvectors[0][1] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!(spectrum_of(&m, 3).is_err());
    }
}
