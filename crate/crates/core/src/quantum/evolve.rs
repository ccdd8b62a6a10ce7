use faer::linalg::solvers::{PartialPivLu, Solve};
use faer::Mat;
use num_complex::Complex64;

use super::operator::OperatorMatrix;
use super::wave::WaveFunction;
use crate::error::{check_dim, Error, Result};

/// Stored state of an evolution run.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub psi: WaveFunction,
}

/// Band storage: row `i` holds columns `i − b ..= i + b`.
#[derive(Debug, Clone)]
struct Band {
    n: usize,
    b: usize,
    data: Vec<Complex64>,
}

impl Band {
    fn from_dense(m: &Mat<Complex64>, b: usize) -> Self {
        let n = m.nrows();
        let w = 2 * b + 1;
        let mut data = vec![Complex64::new(0.0, 0.0); n * w];
        for i in 0..n {
            for j in i.saturating_sub(b)..(i + b + 1).min(n) {
                data[i * w + j + b - i] = m[(i, j)];
            }
        }
        Self { n, b, data }
    }

    fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * (2 * self.b + 1) + j + self.b - i]
    }

    fn at_mut(&mut self, i: usize, j: usize) -> &mut Complex64 {
        &mut self.data[i * (2 * self.b + 1) + j + self.b - i]
    }

    fn mul(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| {
                (i.saturating_sub(self.b)..(i + self.b + 1).min(self.n))
                    .map(|j| self.at(i, j) * v[j])
                    .sum()
            })
            .collect()
    }

    /// In-place LU without pivoting. `None` if a pivot is tiny relative to
    /// the row scale, in which case the caller falls back to pivoting.
    fn factor(mut self) -> Option<Self> {
        let (n, b) = (self.n, self.b);
        for k in 0..n {
            let scale = (k.saturating_sub(b)..(k + b + 1).min(n))
                .map(|j| self.at(k, j).norm())
                .fold(0.0, f64::max);
            let pivot = self.at(k, k);
            if !(pivot.norm() > 1e-12 * scale) {
                return None;
            }
            for i in k + 1..(k + b + 1).min(n) {
                let l = self.at(i, k) / pivot;
                *self.at_mut(i, k) = l;
                for j in k + 1..(k + b + 1).min(n) {
                    let u = self.at(k, j);
                    *self.at_mut(i, j) -= l * u;
                }
            }
        }
        Some(self)
    }

    fn solve(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        let (n, b) = (self.n, self.b);
        let mut y = rhs.to_vec();
        for i in 0..n {
            for j in i.saturating_sub(b)..i {
                let l = self.at(i, j);
                let yj = y[j];
                y[i] -= l * yj;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..(i + b + 1).min(n) {
                let u = self.at(i, j);
                let yj = y[j];
                y[i] -= u * yj;
            }
            y[i] /= self.at(i, i);
        }
        y
    }
}

#[derive(Debug)]
enum Factor {
    Banded(Band),
    Dense(PartialPivLu<Complex64>),
}

/// One implicit-midpoint step `(I − iθĤ)ψ' = (I + iθĤ)ψ`, `θ = dt/2ħ`,
/// with the left-hand matrix factored once.
#[derive(Debug)]
pub struct Propagator {
    rhs: Band,
    lhs: Factor,
    dt: f64,
}

impl Propagator {
    pub fn new(op: &OperatorMatrix, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::invalid("dt", "must be positive and finite"));
        }
        let n = op.dim();
        let theta = Complex64::new(0.0, dt / (2.0 * op.meta().hbar));
        let h = op.matrix();
        let id = |i: usize, j: usize| {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        };
        let plus = Mat::from_fn(n, n, |i, j| id(i, j) + theta * h[(i, j)]);
        let minus = Mat::from_fn(n, n, |i, j| id(i, j) - theta * h[(i, j)]);
        let b = op.bandwidth();
        let rhs = Band::from_dense(&plus, b);
        // A band wider than a quarter of the matrix gains nothing.
        let lhs = match (4 * b < n)
            .then(|| Band::from_dense(&minus, b).factor())
            .flatten()
        {
            Some(band) => Factor::Banded(band),
            None => Factor::Dense(minus.partial_piv_lu()),
        };
        Ok(Self { rhs, lhs, dt })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn is_banded(&self) -> bool {
        matches!(self.lhs, Factor::Banded(_))
    }

    pub fn step(&self, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        check_dim(self.rhs.n, psi.len())?;
        let r = self.rhs.mul(psi);
        let out = match &self.lhs {
            Factor::Banded(band) => band.solve(&r),
            Factor::Dense(lu) => {
                let col = Mat::from_fn(r.len(), 1, |i, _| r[i]);
                let x = lu.solve(&col);
                (0..r.len()).map(|i| x[(i, 0)]).collect()
            }
        };
        if out.iter().all(|v| v.is_finite()) {
            Ok(out)
        } else {
            Err(Error::Numerical(
                "implicit midpoint solve produced non-finite values".into(),
            ))
        }
    }
}

/// Integrates `∂ψ/∂t = (i/ħ)Ĥψ` from `t = 0` to `horizon`, keeping the
/// initial state, every `stride`-th step, and the final step.
pub fn evolve(
    op: &OperatorMatrix,
    psi0: &WaveFunction,
    dt: f64,
    horizon: f64,
    stride: usize,
) -> Result<Vec<Snapshot>> {
    if psi0.grid() != op.grid() {
        return Err(Error::invalid(
            "psi0",
            "lives on a different grid than the operator",
        ));
    }
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(Error::invalid("horizon", "must be nonnegative and finite"));
    }
    if stride == 0 {
        return Err(Error::invalid("stride", "must be at least 1"));
    }
    let prop = Propagator::new(op, dt)?;
    let steps = (horizon / dt - 1e-9).ceil().max(0.0) as usize;
    let grid = *op.grid();
    let mut snaps = vec![Snapshot {
        t: 0.0,
        psi: psi0.clone(),
    }];
    let mut cur = psi0.interior().to_vec();
    for k in 1..=steps {
        cur = prop.step(&cur)?;
        if k % stride == 0 || k == steps {
            snaps.push(Snapshot {
                t: k as f64 * dt,
                psi: WaveFunction::from_interior(grid, &cur)?,
            });
        }
    }
    Ok(snaps)
}
