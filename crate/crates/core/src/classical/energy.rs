use super::integrate::Trajectory;
use crate::error::{Error, Result};
use crate::linalg;
use crate::phase::SystemSpec;

/// `H(t) = ½|p|² + V(x)` sampled along a trajectory.
#[derive(Debug, Clone)]
pub struct EnergySeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

pub fn energy_series(traj: &Trajectory, sys: &SystemSpec) -> Result<EnergySeries> {
    if traj.is_empty() {
        return Err(Error::invalid("trajectory", "must be nonempty"));
    }
    let times = traj.samples.iter().map(|s| s.t).collect();
    let values = traj
        .samples
        .iter()
        .map(|s| 0.5 * linalg::dot(&s.p, &s.p) + sys.potential().value(&s.x))
        .collect();
    Ok(EnergySeries { times, values })
}

/// `dH/dt + 2 pᵀγ(x)p` along the trajectory, with `dH/dt` from centered
/// differences (second-order one-sided stencils at the ends). Vanishes up
/// to O(step²) plus integrator error.
pub fn dissipation_residual(traj: &Trajectory, sys: &SystemSpec) -> Result<Vec<f64>> {
    if traj.len() < 3 {
        return Err(Error::invalid("trajectory", "needs at least three samples"));
    }
    let h = traj.step;
    let e = energy_series(traj, sys)?.values;
    let n = e.len();
    let mut out = Vec::with_capacity(n);
    for (k, s) in traj.samples.iter().enumerate() {
        let dh = if k == 0 {
            (-3.0 * e[0] + 4.0 * e[1] - e[2]) / (2.0 * h)
        } else if k == n - 1 {
            (3.0 * e[n - 1] - 4.0 * e[n - 2] + e[n - 3]) / (2.0 * h)
        } else {
            (e[k + 1] - e[k - 1]) / (2.0 * h)
        };
        let g = sys.dissipation_tensor(&s.x)?;
        out.push(dh + 2.0 * linalg::quad_form(&g, &s.p, &s.p));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::integrate::{integrate, Integrator};
    use crate::phase::PhaseState;

    #[test]
    fn resting_segment_has_zero_rate() {
        // A hand-built trajectory sitting at a turning point with p = 0.
        let sys = SystemSpec::dsho(1.0, 0.3).unwrap();
        let samples = (0..5)
            .map(|k| PhaseState {
                x: vec![0.0],
                p: vec![0.0],
                t: k as f64 * 0.1,
            })
            .collect();
        let tr = Trajectory {
            samples,
            step: 0.1,
            method: Integrator::Rk4,
        };
        assert!(dissipation_residual(&tr, &sys)
            .unwrap()
            .iter()
            .all(|r| *r == 0.0));
    }

    #[test]
    fn conservative_energy_is_flat() {
        let sys = SystemSpec::dsho(1.0, 0.0).unwrap();
        let tr = integrate(
            &sys,
            &PhaseState::point(1.0, 0.0),
            1e-3,
            5.0,
            Integrator::Rk4,
        )
        .unwrap();
        let e = energy_series(&tr, &sys).unwrap();
        assert!(e.values.iter().all(|v| (v - 0.5).abs() < 1e-12));
    }

    #[test]
    fn too_short() {
        let sys = SystemSpec::dsho(1.0, 0.0).unwrap();
        let tr = Trajectory {
            samples: vec![PhaseState::point(1.0, 0.0)],
            step: 0.1,
            method: Integrator::Rk4,
        };
        assert!(dissipation_residual(&tr, &sys).is_err());
        assert_eq!(energy_series(&tr, &sys).unwrap().values, vec![0.5]);
    }
}
