use rand::Rng;

use crate::error::{Error, Result};
use crate::models::EnvironmentModel;

/// Default population cap.
pub const DEFAULT_CAP: u64 = 1_000_000_000;

/// One simulated run of the branching process in random environment.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Population sizes `Z_0, ..., Z_n`.
    pub z: Vec<u64>,
    /// Associated walk `S_0 = 0, ..., S_n`.
    pub s_walk: Vec<f64>,
    /// `M_n = min_k S_k`.
    pub m_min: f64,
    /// First index attaining `M_n`.
    pub tau: usize,
    /// Environment state drawn for generations `1..=n`.
    pub env_seq: Vec<usize>,
    /// Population exceeded the cap and was frozen there.
    pub overflow: bool,
}

pub(crate) fn check_run_args(n: usize, z0: u64, cap: u64) -> Result<()> {
    if n < 1 {
        return Err(Error::Domain("need at least one generation".into()));
    }
    if z0 < 1 {
        return Err(Error::Domain("initial population must be positive".into()));
    }
    if cap < z0 {
        return Err(Error::Domain(format!(
            "cap {cap} below initial population {z0}"
        )));
    }
    Ok(())
}

/// Samples the environment sequence, then the branching chain. A population
/// exceeding `cap` is frozen at `cap` with the overflow flag set.
pub fn run_bpre<R: Rng + ?Sized>(
    env: &EnvironmentModel,
    n: usize,
    z0: u64,
    cap: u64,
    rng: &mut R,
) -> Result<Trajectory> {
    check_run_args(n, z0, cap)?;
    let env_seq: Vec<usize> = (0..n).map(|_| env.sample_state(rng)).collect();
    let states = env.states();
    let mut s_walk = Vec::with_capacity(n + 1);
    s_walk.push(0.0);
    for &i in &env_seq {
        let last = *s_walk.last().unwrap();
        s_walk.push(last + states[i].log_mean);
    }
    let mut z = Vec::with_capacity(n + 1);
    z.push(z0);
    let mut overflow = false;
    for &i in &env_seq {
        let current = *z.last().unwrap();
        let next = if overflow {
            cap
        } else {
            let (sum, saturated) = states[i].law.sample_sum(current, cap, rng);
            if saturated || sum > cap {
                overflow = true;
                cap
            } else {
                sum
            }
        };
        z.push(next);
    }
    let (tau, m_min) =
        s_walk.iter().enumerate().fold(
            (0, f64::INFINITY),
            |(bi, bv), (i, &v)| {
                if v < bv {
                    (i, v)
                } else {
                    (bi, bv)
                }
            },
        );
    Ok(Trajectory {
        z,
        s_walk,
        m_min,
        tau,
        env_seq,
        overflow,
    })
}

/// Final state of a run: `(Z_n, S_n, overflow)`. Allocation-free variant of
/// [`run_bpre`] for estimators; stops early once the indicator `Z_n ≥ threshold`
/// is decided.
#[allow(clippy::too_many_arguments)]
pub(crate) fn run_final<R: Rng + ?Sized>(
    env: &EnvironmentModel,
    monotone: bool,
    n: usize,
    z0: u64,
    cap: u64,
    threshold: u64,
    states_buf: &mut Vec<usize>,
    rng: &mut R,
) -> (u64, f64, bool) {
    states_buf.clear();
    let mut s_n = 0.0;
    for _ in 0..n {
        let i = env.sample_state(rng);
        s_n += env.states()[i].log_mean;
        states_buf.push(i);
    }
    let states = env.states();
    let mut z = z0;
    for &i in states_buf.iter() {
        if z == 0 {
            break;
        }
        // Without deaths the population never decreases.
        if monotone && z >= threshold {
            break;
        }
        let (sum, saturated) = states[i].law.sample_sum(z, cap, rng);
        if saturated || sum > cap {
            return (cap, s_n, true);
        }
        z = sum;
    }
    (z, s_n, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{bundled, OffspringLaw};
    use crate::simulate::replicate_rng;

    #[test]
    fn deterministic_doubling() {
        let env = EnvironmentModel::single(OffspringLaw::bounded(vec![0.0, 0.0, 1.0]).unwrap());
        let tr = run_bpre(&env, 3, 1, DEFAULT_CAP, &mut replicate_rng(1, 0)).unwrap();
        assert_eq!(tr.z, vec![1, 2, 4, 8]);
        assert_eq!(tr.m_min, 0.0);
        assert_eq!(tr.tau, 0);
    }

    #[test]
    fn extinction_is_absorbing_and_walk_is_consistent() {
        let env = bundled::critical().env;
        let l2 = 2f64.ln();
        for r in 0..300 {
            let tr = run_bpre(&env, 12, 1, DEFAULT_CAP, &mut replicate_rng(9, r)).unwrap();
            if let Some(k) = tr.z.iter().position(|&z| z == 0) {
                assert!(tr.z[k..].iter().all(|&z| z == 0));
            }
            assert_eq!(tr.s_walk[0], 0.0);
            for w in tr.s_walk.windows(2) {
                assert!(((w[1] - w[0]).abs() - l2).abs() < 1e-12);
            }
            assert!(tr.m_min <= 0.0);
            assert_eq!(tr.s_walk[tr.tau], tr.m_min);
            assert!(tr.s_walk[..tr.tau].iter().all(|&s| s > tr.m_min));
        }
    }

    #[test]
    fn cap_freezes_population() {
        let env =
            EnvironmentModel::single(OffspringLaw::bounded(vec![0.0, 0.0, 0.0, 1.0]).unwrap());
        let tr = run_bpre(&env, 10, 1, 1000, &mut replicate_rng(0, 0)).unwrap();
        assert!(tr.overflow);
        assert_eq!(&tr.z[..7], &[1, 3, 9, 27, 81, 243, 729]);
        assert!(tr.z[7..].iter().all(|&z| z == 1000));
    }

    #[test]
    fn rejects_bad_arguments() {
        let env = bundled::critical().env;
        let mut rng = replicate_rng(0, 0);
        assert!(run_bpre(&env, 0, 1, 10, &mut rng).is_err());
        assert!(run_bpre(&env, 3, 0, 10, &mut rng).is_err());
        assert!(run_bpre(&env, 3, 20, 10, &mut rng).is_err());
    }
}
