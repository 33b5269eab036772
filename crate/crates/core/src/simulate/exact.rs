//! Exact distribution of `Z_n` for small `n` by enumerating every environment
//! sequence and propagating the pmf of the population generation by
//! generation (`pmf_{k+1} = Σ_j pmf_k(j) · f_{k+1}^{*j}`).

use super::estimate::{Method, TailEstimate};
use crate::error::{Error, Result};
use crate::models::EnvironmentModel;

/// Largest number of enumerated environment sequences.
pub const MAX_SEQUENCES: u64 = 1_000_000;
/// Largest population support tracked by the oracle.
pub const MAX_SUPPORT: u64 = 1 << 20;
/// Largest tail mass accepted when truncating an unbounded law.
pub const MAX_TRUNCATION_MASS: f64 = 1e-10;

/// Conditional results for one environment sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceRow {
    pub states: Vec<usize>,
    pub prob: f64,
    /// `P(Z_n ≥ 1 | Π)`.
    pub survival: f64,
    /// `P(Z_n ≥ k | Π)`.
    pub tail: f64,
    /// `M_n = min_{0 ≤ j ≤ n} S_j` along the sequence.
    pub walk_min: f64,
    /// Total mass of the propagated pmf (1 up to rounding for bounded laws).
    pub mass: f64,
}

/// Exact tail probability with its per-sequence table.
#[derive(Debug, Clone)]
pub struct ExactTail {
    pub estimate: TailEstimate,
    pub sequences: Vec<SequenceRow>,
    /// Probability lost to truncation of unbounded laws; the true value lies in
    /// `[p_hat, p_hat + mass_defect]`.
    pub mass_defect: f64,
}

impl ExactTail {
    pub fn interval(&self) -> (f64, f64) {
        (
            self.estimate.p_hat,
            (self.estimate.p_hat + self.mass_defect).min(1.0),
        )
    }
}

/// Truncated pmfs of every state, after the guards on unbounded laws.
fn state_pmfs(env: &EnvironmentModel, truncation: Option<u64>) -> Result<Vec<Vec<f64>>> {
    env.states()
        .iter()
        .enumerate()
        .map(|(i, st)| match st.law.support_max() {
            Some(max) => Ok(st.law.pmf_vec(max)),
            None => {
                let cut = truncation.ok_or_else(|| {
                    Error::Guard(format!(
                        "state {i} ({}) is unbounded; supply a certified truncation",
                        st.law.family_name()
                    ))
                })?;
                let lost = st.law.tail(cut);
                if lost >= MAX_TRUNCATION_MASS {
                    return Err(Error::Guard(format!(
                        "truncation at {cut} leaves mass {lost:.3e} in state {i}"
                    )));
                }
                Ok(st.law.pmf_vec(cut))
            }
        })
        .collect()
}

fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == 0.0 {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// One generation: pmf of `Σ_{i ≤ Z} L_i` when `Z ~ pmf`.
pub fn propagate(pmf: &[f64], law_pmf: &[f64]) -> Vec<f64> {
    let max_z = pmf.iter().rposition(|p| *p > 0.0).unwrap_or(0);
    let mut out = vec![0.0; max_z * (law_pmf.len() - 1) + 1];
    let mut power = vec![1.0];
    for (j, pj) in pmf.iter().enumerate().take(max_z + 1) {
        if *pj > 0.0 {
            for (k, v) in power.iter().enumerate() {
                out[k] += pj * v;
            }
        }
        if j < max_z {
            power = convolve(&power, law_pmf);
        }
    }
    out
}

/// `P(Z ≥ k)` summed from the top of the support.
pub fn upper_tail(pmf: &[f64], k: u64) -> f64 {
    if k as usize >= pmf.len() {
        return 0.0;
    }
    pmf[k as usize..].iter().rev().sum()
}

fn check_guards(env: &EnvironmentModel, pmfs: &[Vec<f64>], n: usize, z0: u64) -> Result<()> {
    if n < 1 || z0 < 1 {
        return Err(Error::Domain("need n >= 1 and z0 >= 1".into()));
    }
    let count = (env.len() as f64).powi(n as i32);
    if count > MAX_SEQUENCES as f64 {
        return Err(Error::Guard(format!(
            "{} states over {n} generations give {count:.0} sequences (max {MAX_SEQUENCES})",
            env.len()
        )));
    }
    let a_max = pmfs
        .iter()
        .map(|p| p.len() as f64 - 1.0)
        .fold(1.0, f64::max);
    let support = z0 as f64 * a_max.powi(n as i32);
    if support > MAX_SUPPORT as f64 {
        return Err(Error::Guard(format!(
            "population support {support:.0} exceeds {MAX_SUPPORT}"
        )));
    }
    Ok(())
}

/// Exact `P(Z_n ≥ k)` from `z0` ancestors, summed over all `K^n` environment
/// sequences. Unbounded laws need `truncation` with tail mass below
/// [`MAX_TRUNCATION_MASS`].
pub fn exact_tail(
    env: &EnvironmentModel,
    n: usize,
    z0: u64,
    k: u64,
    truncation: Option<u64>,
) -> Result<ExactTail> {
    let pmfs = state_pmfs(env, truncation)?;
    check_guards(env, &pmfs, n, z0)?;
    let mut start = vec![0.0; z0 as usize + 1];
    start[z0 as usize] = 1.0;
    let mut rows = Vec::new();
    let mut prefix = Vec::with_capacity(n);
    walk_sequences(
        env,
        &pmfs,
        n,
        k,
        &start,
        1.0,
        0.0,
        0.0,
        &mut prefix,
        &mut rows,
    );
    let p: f64 = rows.iter().map(|r| r.prob * r.tail).sum();
    let total_mass: f64 = rows.iter().map(|r| r.prob * r.mass).sum();
    let mass_defect = if truncation.is_some() {
        (1.0 - total_mass).max(0.0)
    } else {
        0.0
    };
    Ok(ExactTail {
        estimate: TailEstimate {
            p_hat: p.clamp(0.0, 1.0),
            std_err: 0.0,
            n_samples: rows.len() as u64,
            method: Method::Exact,
            threshold: k,
        },
        sequences: rows,
        mass_defect,
    })
}

#[allow(clippy::too_many_arguments)]
fn walk_sequences(
    env: &EnvironmentModel,
    pmfs: &[Vec<f64>],
    remaining: usize,
    k: u64,
    pmf: &[f64],
    prob: f64,
    s: f64,
    m: f64,
    prefix: &mut Vec<usize>,
    rows: &mut Vec<SequenceRow>,
) {
    if remaining == 0 {
        rows.push(SequenceRow {
            states: prefix.clone(),
            prob,
            survival: upper_tail(pmf, 1),
            tail: upper_tail(pmf, k),
            walk_min: m,
            mass: pmf.iter().sum(),
        });
        return;
    }
    for (i, st) in env.states().iter().enumerate() {
        let next = propagate(pmf, &pmfs[i]);
        let s_next = s + st.log_mean;
        prefix.push(i);
        walk_sequences(
            env,
            pmfs,
            remaining - 1,
            k,
            &next,
            prob * st.prob,
            s_next,
            m.min(s_next),
            prefix,
            rows,
        );
        prefix.pop();
    }
}

/// Exact pmf of `Z_n` given one environment sequence.
pub fn conditional_pmf(
    env: &EnvironmentModel,
    states: &[usize],
    z0: u64,
    truncation: Option<u64>,
) -> Result<Vec<f64>> {
    let pmfs = state_pmfs(env, truncation)?;
    check_guards(env, &pmfs, states.len().max(1), z0)?;
    let mut pmf = vec![0.0; z0 as usize + 1];
    pmf[z0 as usize] = 1.0;
    for &i in states {
        pmf = propagate(&pmf, &pmfs[i]);
    }
    Ok(pmf)
}

/// Outcome of checking `P(Z_n > 0 | Π) ≤ e^{M_n}` on every sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalBoundCheck {
    pub holds: bool,
    pub sequences: usize,
    /// Largest `P(Z_n > 0 | Π) − e^{M_n}` observed.
    pub max_excess: f64,
    /// Sequences where the bound holds with equality (within 1e-12).
    pub equalities: usize,
}

/// Verifies `P(Z_n > 0 | Π) ≤ exp(min_k S_k) + 1e-12` for every enumerated
/// environment sequence (single ancestor).
pub fn conditional_survival_bound_check(
    env: &EnvironmentModel,
    n: usize,
    truncation: Option<u64>,
) -> Result<SurvivalBoundCheck> {
    let exact = exact_tail(env, n, 1, 1, truncation)?;
    let mut max_excess = f64::NEG_INFINITY;
    let mut equalities = 0;
    for row in &exact.sequences {
        let excess = row.survival - row.walk_min.exp();
        max_excess = max_excess.max(excess);
        if excess.abs() <= 1e-12 {
            equalities += 1;
        }
    }
    Ok(SurvivalBoundCheck {
        holds: max_excess <= 1e-12,
        sequences: exact.sequences.len(),
        max_excess,
        equalities,
    })
}
