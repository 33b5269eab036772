//! Naive and exponentially tilted Monte Carlo estimators of `P(Z_n ≥ k)`.
//!
//! Replicate `i` always uses stream `i` of the seed, and chunk sums are merged
//! in index order, so estimates are bit-identical for any thread count.

use super::rng::replicate_rng;
use super::trajectory::{check_run_args, run_final, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::models::EnvironmentModel;
use crate::parallel::{map_chunks, Execution};
use crate::path::optimal_strategy;
use crate::ratefn::WalkLaw;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Exact,
    Naive,
    Tilted,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Naive => "naive",
            Self::Tilted => "tilted",
        }
    }
}

/// Estimate of a tail probability `P(Z_n ≥ threshold)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailEstimate {
    pub p_hat: f64,
    pub std_err: f64,
    pub n_samples: u64,
    pub method: Method,
    pub threshold: u64,
}

/// Replicate count, seed, population cap and execution mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub replicates: u64,
    pub seed: u64,
    pub cap: u64,
    pub exec: Execution,
}

impl McConfig {
    pub fn new(replicates: u64, seed: u64) -> Self {
        Self {
            replicates,
            seed,
            cap: DEFAULT_CAP,
            exec: Execution::default(),
        }
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    pub fn with_exec(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }
}

fn check_config(cfg: &McConfig, n: usize, z0: u64, k: u64) -> Result<()> {
    check_run_args(n, z0, cfg.cap)?;
    if cfg.replicates < 1 {
        return Err(Error::Domain("need at least one replicate".into()));
    }
    if k > cfg.cap {
        return Err(Error::Domain(format!(
            "threshold {k} exceeds the population cap {}",
            cfg.cap
        )));
    }
    Ok(())
}

fn no_deaths(env: &EnvironmentModel) -> bool {
    env.states().iter().all(|s| s.law.pmf(0) == 0.0)
}

/// `(Σ w·1{Z_n ≥ k}, Σ w²·1{Z_n ≥ k})` over all replicates, where `w` is
/// `weight(S_n)`.
fn weighted_hits<W>(
    env: &EnvironmentModel,
    n: usize,
    z0: u64,
    k: u64,
    cfg: &McConfig,
    weight: W,
) -> (f64, f64)
where
    W: Fn(f64) -> f64 + Sync + Send,
{
    let monotone = no_deaths(env);
    let parts = map_chunks(cfg.replicates, cfg.exec, |range| {
        let mut buf = Vec::with_capacity(n);
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for i in range {
            let mut rng = replicate_rng(cfg.seed, i);
            let (z, s_n, _) = run_final(env, monotone, n, z0, cfg.cap, k, &mut buf, &mut rng);
            if z >= k {
                let w = weight(s_n);
                sum += w;
                sum_sq += w * w;
            }
        }
        (sum, sum_sq)
    });
    parts
        .into_iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y))
}

/// Naive frequency of `{Z_n ≥ k}`; capped paths count as exceeding `k ≤ cap`.
pub fn mc_tail(
    env: &EnvironmentModel,
    n: usize,
    z0: u64,
    k: u64,
    cfg: &McConfig,
) -> Result<TailEstimate> {
    check_config(cfg, n, z0, k)?;
    let (hits, _) = weighted_hits(env, n, z0, k, cfg, |_| 1.0);
    let big_n = cfg.replicates as f64;
    let p = hits / big_n;
    Ok(TailEstimate {
        p_hat: p,
        std_err: (p * (1.0 - p) / big_n).sqrt(),
        n_samples: cfg.replicates,
        method: Method::Naive,
        threshold: k,
    })
}

/// Tilt parameter `λ ≥ 0` with `K'(λ) = θ'`.
pub fn tilt_for_drift(env: &EnvironmentModel, theta_prime: f64) -> Result<f64> {
    let walk = WalkLaw::new(env);
    if !(theta_prime > walk.drift() && theta_prime < walk.x_max()) {
        return Err(Error::Domain(format!(
            "target drift {theta_prime} outside ({}, {})",
            walk.drift(),
            walk.x_max()
        )));
    }
    walk.solve_tilt(theta_prime, None)
        .ok_or_else(|| Error::Domain(format!("no tilt reaches drift {theta_prime}")))
}

/// Importance-sampling estimate of `P(Z_n ≥ k)`: environments are drawn from
/// the λ-tilted law with `K'(λ) = θ'`, branching is unchanged, and each hit is
/// weighted by `exp(n K(λ) − λ S_n)`.
pub fn tilted_tail(
    env: &EnvironmentModel,
    n: usize,
    z0: u64,
    theta_prime: f64,
    k: u64,
    cfg: &McConfig,
) -> Result<TailEstimate> {
    let lambda = tilt_for_drift(env, theta_prime)?;
    tilted_tail_with_lambda(env, n, z0, lambda, k, cfg)
}

/// [`tilted_tail`] with the tilt parameter given directly.
pub fn tilted_tail_with_lambda(
    env: &EnvironmentModel,
    n: usize,
    z0: u64,
    lambda: f64,
    k: u64,
    cfg: &McConfig,
) -> Result<TailEstimate> {
    check_config(cfg, n, z0, k)?;
    let tilted = env.tilt(lambda)?;
    let log_norm = n as f64 * env.cgf(lambda);
    let (sum, sum_sq) = weighted_hits(&tilted, n, z0, k, cfg, |s_n| {
        (log_norm - lambda * s_n).exp()
    });
    let big_n = cfg.replicates as f64;
    let p = sum / big_n;
    let var = (sum_sq / big_n - p * p).max(0.0);
    Ok(TailEstimate {
        p_hat: p.clamp(0.0, 1.0),
        std_err: (var / big_n).sqrt(),
        n_samples: cfg.replicates,
        method: Method::Tilted,
        threshold: k,
    })
}

/// One point of an empirical rate curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub n: usize,
    pub estimate: TailEstimate,
    /// `−(1/n) log p̂`; `+∞` when nothing was observed.
    pub rate: f64,
}

impl RatePoint {
    fn new(n: usize, estimate: TailEstimate) -> Self {
        let rate = if estimate.p_hat > 0.0 {
            -estimate.p_hat.ln() / n as f64
        } else {
            f64::INFINITY
        };
        Self { n, estimate, rate }
    }
}

/// Tilt used for survival estimation: the minimizer of `K` on `[0, 1]`, whose
/// value is `−γ`. Zero (naive sampling) when the walk does not drift down.
pub fn survival_tilt(env: &EnvironmentModel) -> f64 {
    let walk = WalkLaw::new(env);
    if walk.is_degenerate() || env.drift() >= 0.0 {
        return 0.0;
    }
    if env.cgf_derivative(1.0) <= 0.0 {
        return 1.0;
    }
    walk.solve_tilt(0.0, None).unwrap_or(0.0).min(1.0)
}

/// Empirical survival rates `−(1/n) log P(Z_n > 0)` from one ancestor.
pub fn survival_rate_scan(
    env: &EnvironmentModel,
    n_list: &[usize],
    cfg: &McConfig,
) -> Result<Vec<RatePoint>> {
    let lambda = survival_tilt(env);
    n_list
        .iter()
        .map(|&n| {
            let est = if lambda > 0.0 {
                tilted_tail_with_lambda(env, n, 1, lambda, 1, cfg)?
            } else {
                mc_tail(env, n, 1, 1, cfg)?
            };
            Ok(RatePoint::new(n, est))
        })
        .collect()
}

/// Threshold `⌈e^{θn}⌉`.
pub fn growth_threshold(theta: f64, n: usize) -> Result<u64> {
    let x = (theta * n as f64).exp();
    // e^{θn} that is an integer up to rounding should not round up past it
    let k = if (x - x.round()).abs() <= 1e-9 * x {
        x.round()
    } else {
        x.ceil()
    };
    if !(k.is_finite() && k < u64::MAX as f64) {
        return Err(Error::Domain(format!(
            "threshold e^({theta}·{n}) overflows"
        )));
    }
    Ok((k as u64).max(1))
}

/// Empirical rates `−(1/n) log P(Z_n ≥ e^{θn})` for each `n`, from one
/// ancestor. Environments are tilted to the growth slope of the optimal
/// strategy when that slope lies strictly between the drift and the
/// essential supremum; otherwise sampling is naive.
pub fn empirical_rate_curve(
    env: &EnvironmentModel,
    beta: f64,
    theta: f64,
    n_list: &[usize],
    cfg: &McConfig,
) -> Result<Vec<RatePoint>> {
    let strategy = optimal_strategy(env, beta, theta)?;
    let growth = strategy.growth_slope();
    let walk = WalkLaw::new(env);
    let lambda = growth.and_then(|g| walk.solve_tilt(g, None)).unwrap_or(0.0);
    n_list
        .iter()
        .map(|&n| {
            let k = growth_threshold(theta, n)?;
            let est = if lambda > 0.0 {
                tilted_tail_with_lambda(env, n, 1, lambda, k, cfg)?
            } else {
                mc_tail(env, n, 1, k, cfg)?
            };
            Ok(RatePoint::new(n, est))
        })
        .collect()
}
