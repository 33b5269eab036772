use rand::Rng;

use super::law::OffspringLaw;
use crate::error::{Error, Result};

/// Absolute tolerance deciding the ties `E[X] = 0` and `E[X e^X] = 0`.
pub const CLASSIFY_TOL: f64 = 1e-12;

/// Regime of the branching process in random environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Supercritical,
    Critical,
    WeaklySubcritical,
    IntermediatelySubcritical,
    StronglySubcritical,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Supercritical => "supercritical",
            Self::Critical => "critical",
            Self::WeaklySubcritical => "weakly_subcritical",
            Self::IntermediatelySubcritical => "intermediately_subcritical",
            Self::StronglySubcritical => "strongly_subcritical",
        }
    }

    pub fn is_subcritical(&self) -> bool {
        matches!(
            self,
            Self::WeaklySubcritical | Self::IntermediatelySubcritical | Self::StronglySubcritical
        )
    }
}

/// A state of the environment: an offspring law drawn with some probability.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvState {
    pub law: OffspringLaw,
    pub prob: f64,
    /// Walk increment `log m` contributed by this state.
    pub log_mean: f64,
}

/// Finite-state i.i.d. environment. Each generation draws one state.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentModel {
    states: Vec<EnvState>,
    cdf: Vec<f64>,
}

impl EnvironmentModel {
    pub fn new(states: Vec<(OffspringLaw, f64)>) -> Result<Self> {
        Self::with_tolerance(states, 1e-12)
    }

    /// Like [`EnvironmentModel::new`] but accepting probabilities summing to one
    /// within `tol`. Probabilities are renormalized.
    pub fn with_tolerance(states: Vec<(OffspringLaw, f64)>, tol: f64) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidParameter(
                "environment needs at least one state".into(),
            ));
        }
        if let Some((i, (_, p))) = states
            .iter()
            .enumerate()
            .find(|(_, (_, p))| !(*p > 0.0 && *p <= 1.0))
        {
            return Err(Error::InvalidParameter(format!(
                "state {i} probability {p} not in (0, 1]"
            )));
        }
        let total: f64 = states.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > tol {
            return Err(Error::InvalidParameter(format!(
                "state probabilities sum to {total}, expected 1"
            )));
        }
        let states = states
            .into_iter()
            .map(|(law, p)| {
                let log_mean = law.mean().ln();
                EnvState {
                    law,
                    prob: p / total,
                    log_mean,
                }
            })
            .collect::<Vec<_>>();
        Ok(Self::from_states(states))
    }

    fn from_states(states: Vec<EnvState>) -> Self {
        let mut acc = 0.0;
        let cdf = states
            .iter()
            .map(|s| {
                acc += s.prob;
                acc
            })
            .collect();
        Self { states, cdf }
    }

    /// Deterministic environment (Galton–Watson process).
    pub fn single(law: OffspringLaw) -> Self {
        Self::new(vec![(law, 1.0)]).expect("single state is valid")
    }

    pub fn states(&self) -> &[EnvState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn probs(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.prob).collect()
    }

    pub fn log_means(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.log_mean).collect()
    }

    /// Essential supremum of `X`: the largest `log m` over states.
    pub fn ess_sup_x(&self) -> f64 {
        self.states
            .iter()
            .map(|s| s.log_mean)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Probability that `X` equals its essential supremum.
    pub fn prob_at_sup(&self) -> f64 {
        let top = self.ess_sup_x();
        self.states
            .iter()
            .filter(|s| s.log_mean == top)
            .map(|s| s.prob)
            .sum()
    }

    /// `E[X]` with `X = log f'(1)`.
    pub fn drift(&self) -> f64 {
        self.states.iter().map(|s| s.prob * s.log_mean).sum()
    }

    /// `E[X e^X] = Σ prob · m · log m`.
    pub fn mean_x_exp_x(&self) -> f64 {
        self.states
            .iter()
            .map(|s| s.prob * s.log_mean.exp() * s.log_mean)
            .sum()
    }

    /// True when `X` is almost surely constant.
    pub fn is_degenerate(&self) -> bool {
        let top = self.ess_sup_x();
        self.states.iter().all(|s| s.log_mean == top)
    }

    /// Log-weights `log prob_i + lambda x_i` and their log-sum-exp.
    fn tilted_log_weights(&self, lambda: f64) -> (Vec<f64>, f64) {
        let lw: Vec<f64> = self
            .states
            .iter()
            .map(|s| s.prob.ln() + lambda * s.log_mean)
            .collect();
        let top = lw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = top + lw.iter().map(|w| (w - top).exp()).sum::<f64>().ln();
        (lw, lse)
    }

    /// Cumulant generating function `K(λ) = log E[e^{λX}] = log Σ prob_i m_i^λ`.
    pub fn cgf(&self, lambda: f64) -> f64 {
        self.tilted_log_weights(lambda).1
    }

    /// `K'(λ)`, the mean of `X` under the λ-tilted law.
    pub fn cgf_derivative(&self, lambda: f64) -> f64 {
        self.tilted_moments(lambda).0
    }

    /// `(K'(λ), K''(λ))`.
    pub fn tilted_moments(&self, lambda: f64) -> (f64, f64) {
        let (lw, lse) = self.tilted_log_weights(lambda);
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for (s, w) in self.states.iter().zip(&lw) {
            let p = (w - lse).exp();
            m1 += p * s.log_mean;
            m2 += p * s.log_mean * s.log_mean;
        }
        (m1, (m2 - m1 * m1).max(0.0))
    }

    /// Exponentially tilted environment: state probabilities become
    /// `prob_i e^{λ x_i} / e^{K(λ)}`; offspring laws are unchanged.
    pub fn tilt(&self, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::Domain(format!(
                "tilt parameter {lambda} must be >= 0"
            )));
        }
        if lambda == 0.0 {
            return Ok(self.clone());
        }
        let (lw, lse) = self.tilted_log_weights(lambda);
        let states = self
            .states
            .iter()
            .zip(lw)
            .map(|(s, w)| EnvState {
                law: s.law.clone(),
                prob: (w - lse).exp(),
                log_mean: s.log_mean,
            })
            .collect();
        Ok(Self::from_states(states))
    }

    pub fn classify(&self) -> Regime {
        let drift = self.drift();
        if drift.abs() <= CLASSIFY_TOL {
            return Regime::Critical;
        }
        if drift > 0.0 {
            return Regime::Supercritical;
        }
        let v = self.mean_x_exp_x();
        if v.abs() <= CLASSIFY_TOL {
            Regime::IntermediatelySubcritical
        } else if v < 0.0 {
            Regime::StronglySubcritical
        } else {
            Regime::WeaklySubcritical
        }
    }

    /// Draw a state index.
    pub fn sample_state<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cdf
            .iter()
            .position(|c| u < *c)
            .unwrap_or(self.states.len() - 1)
    }

    /// Smallest tail exponent among power-law states, if any.
    pub fn heavy_tail_exponent(&self) -> Option<f64> {
        self.states
            .iter()
            .filter_map(|s| s.law.tail_exponent())
            .reduce(f64::min)
    }
}
