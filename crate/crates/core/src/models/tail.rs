use super::env::EnvironmentModel;
use super::law::OffspringLaw;
use crate::error::{Error, Result};

/// Envelope `P(L > z | L > 0) ≤ d · (m ∧ 1) · z^{-beta}` required uniformly
/// over environment states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailAssumption {
    pub beta: f64,
    pub d: f64,
}

impl TailAssumption {
    pub fn new(beta: f64, d: f64) -> Result<Self> {
        if !(beta > 1.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tail exponent {beta} must exceed 1"
            )));
        }
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "envelope constant {d} must be positive"
            )));
        }
        Ok(Self { beta, d })
    }
}

/// Outcome of checking the tail envelope on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TailCheck {
    pub holds: bool,
    /// Smallest `d` making the envelope hold on `{1..z_max}`.
    pub minimal_d: f64,
    /// First violating `(state, z)`, on the grid or past it for power laws
    /// whose exponent is below `beta`.
    pub violation: Option<Violation>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub state: usize,
    pub z: u64,
    /// `P(L > z | L > 0)`.
    pub tail: f64,
    /// `d · (m ∧ 1) · z^{-beta}`.
    pub bound: f64,
}

impl TailCheck {
    /// Turns a failed check into [`Error::TailViolation`].
    pub fn into_result(self) -> Result<Self> {
        match self.violation {
            None => Ok(self),
            Some(v) => Err(Error::TailViolation {
                state: v.state,
                z: v.z,
                tail: v.tail,
                bound: v.bound,
            }),
        }
    }
}

fn violation_at(law: &OffspringLaw, state: usize, z: u64, assume: &TailAssumption) -> Violation {
    Violation {
        state,
        z,
        tail: conditional_tail(law, z),
        bound: assume.d * law.mean().min(1.0) * (z as f64).powf(-assume.beta),
    }
}

fn conditional_tail(law: &OffspringLaw, z: u64) -> f64 {
    let positive = 1.0 - law.pmf(0);
    (law.tail(z) / positive).min(1.0)
}

/// Checks the envelope for every state and every `z ∈ {1..z_max}`. For zeta
/// states with tail exponent below `beta` the ratio diverges, so a crossing
/// point beyond the grid is located and reported even if the grid passes.
pub fn verify_tail_assumption(
    env: &EnvironmentModel,
    assume: &TailAssumption,
    z_max: u64,
) -> Result<TailCheck> {
    if z_max < 1 {
        return Err(Error::Domain("z_max must be at least 1".into()));
    }
    let mut minimal_d: f64 = 0.0;
    let mut violation = None;
    for (i, state) in env.states().iter().enumerate() {
        let scale = state.law.mean().min(1.0);
        for z in 1..=z_max {
            let ratio = conditional_tail(&state.law, z) * (z as f64).powf(assume.beta) / scale;
            minimal_d = minimal_d.max(ratio);
            if violation.is_none() && ratio > assume.d {
                violation = Some(violation_at(&state.law, i, z, assume));
            }
        }
    }
    if violation.is_none() {
        for (i, state) in env.states().iter().enumerate() {
            let Some(exponent) = state.law.tail_exponent() else {
                continue;
            };
            if exponent >= assume.beta {
                continue;
            }
            let scale = state.law.mean().min(1.0);
            let over = |z: u64| {
                conditional_tail(&state.law, z) * (z as f64).powf(assume.beta) / scale > assume.d
            };
            let mut z = z_max.max(1);
            while !over(z) {
                z = z.saturating_mul(2);
                if z == u64::MAX {
                    break;
                }
            }
            violation = Some(violation_at(&state.law, i, z, assume));
            break;
        }
    }
    Ok(TailCheck {
        holds: violation.is_none(),
        minimal_d,
        violation,
    })
}
