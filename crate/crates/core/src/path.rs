//! Optimal large-deviation strategy `(t_θ, s_θ)` and the predicted log-profile
//! `f_θ(t)` of a population conditioned on `Z_n ≥ e^{θn}`.
//!
//! Optimal points either jump at the start (`s > 0 ⇒ t = 0`) or survive to
//! the end (`t = 1`), so the minimum is searched over three families: no jump
//! (`s = 0`, free `t`), an initial jump (`t = 0`, free `s`) and the boundary
//! `t = 1`. A minimizer whose growth segment is flat (`s = θ`) is reported as
//! surviving to the end, since both describe the same event.

use crate::error::{Error, Result};
use crate::models::EnvironmentModel;
use crate::optim::{bisect_first_true, golden_section};
use crate::ratefn::{ExtReal, RateProfile};

/// Two strategy families within this distance in value are considered tied.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// `t` or `s` this close to a boundary is snapped onto it.
const POSITION_TOL: f64 = 1e-7;
const SEARCH_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyRegime {
    SurviveThenGrow,
    StraightGrowth,
    JumpThenGrow,
    SurviveThenFinalJump,
    Degenerate,
}

impl StrategyRegime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::SurviveThenGrow => "survive_then_grow",
            Self::StraightGrowth => "straight_growth",
            Self::JumpThenGrow => "jump_then_grow",
            Self::SurviveThenFinalJump => "survive_then_final_jump",
            Self::Degenerate => "degenerate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalStrategy {
    pub theta: f64,
    /// Fraction of time spent just surviving.
    pub t_theta: f64,
    /// Size of the single large jump, in log-units per generation.
    pub s_theta: f64,
    /// `ψ(θ)`.
    pub value: f64,
    pub regime: StrategyRegime,
}

impl OptimalStrategy {
    /// Slope of the growth segment, `(θ − s)/(1 − t)`; `None` when `t = 1`.
    pub fn growth_slope(&self) -> Option<f64> {
        (self.t_theta < 1.0).then(|| (self.theta - self.s_theta) / (1.0 - self.t_theta))
    }
}

struct Candidate {
    t: f64,
    s: f64,
    value: f64,
    regime: StrategyRegime,
}

/// Smallest minimizer of `f` on `[lo, hi]`, up to a relative slack.
fn leftmost_min<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> (f64, f64) {
    if hi <= lo {
        return (lo, f(lo));
    }
    let (x, v) = golden_section(&f, lo, hi, SEARCH_TOL);
    let slack = 1e-12 * v.abs().max(1.0);
    let x = bisect_first_true(|y| f(y) <= v + slack, lo, x, 1e-13);
    (x, f(x).min(v + slack))
}

fn lambda_clamped(p: &RateProfile, u: f64) -> f64 {
    p.lambda(u.min(p.ess_sup_x).max(0.0)).value()
}

/// Best point with `s = 0`.
fn no_jump(p: &RateProfile, theta: f64) -> Option<Candidate> {
    let x_max = p.ess_sup_x;
    let t_max = if theta == 0.0 {
        if x_max < 0.0 {
            return None;
        }
        1.0
    } else {
        if x_max <= 0.0 || theta > x_max {
            return None;
        }
        1.0 - theta / x_max
    };
    let g = |t: f64| {
        if t >= 1.0 {
            p.gamma
        } else {
            t * p.gamma + (1.0 - t) * lambda_clamped(p, theta / (1.0 - t))
        }
    };
    let (t, value) = leftmost_min(g, 0.0, t_max);
    let (t, regime) = if t <= POSITION_TOL {
        (0.0, StrategyRegime::StraightGrowth)
    } else if t >= 1.0 - POSITION_TOL {
        (1.0, StrategyRegime::SurviveThenFinalJump)
    } else {
        (t, StrategyRegime::SurviveThenGrow)
    };
    Some(Candidate {
        t,
        s: 0.0,
        value,
        regime,
    })
}

/// Best point with `t = 0`.
fn initial_jump(p: &RateProfile, theta: f64) -> Option<Candidate> {
    let x_max = p.ess_sup_x;
    if x_max < 0.0 {
        return None;
    }
    let lo = (theta - x_max).max(0.0);
    let h = |s: f64| p.beta * s + lambda_clamped(p, theta - s);
    let (s, value) = leftmost_min(h, lo, theta);
    let (t, s, regime) = if s <= POSITION_TOL {
        (0.0, 0.0, StrategyRegime::StraightGrowth)
    } else if s >= theta - POSITION_TOL {
        (1.0, theta, StrategyRegime::SurviveThenFinalJump)
    } else {
        (0.0, s, StrategyRegime::JumpThenGrow)
    };
    Some(Candidate {
        t,
        s,
        value,
        regime,
    })
}

fn final_jump(p: &RateProfile, theta: f64) -> Candidate {
    Candidate {
        t: 1.0,
        s: theta,
        value: p.gamma + p.beta * theta,
        regime: StrategyRegime::SurviveThenFinalJump,
    }
}

/// Optimal strategy from a prebuilt profile.
pub fn optimal_strategy_for(profile: &RateProfile, theta: f64) -> Result<OptimalStrategy> {
    if !(theta >= 0.0 && theta.is_finite()) {
        return Err(Error::Domain(format!(
            "theta {theta} must be finite and >= 0"
        )));
    }
    let mut cands: Vec<Candidate> = [no_jump(profile, theta), initial_jump(profile, theta)]
        .into_iter()
        .flatten()
        .collect();
    cands.push(final_jump(profile, theta));
    let best = cands.iter().map(|c| c.value).fold(f64::INFINITY, f64::min);
    let mut tied: Vec<&Candidate> = cands
        .iter()
        .filter(|c| c.value <= best + DEGENERACY_TOL)
        .collect();
    tied.sort_by(|a, b| (a.t, a.s).partial_cmp(&(b.t, b.s)).unwrap());
    let first = tied[0];
    let regime = if tied.iter().all(|c| c.regime == first.regime) {
        first.regime
    } else {
        StrategyRegime::Degenerate
    };
    Ok(OptimalStrategy {
        theta,
        t_theta: first.t,
        s_theta: first.s,
        value: first.value,
        regime,
    })
}

/// Minimizer of the variational formula for `ψ(θ)` with its regime.
/// Ties are broken by smallest `t`, then smallest `s`.
pub fn optimal_strategy(env: &EnvironmentModel, beta: f64, theta: f64) -> Result<OptimalStrategy> {
    let profile = RateProfile::new(env, beta)?;
    optimal_strategy_for(&profile, theta)
}

/// Discontinuity of the profile at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub t: f64,
    pub from: f64,
    pub to: f64,
}

/// Samples of `t ↦ f_θ(t)` on a uniform grid of `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathProfile {
    pub strategy: OptimalStrategy,
    pub samples: Vec<(f64, f64)>,
    pub jump: Option<Jump>,
}

impl PathProfile {
    /// `f_θ(t)`: zero up to `t_θ` (inclusive), then `s_θ` plus linear growth
    /// reaching `θ` at `t = 1`.
    pub fn value_at(strategy: &OptimalStrategy, t: f64) -> f64 {
        let (tt, s, theta) = (strategy.t_theta, strategy.s_theta, strategy.theta);
        if tt >= 1.0 {
            return if t >= 1.0 { theta } else { 0.0 };
        }
        if t <= tt {
            0.0
        } else {
            s + (theta - s) * (t - tt) / (1.0 - tt)
        }
    }

    /// Limit of `f_θ` from the left at `t` (the value itself at `t = 0`).
    pub fn value_left(strategy: &OptimalStrategy, t: f64) -> f64 {
        if strategy.t_theta >= 1.0 {
            return 0.0;
        }
        Self::value_at(strategy, t)
    }

    /// Limit of `f_θ` from the right at `t` (the value itself at `t = 1`).
    pub fn value_right(strategy: &OptimalStrategy, t: f64) -> f64 {
        let (tt, s, theta) = (strategy.t_theta, strategy.s_theta, strategy.theta);
        if tt >= 1.0 {
            return if t >= 1.0 { theta } else { 0.0 };
        }
        if t < tt {
            0.0
        } else {
            s + (theta - s) * (t - tt) / (1.0 - tt)
        }
    }
}

pub fn path_profile(
    env: &EnvironmentModel,
    beta: f64,
    theta: f64,
    resolution: usize,
) -> Result<PathProfile> {
    if resolution < 2 {
        return Err(Error::Domain("resolution must be at least 2".into()));
    }
    let strategy = optimal_strategy(env, beta, theta)?;
    let samples = (0..resolution)
        .map(|i| {
            let t = i as f64 / (resolution - 1) as f64;
            (t, PathProfile::value_at(&strategy, t))
        })
        .collect();
    let jump = if strategy.t_theta >= 1.0 && theta > 0.0 {
        Some(Jump {
            t: 1.0,
            from: 0.0,
            to: theta,
        })
    } else if strategy.s_theta > 0.0 {
        Some(Jump {
            t: strategy.t_theta,
            from: 0.0,
            to: strategy.s_theta,
        })
    } else {
        None
    };
    Ok(PathProfile {
        strategy,
        samples,
        jump,
    })
}

/// Regime on `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseInterval {
    pub lo: f64,
    /// `+∞` for the last interval.
    pub hi: f64,
    pub regime: StrategyRegime,
}

/// One-sided slopes of `ψ` at a transition point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kink {
    pub theta: f64,
    pub left_slope: f64,
    pub right_slope: f64,
}

impl Kink {
    /// Slopes agree, i.e. the transition is of second order.
    pub fn is_smooth(&self, tol: f64) -> bool {
        (self.left_slope - self.right_slope).abs() <= tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseReport {
    pub beta: f64,
    pub gamma: f64,
    pub theta_star: ExtReal,
    pub theta_dagger: f64,
    pub intervals: Vec<PhaseInterval>,
    pub kinks: Vec<Kink>,
    /// Set when `θ† = 0`, where `ψ(θ) = γ + βθ` on the whole half-line.
    pub closed_form: Option<String>,
}

const SLOPE_STEP: f64 = 1e-5;

/// Second-order one-sided difference; `h < 0` gives the left derivative.
fn one_sided_slope<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (-3.0 * f(x) + 4.0 * f(x + h) - f(x + 2.0 * h)) / (2.0 * h)
}

/// Transition points `θ*` and `θ†`, the strategy regime between them and the
/// one-sided slopes of `ψ` across each of them.
pub fn phase_report(env: &EnvironmentModel, beta: f64) -> Result<PhaseReport> {
    let profile = RateProfile::new(env, beta)?;
    let td = profile.theta_dagger_value();
    let mut bounds = vec![0.0];
    if let ExtReal::Finite(ts) = profile.theta_star {
        if ts > 0.0 && ts < td {
            bounds.push(ts);
        }
    }
    if td > 0.0 {
        bounds.push(td);
    }
    let mut intervals = Vec::with_capacity(bounds.len());
    for (i, &lo) in bounds.iter().enumerate() {
        let hi = bounds.get(i + 1).copied().unwrap_or(f64::INFINITY);
        let probe = if hi.is_finite() {
            0.5 * (lo + hi)
        } else {
            lo + 0.25 * lo.max(0.4)
        };
        let regime = optimal_strategy_for(&profile, probe)?.regime;
        intervals.push(PhaseInterval { lo, hi, regime });
    }
    let kinks = bounds[1..]
        .iter()
        .map(|&x| Kink {
            theta: x,
            left_slope: one_sided_slope(|y| profile.psi_piecewise(y), x, -SLOPE_STEP),
            right_slope: one_sided_slope(|y| profile.psi_piecewise(y), x, SLOPE_STEP),
        })
        .collect();
    let closed_form = (td == 0.0).then(|| "psi(theta) = gamma + beta*theta".to_string());
    Ok(PhaseReport {
        beta,
        gamma: profile.gamma,
        theta_star: profile.theta_star,
        theta_dagger: td,
        intervals,
        kinks,
        closed_form,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::bundled;
    use crate::ratefn::psi_direct_value;

    #[test]
    fn strongly_subcritical_survives_first() {
        let env = bundled::strongly_subcritical().env;
        let p = RateProfile::new(&env, 5.0).unwrap();
        let ts = p.theta_star.value();
        let st = optimal_strategy(&env, 5.0, 0.5 * ts).unwrap();
        assert_eq!(st.regime, StrategyRegime::SurviveThenGrow);
        assert!(st.t_theta > 0.0 && st.t_theta < 1.0);
        assert_eq!(st.s_theta, 0.0);
        // growth happens at the tangency slope
        assert!((st.growth_slope().unwrap() - ts).abs() < 1e-5);
    }

    #[test]
    fn critical_regimes() {
        let env = bundled::critical().env;
        let td = RateProfile::new(&env, 2.0).unwrap().theta_dagger_value();
        let st = optimal_strategy(&env, 2.0, 0.5 * td).unwrap();
        assert_eq!(st.regime, StrategyRegime::StraightGrowth);
        assert_eq!((st.t_theta, st.s_theta), (0.0, 0.0));
        let st = optimal_strategy(&env, 2.0, td + 0.1).unwrap();
        assert_eq!(st.regime, StrategyRegime::JumpThenGrow);
        assert_eq!(st.t_theta, 0.0);
        assert!((st.s_theta - 0.1).abs() < 1e-6);
    }

    #[test]
    fn subcritical_galton_watson_jumps_at_the_end() {
        let env = bundled::galton_watson_half().env;
        let st = optimal_strategy(&env, 3.0, 0.2).unwrap();
        assert_eq!(st.regime, StrategyRegime::SurviveThenFinalJump);
        assert_eq!(st.t_theta, 1.0);
        assert!((st.value - (2f64.ln() + 0.6)).abs() < 1e-12);
    }

    #[test]
    fn value_matches_direct_minimization() {
        for model in bundled::rate_test_envs() {
            for beta in [1.5, 2.0, 5.0] {
                let p = RateProfile::new(&model.env, beta).unwrap();
                for i in 0..25 {
                    let theta = 0.05 * i as f64;
                    let st = optimal_strategy_for(&p, theta).unwrap();
                    let direct = psi_direct_value(&p, theta);
                    assert!(
                        (st.value - direct).abs() < 1e-6,
                        "{} {beta} {theta}",
                        model.name
                    );
                    assert!(st.s_theta <= 0.0 || st.t_theta == 0.0 || st.t_theta == 1.0);
                }
            }
        }
    }

    #[test]
    fn profiles() {
        let env = bundled::critical().env;
        let p = path_profile(&env, 2.0, 0.3, 11).unwrap();
        assert_eq!(p.strategy.regime, StrategyRegime::StraightGrowth);
        for &(t, f) in &p.samples {
            assert!((f - 0.3 * t).abs() < 1e-12);
        }
        assert!(p.jump.is_none());

        let td = RateProfile::new(&env, 2.0).unwrap().theta_dagger_value();
        let p = path_profile(&env, 2.0, td + 0.1, 101).unwrap();
        let st = p.strategy;
        assert!((PathProfile::value_right(&st, 0.0) - 0.1).abs() < 1e-6);
        assert!((st.growth_slope().unwrap() - td).abs() < 1e-6);
        assert!((p.samples.last().unwrap().1 - (td + 0.1)).abs() < 1e-9);

        let gw = bundled::galton_watson_half().env;
        let p = path_profile(&gw, 3.0, 0.2, 5).unwrap();
        assert!(p.samples[..4].iter().all(|&(_, f)| f == 0.0));
        assert_eq!(p.samples[4].1, 0.2);
        assert_eq!(p.jump.unwrap().t, 1.0);
        assert!(path_profile(&gw, 3.0, 0.2, 1).is_err());
    }

    #[test]
    fn critical_phase_report() {
        let r = phase_report(&bundled::critical().env, 2.0).unwrap();
        assert_eq!(r.theta_star, ExtReal::Finite(0.0));
        assert!((r.theta_dagger - 0.61160).abs() < 1e-5);
        assert_eq!(r.intervals.len(), 2);
        assert_eq!(r.intervals[0].regime, StrategyRegime::StraightGrowth);
        assert_eq!(r.intervals[1].regime, StrategyRegime::JumpThenGrow);
        assert_eq!(r.kinks.len(), 1);
        assert!(r.kinks[0].is_smooth(1e-4));
    }

    #[test]
    fn galton_watson_phase_report() {
        let r = phase_report(&bundled::galton_watson_half().env, 3.0).unwrap();
        assert_eq!(r.theta_dagger, 0.0);
        assert_eq!(r.theta_star, ExtReal::PosInf);
        assert!(r.closed_form.is_some());
        assert_eq!(r.intervals.len(), 1);
        assert_eq!(r.intervals[0].regime, StrategyRegime::SurviveThenFinalJump);
    }

    #[test]
    fn strongly_subcritical_has_three_phases() {
        let r = phase_report(&bundled::strongly_subcritical().env, 5.0).unwrap();
        let regimes: Vec<_> = r.intervals.iter().map(|i| i.regime).collect();
        assert_eq!(
            regimes,
            vec![
                StrategyRegime::SurviveThenGrow,
                StrategyRegime::StraightGrowth,
                StrategyRegime::JumpThenGrow
            ]
        );
        assert!(r.kinks.iter().all(|k| k.is_smooth(1e-4)), "{:?}", r.kinks);
    }
}
