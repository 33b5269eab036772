//! Direct minimization of
//! `ψ(θ) = inf_{t ∈ [0,1], s ∈ [0,θ]} { tγ + βs + (1−t) Λ((θ−s)/(1−t)) }`.
//!
//! The objective is jointly convex in `(t, s)` (a perspective of `Λ` plus a
//! linear part). A coarse grid gives an upper bound and a starting cell; the
//! minimum is then refined by nested golden-section searches, the inner one
//! over the feasible `s`-interval where `Λ` is finite.

use super::extreal::ExtReal;
use super::profile::RateProfile;
use crate::optim::golden_section;

/// Grid points per axis for the coarse pass.
pub const GRID: usize = 201;

const REFINE_TOL: f64 = 1e-11;

/// Candidate minimizer of the objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimizer {
    pub t: f64,
    pub s: f64,
    pub value: f64,
}

/// Objective and its partial minimizations for one `(profile, θ)`.
pub struct Objective<'a> {
    profile: &'a RateProfile,
    theta: f64,
}

impl<'a> Objective<'a> {
    pub fn new(profile: &'a RateProfile, theta: f64) -> Self {
        Self { profile, theta }
    }

    /// Value at `(t, s)`; `t = 1` is the "survive, then jump" boundary `γ + βθ`
    /// (only `s = θ` has finite cost there).
    pub fn value(&self, t: f64, s: f64) -> ExtReal {
        let p = self.profile;
        if t >= 1.0 {
            return if s >= self.theta {
                ExtReal::Finite(p.gamma + p.beta * self.theta)
            } else {
                ExtReal::PosInf
            };
        }
        let u = (self.theta - s) / (1.0 - t);
        let rate = p.lambda(u);
        match rate {
            ExtReal::Finite(r) => ExtReal::Finite(t * p.gamma + p.beta * s + (1.0 - t) * r),
            ExtReal::PosInf => ExtReal::PosInf,
        }
    }

    /// Feasible jump sizes for a given `t < 1`: those with `(θ−s)/(1−t) ≤ ess sup X`.
    pub fn feasible_s(&self, t: f64) -> Option<(f64, f64)> {
        let x_max = self.profile.ess_sup_x;
        if t >= 1.0 {
            return Some((self.theta, self.theta));
        }
        if x_max < 0.0 {
            return None;
        }
        let lo = (self.theta - (1.0 - t) * x_max).max(0.0);
        Some((lo, self.theta))
    }

    /// Value with `u` clamped to the essential supremum, for `s` in the feasible interval.
    fn value_feasible(&self, t: f64, s: f64) -> f64 {
        let p = self.profile;
        if t >= 1.0 {
            return p.gamma + p.beta * self.theta;
        }
        let u = ((self.theta - s) / (1.0 - t)).min(p.ess_sup_x).max(0.0);
        t * p.gamma + p.beta * s + (1.0 - t) * p.lambda(u).value()
    }

    /// `g(t) = min_s f(t, s)` and its minimizing `s`.
    pub fn inner(&self, t: f64) -> (f64, f64) {
        match self.feasible_s(t) {
            None => (f64::NAN, f64::INFINITY),
            Some((lo, hi)) if hi - lo <= 0.0 => (lo, self.value_feasible(t, lo)),
            Some((lo, hi)) => golden_section(|s| self.value_feasible(t, s), lo, hi, REFINE_TOL),
        }
    }

    /// Smallest `s` attaining `g(t)` within `slack`.
    pub fn inner_leftmost(&self, t: f64, slack: f64) -> (f64, f64) {
        let (s_opt, v) = self.inner(t);
        let Some((lo, _)) = self.feasible_s(t) else {
            return (s_opt, v);
        };
        if !v.is_finite() || s_opt <= lo {
            return (s_opt, v);
        }
        let s = crate::optim::bisect_first_true(
            |s| self.value_feasible(t, s) <= v + slack,
            lo,
            s_opt,
            1e-13,
        );
        (s, self.value_feasible(t, s))
    }

    /// Best point of the coarse `GRID × GRID` lattice; cells where `Λ = +∞` are skipped.
    pub fn grid_minimum(&self) -> Minimizer {
        let mut best = Minimizer {
            t: 1.0,
            s: self.theta,
            value: self.profile.gamma + self.profile.beta * self.theta,
        };
        let n = (GRID - 1) as f64;
        for i in 0..GRID {
            let t = i as f64 / n;
            for j in 0..GRID {
                let s = self.theta * j as f64 / n;
                if let ExtReal::Finite(v) = self.value(t, s) {
                    if v < best.value || (v == best.value && (t, s) < (best.t, best.s)) {
                        best = Minimizer { t, s, value: v };
                    }
                }
            }
        }
        best
    }

    /// Nested golden-section minimum over `t ∈ [0, 1]`.
    pub fn refined_minimum(&self) -> Minimizer {
        let (t, value) = golden_section(|t| self.inner(t).1, 0.0, 1.0, REFINE_TOL);
        let (s, _) = self.inner(t);
        Minimizer { t, s, value }
    }
}

/// `ψ(θ)` by direct minimization, together with the minimizing `(t, s)`.
pub fn psi_direct_minimizer(profile: &RateProfile, theta: f64) -> Minimizer {
    let obj = Objective::new(profile, theta);
    let grid = obj.grid_minimum();
    let refined = obj.refined_minimum();
    if refined.value <= grid.value {
        refined
    } else {
        grid
    }
}

pub fn psi_direct_value(profile: &RateProfile, theta: f64) -> f64 {
    psi_direct_minimizer(profile, theta).value
}

/// `inf_{t ∈ [0,1]} { tγ + (1−t) Λ(θ/(1−t)) }`, the `β → ∞` limit of `ψ`.
pub fn psi_beta_limit_value(profile: &RateProfile, theta: f64) -> ExtReal {
    let gamma = profile.gamma;
    if theta <= 0.0 {
        return ExtReal::Finite(gamma.min(profile.lambda(0.0).value()));
    }
    let x_max = profile.ess_sup_x;
    if x_max <= 0.0 || theta > x_max {
        return ExtReal::PosInf;
    }
    let t_max = 1.0 - theta / x_max;
    let f = |t: f64| {
        let u = (theta / (1.0 - t)).min(x_max);
        t * gamma + (1.0 - t) * profile.lambda(u).value()
    };
    ExtReal::Finite(golden_section(f, 0.0, t_max, REFINE_TOL).1)
}
