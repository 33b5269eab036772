use super::extreal::ExtReal;
use super::walk::WalkLaw;
use crate::error::{Error, Result};
use crate::models::{EnvironmentModel, Regime};
use crate::optim::{bisect_last_true, golden_section};

/// Rate-function data of one environment for one tail exponent `beta`.
///
/// `theta_star` is `+∞` when `Λ` is infinite on the whole of `(0, ∞)` (all
/// states have `m ≤ 1` and the essential supremum of `X` is not positive);
/// the chord from `(0, γ)` then never meets `Λ` and `χ` is `+∞` off zero.
#[derive(Debug, Clone)]
pub struct RateProfile {
    walk: WalkLaw,
    pub beta: f64,
    pub drift: f64,
    pub ess_sup_x: f64,
    pub gamma: f64,
    pub lambda_at_zero: ExtReal,
    pub theta_star: ExtReal,
    /// Slope of the chord from `(0, γ)` to `(θ*, Λ(θ*))`; zero when `θ* = 0`.
    pub chord_slope: f64,
    pub theta_dagger: ExtReal,
    pub regime: Regime,
}

/// Survival cost `γ`: zero unless the walk drifts to `-∞`, else
/// `−log min_{s ∈ [0,1]} E[e^{sX}]`.
pub fn compute_gamma(env: &EnvironmentModel) -> f64 {
    if env.drift() >= -crate::models::CLASSIFY_TOL {
        return 0.0;
    }
    let (_, min) = golden_section(|s| env.cgf(s), 0.0, 1.0, 1e-12);
    (-min).max(0.0)
}

impl RateProfile {
    pub fn new(env: &EnvironmentModel, beta: f64) -> Result<Self> {
        if beta.is_nan() || beta <= 1.0 {
            return Err(Error::Domain(format!("tail exponent {beta} must exceed 1")));
        }
        let walk = WalkLaw::new(env);
        let regime = env.classify();
        let gamma = compute_gamma(env);
        let lambda_at_zero = walk.rate(0.0);
        let mut profile = Self {
            drift: walk.drift(),
            ess_sup_x: walk.x_max(),
            walk,
            beta,
            gamma,
            lambda_at_zero,
            theta_star: ExtReal::Finite(0.0),
            chord_slope: 0.0,
            theta_dagger: ExtReal::Finite(0.0),
            regime,
        };
        profile.theta_star = profile.locate_theta_star();
        if let ExtReal::Finite(ts) = profile.theta_star {
            if ts > 0.0 {
                profile.chord_slope = (profile.lambda(ts).value() - gamma) / ts;
            }
        }
        profile.theta_dagger = ExtReal::Finite(profile.locate_theta_dagger());
        Ok(profile)
    }

    pub fn walk(&self) -> &WalkLaw {
        &self.walk
    }

    /// `Λ(θ)`.
    pub fn lambda(&self, theta: f64) -> ExtReal {
        self.walk.rate(theta)
    }

    fn locate_theta_star(&self) -> ExtReal {
        let x_max = self.ess_sup_x;
        if self.regime != Regime::StronglySubcritical {
            // γ = Λ(0)
            return ExtReal::Finite(0.0);
        }
        if x_max <= 0.0 {
            return ExtReal::PosInf;
        }
        let ratio = |theta: f64| (self.lambda(theta).value() - self.gamma) / theta;
        let lo = x_max * 1e-12;
        let (guess, _) = golden_section(ratio, lo, x_max, 1e-10 * x_max);
        // Polish on the tangency condition Λ(θ) − θΛ'(θ) = γ, whose left side
        // decreases in θ past the minimum of K.
        let tangent_gap = |theta: f64| {
            let (rate, slope) = self.walk.rate_with_slope(theta, None);
            rate.value() - theta * slope - self.gamma
        };
        let width = 1e-6 * x_max;
        let (a, b) = (
            (guess - width).max(lo),
            (guess + width).min(x_max * (1.0 - 1e-15)),
        );
        if tangent_gap(a) > 0.0 && tangent_gap(b) < 0.0 {
            ExtReal::Finite(bisect_last_true(|t| tangent_gap(t) > 0.0, a, b, 1e-15))
        } else {
            ExtReal::Finite(guess)
        }
    }

    /// Right slope of `χ` at `θ`.
    pub fn chi_right_slope(&self, theta: f64) -> f64 {
        match self.theta_star {
            ExtReal::PosInf => f64::INFINITY,
            ExtReal::Finite(ts) if theta < ts => self.chord_slope,
            _ => {
                if theta >= self.ess_sup_x {
                    f64::INFINITY
                } else {
                    self.walk.slope(theta)
                }
            }
        }
    }

    fn locate_theta_dagger(&self) -> f64 {
        let start = self.drift.max(0.0);
        if self.chi_right_slope(start) > self.beta {
            return start;
        }
        bisect_last_true(
            |theta| self.chi_right_slope(theta) <= self.beta,
            start,
            self.ess_sup_x,
            1e-14,
        )
    }

    /// `χ(θ)`: the largest convex function below `Λ` with `χ(0) ≤ γ`.
    pub fn chi(&self, theta: f64) -> ExtReal {
        match self.theta_star {
            ExtReal::PosInf => {
                if theta <= 0.0 {
                    ExtReal::Finite(self.gamma)
                } else {
                    ExtReal::PosInf
                }
            }
            ExtReal::Finite(ts) if theta < ts => {
                ExtReal::Finite(self.gamma + self.chord_slope * theta)
            }
            _ => {
                if theta <= 0.0 {
                    // θ* = 0 means γ = Λ(0)
                    ExtReal::Finite(self.gamma)
                } else {
                    self.lambda(theta)
                }
            }
        }
    }

    pub fn theta_dagger_value(&self) -> f64 {
        self.theta_dagger.value()
    }

    /// Graphical construction: `χ` up to `θ†`, then the slope-`β` ray.
    pub fn psi_piecewise(&self, theta: f64) -> f64 {
        let td = self.theta_dagger_value();
        if theta <= td {
            self.chi(theta).value()
        } else {
            self.beta * (theta - td) + self.chi(td).value()
        }
    }

    /// True when `χ` has slope exactly `β` at `θ†`, so the ray coincides with
    /// `βθ − log E[e^{βX}]`.
    pub fn dagger_is_tangency(&self) -> bool {
        let td = self.theta_dagger_value();
        td > self.drift.max(0.0) && td < self.ess_sup_x && !self.walk.is_degenerate()
    }

    /// Third piece in its closed form `βθ − log E[e^{βX}]`.
    pub fn psi_beyond_dagger_closed_form(&self, theta: f64) -> f64 {
        self.beta * theta - self.walk.cgf(self.beta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{bundled, OffspringLaw};

    fn c_env() -> EnvironmentModel {
        bundled::strongly_subcritical().env
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(compute_gamma(&bundled::critical().env), 0.0);
        assert!((compute_gamma(&c_env()) - 2f64.ln()).abs() < 1e-12);
        let gw = EnvironmentModel::single(OffspringLaw::bounded(vec![0.5, 0.5]).unwrap());
        assert!((compute_gamma(&gw) - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn theta_star_matches_second_root_of_cgf() {
        // For C, K(λ) = K(1) = log 0.5 again at λ = 2, so the tangency point is K'(2).
        let env = c_env();
        let p = RateProfile::new(&env, 5.0).unwrap();
        let oracle = env.cgf_derivative(2.0);
        let ts = p.theta_star.value();
        assert!((ts - oracle).abs() < 1e-9, "{ts} vs {oracle}");
        assert!(ts > 0.0 && ts <= 1.5f64.ln());
        assert!((p.chord_slope - 2.0).abs() < 1e-7);
    }

    #[test]
    fn theta_star_by_dense_grid() {
        let env = c_env();
        let p = RateProfile::new(&env, 5.0).unwrap();
        let x_max = p.ess_sup_x;
        let n = 100_000;
        let (mut best_t, mut best) = (0.0, f64::INFINITY);
        for i in 1..=n {
            let t = x_max * i as f64 / n as f64;
            let r = (p.lambda(t).value() - p.gamma) / t;
            if r < best {
                best = r;
                best_t = t;
            }
        }
        assert!((p.theta_star.value() - best_t).abs() < 2.0 * x_max / n as f64);
    }

    #[test]
    fn theta_star_zero_when_gamma_equals_lambda_zero() {
        let p = RateProfile::new(&bundled::critical().env, 2.0).unwrap();
        assert_eq!(p.theta_star, ExtReal::Finite(0.0));
        assert_eq!(p.gamma, 0.0);
    }

    #[test]
    fn chi_examples() {
        let p = RateProfile::new(&c_env(), 5.0).unwrap();
        assert_eq!(p.chi(0.0).value(), p.gamma);
        let ts = p.theta_star.value();
        let mid = p.chi(ts / 2.0).value();
        let chord_mid = 0.5 * (p.gamma + p.lambda(ts).value());
        assert!((mid - chord_mid).abs() < 1e-12);
        let crit = RateProfile::new(&bundled::critical().env, 2.0).unwrap();
        for &t in &[0.0, 0.1, 0.4, 0.69] {
            assert_eq!(crit.chi(t), crit.lambda(t));
        }
    }

    #[test]
    fn theta_dagger_closed_form() {
        // θ† = K'(β) when the slope of Λ reaches β inside the domain
        let p = RateProfile::new(&bundled::critical().env, 2.0).unwrap();
        let expected = 2f64.ln() * 15.0 / 17.0;
        assert!((p.theta_dagger_value() - expected).abs() < 1e-12);
        assert!((p.theta_dagger_value() - 0.61160).abs() < 1e-5);
    }

    #[test]
    fn theta_dagger_zero_for_subcritical_galton_watson() {
        let gw = EnvironmentModel::single(OffspringLaw::bounded(vec![0.5, 0.5]).unwrap());
        let p = RateProfile::new(&gw, 3.0).unwrap();
        assert_eq!(p.theta_dagger, ExtReal::Finite(0.0));
        assert_eq!(p.theta_star, ExtReal::PosInf);
        assert!((p.psi_piecewise(0.1) - (2f64.ln() + 0.3)).abs() < 1e-12);
    }

    #[test]
    fn theta_dagger_at_jump_for_supercritical_galton_watson() {
        let gw = EnvironmentModel::single(OffspringLaw::bounded(vec![0.0, 0.0, 1.0]).unwrap());
        let p = RateProfile::new(&gw, 3.0).unwrap();
        assert!((p.theta_dagger_value() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(p.psi_piecewise(2f64.ln()), 0.0);
    }

    #[test]
    fn ray_matches_closed_form_third_piece() {
        for model in bundled::rate_test_envs() {
            for beta in [1.5, 2.0, 5.0] {
                let p = RateProfile::new(&model.env, beta).unwrap();
                if !p.dagger_is_tangency() {
                    continue;
                }
                for k in 1..20 {
                    let theta = p.theta_dagger_value() + 0.1 * k as f64;
                    let diff = p.psi_piecewise(theta) - p.psi_beyond_dagger_closed_form(theta);
                    assert!(diff.abs() < 1e-8, "{} beta={beta}: {diff}", model.name);
                }
            }
        }
    }

    #[test]
    fn rejects_small_beta() {
        assert!(RateProfile::new(&c_env(), 1.0).is_err());
    }
}
