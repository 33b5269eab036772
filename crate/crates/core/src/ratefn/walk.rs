//! Cramér rate function of the associated random walk, restricted to upper
//! deviations: `Λ(θ) = sup_{λ ≥ 0} {λθ − K(λ)}`.

use super::extreal::ExtReal;
use crate::models::EnvironmentModel;

/// Atoms of `X = log m` with their probabilities, plus cached moments.
#[derive(Debug, Clone)]
pub struct WalkLaw {
    xs: Vec<f64>,
    log_p: Vec<f64>,
    drift: f64,
    x_max: f64,
    p_max: f64,
    degenerate: bool,
}

impl WalkLaw {
    pub fn new(env: &EnvironmentModel) -> Self {
        Self {
            xs: env.log_means(),
            log_p: env.probs().iter().map(|p| p.ln()).collect(),
            drift: env.drift(),
            x_max: env.ess_sup_x(),
            p_max: env.prob_at_sup(),
            degenerate: env.is_degenerate(),
        }
    }

    pub fn drift(&self) -> f64 {
        self.drift
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    /// `P(X = ess sup X)`.
    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn cgf(&self, lambda: f64) -> f64 {
        let top = self
            .xs
            .iter()
            .zip(&self.log_p)
            .map(|(x, lp)| lp + lambda * x)
            .fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = self
            .xs
            .iter()
            .zip(&self.log_p)
            .map(|(x, lp)| (lp + lambda * x - top).exp())
            .sum();
        top + sum.ln()
    }

    /// `(K'(λ), K''(λ))`.
    pub fn moments(&self, lambda: f64) -> (f64, f64) {
        let top = self
            .xs
            .iter()
            .zip(&self.log_p)
            .map(|(x, lp)| lp + lambda * x)
            .fold(f64::NEG_INFINITY, f64::max);
        let (mut w, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for (x, lp) in self.xs.iter().zip(&self.log_p) {
            let e = (lp + lambda * x - top).exp();
            w += e;
            m1 += e * x;
            m2 += e * x * x;
        }
        let mean = m1 / w;
        (mean, (m2 / w - mean * mean).max(0.0))
    }

    /// Solves `K'(λ) = θ` for `λ ≥ 0`, for `θ` strictly between the drift and
    /// the essential supremum. `hint` warm-starts the Newton iteration.
    pub fn solve_tilt(&self, theta: f64, hint: Option<f64>) -> Option<f64> {
        if self.degenerate || !(theta > self.drift && theta < self.x_max) {
            return None;
        }
        let mut lo = 0.0;
        let mut hi = 1.0;
        while self.moments(hi).0 < theta {
            lo = hi;
            hi *= 2.0;
            if hi > 1e12 {
                return Some(hi);
            }
        }
        let mut x = match hint {
            Some(h) if h > lo && h < hi => h,
            _ => 0.5 * (lo + hi),
        };
        for _ in 0..200 {
            let (k1, k2) = self.moments(x);
            let f = k1 - theta;
            if f > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let newton = if k2 > 0.0 { x - f / k2 } else { f64::NAN };
            let next = if newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if (next - x).abs() <= 1e-15 * x.max(1.0) || hi - lo <= 1e-15 * hi.max(1.0) {
                return Some(next);
            }
            x = next;
        }
        Some(x)
    }

    /// `Λ(θ)` together with the maximizing `λ` when it is finite.
    pub fn rate_with_slope(&self, theta: f64, hint: Option<f64>) -> (ExtReal, f64) {
        if theta <= self.drift {
            return (ExtReal::Finite(0.0), 0.0);
        }
        if theta > self.x_max {
            return (ExtReal::PosInf, f64::INFINITY);
        }
        if theta == self.x_max {
            // the supremum is approached as λ → ∞
            return (ExtReal::Finite(-self.p_max.ln()), f64::INFINITY);
        }
        let lambda = self
            .solve_tilt(theta, hint)
            .expect("theta strictly inside (drift, ess sup)");
        (
            ExtReal::Finite((lambda * theta - self.cgf(lambda)).max(0.0)),
            lambda,
        )
    }

    pub fn rate(&self, theta: f64) -> ExtReal {
        self.rate_with_slope(theta, None).0
    }

    /// `Λ'(θ)`: zero up to the drift, `+∞` from the essential supremum on.
    pub fn slope(&self, theta: f64) -> f64 {
        self.rate_with_slope(theta, None).1
    }
}
