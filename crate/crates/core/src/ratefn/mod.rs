//! Rate functions: `Λ` of the associated walk, the survival cost `γ`, the
//! geometric-tail rate `χ` with its tangency point `θ*`, the jump onset `θ†`,
//! and `ψ` computed two ways (direct minimization and graphical construction).

mod direct;
mod extreal;
mod galton_watson;
mod profile;
mod walk;

pub use direct::{
    psi_beta_limit_value, psi_direct_minimizer, psi_direct_value, Minimizer, Objective, GRID,
};
pub use extreal::ExtReal;
pub use galton_watson::psi_galton_watson;
pub use profile::{compute_gamma, RateProfile};
pub use walk::WalkLaw;

use crate::error::{Error, Result};
use crate::models::EnvironmentModel;

fn check_theta(theta: f64) -> Result<()> {
    if theta >= 0.0 && theta.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "theta {theta} must be finite and >= 0"
        )))
    }
}

/// Any admissible tail exponent; quantities that do not depend on `β` are
/// computed through a profile built with it.
const NEUTRAL_BETA: f64 = 2.0;

/// `Λ(θ) = sup_{λ ≥ 0} {λθ − K(λ)}`, zero up to the drift.
pub fn lambda_rate(env: &EnvironmentModel, theta: f64) -> Result<ExtReal> {
    check_theta(theta)?;
    Ok(WalkLaw::new(env).rate(theta))
}

/// Exponential decay rate of the survival probability.
pub fn gamma(env: &EnvironmentModel) -> f64 {
    compute_gamma(env)
}

pub fn theta_star(env: &EnvironmentModel) -> ExtReal {
    RateProfile::new(env, NEUTRAL_BETA)
        .expect("neutral beta is admissible")
        .theta_star
}

pub fn chi(env: &EnvironmentModel, theta: f64) -> Result<ExtReal> {
    check_theta(theta)?;
    Ok(RateProfile::new(env, NEUTRAL_BETA)?.chi(theta))
}

pub fn theta_dagger(env: &EnvironmentModel, beta: f64) -> Result<ExtReal> {
    Ok(RateProfile::new(env, beta)?.theta_dagger)
}

pub fn psi_direct(env: &EnvironmentModel, beta: f64, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    Ok(psi_direct_value(&RateProfile::new(env, beta)?, theta))
}

pub fn psi_piecewise(env: &EnvironmentModel, beta: f64, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    Ok(RateProfile::new(env, beta)?.psi_piecewise(theta))
}

pub fn psi_beta_limit(env: &EnvironmentModel, theta: f64) -> Result<ExtReal> {
    check_theta(theta)?;
    Ok(psi_beta_limit_value(
        &RateProfile::new(env, NEUTRAL_BETA)?,
        theta,
    ))
}
