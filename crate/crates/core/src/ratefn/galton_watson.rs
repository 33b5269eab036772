use crate::error::{Error, Result};

/// Closed-form `ψ` for a deterministic environment with mean `m`:
/// `−log m + βθ` when `m ≤ 1`, `β(θ − log m)` when `m > 1`.
pub fn psi_galton_watson(m: f64, beta: f64, theta: f64) -> Result<f64> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::Domain(format!("mean {m} must be positive")));
    }
    if beta.is_nan() || beta <= 1.0 {
        return Err(Error::Domain(format!("tail exponent {beta} must exceed 1")));
    }
    if theta < 0.0 {
        return Err(Error::Domain(format!("theta {theta} must be >= 0")));
    }
    if m <= 1.0 {
        Ok(-m.ln() + beta * theta)
    } else if theta < m.ln() {
        Err(Error::Domain(format!(
            "theta {theta} below log m = {}: typical growth, rate 0",
            m.ln()
        )))
    } else {
        Ok(beta * (theta - m.ln()))
    }
}
