//! Upper large deviations of branching processes in i.i.d. random environment
//! with heavy-tailed offspring.
//!
//! * [`models`]: offspring laws, finite-state environments, model files.
//! * [`ratefn`]: `Λ`, `γ`, `χ`, `θ*`, `θ†` and the rate function `ψ`.
//! * [`simulate`]: the branching chain, an exact small-`n` oracle, naive and
//!   exponentially tilted tail estimators.
//! * [`path`]: the optimal strategy behind `ψ(θ)` and the predicted log-size path.

pub mod error;
pub mod models;
pub mod optim;
pub mod parallel;
pub mod path;
pub mod ratefn;
pub mod simulate;

pub use error::{Error, Result};
