//! Offspring laws, finite-state environments and the heavy-tail envelope.

pub mod bundled;
mod config;
mod env;
mod law;
mod tail;
pub(crate) mod zeta;

pub use config::{load_model, parse_model, Model, FILE_PROB_TOL};
pub use env::{EnvState, EnvironmentModel, Regime, CLASSIFY_TOL};
pub use law::OffspringLaw;
pub use tail::{verify_tail_assumption, TailAssumption, TailCheck, Violation};
pub use zeta::{riemann_zeta, ZetaTable};
