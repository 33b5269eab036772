//! Simulation of the branching process, the exact small-`n` oracle, and tail
//! estimators.

pub mod estimate;
pub mod exact;
mod rng;
pub mod trajectory;

pub use estimate::{
    empirical_rate_curve, growth_threshold, mc_tail, survival_rate_scan, survival_tilt,
    tilt_for_drift, tilted_tail, tilted_tail_with_lambda, McConfig, Method, RatePoint,
    TailEstimate,
};
pub use exact::{
    conditional_pmf, conditional_survival_bound_check, exact_tail, ExactTail, SequenceRow,
    SurvivalBoundCheck,
};
pub use rng::replicate_rng;
pub use trajectory::{run_bpre, Trajectory, DEFAULT_CAP};
