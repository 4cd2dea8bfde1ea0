//! Receding-horizon closed-loop simulation: single seeded runs, batch
//! campaigns with aggregate statistics, and the deviation-integral
//! performance metric.

mod campaign;
mod metrics;
mod run;

pub use campaign::{run_campaign, Aggregate, Campaign};
pub use metrics::integrate_abs_deviation;
pub use run::{evaluate_j, run_once, Failure, FailureKind, RunRecord, Scenario, StepRecord};
