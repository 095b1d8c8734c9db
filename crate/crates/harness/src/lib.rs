//! Monte Carlo harness for DA-ESPRIT and SS-ESPRIT: config parsing, seeded
//! parallel sweeps, CSV output and the `sla-esprit` command line.
//!
//! Every trial derives its random streams from `(base_seed, trial_index)`
//! alone, so sweep output does not depend on how trials are scheduled.

pub mod cli;
pub mod config;
mod error;
pub mod fit;
pub mod format;
pub mod sweep;
pub mod trial;

pub use config::{ConfigBuilder, ExperimentConfig, VariantSelection};
pub use error::{ConfigError, FitError, HarnessError, Result};
pub use fit::fit_loglog_slope;
pub use sweep::{execute, run_sweep, Aggregate, SweepOutcome};
pub use trial::{run_trial, GridPoint, TrialResult};
