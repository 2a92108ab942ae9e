//! Channel estimation, outage and capacity analysis for links assisted by an
//! active reconfigurable intelligent surface, plus a seeded Monte Carlo
//! simulator that checks the closed forms end to end.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too, and index
// loops walk several parallel arrays at once.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analysis;
pub mod channel;
pub mod config;
pub mod error;
pub mod estimator;
pub mod link;
pub mod montecarlo;
pub mod oracle;
pub mod phase_noise;
pub mod special_fn;
pub mod units;
pub mod validate;

pub use analysis::{NoisePowers, RicianMoments, SinrStatistics};
pub use config::{AmpGains, PhaseNoiseKind, PhaseNoiseModel, ScenarioConfig, TrainingBasis};
pub use error::{Error, Result};
pub use link::LinkBudget;
pub use montecarlo::{GammaMode, SimOptions, SweepAxis, SweepPoint, SweepResult, TrialRecord};
pub use validate::{Fault, ValidationOptions, ValidationReport};
