//! Lower bounds on the sectional and strong phase-transition thresholds of
//! ℓ₁ minimization, plus small-scale empirical checks.

pub mod audit;
pub mod empirical;
pub mod error;
pub mod general;
pub mod lift;
pub mod nonneg;
pub mod numerics;
pub mod par;
pub mod tables;
pub mod threshold;

pub use error::{Error, Result};
pub use lift::{BoundEvaluation, Kind, LiftParams, Method};
pub use threshold::{threshold_bisect, threshold_bisect_with, SearchConfig, ThresholdResult};
