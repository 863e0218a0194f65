//! Cooperative spectrum sensing with energy detectors under noise
//! uncertainty: special functions, detector closed forms, enhanced
//! threshold schemes, hard-decision fusion and a Monte Carlo engine.

pub mod detector;
pub mod error;
pub mod fusion;
pub mod montecarlo;
pub mod noise_model;
pub mod specfun;
pub mod threshold_schemes;

pub use detector::{DetectorConfig, Hypothesis};
pub use error::{Error, Result};
pub use fusion::{FusionConfig, VoteConvention};
pub use montecarlo::{Scenario, ScenarioEstimate};
pub use noise_model::{NoiseUncertaintyModel, VarianceBracket};
pub use specfun::Probability;
pub use threshold_schemes::SchemeConfig;
