//! Experiment spec files: parsing, validation and expansion into scenarios.

use std::path::{Path, PathBuf};

use coopsense::detector::DetectorConfig;
use coopsense::fusion::{FusionConfig, VoteConvention};
use coopsense::montecarlo::{NoiseReference, ObservationModel, Scenario, SignalModel, Truth};
use coopsense::noise_model::NoiseUncertaintyModel;
use coopsense::specfun::Probability;
use coopsense::threshold_schemes::SchemeConfig;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Diagnostic, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    /// Result file, relative to the output directory unless absolute.
    #[serde(default)]
    pub output: Option<PathBuf>,
    pub sweep: Sweep,
    pub schemes: Vec<SchemeConfig>,
    pub scenario: ScenarioSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    SnrDb,
    Sus,
    Gamma,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::SnrDb => "snr_db",
            SweepAxis::Sus => "sus",
            SweepAxis::Gamma => "gamma",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub detector: DetectorSpec,
    #[serde(default)]
    pub noise: NoiseSpec,
    pub reference: NoiseReference,
    pub fusion: FusionSpec,
    /// Average SNR `h² σ_s² / σ_c²` in dB.
    pub snr_db: f64,
    pub trials: u64,
    pub seed: u64,
    pub truth: Truth,
    #[serde(default)]
    pub signal: SignalModel,
    #[serde(default)]
    pub observation: ObservationModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSpec {
    pub samples: usize,
    /// Defaults to `samples`.
    #[serde(default)]
    pub time_bandwidth: Option<f64>,
    pub gamma: f64,
    #[serde(default = "one")]
    pub channel_gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    #[serde(default = "one")]
    pub nominal_variance: f64,
    /// Spread of the power measurements behind the bracket; 0 disables
    /// noise uncertainty.
    #[serde(default)]
    pub spread_sd: f64,
    #[serde(default = "default_sample_count")]
    pub sample_count: usize,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
    #[serde(default)]
    pub rebracket_confidence: Option<f64>,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec {
            nominal_variance: 1.0,
            spread_sd: 0.0,
            sample_count: default_sample_count(),
            confidence: default_confidence(),
            rebracket_confidence: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FusionSpec {
    pub sus: usize,
    pub votes: usize,
    #[serde(default)]
    pub vote_convention: VoteConvention,
    pub prior_h0: f64,
    #[serde(default)]
    pub report_error: f64,
}

fn one() -> f64 {
    1.0
}

fn default_sample_count() -> usize {
    100
}

fn default_confidence() -> f64 {
    0.99
}

/// `10^(dB / 10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn diag(field: impl Into<String>, message: impl Into<String>) -> Diagnostic {
    Diagnostic {
        field: field.into(),
        message: message.into(),
    }
}

/// Spec path of a field reported by the library.
fn spec_field(field: &str) -> String {
    let section = match field {
        "samples" | "time_bandwidth" | "gamma" | "channel_gain" | "signal_variance" => {
            "scenario.detector"
        }
        "sus" | "votes" | "report_error" | "prior_h0" => "scenario.fusion",
        "nominal_variance" | "confidence" | "bracket" => "scenario.noise",
        "trials" => "scenario",
        "weights" | "exponent" => "schemes",
        f if f.starts_with("reference.") => "scenario",
        _ => return field.to_string(),
    };
    format!("{section}.{field}")
}

fn from_core(err: coopsense::Error, fallback: &str) -> Diagnostic {
    match err {
        coopsense::Error::InvalidConfig { field, detail } => diag(spec_field(field), detail),
        other => diag(fallback, other.to_string()),
    }
}

impl ExperimentSpec {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| CliError::Parse {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Every problem found, without running anything.
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut push = |d: Diagnostic| {
            if !out.contains(&d) {
                out.push(d);
            }
        };
        if self.name.trim().is_empty() {
            push(diag("name", "must not be empty"));
        }
        if self.sweep.values.is_empty() {
            push(diag("sweep.values", "at least one sweep value is required"));
        }
        if !self.scenario.snr_db.is_finite() {
            push(diag("scenario.snr_db", "must be finite"));
        }
        for &v in &self.sweep.values {
            match self.scenario_at(v) {
                Ok(scn) => {
                    if let Err(e) = scn.validate_with_schemes(&self.schemes) {
                        push(from_core(e, "scenario"));
                    }
                }
                Err(d) => push(d),
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.diagnostics();
        if d.is_empty() {
            Ok(())
        } else {
            Err(CliError::Invalid(d))
        }
    }

    /// Scenario for one sweep point; dB values are converted here.
    pub fn scenario_at(&self, value: f64) -> std::result::Result<Scenario, Diagnostic> {
        let s = &self.scenario;
        if !value.is_finite() {
            return Err(diag("sweep.values", format!("{value} is not finite")));
        }
        let mut snr_db = s.snr_db;
        let mut gamma = s.detector.gamma;
        let mut sus = s.fusion.sus;
        match self.sweep.axis {
            SweepAxis::SnrDb => snr_db = value,
            SweepAxis::Gamma => gamma = value,
            SweepAxis::Sus => {
                if value < 1.0 || value.fract() != 0.0 {
                    return Err(diag(
                        "sweep.values",
                        format!("{value} is not a valid SU count K"),
                    ));
                }
                sus = value as usize;
            }
        }
        if s.detector.channel_gain == 0.0 || !s.detector.channel_gain.is_finite() {
            return Err(diag(
                "scenario.detector.channel_gain",
                "must be finite and nonzero",
            ));
        }
        let noise = if s.noise.spread_sd == 0.0 {
            NoiseUncertaintyModel::exact(s.noise.nominal_variance)
        } else {
            NoiseUncertaintyModel::from_spread(
                s.noise.nominal_variance,
                s.noise.spread_sd,
                s.noise.sample_count,
                s.noise.confidence,
                s.noise.rebracket_confidence,
            )
        }
        .map_err(|e| from_core(e, "scenario.noise"))?;
        let h2 = s.detector.channel_gain * s.detector.channel_gain;
        let detector = DetectorConfig {
            samples: s.detector.samples,
            time_bandwidth: s
                .detector
                .time_bandwidth
                .unwrap_or(s.detector.samples as f64),
            gamma,
            channel_gain: s.detector.channel_gain,
            signal_variance: s.noise.nominal_variance * db_to_linear(snr_db) / h2,
        };
        let probability = |v: f64, field: &str| {
            Probability::new(v).map_err(|e| diag(format!("scenario.fusion.{field}"), e.to_string()))
        };
        let fusion = FusionConfig::with_convention(
            sus,
            s.fusion.votes,
            s.fusion.vote_convention,
            probability(s.fusion.prior_h0, "prior_h0")?,
            probability(s.fusion.report_error, "report_error")?,
        )
        .map_err(|e| from_core(e, "scenario.fusion"))?;
        let scenario = Scenario {
            detector,
            noise,
            reference: s.reference,
            scheme: self.schemes.first().cloned().unwrap_or(SchemeConfig::Fixed),
            fusion,
            trials: s.trials,
            seed: s.seed,
            truth: s.truth,
            signal: s.signal,
            observation: s.observation,
        };
        Ok(scenario)
    }

    /// Validated `(sweep value, scenario)` pairs.
    pub fn scenarios(&self) -> Result<Vec<(f64, Scenario)>> {
        self.validate()?;
        self.sweep
            .values
            .iter()
            .map(|&v| {
                self.scenario_at(v)
                    .map(|s| (v, s))
                    .map_err(|d| CliError::Invalid(vec![d]))
            })
            .collect()
    }
}
