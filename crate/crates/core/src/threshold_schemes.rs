//! Enhanced energy-detection schemes under noise uncertainty.
//!
//! * `TwoStep` evaluates the normalized statistic at both ends of the
//!   variance bracket. An interval entirely at or above the threshold decides
//!   H₁, one entirely below decides H₀, and a straddling interval is
//!   re-decided once with the expectation-normalized statistic.
//! * `GammaPrime` normalizes by the estimated noise expectation instead of
//!   the nominal variance.
//! * `GammaDoublePrime` normalizes by the smallest weighted average of a
//!   sequence of noise-expectation estimates, taken over cyclic shifts of the
//!   weight window. With all weights equal to one every shift gives the plain
//!   mean and the scheme coincides with `GammaPrime`.
//!
//! All statistics are on the per-sample scale of
//! [`energy_statistic`](crate::detector::energy_statistic).

use serde::{Deserialize, Serialize};

use crate::detector::{decide, normalized_energy, EnergyStatistic, Hypothesis};
use crate::error::{domain, invalid, Error, Result};
use crate::noise_model::VarianceBracket;

/// Ratio of the default geometric weight sequence.
pub const DEFAULT_WEIGHT_RATIO: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SchemeConfig {
    Fixed,
    TwoStep,
    GammaPrime,
    GammaDoublePrime {
        weights: Vec<f64>,
        #[serde(default = "default_exponent")]
        exponent: u32,
    },
}

fn default_exponent() -> u32 {
    1
}

impl SchemeConfig {
    /// `GammaDoublePrime` with geometric weights `1, ½, ¼, …` and `g = 1`.
    pub fn default_double_prime(len: usize) -> Self {
        SchemeConfig::GammaDoublePrime {
            weights: (0..len)
                .map(|i| DEFAULT_WEIGHT_RATIO.powi(i as i32))
                .collect(),
            exponent: 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SchemeConfig::Fixed => "fixed",
            SchemeConfig::TwoStep => "two_step",
            SchemeConfig::GammaPrime => "gamma_prime",
            SchemeConfig::GammaDoublePrime { .. } => "gamma_double_prime",
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let SchemeConfig::GammaDoublePrime { weights, exponent } = self {
            if weights.is_empty() {
                return Err(invalid("weights", "at least one weight is required"));
            }
            if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
                return Err(invalid("weights", "every weight must be finite and > 0"));
            }
            if *exponent == 0 {
                return Err(invalid("exponent", "g must be >= 1"));
            }
        }
        Ok(())
    }
}

/// `[low, high]` range of the normalized statistic over a variance bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatisticInterval {
    low: f64,
    high: f64,
}

impl StatisticInterval {
    pub fn new(low: f64, high: f64) -> Result<Self> {
        if !(low.is_finite() && high.is_finite()) || low > high {
            return Err(domain(
                "StatisticInterval::new",
                format!("[{low}, {high}] is not an interval"),
            ));
        }
        Ok(StatisticInterval { low, high })
    }

    pub fn low(&self) -> f64 {
        self.low
    }

    pub fn high(&self) -> f64 {
        self.high
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalOutcome {
    H0,
    H1,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalDecision {
    pub outcome: IntervalOutcome,
    pub statistic_low: f64,
    pub statistic_high: f64,
}

fn total_energy(op: &'static str, energies: &[f64]) -> Result<f64> {
    if energies.is_empty() {
        return Err(domain(op, "no energies"));
    }
    if energies.iter().any(|e| !e.is_finite() || *e < 0.0) {
        return Err(domain(op, "energies must be finite and >= 0"));
    }
    Ok(energies.iter().sum())
}

/// Statistic evaluated at the worst-case (`bracket.high`) and best-case
/// (`bracket.low`) noise variance.
pub fn statistic_interval(
    energies: &[f64],
    bracket: &VarianceBracket,
    k: usize,
) -> Result<StatisticInterval> {
    let energy = total_energy("statistic_interval", energies)?;
    let low = normalized_energy(energy, k, bracket.high())?.value();
    let high = normalized_energy(energy, k, bracket.low())?.value();
    StatisticInterval::new(low, high)
}

/// First step of the two-step scheme.
///
/// The boundary `low == γ` resolves to H₁, matching [`decide`].
pub fn two_step_decide(interval: StatisticInterval, gamma: f64) -> IntervalDecision {
    let outcome = if interval.low >= gamma {
        IntervalOutcome::H1
    } else if interval.high < gamma {
        IntervalOutcome::H0
    } else {
        IntervalOutcome::Indeterminate
    };
    IntervalDecision {
        outcome,
        statistic_low: interval.low,
        statistic_high: interval.high,
    }
}

/// Energy normalized by the expected noise variance.
pub fn gamma_prime_statistic(
    energies: &[f64],
    expected_variance: f64,
    k: usize,
) -> Result<EnergyStatistic> {
    let energy = total_energy("gamma_prime_statistic", energies)?;
    normalized_energy(energy, k, expected_variance)
}

/// Plain average of a sequence of noise-expectation estimates.
///
/// Evaluated exactly as [`weighted_noise_expectation`] evaluates a window of
/// unit weights so the two agree bit for bit.
pub fn mean_noise_expectation(expectations: &[f64]) -> Result<f64> {
    check_expectations("mean_noise_expectation", expectations)?;
    let sum: f64 = expectations.iter().sum();
    Ok(sum / expectations.len() as f64)
}

fn check_expectations(op: &'static str, expectations: &[f64]) -> Result<()> {
    if expectations.is_empty() {
        return Err(domain(op, "no noise expectations"));
    }
    if expectations.iter().any(|e| !e.is_finite() || *e <= 0.0) {
        return Err(domain(op, "noise expectations must be finite and > 0"));
    }
    Ok(())
}

/// `min_i Σ_τ μ_{(τ-i) mod L}^g E_τ / Σ_τ μ_{(τ-i) mod L}^g`.
pub fn weighted_noise_expectation(expectations: &[f64], weights: &[f64], g: u32) -> Result<f64> {
    const OP: &str = "weighted_noise_expectation";
    check_expectations(OP, expectations)?;
    if weights.len() != expectations.len() {
        return Err(Error::LengthMismatch {
            op: OP,
            left: weights.len(),
            right: expectations.len(),
        });
    }
    if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
        return Err(domain(OP, "weights must be finite and > 0"));
    }
    if g == 0 {
        return Err(domain(OP, "g must be >= 1"));
    }
    let len = weights.len();
    let powered: Vec<f64> = weights.iter().map(|w| w.powi(g as i32)).collect();
    let mut best = f64::INFINITY;
    for shift in 0..len {
        let mut num = 0.0;
        let mut den = 0.0;
        for (tau, e) in expectations.iter().enumerate() {
            let w = powered[(tau + len - shift) % len];
            num += w * e;
            den += w;
        }
        best = best.min(num / den);
    }
    Ok(best)
}

/// Energy normalized by [`weighted_noise_expectation`].
pub fn gamma_double_prime_statistic(
    energies: &[f64],
    expectations: &[f64],
    weights: &[f64],
    g: u32,
    k: usize,
) -> Result<EnergyStatistic> {
    let energy = total_energy("gamma_double_prime_statistic", energies)?;
    let normalizer = weighted_noise_expectation(expectations, weights, g)?;
    normalized_energy(energy, k, normalizer)
}

/// Inputs available to a single SU when it decides.
#[derive(Debug, Clone, Copy)]
pub struct Observation<'a> {
    /// Energy sums whose total covers `samples` complex samples.
    pub energies: &'a [f64],
    pub samples: usize,
    /// Threshold on the per-sample statistic.
    pub threshold: f64,
    pub nominal_variance: f64,
    pub bracket: Option<VarianceBracket>,
    pub expected_variance: Option<f64>,
    pub noise_expectations: Option<&'a [f64]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnhancedDecision {
    pub decision: Hypothesis,
    /// 1, or 2 when the two-step scheme had to re-decide.
    pub steps: u8,
}

pub fn decide_enhanced(scheme: &SchemeConfig, obs: &Observation<'_>) -> Result<EnhancedDecision> {
    let single = |decision| EnhancedDecision { decision, steps: 1 };
    match scheme {
        SchemeConfig::Fixed => {
            let energy = total_energy("decide_enhanced", obs.energies)?;
            let y = normalized_energy(energy, obs.samples, obs.nominal_variance)?;
            Ok(single(decide(y, obs.threshold)))
        }
        SchemeConfig::GammaPrime => {
            let expected = obs
                .expected_variance
                .ok_or(Error::MissingContext("expected_variance"))?;
            let y = gamma_prime_statistic(obs.energies, expected, obs.samples)?;
            Ok(single(decide(y, obs.threshold)))
        }
        SchemeConfig::GammaDoublePrime { weights, exponent } => {
            let expectations = obs
                .noise_expectations
                .ok_or(Error::MissingContext("noise_expectations"))?;
            let y = gamma_double_prime_statistic(
                obs.energies,
                expectations,
                weights,
                *exponent,
                obs.samples,
            )?;
            Ok(single(decide(y, obs.threshold)))
        }
        SchemeConfig::TwoStep => {
            let bracket = obs.bracket.ok_or(Error::MissingContext("bracket"))?;
            let expected = obs
                .expected_variance
                .ok_or(Error::MissingContext("expected_variance"))?;
            let interval = statistic_interval(obs.energies, &bracket, obs.samples)?;
            match two_step_decide(interval, obs.threshold).outcome {
                IntervalOutcome::H1 => Ok(single(Hypothesis::H1)),
                IntervalOutcome::H0 => Ok(single(Hypothesis::H0)),
                IntervalOutcome::Indeterminate => {
                    let y = gamma_prime_statistic(obs.energies, expected, obs.samples)?;
                    Ok(EnhancedDecision {
                        decision: decide(y, obs.threshold),
                        steps: 2,
                    })
                }
            }
        }
    }
}
