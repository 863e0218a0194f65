//! Single-SU energy detector.
//!
//! Two analytic families are exposed. The chi-square family gives
//! `P_f = Γ(u, γ/2)/Γ(u)` and `P_d = Q_u(√(2·SNR), √γ)` for the statistic
//! `T = Σ 2|y|²/σ²`, which is chi-square with `2u` degrees of freedom under
//! H₀ when `u` equals the number of complex samples. The exponential family
//! models a single normalized sample with mean `w` (H₀) or `w(1 + SNR)` (H₁).
//!
//! [`energy_statistic`] returns the per-sample normalized energy
//! `Y = (1/k) Σ |y|² / σ²`, so `T = 2kY` and a chi-square threshold `γ`
//! corresponds to `Y ≥ γ / 2k` (see [`DetectorConfig::per_sample_threshold`]).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Result};
use crate::specfun::{marcum_q, reg_upper_gamma, Probability};

/// Binary hypothesis: H₀ channel idle, H₁ primary user present.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Hypothesis {
    H0,
    H1,
}

impl Hypothesis {
    pub fn is_present(self) -> bool {
        self == Hypothesis::H1
    }

    pub fn flipped(self) -> Self {
        match self {
            Hypothesis::H0 => Hypothesis::H1,
            Hypothesis::H1 => Hypothesis::H0,
        }
    }

    pub(crate) fn index(self) -> usize {
        match self {
            Hypothesis::H0 => 0,
            Hypothesis::H1 => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    /// Complex samples per sensing interval, `k`.
    pub samples: usize,
    /// Time-bandwidth product `u`; equals `samples` for complex sampling.
    pub time_bandwidth: f64,
    /// Threshold on the chi-square scale of the closed forms.
    pub gamma: f64,
    #[serde(default = "unit_gain")]
    pub channel_gain: f64,
    /// Primary signal power `σ_s²` before the channel.
    pub signal_variance: f64,
}

fn unit_gain() -> f64 {
    1.0
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(invalid("samples", "k must be >= 1"));
        }
        if !self.time_bandwidth.is_finite() || self.time_bandwidth <= 0.0 {
            return Err(invalid("time_bandwidth", "u must be > 0"));
        }
        if !self.gamma.is_finite() || self.gamma < 0.0 {
            return Err(invalid("gamma", "threshold must be finite and >= 0"));
        }
        if !self.channel_gain.is_finite() {
            return Err(invalid("channel_gain", "must be finite"));
        }
        if !self.signal_variance.is_finite() || self.signal_variance < 0.0 {
            return Err(invalid("signal_variance", "must be finite and >= 0"));
        }
        Ok(())
    }

    /// Received SNR per sample, `h² σ_s² / σ²`.
    pub fn snr(&self, noise_variance: f64) -> f64 {
        self.channel_gain * self.channel_gain * self.signal_variance / noise_variance
    }

    /// Threshold on `Y` equivalent to `T ≥ γ`.
    pub fn per_sample_threshold(&self) -> f64 {
        self.gamma / (2.0 * self.samples as f64)
    }
}

/// Normalized energy `Y`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct EnergyStatistic(f64);

impl EnergyStatistic {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(domain(
                "EnergyStatistic::new",
                format!("{value} must be finite and >= 0"),
            ));
        }
        Ok(EnergyStatistic(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `Y = (1/k) Σ |y(i)|² / σ²`.
pub fn energy_statistic(samples: &[Complex64], noise_variance: f64) -> Result<EnergyStatistic> {
    if samples.is_empty() {
        return Err(domain("energy_statistic", "no samples"));
    }
    let energy: f64 = samples.iter().map(|y| y.norm_sqr()).sum();
    normalized_energy(energy, samples.len(), noise_variance)
}

/// Normalizes an energy sum over `k` samples by `variance`.
pub fn normalized_energy(energy: f64, k: usize, variance: f64) -> Result<EnergyStatistic> {
    if !variance.is_finite() || variance <= 0.0 {
        return Err(domain(
            "normalized_energy",
            format!("variance {variance} must be > 0"),
        ));
    }
    if k == 0 {
        return Err(domain("normalized_energy", "k must be >= 1"));
    }
    EnergyStatistic::new(energy / (k as f64 * variance))
}

/// H₁ iff `Y ≥ γ`.
pub fn decide(statistic: EnergyStatistic, threshold: f64) -> Hypothesis {
    if statistic.value() >= threshold {
        Hypothesis::H1
    } else {
        Hypothesis::H0
    }
}

fn check_order_threshold(op: &'static str, u: f64, gamma: f64) -> Result<()> {
    if !u.is_finite() || u <= 0.0 {
        return Err(domain(op, format!("u = {u} must be > 0")));
    }
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(domain(op, format!("gamma = {gamma} must be >= 0")));
    }
    Ok(())
}

/// `P_f = Γ(u, γ/2) / Γ(u)`.
pub fn analytic_pf(u: f64, gamma: f64) -> Result<Probability> {
    check_order_threshold("analytic_pf", u, gamma)?;
    reg_upper_gamma(u, 0.5 * gamma)
}

/// `P_d = Q_u(√(2·snr), √γ)`; `snr` is the SNR integrated over the window.
pub fn analytic_pd(u: f64, snr: f64, gamma: f64) -> Result<Probability> {
    check_order_threshold("analytic_pd", u, gamma)?;
    if !snr.is_finite() || snr < 0.0 {
        return Err(domain("analytic_pd", format!("snr = {snr} must be >= 0")));
    }
    marcum_q(u, (2.0 * snr).sqrt(), gamma.sqrt())
}

/// Detection probability when the primary signal is itself complex Gaussian
/// with per-sample SNR `snr`: the H₀ statistic scaled by `1 + snr`.
pub fn analytic_pd_gaussian_signal(u: f64, snr: f64, gamma: f64) -> Result<Probability> {
    check_order_threshold("analytic_pd_gaussian_signal", u, gamma)?;
    if !snr.is_finite() || snr < 0.0 {
        return Err(domain(
            "analytic_pd_gaussian_signal",
            format!("snr = {snr} must be >= 0"),
        ));
    }
    reg_upper_gamma(u, 0.5 * gamma / (1.0 + snr))
}

/// Density of the normalized statistic under the exponential model.
pub fn pdf_normalized(y: f64, w: f64, snr_bar: f64, hypothesis: Hypothesis) -> Result<f64> {
    if !w.is_finite() || w <= 0.0 {
        return Err(domain("pdf_normalized", format!("w = {w} must be > 0")));
    }
    if !snr_bar.is_finite() || snr_bar < 0.0 {
        return Err(domain(
            "pdf_normalized",
            format!("snr_bar = {snr_bar} must be >= 0"),
        ));
    }
    if !y.is_finite() || y < 0.0 {
        return Err(domain("pdf_normalized", format!("y = {y} must be >= 0")));
    }
    let scale = match hypothesis {
        Hypothesis::H0 => w,
        Hypothesis::H1 => w * (1.0 + snr_bar),
    };
    Ok((-y / scale).exp() / scale)
}

/// `(P_f, P_m)` from integrating the exponential-model densities up to `γ`.
pub fn pf_pm_from_pdf(gamma: f64, w: f64, snr_bar: f64) -> Result<(Probability, Probability)> {
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(domain(
            "pf_pm_from_pdf",
            format!("gamma = {gamma} must be >= 0"),
        ));
    }
    if !w.is_finite() || w <= 0.0 {
        return Err(domain("pf_pm_from_pdf", format!("w = {w} must be > 0")));
    }
    if !snr_bar.is_finite() || snr_bar < 0.0 {
        return Err(domain(
            "pf_pm_from_pdf",
            format!("snr_bar = {snr_bar} must be >= 0"),
        ));
    }
    let pf = (-gamma / w).exp();
    let pm = -(-gamma / (w * (1.0 + snr_bar))).exp_m1();
    Ok((Probability::saturating(pf), Probability::saturating(pm)))
}
