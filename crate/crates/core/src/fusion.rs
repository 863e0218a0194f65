//! Fusion-center logic for hard-decision cooperative sensing.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::detector::Hypothesis;
use crate::error::{domain, invalid, Error, Result};
use crate::specfun::{log_gamma, Probability};

/// Tolerance on the normalization of noise-state weights.
pub const WEIGHT_TOLERANCE: f64 = 1e-9;

/// How a configured vote parameter is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VoteConvention {
    /// The value is the vote threshold `n` itself.
    #[default]
    Threshold,
    /// The value is `N* = K - n`.
    Complement,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FusionConfig {
    /// Number of cooperating SUs, `K`.
    pub sus: usize,
    /// Vote threshold `n`: 1 is OR, `K` is AND.
    pub votes: usize,
    pub prior_h0: Probability,
    pub report_error: Probability,
}

impl FusionConfig {
    /// Resolves `value` under `convention` into a vote threshold and validates.
    pub fn with_convention(
        sus: usize,
        value: usize,
        convention: VoteConvention,
        prior_h0: Probability,
        report_error: Probability,
    ) -> Result<Self> {
        let votes = match convention {
            VoteConvention::Threshold => value,
            VoteConvention::Complement => sus.checked_sub(value).ok_or_else(|| {
                invalid(
                    "votes",
                    format!("N* = {value} exceeds the number of SUs K = {sus}"),
                )
            })?,
        };
        let cfg = FusionConfig {
            sus,
            votes,
            prior_h0,
            report_error,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sus == 0 {
            return Err(invalid("sus", "K must be >= 1"));
        }
        if self.votes == 0 || self.votes > self.sus {
            return Err(invalid(
                "votes",
                format!(
                    "vote threshold n = {} must lie in [1, K = {}]",
                    self.votes, self.sus
                ),
            ));
        }
        if self.report_error.value() > 0.5 {
            return Err(invalid("report_error", "q must lie in [0, 0.5]"));
        }
        Ok(())
    }

    /// `N* = K - n`.
    pub fn n_star(&self) -> usize {
        self.sus - self.votes
    }
}

/// H₁ iff at least `n` of the decisions are H₁.
pub fn vote(decisions: &[Hypothesis], n: usize) -> Result<Hypothesis> {
    if n == 0 || n > decisions.len() {
        return Err(domain(
            "vote",
            format!("threshold {n} outside [1, {}]", decisions.len()),
        ));
    }
    let ones = decisions.iter().filter(|d| d.is_present()).count();
    Ok(if ones >= n {
        Hypothesis::H1
    } else {
        Hypothesis::H0
    })
}

/// Sum of `C(K,l) p^l (1-p)^{K-l}` over `l in range`, terms advanced in log
/// space from the first index.
fn binomial_mass(
    sus: usize,
    range: std::ops::RangeInclusive<usize>,
    ln_p: f64,
    ln_q: f64,
) -> Result<f64> {
    let k = sus as f64;
    let first = *range.start() as f64;
    let mut ln_term = log_gamma(k + 1.0)? - log_gamma(first + 1.0)? - log_gamma(k - first + 1.0)?
        + first * ln_p
        + (k - first) * ln_q;
    let mut sum = 0.0;
    for l in range {
        sum += ln_term.exp();
        let lf = l as f64;
        ln_term += ((k - lf) / (lf + 1.0)).ln() + ln_p - ln_q;
    }
    Ok(sum)
}

/// `Σ_{l=n}^{K} C(K,l) p^l (1-p)^{K-l}`; the smaller side is summed and the
/// larger obtained by complement.
fn binomial_upper_tail(sus: usize, n: usize, p: f64) -> Result<f64> {
    if n == 0 || p == 1.0 {
        return Ok(1.0);
    }
    if n > sus || p == 0.0 {
        return Ok(0.0);
    }
    let (ln_p, ln_q) = (p.ln(), (-p).ln_1p());
    if (n as f64) > sus as f64 * p {
        binomial_mass(sus, n..=sus, ln_p, ln_q)
    } else {
        Ok(1.0 - binomial_mass(sus, 0..=n - 1, ln_p, ln_q)?)
    }
}

fn check_binomial(op: &'static str, sus: usize, n: usize) -> Result<()> {
    if sus == 0 || n == 0 || n > sus {
        return Err(domain(
            op,
            format!("need 1 <= n <= K, got n = {n}, K = {sus}"),
        ));
    }
    Ok(())
}

/// Cooperative false-alarm probability `Q_f`.
pub fn coop_qf(sus: usize, n: usize, pf: Probability) -> Result<Probability> {
    check_binomial("coop_qf", sus, n)?;
    Ok(Probability::saturating(binomial_upper_tail(
        sus,
        n,
        pf.value(),
    )?))
}

/// Cooperative missed-detection probability `Q_m`.
pub fn coop_qm(sus: usize, n: usize, pd: Probability) -> Result<Probability> {
    check_binomial("coop_qm", sus, n)?;
    Ok(Probability::saturating(
        1.0 - binomial_upper_tail(sus, n, pd.value())?,
    ))
}

/// Per-SU rate seen by the fusion center when each report flips with
/// probability `q`.
pub fn reported_probability(p: Probability, q: Probability) -> Probability {
    let (p, q) = (p.value(), q.value());
    Probability::saturating(p * (1.0 - q) + (1.0 - p) * q)
}

/// `Q_e = α Q_f + (1 - α) Q_m`.
pub fn total_error(prior_h0: Probability, qf: Probability, qm: Probability) -> f64 {
    let a = prior_h0.value();
    a * qf.value() + (1.0 - a) * qm.value()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CooperativeRates {
    pub qf: Probability,
    pub qm: Probability,
    pub qe: f64,
}

impl CooperativeRates {
    pub fn new(prior_h0: Probability, qf: Probability, qm: Probability) -> Self {
        CooperativeRates {
            qf,
            qm,
            qe: total_error(prior_h0, qf, qm),
        }
    }

    /// Rates of an n-out-of-K rule over i.i.d. SUs.
    pub fn for_rule(fusion: &FusionConfig, pf: Probability, pd: Probability) -> Result<Self> {
        let q = fusion.report_error;
        let qf = coop_qf(fusion.sus, fusion.votes, reported_probability(pf, q))?;
        let qm = coop_qm(fusion.sus, fusion.votes, reported_probability(pd, q))?;
        Ok(Self::new(fusion.prior_h0, qf, qm))
    }
}

/// One noise condition: its likelihood under each hypothesis and the
/// cooperative rates it induces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseState {
    pub weight_h0: f64,
    pub weight_h1: f64,
    pub qf: Probability,
    pub qm: Probability,
}

/// `Σ_s α P(σ_s²|H₀) Q_f,s + (1 - α) P(σ_s²|H₁) Q_m,s`.
pub fn total_error_over_noise_states(prior_h0: Probability, states: &[NoiseState]) -> Result<f64> {
    if states.is_empty() {
        return Err(domain("total_error_over_noise_states", "no noise states"));
    }
    if states.iter().any(|s| {
        !(s.weight_h0.is_finite() && s.weight_h1.is_finite())
            || s.weight_h0 < 0.0
            || s.weight_h1 < 0.0
    }) {
        return Err(domain(
            "total_error_over_noise_states",
            "weights must be finite and >= 0",
        ));
    }
    let sum_h0: f64 = states.iter().map(|s| s.weight_h0).sum();
    let sum_h1: f64 = states.iter().map(|s| s.weight_h1).sum();
    for (which, sum) in [("H0", sum_h0), ("H1", sum_h1)] {
        if (sum - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(Error::Normalization { which, sum });
        }
    }
    let a = prior_h0.value();
    Ok(states
        .iter()
        .map(|s| a * s.weight_h0 * s.qf.value() + (1.0 - a) * s.weight_h1 * s.qm.value())
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VoteOptimum {
    /// Minimizing vote threshold `n*`.
    pub votes: usize,
    /// The same optimum as `N* = K - n*`.
    pub n_star: usize,
    pub total_error: f64,
}

/// Exhaustive scan of `n ∈ 1..=K`; ties resolve to the smaller `n`.
pub fn optimize_vote_count(
    sus: usize,
    pf: Probability,
    pd: Probability,
    prior_h0: Probability,
) -> Result<VoteOptimum> {
    if sus == 0 {
        return Err(domain("optimize_vote_count", "K must be >= 1"));
    }
    let mut best: Option<(usize, f64)> = None;
    for n in 1..=sus {
        let qe = total_error(prior_h0, coop_qf(sus, n, pf)?, coop_qm(sus, n, pd)?);
        if best.is_none_or(|(_, b)| qe < b) {
            best = Some((n, qe));
        }
    }
    let (votes, total_error) = best.expect("K >= 1 yields a candidate");
    Ok(VoteOptimum {
        votes,
        n_star: sus - votes,
        total_error,
    })
}

/// Flips each reported decision independently with probability `q`.
pub fn apply_reporting_errors<R: Rng + ?Sized>(
    decisions: &[Hypothesis],
    q: Probability,
    rng: &mut R,
) -> Vec<Hypothesis> {
    let q = q.value();
    decisions
        .iter()
        .map(|&d| {
            if rng.random::<f64>() < q {
                d.flipped()
            } else {
                d
            }
        })
        .collect()
}
