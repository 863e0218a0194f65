//! Monte Carlo engine: simulate SU observations, apply the threshold
//! schemes, fuse, and estimate empirical rates with Wilson intervals.
//!
//! Every random draw comes from a stream keyed by
//! `(seed, trial, hypothesis, su, purpose)`, so a trial's outcome depends on
//! nothing but its index. Tallies are integer counts merged by addition and
//! are therefore identical for any worker count.
//!
//! Two observation models are available. `Samples` literally generates the
//! complex baseband samples. `Statistic` draws the sufficient statistics from
//! their exact distributions: the energy of `k` noise samples at variance
//! `σ²` is `σ² Gamma(k, 1)`, a constant-envelope signal of total energy `S`
//! adds `σ² Gamma(J, 1)` with `J ~ Poisson(S / σ²)`, and an unbiased variance
//! estimate from `n` samples is `σ² Gamma(n - 1, 1) / (n - 1)`. For small
//! `S / σ²` the Poisson count is drawn by inversion and the signal energy as a
//! running sum of exponentials, which makes every per-trial decision
//! monotone in the SNR when a sweep reuses the same seed.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Exp1, Gamma, Poisson, StandardNormal};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detector::{
    analytic_pd, analytic_pd_gaussian_signal, analytic_pf, pf_pm_from_pdf, DetectorConfig,
    Hypothesis,
};
use crate::error::{invalid, Error, Result};
use crate::fusion::{CooperativeRates, FusionConfig};
use crate::noise_model::{
    estimate_noise_expectation, generate_noise, sample_noise_variance, ComplexSampleMatrix,
    NoiseUncertaintyModel,
};
use crate::specfun::Probability;
use crate::threshold_schemes::{
    decide_enhanced, mean_noise_expectation, Observation, SchemeConfig,
};

/// Trials handled by one unit of parallel work.
pub const BATCH_TRIALS: u64 = 256;

/// Mean signal quanta up to which the coupled (inversion) sampler is used.
pub const COUPLED_SIGNAL_LIMIT: f64 = 64.0;

/// Two-sided 95 % standard-normal quantile.
pub const WILSON_Z: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truth {
    H0,
    H1,
    /// Draw H₀ with probability `prior_h0` each trial.
    Mixed,
    /// Simulate one H₀ and one H₁ observation per trial.
    Paired,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalModel {
    /// Unit-modulus samples with random phase; energy over the window is fixed.
    #[default]
    ConstantEnvelope,
    /// Circular complex Gaussian samples.
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservationModel {
    Samples,
    #[default]
    Statistic,
}

/// Noise-only reference each SU uses to estimate its noise expectation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseReference {
    /// Number of estimates `E(σ²_τ)`; also the weight-window length of the
    /// convex-weighted scheme.
    pub segments: usize,
    pub samples_per_segment: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub detector: DetectorConfig,
    pub noise: NoiseUncertaintyModel,
    pub reference: NoiseReference,
    pub scheme: SchemeConfig,
    pub fusion: FusionConfig,
    pub trials: u64,
    pub seed: u64,
    pub truth: Truth,
    #[serde(default)]
    pub signal: SignalModel,
    #[serde(default)]
    pub observation: ObservationModel,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.validate_with_schemes(std::slice::from_ref(&self.scheme))
    }

    /// Validates the scenario for a run that evaluates `schemes` instead of
    /// its own scheme.
    pub fn validate_with_schemes(&self, schemes: &[SchemeConfig]) -> Result<()> {
        self.detector.validate()?;
        self.fusion.validate()?;
        if self.trials == 0 {
            return Err(invalid("trials", "must be >= 1"));
        }
        if self.reference.segments == 0 {
            return Err(invalid("reference.segments", "must be >= 1"));
        }
        if self.reference.samples_per_segment < 2 {
            return Err(invalid("reference.samples_per_segment", "must be >= 2"));
        }
        if schemes.is_empty() {
            return Err(invalid("schemes", "at least one scheme is required"));
        }
        for scheme in schemes {
            scheme.validate()?;
            if let SchemeConfig::GammaDoublePrime { weights, .. } = scheme {
                if weights.len() != self.reference.segments {
                    return Err(invalid(
                        "weights",
                        format!(
                            "{} weights for {} reference segments",
                            weights.len(),
                            self.reference.segments
                        ),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Per-sample SNR at the nominal noise variance.
    pub fn snr(&self) -> f64 {
        self.detector.snr(self.noise.nominal_variance())
    }
}

mod purpose {
    pub const ENVIRONMENT: u64 = 1;
    pub const SIGNAL: u64 = 2;
    pub const REPORT: u64 = 3;
    pub const TRUTH: u64 = 4;
    pub const PRIMARY: u64 = 5;
}

const COMMON: u64 = u64::MAX;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn stream(seed: u64, trial: u64, hypothesis: u64, su: u64, purpose: u64) -> Xoshiro256PlusPlus {
    let key = [trial, hypothesis, su, purpose]
        .into_iter()
        .fold(splitmix(seed), |h, v| splitmix(h ^ splitmix(v)));
    Xoshiro256PlusPlus::seed_from_u64(key)
}

/// Smallest `j` with `P(J <= j) >= u` for `J ~ Poisson(mean)`.
fn poisson_quantile(u: f64, mean: f64) -> u64 {
    let cap = (mean + 40.0 * mean.sqrt() + 40.0) as u64;
    let mut j = 0u64;
    let mut pmf = (-mean).exp();
    let mut cdf = pmf;
    while u > cdf && j < cap {
        j += 1;
        pmf *= mean / j as f64;
        cdf += pmf;
    }
    j
}

/// `Gamma(J, 1)` with `J ~ Poisson(mean)`: signal contribution to the
/// normalized energy.
fn signal_quanta<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    if mean <= COUPLED_SIGNAL_LIMIT {
        let j = poisson_quantile(rng.random::<f64>(), mean);
        return (0..j).map(|_| -> f64 { Exp1.sample(rng) }).sum();
    }
    let j: f64 = Poisson::new(mean)
        .expect("finite positive mean")
        .sample(rng);
    if j == 0.0 {
        0.0
    } else {
        Gamma::new(j, 1.0).expect("positive shape").sample(rng)
    }
}

struct Engine<'a> {
    scenario: &'a Scenario,
    schemes: &'a [SchemeConfig],
    noise_energy: Gamma<f64>,
    reference_energy: Gamma<f64>,
    threshold: f64,
}

/// Per-hypothesis scratch; index `[scheme][su]`.
struct Scratch {
    expectations: Vec<f64>,
    primary: Vec<Complex64>,
    decisions: Vec<Vec<Hypothesis>>,
    reported: Vec<Vec<Hypothesis>>,
    steps: Vec<Vec<u8>>,
}

impl<'a> Engine<'a> {
    fn new(scenario: &'a Scenario, schemes: &'a [SchemeConfig]) -> Result<Self> {
        scenario.validate_with_schemes(schemes)?;
        let k = scenario.detector.samples as f64;
        let n = scenario.reference.samples_per_segment as f64;
        Ok(Engine {
            scenario,
            schemes,
            noise_energy: Gamma::new(k, 1.0).map_err(|e| invalid("samples", e.to_string()))?,
            reference_energy: Gamma::new(n - 1.0, 1.0)
                .map_err(|e| invalid("reference.samples_per_segment", e.to_string()))?,
            threshold: scenario.detector.per_sample_threshold(),
        })
    }

    fn scratch(&self) -> Scratch {
        let sus = self.scenario.fusion.sus;
        let s = self.schemes.len();
        Scratch {
            expectations: Vec::with_capacity(self.scenario.reference.segments),
            primary: Vec::new(),
            decisions: vec![vec![Hypothesis::H0; sus]; s],
            reported: vec![vec![Hypothesis::H0; sus]; s],
            steps: vec![vec![0; sus]; s],
        }
    }

    fn hypotheses(&self, trial: u64) -> Vec<Hypothesis> {
        match self.scenario.truth {
            Truth::H0 => vec![Hypothesis::H0],
            Truth::H1 => vec![Hypothesis::H1],
            Truth::Paired => vec![Hypothesis::H0, Hypothesis::H1],
            Truth::Mixed => {
                let mut rng = stream(self.scenario.seed, trial, COMMON, COMMON, purpose::TRUTH);
                if rng.random::<f64>() < self.scenario.fusion.prior_h0.value() {
                    vec![Hypothesis::H0]
                } else {
                    vec![Hypothesis::H1]
                }
            }
        }
    }

    fn received_signal_power(&self) -> f64 {
        let d = &self.scenario.detector;
        d.channel_gain * d.channel_gain * d.signal_variance
    }

    /// Fills `scratch` with every scheme's per-SU decisions for one
    /// realization of `hypothesis`.
    fn simulate(&self, trial: u64, hypothesis: Hypothesis, scratch: &mut Scratch) -> Result<()> {
        let scn = self.scenario;
        let seed = scn.seed;
        let hyp = hypothesis.index() as u64;
        let k = scn.detector.samples;
        let power = if hypothesis.is_present() {
            self.received_signal_power()
        } else {
            0.0
        };

        // Primary-user signal shared by all SUs in this realization.
        let mut primary = stream(seed, trial, hyp, COMMON, purpose::PRIMARY);
        let signal_energy = match scn.observation {
            ObservationModel::Statistic => match scn.signal {
                SignalModel::ConstantEnvelope => power * k as f64,
                SignalModel::Gaussian if power > 0.0 => {
                    power * self.noise_energy.sample(&mut primary)
                }
                SignalModel::Gaussian => 0.0,
            },
            ObservationModel::Samples => {
                scratch.primary.clear();
                if power > 0.0 {
                    let d = &scn.detector;
                    let amplitude = d.signal_variance.sqrt();
                    for _ in 0..k {
                        let s = match scn.signal {
                            SignalModel::ConstantEnvelope => {
                                let phase = std::f64::consts::TAU * primary.random::<f64>();
                                Complex64::from_polar(amplitude, phase)
                            }
                            SignalModel::Gaussian => {
                                let re: f64 = StandardNormal.sample(&mut primary);
                                let im: f64 = StandardNormal.sample(&mut primary);
                                Complex64::new(re, im) * (0.5 * d.signal_variance).sqrt()
                            }
                        };
                        scratch.primary.push(s * d.channel_gain);
                    }
                }
                0.0
            }
        };

        let nominal = scn.noise.nominal_variance();
        let bracket = scn.noise.bracket();
        let q = scn.fusion.report_error.value();
        for su in 0..scn.fusion.sus {
            let su_key = su as u64;
            let mut env = stream(seed, trial, hyp, su_key, purpose::ENVIRONMENT);
            let variance = sample_noise_variance(&scn.noise, &mut env);

            scratch.expectations.clear();
            let energy = match scn.observation {
                ObservationModel::Statistic => {
                    let dof = (scn.reference.samples_per_segment - 1) as f64;
                    for _ in 0..scn.reference.segments {
                        let e = variance * self.reference_energy.sample(&mut env) / dof;
                        scratch.expectations.push(e);
                    }
                    let noise_part = self.noise_energy.sample(&mut env);
                    let signal_part = if signal_energy > 0.0 {
                        let mut sig = stream(seed, trial, hyp, su_key, purpose::SIGNAL);
                        signal_quanta(signal_energy / variance, &mut sig)
                    } else {
                        0.0
                    };
                    variance * (noise_part + signal_part)
                }
                ObservationModel::Samples => {
                    for _ in 0..scn.reference.segments {
                        let reference =
                            generate_noise(variance, scn.reference.samples_per_segment, &mut env)?;
                        scratch.expectations.push(estimate_noise_expectation(
                            &ComplexSampleMatrix::from_snapshots(reference)?,
                        )?);
                    }
                    let noise = generate_noise(variance, k, &mut env)?;
                    if scratch.primary.is_empty() {
                        noise.iter().map(|n| n.norm_sqr()).sum()
                    } else {
                        noise
                            .iter()
                            .zip(&scratch.primary)
                            .map(|(n, s)| (n + s).norm_sqr())
                            .sum()
                    }
                }
            };

            let expected = mean_noise_expectation(&scratch.expectations)?;
            let energies = [energy];
            let obs = Observation {
                energies: &energies,
                samples: k,
                threshold: self.threshold,
                nominal_variance: nominal,
                bracket: Some(bracket),
                expected_variance: Some(expected),
                noise_expectations: Some(&scratch.expectations),
            };
            let flip = {
                let mut report = stream(seed, trial, hyp, su_key, purpose::REPORT);
                report.random::<f64>() < q
            };
            for (s, scheme) in self.schemes.iter().enumerate() {
                let d = decide_enhanced(scheme, &obs)?;
                scratch.decisions[s][su] = d.decision;
                scratch.reported[s][su] = if flip {
                    d.decision.flipped()
                } else {
                    d.decision
                };
                scratch.steps[s][su] = d.steps;
            }
        }
        Ok(())
    }

    fn fused(&self, reported: &[Hypothesis]) -> Hypothesis {
        let ones = reported.iter().filter(|d| d.is_present()).count();
        if ones >= self.scenario.fusion.votes {
            Hypothesis::H1
        } else {
            Hypothesis::H0
        }
    }

    fn tally_batch(&self, batch: u64) -> Result<Vec<SchemeTally>> {
        let mut tallies = vec![SchemeTally::default(); self.schemes.len()];
        let mut scratch = self.scratch();
        let start = batch * BATCH_TRIALS;
        let end = (start + BATCH_TRIALS).min(self.scenario.trials);
        for trial in start..end {
            for hypothesis in self.hypotheses(trial) {
                self.simulate(trial, hypothesis, &mut scratch)?;
                let h = hypothesis.index();
                for (s, tally) in tallies.iter_mut().enumerate() {
                    let positives = scratch.decisions[s]
                        .iter()
                        .filter(|d| d.is_present())
                        .count();
                    tally.su_trials[h] += scratch.decisions[s].len() as u64;
                    tally.su_positive[h] += positives as u64;
                    tally.steps += scratch.steps[s].iter().map(|&x| x as u64).sum::<u64>();
                    tally.fused_trials[h] += 1;
                    if self.fused(&scratch.reported[s]).is_present() {
                        tally.fused_positive[h] += 1;
                    }
                }
            }
        }
        Ok(tallies)
    }
}

/// Integer counts accumulated over trials for one scheme; index 0 is H₀,
/// index 1 is H₁.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeTally {
    pub su_trials: [u64; 2],
    pub su_positive: [u64; 2],
    pub fused_trials: [u64; 2],
    pub fused_positive: [u64; 2],
    pub steps: u64,
}

impl SchemeTally {
    pub fn merge(&mut self, other: &SchemeTally) {
        for h in 0..2 {
            self.su_trials[h] += other.su_trials[h];
            self.su_positive[h] += other.su_positive[h];
            self.fused_trials[h] += other.fused_trials[h];
            self.fused_positive[h] += other.fused_positive[h];
        }
        self.steps += other.steps;
    }

    pub fn decisions(&self) -> u64 {
        self.su_trials[0] + self.su_trials[1]
    }
}

/// Everything one simulated hypothesis produced for the scenario's scheme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialOutcome {
    pub truth: Hypothesis,
    pub su_decisions: Vec<Hypothesis>,
    pub reported: Vec<Hypothesis>,
    pub fused: Hypothesis,
    pub steps: Vec<u8>,
}

/// Runs trial `trial_index`; yields two outcomes in [`Truth::Paired`] mode
/// and one otherwise.
pub fn run_trial(scenario: &Scenario, trial_index: u64) -> Result<Vec<TrialOutcome>> {
    let schemes = std::slice::from_ref(&scenario.scheme);
    let engine = Engine::new(scenario, schemes)?;
    let mut scratch = engine.scratch();
    engine
        .hypotheses(trial_index)
        .into_iter()
        .map(|truth| {
            engine.simulate(trial_index, truth, &mut scratch)?;
            Ok(TrialOutcome {
                truth,
                su_decisions: scratch.decisions[0].clone(),
                reported: scratch.reported[0].clone(),
                fused: engine.fused(&scratch.reported[0]),
                steps: scratch.steps[0].clone(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

/// Raw counts for each scheme, evaluated on shared observations.
pub fn tally_schemes(
    scenario: &Scenario,
    schemes: &[SchemeConfig],
    options: &RunOptions,
) -> Result<Vec<SchemeTally>> {
    let engine = Engine::new(scenario, schemes)?;
    let batches = scenario.trials.div_ceil(BATCH_TRIALS);
    let empty = || vec![SchemeTally::default(); schemes.len()];
    let work = || {
        (0..batches)
            .into_par_iter()
            .map(|b| engine.tally_batch(b))
            .try_reduce(empty, |mut acc, part| {
                for (a, p) in acc.iter_mut().zip(&part) {
                    a.merge(p);
                }
                Ok(acc)
            })
    };
    match options.workers {
        None => work(),
        Some(0) => Err(invalid("workers", "must be >= 1")),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| invalid("workers", e.to_string()))?
            .install(work),
    }
}

/// A proportion with its Wilson 95 % interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub successes: u64,
    pub trials: u64,
    pub point: f64,
    pub low: f64,
    pub high: f64,
}

impl RateEstimate {
    /// `None` when no trials observed the event's condition.
    pub fn wilson(successes: u64, trials: u64) -> Option<Self> {
        if trials == 0 {
            return None;
        }
        let n = trials as f64;
        let p = successes as f64 / n;
        let z2 = WILSON_Z * WILSON_Z;
        let denom = 1.0 + z2 / n;
        let center = (p + z2 / (2.0 * n)) / denom;
        let half = WILSON_Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
        Some(RateEstimate {
            successes,
            trials,
            point: p,
            low: (center - half).clamp(0.0, p),
            high: (center + half).clamp(p, 1.0),
        })
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.high - self.low)
    }

    pub fn contains(&self, v: f64) -> bool {
        self.low <= v && v <= self.high
    }
}

/// Total error rate with an interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimate {
    pub point: f64,
    pub low: f64,
    pub high: f64,
}

/// Closed-form counterparts at the nominal noise variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticRates {
    pub pd: Probability,
    pub pf: Probability,
    pub cooperative: CooperativeRates,
}

/// Counterparts under the single-sample exponential model with `w = E(σ²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialRates {
    pub w: f64,
    pub pf: Probability,
    pub pm: Probability,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioEstimate {
    pub scheme: SchemeConfig,
    pub pd: Option<RateEstimate>,
    pub pf: Option<RateEstimate>,
    pub qf: Option<RateEstimate>,
    /// Missed detections at the fusion center.
    pub qm: Option<RateEstimate>,
    pub qe: Option<ErrorEstimate>,
    pub analytic: AnalyticRates,
    pub exponential: ExponentialRates,
    pub trials: u64,
    pub seed: u64,
    pub steps_mean: f64,
    pub tally: SchemeTally,
}

pub fn analytic_rates(scenario: &Scenario) -> Result<AnalyticRates> {
    let d = &scenario.detector;
    let snr = scenario.snr();
    let pf = analytic_pf(d.time_bandwidth, d.gamma)?;
    let pd = match scenario.signal {
        SignalModel::ConstantEnvelope => {
            analytic_pd(d.time_bandwidth, d.samples as f64 * snr, d.gamma)?
        }
        SignalModel::Gaussian => analytic_pd_gaussian_signal(d.time_bandwidth, snr, d.gamma)?,
    };
    Ok(AnalyticRates {
        pd,
        pf,
        cooperative: CooperativeRates::for_rule(&scenario.fusion, pf, pd)?,
    })
}

pub fn exponential_rates(scenario: &Scenario) -> Result<ExponentialRates> {
    let w = scenario.noise.expected_variance();
    let (pf, pm) = pf_pm_from_pdf(scenario.detector.gamma, w, scenario.snr())?;
    Ok(ExponentialRates { w, pf, pm })
}

fn summarize(
    scenario: &Scenario,
    scheme: &SchemeConfig,
    tally: SchemeTally,
    analytic: AnalyticRates,
    exponential: ExponentialRates,
) -> ScenarioEstimate {
    let pf = RateEstimate::wilson(tally.su_positive[0], tally.su_trials[0]);
    let pd = RateEstimate::wilson(tally.su_positive[1], tally.su_trials[1]);
    let qf = RateEstimate::wilson(tally.fused_positive[0], tally.fused_trials[0]);
    let qm = RateEstimate::wilson(
        tally.fused_trials[1] - tally.fused_positive[1],
        tally.fused_trials[1],
    );
    let alpha = scenario.fusion.prior_h0.value();
    let qe = match (scenario.truth, qf, qm) {
        (Truth::Mixed, _, _) => {
            let errors = tally.fused_positive[0] + tally.fused_trials[1] - tally.fused_positive[1];
            RateEstimate::wilson(errors, tally.fused_trials[0] + tally.fused_trials[1]).map(|r| {
                ErrorEstimate {
                    point: r.point,
                    low: r.low,
                    high: r.high,
                }
            })
        }
        (_, Some(f), Some(m)) => Some(ErrorEstimate {
            point: alpha * f.point + (1.0 - alpha) * m.point,
            low: alpha * f.low + (1.0 - alpha) * m.low,
            high: alpha * f.high + (1.0 - alpha) * m.high,
        }),
        _ => None,
    };
    let decisions = tally.decisions();
    let steps_mean = if decisions == 0 {
        0.0
    } else {
        tally.steps as f64 / decisions as f64
    };
    ScenarioEstimate {
        scheme: scheme.clone(),
        pd,
        pf,
        qf,
        qm,
        qe,
        analytic,
        exponential,
        trials: scenario.trials,
        seed: scenario.seed,
        steps_mean,
        tally,
    }
}

/// Estimates every scheme on the same simulated observations.
pub fn estimate_schemes(
    scenario: &Scenario,
    schemes: &[SchemeConfig],
    options: &RunOptions,
) -> Result<Vec<ScenarioEstimate>> {
    scenario.validate_with_schemes(schemes)?;
    let analytic = analytic_rates(scenario)?;
    let exponential = exponential_rates(scenario)?;
    let tallies = tally_schemes(scenario, schemes, options)?;
    Ok(schemes
        .iter()
        .zip(tallies)
        .map(|(scheme, tally)| summarize(scenario, scheme, tally, analytic, exponential))
        .collect())
}

/// Estimates the scenario's own scheme.
pub fn estimate(scenario: &Scenario) -> Result<ScenarioEstimate> {
    estimate_with(scenario, &RunOptions::default())
}

pub fn estimate_with(scenario: &Scenario, options: &RunOptions) -> Result<ScenarioEstimate> {
    estimate_schemes(scenario, std::slice::from_ref(&scenario.scheme), options)?
        .pop()
        .ok_or(Error::MissingContext("scheme"))
}
