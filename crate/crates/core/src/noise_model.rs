//! Complex Gaussian noise: generation, covariance-based variance estimation,
//! and the confidence bracket that bounds the unknown noise power.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Result};
use crate::specfun::std_normal_quantile;

/// Smallest variance any bracket endpoint may take.
pub const VARIANCE_FLOOR: f64 = 1e-12;

/// Confidence level whose quantile anchors the re-bracketing ratio.
pub const REFERENCE_CONFIDENCE: f64 = 0.99;

/// Complex samples laid out as `components × snapshots`.
///
/// Each component (row) is one random variable `x_τ`; the snapshots are its
/// independent observations. A single SU's noise reference is one component
/// with many snapshots.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSampleMatrix {
    components: usize,
    snapshots: usize,
    entries: Vec<Complex64>,
}

impl ComplexSampleMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(components: usize, snapshots: usize, entries: Vec<Complex64>) -> Result<Self> {
        if components == 0 || snapshots == 0 {
            return Err(domain(
                "ComplexSampleMatrix::new",
                "dimensions must be at least 1",
            ));
        }
        if entries.len() != components * snapshots {
            return Err(domain(
                "ComplexSampleMatrix::new",
                format!(
                    "{} entries do not fill {components}x{snapshots}",
                    entries.len()
                ),
            ));
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(domain("ComplexSampleMatrix::new", "entries must be finite"));
        }
        Ok(ComplexSampleMatrix {
            components,
            snapshots,
            entries,
        })
    }

    /// A single component observed over `samples.len()` snapshots.
    pub fn from_snapshots(samples: Vec<Complex64>) -> Result<Self> {
        let n = samples.len();
        Self::new(1, n, samples)
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn snapshots(&self) -> usize {
        self.snapshots
    }

    pub fn row(&self, component: usize) -> &[Complex64] {
        let start = component * self.snapshots;
        &self.entries[start..start + self.snapshots]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex64]> {
        self.entries.chunks_exact(self.snapshots)
    }
}

/// Estimates `E(σ²) = E(x x^H) - E(x) E(x^H)` per component and averages
/// over components.
///
/// Each component uses the unbiased two-pass estimator
/// `Σ |x - x̄|² / (n - 1)`.
pub fn estimate_noise_expectation(samples: &ComplexSampleMatrix) -> Result<f64> {
    let n = samples.snapshots();
    if n < 2 {
        return Err(domain(
            "estimate_noise_expectation",
            format!("need at least 2 snapshots per component, got {n}"),
        ));
    }
    let total: f64 = samples
        .rows()
        .map(|row| {
            let mean = row.iter().sum::<Complex64>() / n as f64;
            row.iter().map(|x| (x - mean).norm_sqr()).sum::<f64>() / (n - 1) as f64
        })
        .sum();
    Ok((total / samples.components() as f64).max(0.0))
}

/// Closed interval of admissible noise variances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceBracket {
    low: f64,
    high: f64,
}

impl VarianceBracket {
    pub fn new(low: f64, high: f64) -> Result<Self> {
        if !(low.is_finite() && high.is_finite()) || low <= 0.0 || low > high {
            return Err(domain(
                "VarianceBracket::new",
                format!("[{low}, {high}] must satisfy 0 < low <= high"),
            ));
        }
        Ok(VarianceBracket { low, high })
    }

    pub fn degenerate(variance: f64) -> Result<Self> {
        Self::new(variance, variance)
    }

    pub fn low(&self) -> f64 {
        self.low
    }

    pub fn high(&self) -> f64 {
        self.high
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.low + self.high)
    }

    pub fn width(&self) -> f64 {
        self.high - self.low
    }

    pub fn contains(&self, v: f64) -> bool {
        self.low <= v && v <= self.high
    }
}

/// Two-sided standard-normal quantile `κ` for a confidence level `1 - α`.
pub fn two_sided_quantile(confidence: f64) -> Result<f64> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(domain(
            "two_sided_quantile",
            format!("confidence {confidence} must lie in (0, 1)"),
        ));
    }
    std_normal_quantile(0.5 + 0.5 * confidence)
}

/// Confidence interval `μ̄ ± κ σ / √n` around a mean noise power.
///
/// With `rebracket = Some(target)` the half-width is rescaled by
/// `κ(target) / κ(0.99)`, shrinking a 99 % bracket down to the target level.
/// The lower end is clamped at [`VARIANCE_FLOOR`].
pub fn confidence_bracket(
    sample_mean: f64,
    sample_sd: f64,
    n: usize,
    confidence: f64,
    rebracket: Option<f64>,
) -> Result<VarianceBracket> {
    if n < 2 {
        return Err(domain(
            "confidence_bracket",
            format!("n = {n} must be >= 2"),
        ));
    }
    if !sample_mean.is_finite() || sample_mean <= 0.0 {
        return Err(domain(
            "confidence_bracket",
            format!("sample mean {sample_mean} must be a positive power"),
        ));
    }
    if !sample_sd.is_finite() || sample_sd < 0.0 {
        return Err(domain(
            "confidence_bracket",
            format!("sample sd {sample_sd} must be >= 0"),
        ));
    }
    let kappa = two_sided_quantile(confidence)?;
    let mut half = kappa * sample_sd / (n as f64).sqrt();
    if let Some(target) = rebracket {
        half *= two_sided_quantile(target)? / two_sided_quantile(REFERENCE_CONFIDENCE)?;
    }
    VarianceBracket::new((sample_mean - half).max(VARIANCE_FLOOR), sample_mean + half)
}

/// Nominal noise power together with the interval it is known to lie in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseUncertaintyModel {
    nominal_variance: f64,
    confidence: f64,
    bracket: VarianceBracket,
    sample_count: usize,
}

impl NoiseUncertaintyModel {
    pub fn new(
        nominal_variance: f64,
        confidence: f64,
        bracket: VarianceBracket,
        sample_count: usize,
    ) -> Result<Self> {
        if !(confidence > 0.0 && confidence < 1.0) {
            return Err(invalid(
                "confidence",
                format!("{confidence} must lie in (0, 1)"),
            ));
        }
        if !nominal_variance.is_finite() || nominal_variance <= 0.0 {
            return Err(invalid(
                "nominal_variance",
                format!("{nominal_variance} must be a positive power"),
            ));
        }
        if !bracket.contains(nominal_variance) {
            return Err(invalid(
                "bracket",
                format!(
                    "[{}, {}] does not contain the nominal variance {nominal_variance}",
                    bracket.low(),
                    bracket.high()
                ),
            ));
        }
        Ok(NoiseUncertaintyModel {
            nominal_variance,
            confidence,
            bracket,
            sample_count,
        })
    }

    /// No uncertainty: the bracket collapses onto the nominal variance.
    pub fn exact(nominal_variance: f64) -> Result<Self> {
        if !nominal_variance.is_finite() || nominal_variance <= 0.0 {
            return Err(invalid(
                "nominal_variance",
                format!("{nominal_variance} must be a positive power"),
            ));
        }
        Self::new(
            nominal_variance,
            REFERENCE_CONFIDENCE,
            VarianceBracket::degenerate(nominal_variance)?,
            0,
        )
    }

    /// Bracket built from `n` power measurements with spread `spread_sd`
    /// around the nominal variance.
    pub fn from_spread(
        nominal_variance: f64,
        spread_sd: f64,
        sample_count: usize,
        confidence: f64,
        rebracket: Option<f64>,
    ) -> Result<Self> {
        let bracket = confidence_bracket(
            nominal_variance,
            spread_sd,
            sample_count,
            confidence,
            rebracket,
        )?;
        Self::new(nominal_variance, confidence, bracket, sample_count)
    }

    pub fn nominal_variance(&self) -> f64 {
        self.nominal_variance
    }

    pub fn confidence(&self) -> f64 {
        self.confidence
    }

    pub fn bracket(&self) -> VarianceBracket {
        self.bracket
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    /// Mean of the variance draw, the `w = E(σ²)` of the normalized model.
    pub fn expected_variance(&self) -> f64 {
        self.bracket.midpoint()
    }

    pub fn is_uncertain(&self) -> bool {
        self.bracket.width() > 0.0
    }
}

/// Draws an actual noise variance uniformly over the model's bracket.
pub fn sample_noise_variance<R: Rng + ?Sized>(model: &NoiseUncertaintyModel, rng: &mut R) -> f64 {
    let b = model.bracket();
    if b.width() == 0.0 {
        return b.low();
    }
    b.low() + b.width() * rng.random::<f64>()
}

/// `k` i.i.d. circular complex Gaussian samples of total variance `variance`.
pub fn generate_noise<R: Rng + ?Sized>(
    variance: f64,
    k: usize,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    if !variance.is_finite() || variance <= 0.0 {
        return Err(domain(
            "generate_noise",
            format!("variance {variance} must be > 0"),
        ));
    }
    if k == 0 {
        return Err(domain("generate_noise", "k must be >= 1"));
    }
    let scale = (0.5 * variance).sqrt();
    Ok((0..k)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(scale * re, scale * im)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_xoshiro::Xoshiro256PlusPlus;

    #[test]
    fn constant_entries_have_zero_spread() {
        let m = ComplexSampleMatrix::new(2, 3, vec![Complex64::new(1.5, -2.0); 6]).unwrap();
        assert_eq!(estimate_noise_expectation(&m).unwrap(), 0.0);
    }

    #[test]
    fn single_snapshot_is_rejected() {
        let m = ComplexSampleMatrix::new(3, 1, vec![Complex64::new(1.0, 0.0); 3]).unwrap();
        assert!(estimate_noise_expectation(&m).is_err());
    }

    #[test]
    fn matrix_rejects_bad_shapes() {
        assert!(ComplexSampleMatrix::new(0, 2, vec![]).is_err());
        assert!(ComplexSampleMatrix::new(2, 2, vec![Complex64::new(0.0, 0.0); 3]).is_err());
        assert!(ComplexSampleMatrix::new(1, 2, vec![Complex64::new(f64::NAN, 0.0); 2]).is_err());
    }

    #[test]
    fn kappa_at_reference_levels() {
        let k99 = two_sided_quantile(0.99).unwrap();
        assert_eq!((k99 * 100.0).round() / 100.0, 2.58);
        assert!((two_sided_quantile(0.8).unwrap() - 1.281_551_565_544_6).abs() < 1e-9);
        assert!(two_sided_quantile(1.0).is_err());
        assert!(two_sided_quantile(0.0).is_err());
    }

    #[test]
    fn zero_sd_gives_degenerate_bracket() {
        let b = confidence_bracket(2.0, 0.0, 10, 0.99, None).unwrap();
        assert_eq!((b.low(), b.high()), (2.0, 2.0));
    }

    #[test]
    fn bracket_floor_and_errors() {
        let b = confidence_bracket(0.1, 10.0, 4, 0.99, None).unwrap();
        assert_eq!(b.low(), VARIANCE_FLOOR);
        assert!(confidence_bracket(1.0, 1.0, 1, 0.99, None).is_err());
        assert!(confidence_bracket(1.0, 1.0, 10, 1.5, None).is_err());
        assert!(confidence_bracket(1.0, -1.0, 10, 0.9, None).is_err());
    }

    #[test]
    fn rebracketing_matches_direct_target_level() {
        let direct = confidence_bracket(1.0, 0.5, 100, 0.8, None).unwrap();
        let rescaled = confidence_bracket(1.0, 0.5, 100, 0.99, Some(0.8)).unwrap();
        assert!((direct.low() - rescaled.low()).abs() < 1e-12);
        assert!((direct.high() - rescaled.high()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_model_always_draws_nominal() {
        let model = NoiseUncertaintyModel::exact(2.0).unwrap();
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(3);
        assert!((0..100).all(|_| sample_noise_variance(&model, &mut rng) == 2.0));
    }

    #[test]
    fn model_rejects_bracket_excluding_nominal() {
        let b = VarianceBracket::new(2.0, 3.0).unwrap();
        assert!(NoiseUncertaintyModel::new(1.0, 0.9, b, 10).is_err());
    }

    #[test]
    fn generate_noise_contract() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(9);
        let one = generate_noise(1.0, 1, &mut rng).unwrap();
        assert_eq!(one.len(), 1);
        assert!(one[0].re.is_finite() && one[0].im.is_finite());
        assert!(generate_noise(0.0, 4, &mut rng).is_err());
        assert!(generate_noise(1.0, 0, &mut rng).is_err());

        let a = generate_noise(1.0, 64, &mut Xoshiro256PlusPlus::seed_from_u64(42)).unwrap();
        let b = generate_noise(1.0, 64, &mut Xoshiro256PlusPlus::seed_from_u64(42)).unwrap();
        assert_eq!(a, b);
    }
}
