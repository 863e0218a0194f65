//! Special functions behind the closed-form detection probabilities.
//!
//! The regularized incomplete gamma uses the usual split: power series for
//! `x < a + 1`, modified Lentz continued fraction otherwise. The generalized
//! Marcum Q-function is evaluated as a Poisson mixture of central gamma tails,
//!
//! ```text
//! Q_u(a, b) = Σ_j  e^{-λ} λ^j / j!  ·  Q(u + j, b²/2),      λ = a²/2
//! ```
//!
//! summed outward from the Poisson mode with the three-term recurrence on the
//! gamma tails. When `b²/2` sits below the shifted mean `u + λ` the lower
//! (complementary) sum is accumulated instead so that the small side of the
//! distribution is never obtained by cancellation.
//!
//! Every iterative routine stops after [`MAX_ITERATIONS`] steps and reports
//! [`Error::Convergence`] rather than returning a truncated value.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Iteration budget shared by every series / continued fraction here.
pub const MAX_ITERATIONS: usize = 10_000;

/// Relative size below which a series term is considered negligible.
pub const TERM_TOLERANCE: f64 = 1e-14;

const LENTZ_TINY: f64 = 1e-300;

/// A value in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const ONE: Probability = Probability(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || !(0.0..=1.0).contains(&value) {
            return Err(domain(
                "Probability::new",
                format!("{value} is not in [0, 1]"),
            ));
        }
        Ok(Probability(value))
    }

    /// Clamps rounding overshoot from numerical evaluation. NaN maps to zero.
    pub(crate) fn saturating(value: f64) -> Self {
        if value.is_nan() {
            Probability(0.0)
        } else {
            Probability(value.clamp(0.0, 1.0))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn complement(self) -> Self {
        Probability(1.0 - self.0)
    }
}

impl TryFrom<f64> for Probability {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Probability::new(value)
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

impl std::fmt::Display for Probability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

// Lanczos approximation, g = 10.900511, eleven terms (Godfrey / Pugh).
const LANCZOS_G: f64 = 10.900511;
const LANCZOS_COEFFS: [f64; 11] = [
    2.485_740_891_387_535e-5,
    1.051_423_785_817_219_7,
    -3.456_870_972_220_162_5,
    4.512_277_094_668_948,
    -2.982_852_253_235_766_4,
    1.056_397_115_771_267,
    -1.954_287_731_916_458_7e-1,
    1.709_705_434_044_412e-2,
    -5.719_261_174_043_057e-4,
    4.633_994_733_599_057e-6,
    -2.719_949_084_886_077_2e-9,
];
// ln(2 * sqrt(e / pi))
const LN_2_SQRT_E_OVER_PI: f64 = 0.620_782_237_635_245_2;

/// Natural log of the gamma function for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(domain(
            "log_gamma",
            format!("x = {x} must be finite and > 0"),
        ));
    }
    if x < 0.5 {
        // Γ(x) = Γ(x + 1) / x keeps the Lanczos sum in its accurate range.
        return Ok(lanczos_ln_gamma(x + 1.0) - x.ln());
    }
    Ok(lanczos_ln_gamma(x))
}

fn lanczos_ln_gamma(x: f64) -> f64 {
    let s = LANCZOS_COEFFS
        .iter()
        .enumerate()
        .skip(1)
        .fold(LANCZOS_COEFFS[0], |acc, (i, c)| {
            acc + c / (x + i as f64 - 1.0)
        });
    LN_2_SQRT_E_OVER_PI + s.ln() + (x - 0.5) * ((x - 0.5 + LANCZOS_G) / std::f64::consts::E).ln()
}

fn check_gamma_args(op: &'static str, a: f64, x: f64) -> Result<()> {
    if !a.is_finite() || a <= 0.0 {
        return Err(domain(op, format!("shape {a} must be finite and > 0")));
    }
    if !x.is_finite() || x < 0.0 {
        return Err(domain(op, format!("argument {x} must be finite and >= 0")));
    }
    Ok(())
}

/// Regularized upper incomplete gamma `Γ(a, x) / Γ(a)`.
pub fn reg_upper_gamma(a: f64, x: f64) -> Result<Probability> {
    check_gamma_args("reg_upper_gamma", a, x)?;
    Ok(incomplete_gamma_pair(a, x)?.1)
}

/// Regularized lower incomplete gamma `γ(a, x) / Γ(a)`.
pub fn reg_lower_gamma(a: f64, x: f64) -> Result<Probability> {
    check_gamma_args("reg_lower_gamma", a, x)?;
    Ok(incomplete_gamma_pair(a, x)?.0)
}

/// `(P(a, x), Q(a, x))`, each computed on the side where it does not cancel.
fn incomplete_gamma_pair(a: f64, x: f64) -> Result<(Probability, Probability)> {
    if x == 0.0 {
        return Ok((Probability::ZERO, Probability::ONE));
    }
    let log_prefactor = a * x.ln() - x - log_gamma(a)?;
    if x < a + 1.0 {
        let p = Probability::saturating(log_prefactor.exp() * lower_series(a, x)?);
        Ok((p, p.complement()))
    } else {
        let q = Probability::saturating(log_prefactor.exp() * upper_continued_fraction(a, x)?);
        Ok((q.complement(), q))
    }
}

/// Σ_n x^n / (a (a+1) … (a+n)).
fn lower_series(a: f64, x: f64) -> Result<f64> {
    let mut denom = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..MAX_ITERATIONS {
        denom += 1.0;
        term *= x / denom;
        sum += term;
        if term.abs() <= sum.abs() * TERM_TOLERANCE {
            return Ok(sum);
        }
    }
    Err(Error::Convergence {
        op: "reg_lower_gamma series",
        iterations: MAX_ITERATIONS,
    })
}

/// Modified Lentz evaluation of 1 / (x + 1 - a - 1(1-a)/(x + 3 - a - …)).
fn upper_continued_fraction(a: f64, x: f64) -> Result<f64> {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / LENTZ_TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=MAX_ITERATIONS {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < LENTZ_TINY {
            d = LENTZ_TINY;
        }
        c = b + an / c;
        if c.abs() < LENTZ_TINY {
            c = LENTZ_TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() <= TERM_TOLERANCE {
            return Ok(h);
        }
    }
    Err(Error::Convergence {
        op: "reg_upper_gamma continued fraction",
        iterations: MAX_ITERATIONS,
    })
}

/// Generalized Marcum Q-function `Q_u(a, b)`: the probability that a
/// noncentral chi-square variable with `2u` degrees of freedom and
/// noncentrality `a²` exceeds `b²`.
pub fn marcum_q(order: f64, a: f64, b: f64) -> Result<Probability> {
    if !order.is_finite() || order <= 0.0 {
        return Err(domain(
            "marcum_q",
            format!("order {order} must be finite and > 0"),
        ));
    }
    if !a.is_finite() || a < 0.0 {
        return Err(domain(
            "marcum_q",
            format!("a = {a} must be finite and >= 0"),
        ));
    }
    if !b.is_finite() || b < 0.0 {
        return Err(domain(
            "marcum_q",
            format!("b = {b} must be finite and >= 0"),
        ));
    }
    if b == 0.0 {
        return Ok(Probability::ONE);
    }
    let lambda = 0.5 * a * a;
    let x = 0.5 * b * b;
    if lambda == 0.0 {
        return Ok(incomplete_gamma_pair(order, x)?.1);
    }

    // Below the shifted mean accumulate Σ w_j P(u+j, x) and complement at the end.
    let lower = x <= order + lambda;
    let mode = lambda.floor();
    let ln_lambda = lambda.ln();
    let ln_x = x.ln();

    let w_mode = (mode * ln_lambda - lambda - log_gamma(mode + 1.0)?).exp();
    let (p_mode, q_mode) = incomplete_gamma_pair(order + mode, x)?;
    let f_mode = if lower {
        p_mode.value()
    } else {
        q_mode.value()
    };
    // t_j = x^{u+j} e^{-x} / Γ(u+j+1) = Q(u+j+1, x) - Q(u+j, x)
    let t_mode = ((order + mode) * ln_x - x - log_gamma(order + mode + 1.0)?).exp();

    let mut sum = w_mode * f_mode;
    let mut iterations = 0usize;

    // Forward from the mode.
    let (mut w, mut f, mut t, mut j) = (w_mode, f_mode, t_mode, mode);
    loop {
        f = if lower { f - t } else { f + t }.clamp(0.0, 1.0);
        t *= x / (order + j + 1.0);
        j += 1.0;
        w *= lambda / j;
        sum += w * f;
        // Remaining mass is bounded by the Poisson tail times the largest f still to come.
        let bound = if lower { f } else { 1.0 };
        if w * bound <= TERM_TOLERANCE * sum || w < f64::MIN_POSITIVE {
            break;
        }
        iterations += 1;
        if iterations >= MAX_ITERATIONS {
            return Err(Error::Convergence {
                op: "marcum_q",
                iterations,
            });
        }
    }

    // Backward from the mode.
    let (mut w, mut f, mut t, mut j) = (w_mode, f_mode, t_mode, mode);
    while j > 0.0 {
        t *= (order + j) / x;
        f = if lower { f + t } else { f - t }.clamp(0.0, 1.0);
        w *= j / lambda;
        j -= 1.0;
        sum += w * f;
        let bound = if lower { 1.0 } else { f };
        if w * bound <= TERM_TOLERANCE * sum || w < f64::MIN_POSITIVE {
            break;
        }
        iterations += 1;
        if iterations >= MAX_ITERATIONS {
            return Err(Error::Convergence {
                op: "marcum_q",
                iterations,
            });
        }
    }

    let q = if lower { 1.0 - sum } else { sum };
    Ok(Probability::saturating(q))
}

/// Standard normal CDF, via `Φ(-z) = Q(1/2, z²/2) / 2`.
pub fn std_normal_cdf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z.is_infinite() {
        return if z > 0.0 { 1.0 } else { 0.0 };
    }
    // The shape-1/2 tail converges for every finite argument.
    let tail = 0.5
        * incomplete_gamma_pair(0.5, 0.5 * z * z)
            .map(|(_, q)| q.value())
            .unwrap_or(0.0);
    if z < 0.0 {
        tail
    } else {
        1.0 - tail
    }
}

/// Inverse standard normal CDF for `p ∈ (0, 1)`.
///
/// Acklam's rational approximation followed by Newton polishing against
/// [`std_normal_cdf`].
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(domain(
            "std_normal_quantile",
            format!("p = {p} must lie in (0, 1)"),
        ));
    }
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;

    let mut z = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    for _ in 0..3 {
        let density = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
        if density == 0.0 {
            break;
        }
        z -= (std_normal_cdf(z) - p) / density;
    }
    Ok(z)
}
