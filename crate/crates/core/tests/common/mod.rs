//! Independent numerical oracles shared by the integration tests.
#![allow(dead_code)]

const GAUSS_ORDER: usize = 24;

/// Nodes and weights of the Gauss-Legendre rule on `[-1, 1]`, by Newton
/// iteration on the Legendre polynomial.
pub fn gauss_legendre() -> Vec<(f64, f64)> {
    let n = GAUSS_ORDER;
    (0..n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            loop {
                let (mut p0, mut p1) = (1.0, x);
                for j in 2..=n {
                    let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let step = p1 / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    return (x, 2.0 / ((1.0 - x * x) * dp * dp));
                }
            }
        })
        .collect()
}

/// Composite Gauss-Legendre over `pieces` equal panels of `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, pieces: usize) -> f64 {
    let rule = gauss_legendre();
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|i| {
            let mid = a + (i as f64 + 0.5) * h;
            0.5 * h
                * rule
                    .iter()
                    .map(|&(x, w)| w * f(mid + 0.5 * h * x))
                    .sum::<f64>()
        })
        .sum()
}

/// `Γ(a, x) / Γ(a)` as a ratio of two quadratures of the same unnormalized
/// density, after substituting `t = s²`.
pub fn upper_gamma_quadrature(a: f64, x: f64) -> f64 {
    let peak = (a - 0.5).max(0.5);
    let shift = (2.0 * a - 1.0) * peak.sqrt().ln() - peak;
    let f = |s: f64| {
        if s == 0.0 {
            return 0.0;
        }
        2.0 * ((2.0 * a - 1.0) * s.ln() - s * s - shift).exp()
    };
    let sx = x.sqrt();
    let top = (a + 40.0 * a.sqrt() + 80.0).max(x + 80.0).sqrt();
    let lower = integrate(&f, 0.0, sx, 64);
    let upper = integrate(&f, sx, top, 64);
    upper / (lower + upper)
}

/// `ln n!` by direct summation.
pub fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// `ln I_ν(z)` for integer `ν` from the power series, summed in log space.
pub fn ln_bessel_i(nu: u64, z: f64) -> f64 {
    let half = (0.5 * z).ln();
    let mut terms = Vec::new();
    let mut ln_m_fact = 0.0;
    let mut ln_mnu_fact = ln_factorial(nu);
    let mut best = f64::NEG_INFINITY;
    for m in 0u64.. {
        if m > 0 {
            ln_m_fact += (m as f64).ln();
            ln_mnu_fact += ((m + nu) as f64).ln();
        }
        let t = (2 * m + nu) as f64 * half - ln_m_fact - ln_mnu_fact;
        best = best.max(t);
        terms.push(t);
        if m as f64 > 0.5 * z && t < best - 40.0 {
            break;
        }
    }
    best + terms.iter().map(|t| (t - best).exp()).sum::<f64>().ln()
}

/// Marcum Q by quadrature of the noncentral chi density, integer order.
pub fn marcum_quadrature(order: u64, a: f64, b: f64) -> f64 {
    let density = |x: f64| {
        if x <= 0.0 {
            return 0.0;
        }
        let ln = x.ln() + (order as f64 - 1.0) * (x.ln() - a.ln()) - 0.5 * (x * x + a * a)
            + ln_bessel_i(order - 1, a * x);
        ln.exp()
    };
    let top = a + (2.0 * order as f64).sqrt() + 40.0;
    if b >= top {
        return 0.0;
    }
    let lower = integrate(&density, 0.0, b, 32);
    let upper = integrate(&density, b, top, 64);
    upper / (lower + upper)
}

/// Probability that at least `n` of `probs.len()` independent events occur,
/// by enumerating every outcome.
pub fn enumerate_at_least(probs: &[f64], n: usize) -> f64 {
    let k = probs.len();
    (0u32..1 << k)
        .filter(|mask| mask.count_ones() as usize >= n)
        .map(|mask| {
            (0..k)
                .map(|i| {
                    if mask >> i & 1 == 1 {
                        probs[i]
                    } else {
                        1.0 - probs[i]
                    }
                })
                .product::<f64>()
        })
        .sum()
}
