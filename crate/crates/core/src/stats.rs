//! Empirical distribution functions, Kolmogorov–Smirnov tests and grid
//! sup-norm comparisons.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsReport {
    pub statistic: f64,
    pub n: usize,
    pub p_value: f64,
    pub level: f64,
    pub passed: bool,
}

impl KsReport {
    fn new(statistic: f64, n: usize, effective_n: f64, level: f64) -> Self {
        let p_value = kolmogorov_survival(effective_n.sqrt() * statistic);
        KsReport {
            statistic,
            n,
            p_value,
            level,
            passed: p_value > level,
        }
    }
}

const SERIES_CUTOFF: f64 = 1e-12;

/// `P{K > λ}` for the Kolmogorov distribution.
///
/// Uses `2 Σ (-1)^{k-1} exp(-2k²λ²)` for `λ ≥ 1`; below that the alternating
/// series converges slowly and the equivalent theta-function form
/// `1 - √(2π)/λ Σ exp(-(2k-1)²π²/(8λ²))` is summed instead.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.0 {
        let c = std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let mut sum = 0.0;
        for k in 1..=100 {
            let j = (2 * k - 1) as f64;
            let term = (-j * j * c).exp();
            sum += term;
            if term < SERIES_CUTOFF {
                break;
            }
        }
        return (1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * sum).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < SERIES_CUTOFF {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn sorted(sample: &[f64]) -> Vec<f64> {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    xs
}

/// One-sample KS test of `sample` against `cdf`.
pub fn ks_test<F: Fn(f64) -> f64>(sample: &[f64], cdf: F, level: f64) -> Result<KsReport> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let xs = sorted(sample);
    let n = xs.len() as f64;
    let d = xs.iter().enumerate().fold(0.0f64, |acc, (i, &x)| {
        let f = cdf(x);
        let above = (i + 1) as f64 / n - f;
        let below = f - i as f64 / n;
        acc.max(above).max(below)
    });
    Ok(KsReport::new(d.clamp(0.0, 1.0), xs.len(), n, level))
}

/// Two-sample KS test with effective size `n₁n₂/(n₁+n₂)`.
pub fn ks_two_sample(a: &[f64], b: &[f64], level: f64) -> Result<KsReport> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    let (xs, ys) = (sorted(a), sorted(b));
    let (n1, n2) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < xs.len() && j < ys.len() {
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n1 - j as f64 / n2).abs());
    }
    Ok(KsReport::new(
        d,
        xs.len() + ys.len(),
        n1 * n2 / (n1 + n2),
        level,
    ))
}

/// Right-continuous empirical survival function `x ↦ #{xᵢ > x}/n`.
#[derive(Debug, Clone)]
pub struct EmpiricalSurvival {
    sorted: Vec<f64>,
}

impl EmpiricalSurvival {
    pub fn new(sample: &[f64]) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::EmptySample);
        }
        Ok(EmpiricalSurvival {
            sorted: sorted(sample),
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let at_or_below = self.sorted.partition_point(|&v| v <= x);
        (self.sorted.len() - at_or_below) as f64 / self.sorted.len() as f64
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }
}

/// `max |f - g|` over `points`, with the point attaining it.
pub fn sup_diff<F, G>(f: F, g: G, points: &[f64]) -> (f64, f64)
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    points.iter().fold((0.0, f64::NAN), |(best, at), &x| {
        let d = (f(x) - g(x)).abs();
        if d > best || d.is_nan() {
            (d, x)
        } else {
            (best, at)
        }
    })
}

/// Fraction of `reps` KS tests of `n` uniform draws (against the uniform cdf)
/// rejected at `level`. Under the null this should be close to `level`.
pub fn null_rejection_rate(seed: u64, reps: usize, n: usize, level: f64) -> f64 {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
    let rejected = (0..reps)
        .filter(|_| {
            let xs: Vec<f64> = (0..n).map(|_| rng.random()).collect();
            !ks_test(&xs, |x| x.clamp(0.0, 1.0), level)
                .expect("non-empty sample")
                .passed
        })
        .count();
    rejected as f64 / reps as f64
}
