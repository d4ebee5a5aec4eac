//! Integer-valued laws on {0, 1, 2, …} built from a Laplace transform `m`:
//! `P{X ≥ j} = m(j)`, equivalently `P{X < j} = 1 - m(j)`.
//!
//! For index `α < 1` the survival functions of the continuous laws are
//! themselves Laplace transforms (mixtures of exponentials), so restricting
//! them to the integers gives mixtures of geometric laws.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::Open01;
use serde::Serialize;

use crate::decompose::{law_cofactor, CheckEntry, CheckReport};
use crate::distributions::MarginalLaw;
use crate::error::{Error, Result};
use crate::randsize::Pgf;

/// Upper bound for the galloping search in [`DiscreteFromLt::sample`].
pub const MAX_SEARCH: u64 = 1 << 62;

/// Truncation level for total-variation comparisons: the first `j` with
/// `m(j)` below this is the start of the lumped tail.
pub const TV_TAIL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteFromLt {
    law: MarginalLaw,
}

impl DiscreteFromLt {
    pub fn new(law: MarginalLaw) -> Result<Self> {
        let alpha = law.psi().alpha();
        if alpha >= 1.0 {
            return Err(Error::invalid(
                "psi.alpha",
                alpha,
                "discrete laws need alpha < 1 so that the survival function is a Laplace transform",
            ));
        }
        Ok(DiscreteFromLt { law })
    }

    pub fn law(&self) -> &MarginalLaw {
        &self.law
    }

    /// `m(s)` on the whole half-line.
    #[inline]
    pub fn m(&self, s: f64) -> f64 {
        self.law.survival(s)
    }

    /// `P{X ≥ j}`.
    pub fn tail(&self, j: u64) -> f64 {
        self.m(j as f64)
    }

    pub fn pmf(&self, j: i64) -> Result<f64> {
        if j < 0 {
            return Err(Error::Domain {
                what: "discrete pmf",
                value: j as f64,
            });
        }
        let j = j as f64;
        Ok(self.m(j) - self.m(j + 1.0))
    }

    /// Largest `j` with `m(j) > u`, for `u` uniform on (0, 1).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<u64> {
        let u: f64 = rng.sample(Open01);
        self.quantile(u)
    }

    pub fn quantile(&self, u: f64) -> Result<u64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain {
                what: "discrete quantile",
                value: u,
            });
        }
        // m(lo) > u ≥ m(hi)
        let (mut lo, mut hi) = (0u64, 1u64);
        while self.tail(hi) > u {
            if hi >= MAX_SEARCH {
                return Err(Error::Solver(format!(
                    "tail above {u} beyond j = 2^62; the law is too heavy to sample here"
                )));
            }
            lo = hi;
            hi *= 2;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.tail(mid) > u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }

    /// First `j` with `m(j) < level`.
    pub fn truncation_point(&self, level: f64) -> u64 {
        let (mut lo, mut hi) = (0u64, 1u64);
        while self.tail(hi) >= level && hi < MAX_SEARCH {
            lo = hi;
            hi *= 2;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.tail(mid) >= level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TvReport {
    pub total_variation: f64,
    /// Cells `0..truncation` are compared individually; the rest is lumped.
    pub truncation: u64,
    pub tail_expected: f64,
    pub tail_observed: f64,
    pub n: usize,
}

/// Total variation `½ Σ |p̂_j - p_j|` between the empirical pmf of `sample`
/// and the pmf of `d`, with the tail from the first `j` where `m(j) < TV_TAIL`
/// lumped into one cell.
pub fn total_variation(d: &DiscreteFromLt, sample: &[u64]) -> Result<TvReport> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let big_j = d.truncation_point(TV_TAIL);
    let n = sample.len() as f64;
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    let mut in_tail = 0usize;
    for &v in sample {
        if v >= big_j {
            in_tail += 1;
        } else {
            *counts.entry(v).or_default() += 1;
        }
    }
    // Unobserved cells contribute p_j each; the head has total mass 1 - m(J).
    let mut sum = 1.0 - d.tail(big_j);
    for (&j, &c) in &counts {
        let p = d.pmf(j as i64)?;
        sum += (c as f64 / n - p).abs() - p;
    }
    let tail_expected = d.tail(big_j);
    let tail_observed = in_tail as f64 / n;
    sum += (tail_observed - tail_expected).abs();
    Ok(TvReport {
        total_variation: 0.5 * sum,
        truncation: big_j,
        tail_expected,
        tail_observed,
        n: sample.len(),
    })
}

pub const DISCRETE_MINSSD_CHECK: &str = "discrete_minssd";

/// Min-SSD(b) on the integers: `S₀(j) = m(j)/m(bj)` for `j = 0..=j_max`.
pub fn discrete_minssd_check(
    d: &DiscreteFromLt,
    b: f64,
    j_max: u64,
    tol: f64,
) -> Result<CheckReport> {
    if !(b > 0.0 && b < 1.0) {
        return Err(Error::invalid("b", b, "must lie in (0, 1)"));
    }
    let e = law_cofactor(&d.law, b)?;
    let s0 = |j: u64| if j == 0 { 1.0 } else { e.eval(j as f64) };

    let mut at_zero = CheckEntry::new("value_at_zero", tol);
    at_zero.observe((s0(0) - 1.0).abs(), 0.0);
    let mut mono = CheckEntry::new("non_increasing", tol);
    let mut range = CheckEntry::new("within_unit_interval", tol);
    let mut recon = CheckEntry::new("reconstruction", tol);
    let mut prev = 1.0;
    for j in 0..=j_max {
        let v = s0(j);
        let x = j as f64;
        mono.observe((v - prev).max(0.0), x);
        range.observe((v - 1.0).max(-v).max(0.0), x);
        recon.observe((d.m(x) - d.m(b * x) * v).abs(), x);
        prev = v;
    }
    Ok(
        CheckReport::from_entries(DISCRETE_MINSSD_CHECK, vec![at_zero, mono, range, recon])
            .with_q_inf(s0(j_max))
            .with_note("q_inf is the value at j_max"),
    )
}

/// The innovation factor `m(j)/m(j/ρ)` of an integer-valued min-AR(1) series.
///
/// Only this distributional identity is provided; there is no pathwise
/// integer-valued recursion.
pub fn discrete_innovation_check(
    d: &DiscreteFromLt,
    rho: f64,
    j_max: u64,
    tol: f64,
) -> Result<CheckReport> {
    if !(rho > 1.0 && rho.is_finite()) {
        return Err(Error::invalid(
            "rho",
            rho,
            "must be finite and greater than 1",
        ));
    }
    let mut r = discrete_minssd_check(d, 1.0 / rho, j_max, tol)?;
    r.check = "discrete_innovation".into();
    Ok(r)
}

pub const DISCRETE_NMIN_CHECK: &str = "discrete_nmin";

/// `Q(m(cj)) = m(j)` for `j = 0..=j_max`; on success also the factorization
/// `m(j) = m(cj)^n P(m(cj))`.
pub fn discrete_nmin_check(
    q: &Pgf,
    d: &DiscreteFromLt,
    c: f64,
    j_max: u64,
    tol: f64,
) -> Result<CheckReport> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::invalid("c", c, "must lie in (0, 1)"));
    }
    let mut identity = CheckEntry::new("nmin_identity", tol);
    for j in 0..=j_max {
        let x = j as f64;
        identity.observe((q.eval_unchecked(d.m(c * x)) - d.m(x)).abs(), x);
    }
    let identity = identity.finish();
    let mut entries = vec![identity.clone()];
    if identity.passed {
        let (n, tail) = q.shift_factor();
        let mut factor = CheckEntry::new("shift_factorization", tol);
        for j in 0..=j_max {
            let x = j as f64;
            let s = d.m(c * x);
            factor.observe((s.powi(n as i32) * tail.eval(s) - d.m(x)).abs(), x);
        }
        entries.push(factor);
    }
    Ok(CheckReport::from_entries(DISCRETE_NMIN_CHECK, entries))
}
