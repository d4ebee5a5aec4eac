//! Random sample sizes: probability generating functions, random-size
//! minima and N-min semi-stability.

use rand::Rng;
use rand_distr::{Distribution, Gamma, Open01, Poisson};
use serde::{Deserialize, Serialize};

use crate::distributions::MarginalLaw;
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::report::{CheckEntry, CheckReport};

/// Count laws for the sample size `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PgfParams", into = "PgfParams")]
pub enum Pgf {
    /// `ps/(1-(1-p)s)` on {1, 2, …}.
    GeometricI1 { p: f64 },
    /// `p/(1-(1-p)s)` on {0, 1, …}.
    GeometricI0 { p: f64 },
    /// `s^k`.
    Degenerate { k: u32 },
    /// Harris(1, a, k): `s/(a-(a-1)s^k)^{1/k}`.
    Harris { a: f64, k: u32 },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum PgfParams {
    GeometricI1 { p: f64 },
    GeometricI0 { p: f64 },
    Degenerate { k: u32 },
    Harris { a: f64, k: u32 },
}

impl TryFrom<PgfParams> for Pgf {
    type Error = Error;

    fn try_from(v: PgfParams) -> Result<Self> {
        let q = match v {
            PgfParams::GeometricI1 { p } => Pgf::GeometricI1 { p },
            PgfParams::GeometricI0 { p } => Pgf::GeometricI0 { p },
            PgfParams::Degenerate { k } => Pgf::Degenerate { k },
            PgfParams::Harris { a, k } => Pgf::Harris { a, k },
        };
        q.validate()?;
        Ok(q)
    }
}

impl From<Pgf> for PgfParams {
    fn from(q: Pgf) -> Self {
        match q {
            Pgf::GeometricI1 { p } => PgfParams::GeometricI1 { p },
            Pgf::GeometricI0 { p } => PgfParams::GeometricI0 { p },
            Pgf::Degenerate { k } => PgfParams::Degenerate { k },
            Pgf::Harris { a, k } => PgfParams::Harris { a, k },
        }
    }
}

impl Pgf {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Pgf::GeometricI1 { p } | Pgf::GeometricI0 { p } => {
                if !(p > 0.0 && p < 1.0) {
                    return Err(Error::invalid("pgf.p", p, "must lie in (0, 1)"));
                }
            }
            Pgf::Degenerate { k } => check_k(k)?,
            Pgf::Harris { a, k } => {
                check_k(k)?;
                if !(a > 1.0 && a.is_finite()) {
                    return Err(Error::invalid(
                        "pgf.a",
                        a,
                        "must be finite and greater than 1",
                    ));
                }
            }
        }
        Ok(())
    }

    /// Smallest value `N` can take.
    pub fn support_start(&self) -> u32 {
        match *self {
            Pgf::GeometricI0 { .. } => 0,
            Pgf::GeometricI1 { .. } | Pgf::Harris { .. } => 1,
            Pgf::Degenerate { k } => k,
        }
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Domain {
                what: "pgf",
                value: s,
            });
        }
        Ok(self.eval_unchecked(s))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, s: f64) -> f64 {
        match *self {
            Pgf::GeometricI1 { p } => p * s / (1.0 - (1.0 - p) * s),
            Pgf::GeometricI0 { p } => p / (1.0 - (1.0 - p) * s),
            Pgf::Degenerate { k } => s.powi(k as i32),
            Pgf::Harris { a, k } => s * harris_tail(a, k, s),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match *self {
            Pgf::GeometricI1 { p } => 1 + geometric_failures(p, rng),
            Pgf::GeometricI0 { p } => geometric_failures(p, rng),
            Pgf::Degenerate { k } => k as u64,
            Pgf::Harris { a, k } => 1 + k as u64 * negative_binomial(1.0 / k as f64, a - 1.0, rng),
        }
    }

    /// `Q(s) = s^n P(s)` with `n` the support start.
    ///
    /// A law already starting at 0 is returned unchanged with `n = 0`.
    pub fn shift_factor(&self) -> (u32, ShiftedPgf) {
        match *self {
            Pgf::GeometricI1 { p } => (1, ShiftedPgf::Pgf(Pgf::GeometricI0 { p })),
            Pgf::GeometricI0 { .. } => (0, ShiftedPgf::Pgf(*self)),
            Pgf::Degenerate { k } => (k, ShiftedPgf::One),
            Pgf::Harris { a, k } => (1, ShiftedPgf::HarrisTail { a, k }),
        }
    }
}

fn check_k(k: u32) -> Result<()> {
    if k == 0 || k > i32::MAX as u32 {
        return Err(Error::invalid(
            "pgf.k",
            k as f64,
            "must be a positive integer",
        ));
    }
    Ok(())
}

/// `(a - (a-1)s^k)^{-1/k}`
#[inline]
fn harris_tail(a: f64, k: u32, s: f64) -> f64 {
    (a - (a - 1.0) * s.powi(k as i32)).powf(-1.0 / k as f64)
}

/// Failures before the first success, by inversion: `⌊ln U / ln(1-p)⌋`.
fn geometric_failures<R: Rng + ?Sized>(p: f64, rng: &mut R) -> u64 {
    let u: f64 = rng.sample(Open01);
    (u.ln() / (-p).ln_1p()).floor() as u64
}

/// Negative binomial as a gamma–Poisson mixture: `Poisson(Λ)`,
/// `Λ ~ Gamma(shape, scale)`.
fn negative_binomial<R: Rng + ?Sized>(shape: f64, scale: f64, rng: &mut R) -> u64 {
    let lambda = Gamma::new(shape, scale)
        .expect("shape and scale are positive")
        .sample(rng);
    if !(lambda > 0.0) {
        return 0;
    }
    match Poisson::new(lambda) {
        Ok(pois) => pois.sample(rng) as u64,
        // Beyond the sampler's range the count is its mean to within noise
        // far below one part in 10^9.
        Err(_) => lambda.round() as u64,
    }
}

/// The cofactor `P` in `Q(s) = s^n P(s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShiftedPgf {
    Pgf(Pgf),
    One,
    /// `(a - (a-1)s^k)^{-1/k}`, the PGF of `k·M` with `M` negative binomial.
    HarrisTail {
        a: f64,
        k: u32,
    },
}

impl ShiftedPgf {
    pub fn eval(&self, s: f64) -> f64 {
        match *self {
            ShiftedPgf::Pgf(q) => q.eval_unchecked(s),
            ShiftedPgf::One => 1.0,
            ShiftedPgf::HarrisTail { a, k } => harris_tail(a, k, s),
        }
    }
}

/// `min(X₁, …, X_N) / c` with `N ~ q` and `Xᵢ ~ d`.
pub fn random_min_sample<R: Rng + ?Sized>(
    q: &Pgf,
    d: &MarginalLaw,
    c: f64,
    rng: &mut R,
) -> Result<f64> {
    if q.support_start() == 0 {
        return Err(Error::Support(
            "the count law can be 0 and the minimum of no variables is undefined".into(),
        ));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid("c", c, "must be positive and finite"));
    }
    let n = q.sample(rng);
    let m = (0..n)
        .map(|_| d.sample_one(rng))
        .fold(f64::INFINITY, f64::min);
    Ok(m / c)
}

pub const NMIN_CHECK: &str = "nmin_semistable";

/// Analytic check of `Q(S(cx)) = S(x)` on `grid`, plus the shift
/// factorization `S(x) = S(cx)^n P(S(cx))` when `N ≥ 1`.
pub fn nmin_semistable_check(
    q: &Pgf,
    d: &MarginalLaw,
    c: f64,
    grid: &GridSpec,
    tol: f64,
) -> CheckReport {
    let (n, tail) = q.shift_factor();
    let mut identity = CheckEntry::new("nmin_identity", tol);
    let mut factor = CheckEntry::new("shift_factorization", tol);
    for x in grid.points() {
        let s = d.survival(x);
        let sc = d.survival(c * x);
        identity.observe((q.eval_unchecked(sc) - s).abs(), x);
        factor.observe((sc.powi(n as i32) * tail.eval(sc) - s).abs(), x);
    }
    let mut report = CheckReport::from_entries(NMIN_CHECK, vec![identity, factor]);
    if n == 0 {
        report = report.with_note("count law starts at 0: no shift factorization");
    }
    report
}
