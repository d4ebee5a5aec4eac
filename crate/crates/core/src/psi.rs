//! Log-periodically perturbed power functions.
//!
//! Every law in this crate is built from a function `ψ` on `(0, ∞)` with
//! `p·ψ(x) = ψ(p^{1/α}·x)`. The solutions are `x^α` times a function that is
//! periodic in `ln x` with period `ln(1/p)/α`; we use the single harmonic
//!
//! ```text
//! ψ(x) = x^α · (1 + eps·sin(ω·ln x + phase)),   ω = 2πα / ln(1/p)
//! ```
//!
//! so `eps = 0` gives the strictly stable power `x^α`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::CheckEntry;
use crate::roots;

/// Relative bracket width at which [`PsiFunction::inverse`] stops.
pub const INVERSE_RTOL: f64 = 1e-12;
pub const INVERSE_MAX_ITER: usize = 200;

/// Relative residual tolerance for the functional equation.
pub const FUNCTIONAL_EQUATION_TOL: f64 = 1e-12;

/// Angular frequency of the perturbation in `ln x`.
pub fn log_frequency(alpha: f64, p: f64) -> f64 {
    2.0 * PI * alpha / (1.0 / p).ln()
}

/// Largest `|eps|` for which `ψ` stays non-decreasing: `α/√(α² + ω²)`.
pub fn max_perturbation(alpha: f64, p: f64) -> Result<f64> {
    check_alpha_p(alpha, p)?;
    let omega = log_frequency(alpha, p);
    Ok(alpha / alpha.hypot(omega))
}

fn check_alpha_p(alpha: f64, p: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::invalid(
            "alpha",
            alpha,
            "must be positive and finite",
        ));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid("p", p, "must lie in (0, 1)"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PsiParams", into = "PsiParams")]
pub struct PsiFunction {
    alpha: f64,
    p: f64,
    eps: f64,
    phase: f64,
    omega: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PsiParams {
    alpha: f64,
    p: f64,
    #[serde(default)]
    eps: f64,
    #[serde(default)]
    phase: f64,
}

impl TryFrom<PsiParams> for PsiFunction {
    type Error = Error;

    fn try_from(v: PsiParams) -> Result<Self> {
        PsiFunction::with_phase(v.alpha, v.p, v.eps, v.phase)
    }
}

impl From<PsiFunction> for PsiParams {
    fn from(f: PsiFunction) -> Self {
        PsiParams {
            alpha: f.alpha,
            p: f.p,
            eps: f.eps,
            phase: f.phase,
        }
    }
}

impl PsiFunction {
    pub fn new(alpha: f64, p: f64, eps: f64) -> Result<Self> {
        Self::with_phase(alpha, p, eps, 0.0)
    }

    /// The strictly stable case `ψ(x) = x^α`.
    pub fn power(alpha: f64, p: f64) -> Result<Self> {
        Self::new(alpha, p, 0.0)
    }

    pub fn with_phase(alpha: f64, p: f64, eps: f64, phase: f64) -> Result<Self> {
        let bound = max_perturbation(alpha, p)?;
        if !eps.is_finite() || eps.abs() > bound {
            return Err(Error::invalid(
                "eps",
                eps,
                format!("|eps| must not exceed max_perturbation(alpha, p) = {bound}"),
            ));
        }
        Self::build(alpha, p, eps, phase)
    }

    /// Builds `ψ` without the monotonicity bound on `eps`.
    ///
    /// Only [`PsiFunction::validate`] is meaningful on the result; quantiles
    /// of laws built on a non-monotone `ψ` are not.
    pub fn new_unchecked(alpha: f64, p: f64, eps: f64, phase: f64) -> Result<Self> {
        check_alpha_p(alpha, p)?;
        if !(eps.is_finite() && eps.abs() < 1.0) {
            return Err(Error::invalid("eps", eps, "|eps| must be below 1"));
        }
        Self::build(alpha, p, eps, phase)
    }

    fn build(alpha: f64, p: f64, eps: f64, phase: f64) -> Result<Self> {
        if !phase.is_finite() {
            return Err(Error::invalid("phase", phase, "must be finite"));
        }
        Ok(PsiFunction {
            alpha,
            p,
            eps,
            phase: phase.rem_euclid(2.0 * PI),
            omega: log_frequency(alpha, p),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `c = p^{1/α}`, the scale in `p·ψ(x) = ψ(c·x)`.
    pub fn scale(&self) -> f64 {
        self.p.powf(1.0 / self.alpha)
    }

    /// Multiplicative period of the perturbation, `p^{-1/α}`.
    pub fn period(&self) -> f64 {
        1.0 / self.scale()
    }

    pub fn max_perturbation(&self) -> f64 {
        self.alpha / self.alpha.hypot(self.omega)
    }

    pub fn is_power(&self) -> bool {
        self.eps == 0.0
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) || x.is_infinite() {
            return Err(Error::Domain {
                what: "psi",
                value: x,
            });
        }
        Ok(self.eval_unchecked(x))
    }

    /// `ψ(x)` for `x > 0`, without the domain check.
    #[inline]
    pub(crate) fn eval_unchecked(&self, x: f64) -> f64 {
        if self.eps == 0.0 {
            return x.powf(self.alpha);
        }
        let lx = x.ln();
        (self.alpha * lx).exp() * (1.0 + self.eps * (self.omega * lx + self.phase).sin())
    }

    /// `ψ'(x) / x^{α-1}`; its sign is the sign of the slope.
    fn slope_factor(&self, x: f64) -> f64 {
        let theta = self.omega * x.ln() + self.phase;
        self.alpha * (1.0 + self.eps * theta.sin()) + self.eps * self.omega * theta.cos()
    }

    /// The `x` with `ψ(x) = y`; `y = 0` maps to the limit point `0`.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0) || y.is_infinite() {
            return Err(Error::Domain {
                what: "psi inverse",
                value: y,
            });
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        let root = y.powf(1.0 / self.alpha);
        if self.eps == 0.0 {
            return Ok(root);
        }
        // x^α(1 - |eps|) ≤ ψ(x) ≤ x^α(1 + |eps|)
        let e = self.eps.abs();
        let lo = root * (1.0 + e).powf(-1.0 / self.alpha);
        let hi = root * (1.0 - e).powf(-1.0 / self.alpha);
        let ly = y.ln();
        roots::solve_increasing_in(
            |x| self.eval_unchecked(x).ln() - ly,
            lo,
            hi,
            INVERSE_RTOL,
            INVERSE_MAX_ITER,
        )
    }

    /// Grid checks of the functional equation, monotonicity and the `eps` bound.
    pub fn validate(&self, grid_size: usize) -> ValidationReport {
        let grid_size = grid_size.max(2);
        let period = self.period();
        // At least 1e-6..1e6 and never fewer than three periods.
        let lo = 1e-6f64.min(period.powf(-1.5));
        let hi = 1e6f64.max(period.powf(1.5));
        let (a, b) = (lo.ln(), hi.ln());
        let xs: Vec<f64> = (0..grid_size)
            .map(|i| (a + (b - a) * i as f64 / (grid_size - 1) as f64).exp())
            .collect();
        let c = self.scale();

        let mut fe = CheckEntry::new("functional_equation", FUNCTIONAL_EQUATION_TOL);
        let mut mono = CheckEntry::new("non_decreasing", 0.0);
        for (i, &x) in xs.iter().enumerate() {
            let lhs = self.p * self.eval_unchecked(x);
            let rhs = self.eval_unchecked(c * x);
            fe.observe((lhs - rhs).abs() / (1.0 + lhs), x);

            let slope = self.slope_factor(x);
            mono.observe((-slope).max(0.0), x);
            if i > 0 {
                let prev = self.eval_unchecked(xs[i - 1]);
                let cur = self.eval_unchecked(x);
                mono.observe(((prev - cur) / prev.max(f64::MIN_POSITIVE)).max(0.0), x);
            }
        }
        let bound = self.max_perturbation();
        let mut eps_check = CheckEntry::new("eps_within_bound", 0.0);
        eps_check.observe((self.eps.abs() - bound).max(0.0), f64::NAN);

        ValidationReport {
            checks: vec![fe.finish(), mono.finish(), eps_check.finish()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckEntry>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckEntry> {
        self.checks.iter().find(|c| c.name == name)
    }
}
