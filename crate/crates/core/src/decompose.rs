//! Min-SSD decompositions `S(x) = S(bx)·S₀(x)`.
//!
//! Cofactors are represented as [`ExtendedSurvival`] values that may keep a
//! mass `q_inf` at `+∞`: the semi-Pareto cofactor is the minimum of a
//! geometric number of variables counted from zero, and the empty minimum is
//! `+∞` with probability `p`.

use std::fmt;
use std::sync::Arc;

use crate::distributions::{LaplaceTransform, LawKind, MarginalLaw};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::psi::PsiFunction;
pub use crate::report::{CheckEntry, CheckReport};

/// Tolerance for the two edge sub-checks (value near 1 at the left end,
/// settled near `q_inf` at the right end). Edges are finite grid points, not
/// limits, so this is looser than the interior tolerances.
pub const EDGE_TOL: f64 = 1e-3;

const FAR_DECADES: i32 = 12;

/// `S(x) = S(bx)·S₀(x)` is rebuilt to this absolute accuracy.
pub const RECONSTRUCTION_TOL: f64 = 1e-14;

/// Default interior tolerance for monotonicity and range checks.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Highest forward-difference order in the complete-monotonicity proxy.
pub const CM_ORDER: usize = 8;

type Eval = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A non-increasing function on `(0, ∞)` starting at 1 whose limit at `∞`
/// is `q_inf ≥ 0`.
#[derive(Clone)]
pub struct ExtendedSurvival {
    eval: Eval,
    q_inf: f64,
    q_inf_exact: bool,
    hint: f64,
}

impl fmt::Debug for ExtendedSurvival {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExtendedSurvival")
            .field("q_inf", &self.q_inf)
            .field("q_inf_exact", &self.q_inf_exact)
            .finish_non_exhaustive()
    }
}

impl ExtendedSurvival {
    pub fn new<F>(eval: F, q_inf: f64, q_inf_exact: bool) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        ExtendedSurvival {
            eval: Arc::new(eval),
            q_inf,
            q_inf_exact,
            hint: 1.0,
        }
    }

    /// A typical point of the proper part; seeds root searches.
    pub fn with_hint(mut self, hint: f64) -> Self {
        if hint > 0.0 && hint.is_finite() {
            self.hint = hint;
        }
        self
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        (self.eval)(x)
    }

    pub fn q_inf(&self) -> f64 {
        self.q_inf
    }

    /// Whether `q_inf` is a closed-form limit rather than a grid estimate.
    pub fn q_inf_exact(&self) -> bool {
        self.q_inf_exact
    }

    pub fn hint(&self) -> f64 {
        self.hint
    }

    /// Conditional survival of the finite part, `(e(x) - q_inf)/(1 - q_inf)`.
    pub fn proper_part(&self, x: f64) -> f64 {
        (self.eval(x) - self.q_inf) / (1.0 - self.q_inf)
    }
}

/// Candidate cofactor `x ↦ S(x)/S(bx)` of an arbitrary survival function.
///
/// `q_inf` is estimated by the value at the right end of `grid`.
pub fn cofactor<S>(survival: S, b: f64, grid: &GridSpec) -> Result<ExtendedSurvival>
where
    S: Fn(f64) -> f64 + Send + Sync + 'static,
{
    check_b(b)?;
    for x in grid.points() {
        if survival(b * x) == 0.0 && survival(x) > 0.0 {
            return Err(Error::Domain {
                what: "cofactor: S(bx) = 0 while S(x) > 0",
                value: x,
            });
        }
    }
    let eval = move |x: f64| survival(x) / survival(b * x);
    let q_inf = eval(grid.hi);
    Ok(ExtendedSurvival::new(eval, q_inf, false))
}

fn check_b(b: f64) -> Result<()> {
    if !(b > 0.0 && b.is_finite()) || b == 1.0 {
        return Err(Error::invalid(
            "b",
            b,
            "must be positive, finite and different from 1",
        ));
    }
    Ok(())
}

/// `lim ψ(rx)/ψ(x)` as `x → ∞`, when it exists in closed form: `r^α` for the
/// pure power, `p^m` when `r = c^m` for an integer `m`.
pub fn psi_ratio_limit(psi: &PsiFunction, r: f64) -> Option<f64> {
    if psi.is_power() {
        return Some(r.powf(psi.alpha()));
    }
    let m = r.ln() / psi.scale().ln();
    let m_round = m.round();
    if (m - m_round).abs() < 1e-9 {
        Some(psi.p().powf(m_round))
    } else {
        None
    }
}

/// `lim φ(t)/φ(rt)` as `t → ∞`.
fn lt_ratio_limit(phi: &LaplaceTransform, r: f64) -> Option<f64> {
    match *phi {
        LaplaceTransform::Exponential => Some(r),
        LaplaceTransform::Gamma { beta } => Some(r.powf(beta)),
        LaplaceTransform::SemiStableGamma { beta, inner_psi } => {
            psi_ratio_limit(&inner_psi, r).map(|l| l.powf(beta))
        }
    }
}

fn law_cofactor_limit(d: &MarginalLaw, b: f64) -> Option<f64> {
    let r = psi_ratio_limit(d.psi(), b)?;
    match d.kind() {
        LawKind::SemiPareto => Some(r),
        LawKind::GeneralizedSemiPareto { beta } => Some(r.powf(beta)),
        LawKind::SemiWeibull => Some(if r < 1.0 {
            0.0
        } else if r == 1.0 {
            1.0
        } else {
            f64::INFINITY
        }),
        LawKind::PhiSemiWeibull { phi } => {
            // ψ(bx)/ψ(x) → r; the limit of φ(t)/φ(rt) needs the exact ratio,
            // which holds only on the lattice b = c^m or for the pure power.
            lt_ratio_limit(&phi, r)
        }
    }
}

/// Ratio `G(t)/G(t_b)` of the law's link, arranged to avoid underflow.
fn link_ratio(d: &MarginalLaw, t: f64, t_b: f64) -> f64 {
    match d.kind() {
        LawKind::SemiPareto => (1.0 + t_b) / (1.0 + t),
        LawKind::SemiWeibull => (t_b - t).exp(),
        LawKind::GeneralizedSemiPareto { beta } => ((1.0 + t_b) / (1.0 + t)).powf(beta),
        LawKind::PhiSemiWeibull { phi } => match phi {
            LaplaceTransform::Exponential => (1.0 + t_b) / (1.0 + t),
            LaplaceTransform::Gamma { beta } => ((1.0 + t_b) / (1.0 + t)).powf(beta),
            LaplaceTransform::SemiStableGamma { beta, inner_psi } => {
                let inner = |s: f64| {
                    if s > 0.0 {
                        inner_psi.eval_unchecked(s)
                    } else {
                        0.0
                    }
                };
                ((1.0 + inner(t_b)) / (1.0 + inner(t))).powf(beta)
            }
        },
    }
}

/// Cofactor `S(x)/S(bx)` of a law, with the closed-form `q_inf` when known.
pub fn law_cofactor(d: &MarginalLaw, b: f64) -> Result<ExtendedSurvival> {
    check_b(b)?;
    let law = *d;
    let psi = *d.psi();
    let eval = move |x: f64| {
        if x.is_infinite() {
            return f64::NAN;
        }
        link_ratio(&law, psi.eval_unchecked(x), psi.eval_unchecked(b * x))
    };
    let hint = d.quantile(0.5)?;
    Ok(match law_cofactor_limit(d, b) {
        Some(q) => ExtendedSurvival::new(eval, q, true),
        None => {
            let q = eval(d.default_grid(2).hi);
            ExtendedSurvival::new(eval, q, false)
        }
    }
    .with_hint(hint))
}

pub const VALIDATE_CHECK: &str = "extended_survival";

fn validation_entries(e: &ExtendedSurvival, points: &[f64], tol: f64) -> Vec<CheckEntry> {
    let mut left = CheckEntry::new("left_edge_near_one", EDGE_TOL);
    let mut mono = CheckEntry::new("non_increasing", tol);
    let mut range = CheckEntry::new("within_unit_interval", tol);
    let mut right = CheckEntry::new("right_edge_limit", EDGE_TOL);

    let values: Vec<f64> = points.iter().map(|&x| e.eval(x)).collect();
    if let (Some(&x0), Some(&v0)) = (points.first(), values.first()) {
        left.observe((1.0 - v0).abs(), x0);
    }
    for (i, (&x, &v)) in points.iter().zip(&values).enumerate() {
        range.observe((v - 1.0).max(-v).max(0.0), x);
        if i > 0 {
            mono.observe((v - values[i - 1]).max(0.0), x);
        }
    }
    range.observe((e.q_inf - 1.0).max(-e.q_inf).max(0.0), f64::INFINITY);
    if let (Some(&xn), Some(&vn)) = (points.last(), values.last()) {
        let settled = if e.q_inf_exact {
            // Approach to the limit can be as slow as 1/ψ, so probe well past the grid.
            let (x_far, v_far) = far_value(e, xn).unwrap_or((xn, vn));
            right.observe((v_far - e.q_inf).abs(), x_far);
            // A non-increasing function never drops below its limit.
            (e.q_inf - vn).max(0.0)
        } else if values.len() > 1 {
            // The estimate is the last value itself; use the last step instead.
            (vn - values[values.len() - 2]).abs()
        } else {
            0.0
        };
        right.observe(settled, xn);
    }
    vec![left, mono, range, right]
}

/// Value at the farthest finite point among `x·10^k`, `k = 1..=FAR_DECADES`.
fn far_value(e: &ExtendedSurvival, x: f64) -> Option<(f64, f64)> {
    (1..=FAR_DECADES)
        .map(|k| x * 10f64.powi(k))
        .take_while(|y| y.is_finite())
        .map(|y| (y, e.eval(y)))
        .filter(|(_, v)| v.is_finite())
        .last()
}

/// Necessary conditions for `e` to be an extended survival function.
pub fn validate_extended_survival(e: &ExtendedSurvival, grid: &GridSpec, tol: f64) -> CheckReport {
    let points = grid.points();
    CheckReport::from_entries(VALIDATE_CHECK, validation_entries(e, &points, tol))
        .with_q_inf(e.q_inf)
}

pub const MINSSD_CHECK: &str = "minssd";

/// Checks that `d` is min-SSD(b): the cofactor is a valid extended survival
/// function and `S(x) = S(bx)·S₀(x)` holds on the grid.
pub fn minssd_check(d: &MarginalLaw, b: f64, grid: &GridSpec, tol: f64) -> Result<CheckReport> {
    let e = law_cofactor(d, b)?;
    let points = grid.points();
    let mut entries = validation_entries(&e, &points, tol);
    let mut recon = CheckEntry::new("reconstruction", RECONSTRUCTION_TOL);
    for &x in &points {
        recon.observe((d.survival(x) - d.survival(b * x) * e.eval(x)).abs(), x);
    }
    entries.push(recon);
    let mut report = CheckReport::from_entries(MINSSD_CHECK, entries).with_q_inf(e.q_inf);
    if !e.q_inf_exact {
        report = report.with_note("q_inf estimated from the right edge of the grid");
    }
    if b > 1.0 {
        report = report.with_note(
            "b > 1: for a survival function decreasing to 0, S(x)/S(bx) is at least 1 and grows",
        );
    }
    Ok(report)
}

/// The factor `φ₀(s) = φ(s)/φ(cs)` of a Laplace transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LtFactor {
    pub phi: LaplaceTransform,
    pub c: f64,
}

impl LtFactor {
    pub fn eval(&self, s: f64) -> f64 {
        self.phi.eval(s) / self.phi.eval(self.c * s)
    }

    /// `lim φ₀(s)` as `s → ∞`, if known in closed form.
    pub fn limit(&self) -> Option<f64> {
        lt_ratio_limit(&self.phi, self.c)
    }
}

pub const LT_SSD_CHECK: &str = "lt_ssd_factor";

/// `φ₀ = φ(s)/φ(cs)` with a report of necessary Laplace-transform conditions.
///
/// Besides `φ₀(0) = 1`, positivity and monotonicity, the signs
/// `(-1)^n Δ_h^n φ₀(s) ≥ 0` are checked for `n ≤ 8` on a geometric grid of
/// base points with `h = s/2`. Passing does not prove `φ₀` is a Laplace
/// transform.
pub fn lt_ssd_factor(phi: &LaplaceTransform, c: f64) -> Result<(LtFactor, CheckReport)> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::invalid("c", c, "must lie in (0, 1)"));
    }
    phi.validate()?;
    let f = LtFactor { phi: *phi, c };

    let mut at_zero = CheckEntry::new("value_at_zero", DEFAULT_TOL);
    at_zero.observe((f.eval(0.0) - 1.0).abs(), 0.0);

    let mut positive = CheckEntry::new("positive", 0.0);
    let mut mono = CheckEntry::new("non_increasing", DEFAULT_TOL);
    let points = GridSpec::log(1e-4, 1e4, 200).expect("static grid").points();
    let mut prev = f.eval(0.0);
    for &s in &points {
        let v = f.eval(s);
        positive.observe(if v > 0.0 { 0.0 } else { 1.0 }, s);
        mono.observe((v - prev).max(0.0), s);
        prev = v;
    }

    let bases = GridSpec::log(1e-2, 1e2, 30).expect("static grid").points();
    let mut entries = vec![at_zero, positive, mono];
    for order in 1..=CM_ORDER {
        // Rounding in an order-n difference of O(1) values is about 2^n ulp.
        let mut e = CheckEntry::new(
            format!("cm_order_{order}"),
            DEFAULT_TOL * (1u32 << order) as f64,
        );
        for &s in &bases {
            let diff = alternating_difference(&|t| f.eval(t), s, 0.5 * s, order);
            e.observe((-diff).max(0.0), s);
        }
        entries.push(e);
    }
    let mut report = CheckReport::from_entries(LT_SSD_CHECK, entries)
        .with_note("necessary conditions only: complete monotonicity is checked to finite order");
    if let Some(l) = f.limit() {
        report = report.with_q_inf(l);
    }
    Ok((f, report))
}

/// `(-1)^n Δ_h^n f(s)`.
fn alternating_difference(f: &dyn Fn(f64) -> f64, s: f64, h: f64, n: usize) -> f64 {
    let mut binom = 1.0;
    let mut sum = 0.0;
    for k in 0..=n {
        // Δ^n f(s) = Σ (-1)^{n-k} C(n,k) f(s + kh); times (-1)^n.
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * binom * f(s + k as f64 * h);
        binom = binom * (n - k) as f64 / (k + 1) as f64;
    }
    sum
}

/// Cofactor `x ↦ φ₀(ψ(x))` of a φ-semi-Weibull law at `b = p^{1/α}`.
pub fn phi_semiweibull_cofactor(d: &MarginalLaw) -> Result<ExtendedSurvival> {
    let LawKind::PhiSemiWeibull { phi } = d.kind() else {
        return Err(Error::invalid(
            "kind",
            f64::NAN,
            format!("expected phi_semi_weibull, got {}", d.kind().name()),
        ));
    };
    let psi = *d.psi();
    let (factor, report) = lt_ssd_factor(&phi, psi.p())?;
    if !report.passed {
        return Err(Error::CheckFailed(Box::new(report)));
    }
    let eval = move |x: f64| factor.eval(psi.eval_unchecked(x));
    let hint = d.quantile(0.5)?;
    Ok(match factor.limit() {
        Some(q) => ExtendedSurvival::new(eval, q, true),
        None => {
            let q = eval(d.default_grid(2).hi);
            ExtendedSurvival::new(eval, q, false)
        }
    }
    .with_hint(hint))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psi::max_perturbation;
    use crate::randsize::Pgf;

    fn pareto() -> MarginalLaw {
        MarginalLaw::semi_pareto(PsiFunction::power(1.0, 0.5).unwrap())
    }

    #[test]
    fn pareto_cofactor_half() {
        let d = pareto();
        let grid = GridSpec::log(1e-4, 1e8, 300).unwrap();
        let e = cofactor(move |x| d.survival(x), 0.5, &grid).unwrap();
        assert!((e.eval(1.0) - 0.75).abs() < 1e-15);
        assert!((e.q_inf() - 0.5).abs() < 1e-8);
        assert!(!e.q_inf_exact());
        let closed = law_cofactor(&d, 0.5).unwrap();
        assert!(closed.q_inf_exact());
        assert_eq!(closed.q_inf(), 0.5);
        for x in grid.points() {
            assert!((closed.eval(x) - (1.0 + 0.5 * x) / (1.0 + x)).abs() < 1e-15);
        }
    }

    #[test]
    fn identity_scale_rejected() {
        assert!(law_cofactor(&pareto(), 1.0).is_err());
        assert!(law_cofactor(&pareto(), 0.0).is_err());
        assert!(law_cofactor(&pareto(), -0.5).is_err());
    }

    #[test]
    fn semi_weibull_cofactor_closed_form() {
        let psi = PsiFunction::new(1.5, 0.3, 0.1).unwrap();
        let d = MarginalLaw::semi_weibull(psi);
        let e = law_cofactor(&d, psi.scale()).unwrap();
        assert_eq!(e.q_inf(), 0.0);
        for x in d.default_grid(100).points() {
            let expected = (-(1.0 / psi.p() - 1.0) * psi.eval(psi.scale() * x).unwrap()).exp();
            assert!((e.eval(x) - expected).abs() < 1e-14);
        }
        let grid = d.default_grid(400);
        assert!(validate_extended_survival(&e, &grid, DEFAULT_TOL).passed);
    }

    #[test]
    fn semi_pareto_cofactor_has_atom_p() {
        let eps = 0.8 * max_perturbation(1.3, 0.25).unwrap();
        let psi = PsiFunction::new(1.3, 0.25, eps).unwrap();
        let d = MarginalLaw::semi_pareto(psi);
        let e = law_cofactor(&d, psi.scale()).unwrap();
        assert!((e.q_inf() - 0.25).abs() < 1e-12);
        let r = validate_extended_survival(&e, &d.default_grid(400), DEFAULT_TOL);
        assert!(r.passed, "{r:?}");
        for x in d.default_grid(50).points() {
            let t = psi.eval(x).unwrap();
            assert!((e.eval(x) - (1.0 + 0.25 * t) / (1.0 + t)).abs() < 1e-14);
        }
    }

    #[test]
    fn slow_approach_to_the_atom_is_not_flagged() {
        // ((1+pψ)/(1+ψ))^2 is still 2e-3 above p^2 at the end of the default grid.
        let psi = PsiFunction::with_phase(1.0, 0.5, 0.06, 0.7).unwrap();
        let d = MarginalLaw::generalized_semi_pareto(psi, 2.0).unwrap();
        let grid = d.default_grid(400);
        let e = law_cofactor(&d, psi.scale()).unwrap();
        assert!(e.eval(grid.hi) - 0.25 > 1e-3);
        let r = minssd_check(&d, psi.scale(), &grid, DEFAULT_TOL).unwrap();
        assert!(r.passed, "{r:#?}");
        let right = r.entry("right_edge_limit").unwrap();
        assert!(right.residual < 1e-9 && right.worst_x > grid.hi);
    }

    #[test]
    fn atom_above_the_grid_end_is_flagged() {
        let d = pareto();
        let e = ExtendedSurvival::new(move |x| (1.0 + 0.5 * x) / (1.0 + x), 0.6, true);
        let r = validate_extended_survival(&e, &d.default_grid(100), DEFAULT_TOL);
        assert!(!r.entry("right_edge_limit").unwrap().passed);
    }

    #[test]
    fn wrong_direction_fails() {
        let d = pareto();
        let r = minssd_check(&d, 2.0, &d.default_grid(400), DEFAULT_TOL).unwrap();
        assert!(!r.passed);
        assert!(!r.entry("non_increasing").unwrap().passed);
        assert!(!r.entry("within_unit_interval").unwrap().passed);
        assert!(r.notes.iter().any(|n| n.contains("b > 1")));
    }

    #[test]
    fn built_in_laws_are_min_ssd() {
        let eps = |a, p| 0.5 * max_perturbation(a, p).unwrap();
        let laws = [
            MarginalLaw::semi_pareto(PsiFunction::new(1.0, 0.25, eps(1.0, 0.25)).unwrap()),
            MarginalLaw::semi_weibull(PsiFunction::new(2.0, 0.5, eps(2.0, 0.5)).unwrap()),
            MarginalLaw::generalized_semi_pareto(
                PsiFunction::new(0.7, 0.1, eps(0.7, 0.1)).unwrap(),
                0.5,
            )
            .unwrap(),
            MarginalLaw::generalized_semi_pareto(
                PsiFunction::new(1.0, 0.3, eps(1.0, 0.3)).unwrap(),
                2.0,
            )
            .unwrap(),
            MarginalLaw::phi_semi_weibull(
                PsiFunction::new(1.0, 0.3, eps(1.0, 0.3)).unwrap(),
                LaplaceTransform::Gamma { beta: 3.0 },
            )
            .unwrap(),
        ];
        for d in laws {
            let b = d.psi().scale();
            let r = minssd_check(&d, b, &d.default_grid(400), DEFAULT_TOL).unwrap();
            assert!(r.passed, "{d:?}: {r:#?}");
            assert!(r.residual("reconstruction") <= RECONSTRUCTION_TOL);
        }
    }

    #[test]
    fn pareto_is_min_sd() {
        let d = pareto();
        for b in [0.3, 0.5, 0.9] {
            let r = minssd_check(&d, b, &d.default_grid(400), DEFAULT_TOL).unwrap();
            assert!(r.passed, "b={b}: {r:?}");
            assert!((r.q_inf.unwrap() - b).abs() < 1e-15);
        }
    }

    #[test]
    fn generic_b_on_a_semi_pareto_law() {
        // Not asserted: the law is only certified at b = c^m.
        let psi = PsiFunction::new(1.0, 0.25, 0.95 * max_perturbation(1.0, 0.25).unwrap()).unwrap();
        let d = MarginalLaw::semi_pareto(psi);
        let r = minssd_check(&d, 0.37, &d.default_grid(400), DEFAULT_TOL).unwrap();
        eprintln!(
            "semi-Pareto eps={:.4} at b=0.37: passed={} non_increasing residual={:.3e}",
            psi.eps(),
            r.passed,
            r.residual("non_increasing")
        );
    }

    #[test]
    fn lt_factor_examples() {
        let (f, r) = lt_ssd_factor(&LaplaceTransform::Gamma { beta: 2.5 }, 0.5).unwrap();
        assert!(r.passed, "{r:#?}");
        for s in [0.0, 0.3, 4.0] {
            assert!((f.eval(s) - ((1.0 + 0.5 * s) / (1.0 + s)).powf(2.5)).abs() < 1e-15);
        }
        for c in [0.1, 0.5, 0.9] {
            let (f, r) = lt_ssd_factor(&LaplaceTransform::Exponential, c).unwrap();
            assert!(r.passed);
            assert!((f.eval(2.0) - (1.0 + 2.0 * c) / 3.0).abs() < 1e-15);
        }
        assert!(lt_ssd_factor(&LaplaceTransform::Exponential, 1.0).is_err());
    }

    #[test]
    fn semi_stable_gamma_lt_is_ssd_at_its_own_scale() {
        for eps in [0.0, 0.002] {
            let inner = PsiFunction::new(0.6, 0.3, eps).unwrap();
            let phi = LaplaceTransform::SemiStableGamma {
                beta: 1.5,
                inner_psi: inner,
            };
            let (_, r) = lt_ssd_factor(&phi, inner.scale()).unwrap();
            assert!(r.passed, "eps={eps}: {r:#?}");
            assert!((r.q_inf.unwrap() - 0.3f64.powf(1.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn strongly_perturbed_inner_psi_fails_the_cm_proxy() {
        // A large harmonic makes ψ̃ a poor Laplace exponent; the proxy sees it.
        let inner = PsiFunction::new(0.6, 0.3, 0.02).unwrap();
        let phi = LaplaceTransform::SemiStableGamma {
            beta: 1.5,
            inner_psi: inner,
        };
        let (_, r) = lt_ssd_factor(&phi, inner.scale()).unwrap();
        assert!(!r.passed);
        assert!(r.entry("non_increasing").unwrap().passed);
        assert!(!r.entry("cm_order_5").unwrap().passed);
    }

    #[test]
    fn cm_proxy_rejects_a_non_cm_function() {
        // e^{-s} cos(s) changes sign; its first differences are not signed.
        let f = |s: f64| (-s).exp() * (3.0 * s).cos();
        let worst = GridSpec::log(1e-2, 1e2, 30)
            .unwrap()
            .points()
            .into_iter()
            .map(|s| alternating_difference(&f, s, 0.5 * s, 1))
            .fold(f64::INFINITY, f64::min);
        assert!(worst < 0.0);
    }

    #[test]
    fn phi_semiweibull_cofactor_routes_agree() {
        let psi = PsiFunction::new(1.2, 0.35, 0.05).unwrap();
        let c = psi.scale();
        let sp = MarginalLaw::semi_pareto(psi);
        let exp_phi = MarginalLaw::phi_semi_weibull(psi, LaplaceTransform::Exponential).unwrap();
        let e1 = phi_semiweibull_cofactor(&exp_phi).unwrap();
        let e2 = law_cofactor(&sp, c).unwrap();
        for x in sp.default_grid(200).points() {
            assert!((e1.eval(x) - e2.eval(x)).abs() < 1e-14);
        }

        let g = MarginalLaw::phi_semi_weibull(psi, LaplaceTransform::Gamma { beta: 2.0 }).unwrap();
        let e = phi_semiweibull_cofactor(&g).unwrap();
        let direct = law_cofactor(&g, c).unwrap();
        for x in g.default_grid(200).points() {
            let t = psi.eval(x).unwrap();
            let closed = ((1.0 + psi.p() * t) / (1.0 + t)).powi(2);
            assert!((e.eval(x) - closed).abs() < 1e-14);
            assert!((e.eval(x) - direct.eval(x)).abs() < 1e-12);
            assert!((g.survival(x) - g.survival(c * x) * e.eval(x)).abs() < 1e-12);
        }
        assert!(phi_semiweibull_cofactor(&sp).is_err());
    }

    #[test]
    fn three_routes_of_semi_pareto_cofactor() {
        let psi = PsiFunction::new(0.8, 0.4, 0.1).unwrap();
        let d = MarginalLaw::semi_pareto(psi);
        let b = psi.scale();
        let grid = d.default_grid(400);
        let generic = cofactor(move |x| d.survival(x), b, &grid).unwrap();
        let (_, i0) = Pgf::GeometricI1 { p: 0.4 }.shift_factor();
        for x in grid.points() {
            let t = psi.eval(x).unwrap();
            let analytic = (1.0 + 0.4 * t) / (1.0 + t);
            let pgf = i0.eval(d.survival(b * x));
            assert!((generic.eval(x) - analytic).abs() < 1e-14);
            assert!((pgf - analytic).abs() < 1e-14);
        }
    }

    #[test]
    fn ratio_limits() {
        let psi = PsiFunction::new(1.0, 0.25, 0.1).unwrap();
        assert_eq!(psi_ratio_limit(&psi, psi.scale()), Some(0.25));
        assert!((psi_ratio_limit(&psi, psi.scale().powi(2)).unwrap() - 0.0625).abs() < 1e-15);
        assert_eq!(psi_ratio_limit(&psi, 0.37), None);
        let pow = PsiFunction::power(2.0, 0.25).unwrap();
        assert!((psi_ratio_limit(&pow, 0.37).unwrap() - 0.1369).abs() < 1e-15);
    }
}
