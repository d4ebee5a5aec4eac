//! The marginal laws: semi-Pareto, semi-Weibull, generalized semi-Pareto and
//! φ-semi-Weibull. Each one is `S(x) = G(ψ(x))` for a decreasing link `G`
//! on `[0, ∞)` with `G(0) = 1`.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, Open01};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::psi::PsiFunction;

/// Laplace transforms used as the link `φ` of φ-semi-Weibull laws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LaplaceTransform {
    /// `1/(1+s)`
    Exponential,
    /// `(1+s)^{-β}`
    Gamma { beta: f64 },
    /// `(1+ψ̃(s))^{-β}` with an inner `ψ̃` of index below one.
    SemiStableGamma { beta: f64, inner_psi: PsiFunction },
}

impl LaplaceTransform {
    pub fn validate(&self) -> Result<()> {
        match *self {
            LaplaceTransform::Exponential => Ok(()),
            LaplaceTransform::Gamma { beta } => check_beta(beta),
            LaplaceTransform::SemiStableGamma { beta, inner_psi } => {
                check_beta(beta)?;
                if inner_psi.alpha() >= 1.0 {
                    return Err(Error::invalid(
                        "phi.inner_psi.alpha",
                        inner_psi.alpha(),
                        "must lie in (0, 1)",
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 1.0;
        }
        match *self {
            LaplaceTransform::Exponential => 1.0 / (1.0 + s),
            LaplaceTransform::Gamma { beta } => (1.0 + s).powf(-beta),
            LaplaceTransform::SemiStableGamma { beta, inner_psi } => {
                (1.0 + inner_psi.eval_unchecked(s)).powf(-beta)
            }
        }
    }

    /// The `s ≥ 0` with `φ(s) = u`, for `u` in `(0, 1]`.
    pub fn inverse(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u <= 1.0) {
            return Err(Error::Domain {
                what: "Laplace transform inverse",
                value: u,
            });
        }
        Ok(match *self {
            LaplaceTransform::Exponential => 1.0 / u - 1.0,
            LaplaceTransform::Gamma { beta } => u.powf(-1.0 / beta) - 1.0,
            LaplaceTransform::SemiStableGamma { beta, inner_psi } => {
                inner_psi.inverse(u.powf(-1.0 / beta) - 1.0)?
            }
        })
    }

    /// The law `W` with `E[e^{-sW}] = φ(s)`, when it can be sampled exactly.
    pub fn mixer(&self) -> Result<Mixer> {
        match *self {
            LaplaceTransform::Exponential => Ok(Mixer::Gamma { shape: 1.0 }),
            LaplaceTransform::Gamma { beta } => Ok(Mixer::Gamma { shape: beta }),
            LaplaceTransform::SemiStableGamma { .. } => Err(Error::UnsupportedMixer(
                "the semi-stable gamma Laplace transform".into(),
            )),
        }
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("beta", beta, "must be positive and finite"))
    }
}

/// Mixing law for the exponent `W` in `S(x) = E[exp(-W ψ(x))]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mixer {
    /// `W ≡ 1`.
    Degenerate,
    /// `W ~ Gamma(shape, 1)`.
    Gamma { shape: f64 },
}

impl Mixer {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Mixer::Degenerate => 1.0,
            Mixer::Gamma { shape } => Gamma::new(shape, 1.0)
                .expect("shape validated at construction")
                .sample(rng),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LawKind {
    SemiPareto,
    SemiWeibull,
    GeneralizedSemiPareto { beta: f64 },
    PhiSemiWeibull { phi: LaplaceTransform },
}

impl LawKind {
    pub fn name(&self) -> &'static str {
        match self {
            LawKind::SemiPareto => "semi_pareto",
            LawKind::SemiWeibull => "semi_weibull",
            LawKind::GeneralizedSemiPareto { .. } => "generalized_semi_pareto",
            LawKind::PhiSemiWeibull { .. } => "phi_semi_weibull",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LawParams", into = "LawParams")]
pub struct MarginalLaw {
    kind: LawKind,
    psi: PsiFunction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawKindTag {
    SemiPareto,
    SemiWeibull,
    GeneralizedSemiPareto,
    PhiSemiWeibull,
}

/// Flat JSON form of a [`MarginalLaw`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawParams {
    pub kind: LawKindTag,
    pub psi: PsiFunction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<LaplaceTransform>,
}

impl TryFrom<LawParams> for MarginalLaw {
    type Error = Error;

    fn try_from(v: LawParams) -> Result<Self> {
        let kind = match v.kind {
            LawKindTag::SemiPareto => LawKind::SemiPareto,
            LawKindTag::SemiWeibull => LawKind::SemiWeibull,
            LawKindTag::GeneralizedSemiPareto => LawKind::GeneralizedSemiPareto {
                beta: v.beta.ok_or_else(|| {
                    Error::invalid("beta", f64::NAN, "required for generalized_semi_pareto")
                })?,
            },
            LawKindTag::PhiSemiWeibull => LawKind::PhiSemiWeibull {
                phi: v.phi.ok_or_else(|| {
                    Error::invalid("phi", f64::NAN, "required for phi_semi_weibull")
                })?,
            },
        };
        MarginalLaw::new(kind, v.psi)
    }
}

impl From<MarginalLaw> for LawParams {
    fn from(d: MarginalLaw) -> Self {
        let (kind, beta, phi) = match d.kind {
            LawKind::SemiPareto => (LawKindTag::SemiPareto, None, None),
            LawKind::SemiWeibull => (LawKindTag::SemiWeibull, None, None),
            LawKind::GeneralizedSemiPareto { beta } => {
                (LawKindTag::GeneralizedSemiPareto, Some(beta), None)
            }
            LawKind::PhiSemiWeibull { phi } => (LawKindTag::PhiSemiWeibull, None, Some(phi)),
        };
        LawParams {
            kind,
            psi: d.psi,
            beta,
            phi,
        }
    }
}

impl MarginalLaw {
    pub fn new(kind: LawKind, psi: PsiFunction) -> Result<Self> {
        match kind {
            LawKind::GeneralizedSemiPareto { beta } => check_beta(beta)?,
            LawKind::PhiSemiWeibull { phi } => phi.validate()?,
            _ => {}
        }
        Ok(MarginalLaw { kind, psi })
    }

    pub fn semi_pareto(psi: PsiFunction) -> Self {
        MarginalLaw {
            kind: LawKind::SemiPareto,
            psi,
        }
    }

    pub fn semi_weibull(psi: PsiFunction) -> Self {
        MarginalLaw {
            kind: LawKind::SemiWeibull,
            psi,
        }
    }

    pub fn generalized_semi_pareto(psi: PsiFunction, beta: f64) -> Result<Self> {
        Self::new(LawKind::GeneralizedSemiPareto { beta }, psi)
    }

    pub fn phi_semi_weibull(psi: PsiFunction, phi: LaplaceTransform) -> Result<Self> {
        Self::new(LawKind::PhiSemiWeibull { phi }, psi)
    }

    pub fn kind(&self) -> LawKind {
        self.kind
    }

    pub fn psi(&self) -> &PsiFunction {
        &self.psi
    }

    /// `G` with `S(x) = G(ψ(x))`.
    #[inline]
    pub fn link(&self, t: f64) -> f64 {
        match self.kind {
            LawKind::SemiPareto => 1.0 / (1.0 + t),
            LawKind::SemiWeibull => (-t).exp(),
            LawKind::GeneralizedSemiPareto { beta } => (1.0 + t).powf(-beta),
            LawKind::PhiSemiWeibull { phi } => phi.eval(t),
        }
    }

    /// Inverse of the link: the `t` with `G(t) = u`.
    pub fn link_inverse(&self, u: f64) -> Result<f64> {
        Ok(match self.kind {
            LawKind::SemiPareto => 1.0 / u - 1.0,
            LawKind::SemiWeibull => -u.ln(),
            LawKind::GeneralizedSemiPareto { beta } => u.powf(-1.0 / beta) - 1.0,
            LawKind::PhiSemiWeibull { phi } => phi.inverse(u)?,
        })
    }

    /// `P{X > x}`; equal to 1 on `x ≤ 0`.
    pub fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 || x.is_nan() {
            return 1.0;
        }
        if x.is_infinite() {
            return 0.0;
        }
        self.link(self.psi.eval_unchecked(x))
    }

    pub fn cdf(&self, x: f64) -> f64 {
        1.0 - self.survival(x)
    }

    /// Survival-scale quantile: the `x` with `S(x) = u`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain {
                what: "quantile",
                value: u,
            });
        }
        self.psi.inverse(self.link_inverse(u)?)
    }

    /// CDF-scale quantile: the `x` with `F(x) = q`.
    pub fn cdf_quantile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Domain {
                what: "cdf quantile",
                value: q,
            });
        }
        self.quantile(1.0 - q)
    }

    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.sample(Open01);
        self.quantile(u)
            .expect("open-interval uniform is always a valid quantile level")
    }

    /// `n` draws by inverse transform.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.sample_one(rng)).collect()
    }

    /// The exponent mixer: `S(x) = E[exp(-W ψ(x))]`.
    pub fn mixer(&self) -> Result<Mixer> {
        match self.kind {
            LawKind::SemiWeibull => Ok(Mixer::Degenerate),
            LawKind::SemiPareto => Ok(Mixer::Gamma { shape: 1.0 }),
            LawKind::GeneralizedSemiPareto { beta } => Ok(Mixer::Gamma { shape: beta }),
            LawKind::PhiSemiWeibull { phi } => phi.mixer(),
        }
    }

    /// One draw as `ψ⁻¹(E/W)` with `E` unit exponential and `W` the mixer.
    pub fn sample_via_mixture<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        let mixer = self.mixer()?;
        loop {
            let e: f64 = Exp1.sample(rng);
            let w = mixer.sample(rng);
            let t = e / w;
            // Gamma draws with small shape can underflow to 0.
            if t.is_finite() && t > 0.0 {
                return self.psi.inverse(t);
            }
        }
    }

    /// Grid spanning the central 99.8% of the law, widened by three
    /// ψ-periods on each side.
    pub fn default_grid(&self, n: usize) -> GridSpec {
        let widen = self.psi.period().powi(3);
        let lo = self.quantile(0.999).expect("valid level") / widen;
        let hi = self.quantile(0.001).expect("valid level") * widen;
        GridSpec::log(lo, hi.min(f64::MAX / 2.0), n).expect("quantiles are positive and ordered")
    }
}
