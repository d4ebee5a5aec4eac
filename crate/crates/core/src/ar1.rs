//! The min-AR(1) minification process `X_n = ρ·X_{n-1} ∧ ε_n`.
//!
//! With `X₀` drawn from the target law `S`, the chain is marginally
//! stationary exactly when the innovation survival `S_ε(x) = S(x)/S(x/ρ)` is
//! a valid (possibly defective) survival function, i.e. when `S` is
//! min-SSD(1/ρ). A defective innovation is `+∞` with probability `q_inf`,
//! in which case the step is `X_n = ρ·X_{n-1}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::Open01;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decompose::{
    law_cofactor, validate_extended_survival, CheckReport, ExtendedSurvival, DEFAULT_TOL,
};
use crate::distributions::MarginalLaw;
use crate::error::{Error, Result};
use crate::roots;
use crate::stats::{ks_test, KsReport};

/// Relative accuracy of finite innovation draws.
pub const INNOVATION_RTOL: f64 = 1e-10;
const INNOVATION_MAX_ITER: usize = 200;

/// Grid size used to validate innovations.
pub const INNOVATION_GRID: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinAr1Config {
    pub marginal: MarginalLaw,
    pub rho: f64,
    pub n_chains: usize,
    pub n_steps: usize,
    pub seed: u64,
}

impl MinAr1Config {
    /// A config at the law's certified multiplier `ρ = p^{-1/α}`.
    pub fn certified(marginal: MarginalLaw, n_chains: usize, n_steps: usize, seed: u64) -> Self {
        MinAr1Config {
            marginal,
            rho: certified_rho(&marginal),
            n_chains,
            n_steps,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho.is_finite()) || self.rho == 1.0 {
            return Err(Error::invalid(
                "rho",
                self.rho,
                "must be positive, finite and different from 1",
            ));
        }
        if self.n_chains == 0 {
            return Err(Error::invalid("n_chains", 0.0, "must be at least 1"));
        }
        Ok(())
    }

    /// Whether `ρ` equals the law's certified multiplier `p^{-1/α}`.
    pub fn is_certified(&self) -> bool {
        (self.rho / certified_rho(&self.marginal) - 1.0).abs() < 1e-12
    }
}

pub fn certified_rho(d: &MarginalLaw) -> f64 {
    d.psi().period()
}

/// `S_ε(x) = S(x)/S(x/ρ)`.
pub fn innovation_survival(d: &MarginalLaw, rho: f64) -> Result<ExtendedSurvival> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::invalid("rho", rho, "must be positive and finite"));
    }
    law_cofactor(d, 1.0 / rho)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Innovation {
    Finite(f64),
    /// The atom at `+∞`: the minimum resolves to `ρ·X_{n-1}`.
    Infinite,
}

impl Innovation {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Innovation::Infinite)
    }
}

/// One innovation: `Infinite` with probability `q_inf`, else the finite
/// part by inverse transform.
pub fn innovation_sample<R: Rng + ?Sized>(e: &ExtendedSurvival, rng: &mut R) -> Result<Innovation> {
    let u: f64 = rng.sample(Open01);
    if u <= e.q_inf() {
        return Ok(Innovation::Infinite);
    }
    // u is uniform on (q_inf, 1) given this branch.
    let x = roots::solve_increasing(
        |x| u - e.eval(x),
        e.hint(),
        INNOVATION_RTOL,
        INNOVATION_MAX_ITER,
    )?;
    Ok(Innovation::Finite(x))
}

/// A single step of the recursion.
#[inline]
pub fn step(rho: f64, prev: f64, innovation: Innovation) -> f64 {
    match innovation {
        Innovation::Finite(e) => (rho * prev).min(e),
        Innovation::Infinite => rho * prev,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathPoint {
    pub value: f64,
    /// `false` at step 0, which has no innovation.
    pub innovation_was_infinite: bool,
}

/// Independent stream for chain `chain` of an ensemble seeded with `seed`.
pub fn chain_rng(seed: u64, chain: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(chain);
    rng
}

/// A validated min-AR(1) model ready to simulate.
#[derive(Debug, Clone)]
pub struct MinAr1 {
    config: MinAr1Config,
    innovation: ExtendedSurvival,
    innovation_report: CheckReport,
}

impl MinAr1 {
    /// Builds the innovation and rejects the config if it fails validation.
    pub fn new(config: MinAr1Config) -> Result<Self> {
        let (model, report) = Self::inspect(config)?;
        match model {
            Some(m) => Ok(m),
            None => Err(Error::CheckFailed(Box::new(report))),
        }
    }

    /// Like [`MinAr1::new`] but returns the innovation report either way.
    pub fn inspect(config: MinAr1Config) -> Result<(Option<Self>, CheckReport)> {
        config.validate()?;
        let innovation = innovation_survival(&config.marginal, config.rho)?;
        let grid = config.marginal.default_grid(INNOVATION_GRID);
        let mut report = validate_extended_survival(&innovation, &grid, DEFAULT_TOL);
        report.check = "innovation".into();
        if !config.is_certified() {
            report = report.with_note("rho differs from the certified multiplier p^(-1/alpha)");
        }
        if !report.passed {
            return Ok((None, report));
        }
        let model = MinAr1 {
            config,
            innovation,
            innovation_report: report.clone(),
        };
        Ok((Some(model), report))
    }

    pub fn config(&self) -> &MinAr1Config {
        &self.config
    }

    pub fn innovation(&self) -> &ExtendedSurvival {
        &self.innovation
    }

    pub fn innovation_report(&self) -> &CheckReport {
        &self.innovation_report
    }

    pub fn sample_innovation<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Innovation> {
        innovation_sample(&self.innovation, rng)
    }

    /// Path from a stationary start, `n_steps + 1` points.
    pub fn simulate_path<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<PathPoint>> {
        let x0 = self.config.marginal.sample_one(rng);
        self.simulate_path_from(x0, rng)
    }

    /// Path from an arbitrary start; only exploratory, as marginal
    /// stationarity concerns the stationary start.
    pub fn simulate_path_from<R: Rng + ?Sized>(
        &self,
        x0: f64,
        rng: &mut R,
    ) -> Result<Vec<PathPoint>> {
        let mut path = Vec::with_capacity(self.config.n_steps + 1);
        path.push(PathPoint {
            value: x0,
            innovation_was_infinite: false,
        });
        let mut x = x0;
        for _ in 0..self.config.n_steps {
            let e = self.sample_innovation(rng)?;
            x = step(self.config.rho, x, e);
            path.push(PathPoint {
                value: x,
                innovation_was_infinite: e.is_infinite(),
            });
        }
        Ok(path)
    }

    pub fn simulate_chain<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        Ok(self
            .simulate_path(rng)?
            .into_iter()
            .map(|p| p.value)
            .collect())
    }

    fn terminal_value(&self, chain: u64) -> Result<f64> {
        let mut rng = chain_rng(self.config.seed, chain);
        let mut x = self.config.marginal.sample_one(&mut rng);
        for _ in 0..self.config.n_steps {
            x = step(self.config.rho, x, self.sample_innovation(&mut rng)?);
        }
        Ok(x)
    }

    /// Terminal values of `n_chains` independent chains; identical for any
    /// thread count.
    pub fn simulate_ensemble(&self) -> Result<Vec<f64>> {
        (0..self.config.n_chains as u64)
            .into_par_iter()
            .map(|i| self.terminal_value(i))
            .collect()
    }

    /// Full paths of every chain, each on its own derived stream.
    pub fn simulate_paths(&self) -> Result<Vec<Vec<PathPoint>>> {
        (0..self.config.n_chains as u64)
            .into_par_iter()
            .map(|i| self.simulate_path(&mut chain_rng(self.config.seed, i)))
            .collect()
    }

    /// KS test of the ensemble's terminal values against the target law.
    pub fn stationarity_test(&self, level: f64) -> Result<KsReport> {
        let xs = self.simulate_ensemble()?;
        let d = self.config.marginal;
        ks_test(&xs, |x| d.cdf(x), level)
    }
}

pub fn simulate_chain<R: Rng + ?Sized>(cfg: &MinAr1Config, rng: &mut R) -> Result<Vec<f64>> {
    MinAr1::new(*cfg)?.simulate_chain(rng)
}

pub fn simulate_ensemble(cfg: &MinAr1Config) -> Result<Vec<f64>> {
    MinAr1::new(*cfg)?.simulate_ensemble()
}

pub fn stationarity_test(cfg: &MinAr1Config, level: f64) -> Result<KsReport> {
    MinAr1::new(*cfg)?.stationarity_test(level)
}
