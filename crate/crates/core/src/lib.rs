//! Min-semi-selfdecomposable laws and the minification processes they drive.
//!
//! A survival function `S` is min-SSD(b) when `S(x) = S(bx)·S₀(x)` for some
//! survival factor `S₀`. The semi-Pareto, semi-Weibull, generalized
//! semi-Pareto and φ-semi-Weibull families, all built on a function `ψ` with
//! `p·ψ(x) = ψ(p^{1/α}x)`, have this property at `b = p^{1/α}`, and such laws
//! are exactly the stationary marginals of `X_n = ρ·X_{n-1} ∧ ε_n`.
//!
//! Modules:
//! - [`psi`]: the functions `ψ`.
//! - [`distributions`]: the marginal laws, their quantiles and samplers.
//! - [`randsize`]: random sample sizes and N-min semi-stability.
//! - [`decompose`]: cofactors and their validity checks.
//! - [`ar1`]: the min-AR(1) simulator.
//! - [`discrete`]: integer-valued analogues.
//! - [`stats`]: KS tests and empirical distribution functions.
//! - [`cli`]: the `minssd` command-line front-end.

// NaN-rejecting comparisons.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ar1;
pub mod cli;
pub mod decompose;
pub mod discrete;
pub mod distributions;
pub mod error;
pub mod grid;
pub mod psi;
pub mod randsize;
pub mod report;
mod roots;
pub mod stats;

pub use distributions::{LaplaceTransform, LawKind, MarginalLaw};
pub use error::{Error, Result};
pub use grid::GridSpec;
pub use psi::PsiFunction;
pub use randsize::Pgf;
pub use report::CheckReport;
