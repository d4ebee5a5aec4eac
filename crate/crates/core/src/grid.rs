use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Log-spaced evaluation grid on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn log(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo > 0.0 && lo.is_finite()) {
            return Err(Error::invalid("grid.lo", lo, "must be positive and finite"));
        }
        if !(hi >= lo && hi.is_finite()) {
            return Err(Error::invalid(
                "grid.hi",
                hi,
                "must be finite and at least grid.lo",
            ));
        }
        if n == 0 {
            return Err(Error::invalid(
                "grid.n",
                0.0,
                "grid must have at least one point",
            ));
        }
        Ok(GridSpec { lo, hi, n })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        let (a, b) = (self.lo.ln(), self.hi.ln());
        let step = (b - a) / (self.n - 1) as f64;
        (0..self.n)
            .map(|i| {
                if i == 0 {
                    self.lo
                } else if i == self.n - 1 {
                    self.hi
                } else {
                    (a + step * i as f64).exp()
                }
            })
            .collect()
    }
}
