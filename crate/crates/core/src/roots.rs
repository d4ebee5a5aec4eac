//! Root finding for monotone functions on `(0, ∞)`.
//!
//! Every quantile in the crate reduces to solving `f(x) = target` for a
//! monotone `f`. The search runs in `t = ln x`: a geometric bracket expansion
//! followed by Illinois false position with a bisection fallback, so the
//! bracket is kept at every step and the worst case is plain bisection.

use crate::error::{Error, Result};

/// Doubling steps in log space; `2^11 > 1490` covers the whole f64 range.
const MAX_EXPANSIONS: usize = 12;

/// Solve `h(x) = 0` for `h` non-decreasing in `x > 0`.
///
/// `x0` seeds the bracket search. `rtol` is the relative width of the final
/// bracket; at most `max_iter` refinement steps are taken.
pub(crate) fn solve_increasing<H>(h: H, x0: f64, rtol: f64, max_iter: usize) -> Result<f64>
where
    H: Fn(f64) -> f64,
{
    let (a, b) = expand_bracket(&h, x0.ln())?;
    refine(&h, a, b, rtol, max_iter)
}

/// Like [`solve_increasing`] with a bracket `[lo, hi]` known to contain the root.
pub(crate) fn solve_increasing_in<H>(
    h: H,
    lo: f64,
    hi: f64,
    rtol: f64,
    max_iter: usize,
) -> Result<f64>
where
    H: Fn(f64) -> f64,
{
    let (a, b) = (lo.ln(), hi.ln());
    let (ha, hb) = (h(lo), h(hi));
    if ha.is_nan() || hb.is_nan() || ha > 0.0 || hb < 0.0 {
        // Rounding at the bracket edge; fall back to searching.
        let (a, b) = expand_bracket(&h, 0.5 * (a + b))?;
        return refine(&h, a, b, rtol, max_iter);
    }
    refine(&h, (a, ha), (b, hb), rtol, max_iter)
}

fn expand_bracket<H: Fn(f64) -> f64>(h: &H, t0: f64) -> Result<((f64, f64), (f64, f64))> {
    let h0 = h(t0.exp());
    if h0.is_nan() {
        return Err(Error::Solver(format!(
            "function is NaN at x = {}",
            t0.exp()
        )));
    }
    if h0 == 0.0 {
        return Ok(((t0, h0), (t0, h0)));
    }
    let dir = if h0 < 0.0 { 1.0 } else { -1.0 };
    let (mut t, mut ht) = (t0, h0);
    let mut step = 1.0;
    for _ in 0..MAX_EXPANSIONS {
        let t_next = t + dir * step;
        let x = t_next.exp();
        if x == 0.0 || x.is_infinite() {
            break;
        }
        let h_next = h(x);
        if h_next.is_nan() {
            return Err(Error::Solver(format!("function is NaN at x = {x}")));
        }
        if (h_next >= 0.0) == (dir > 0.0) {
            return Ok(if dir > 0.0 {
                ((t, ht), (t_next, h_next))
            } else {
                ((t_next, h_next), (t, ht))
            });
        }
        t = t_next;
        ht = h_next;
        step *= 2.0;
    }
    Err(Error::Solver(format!(
        "no sign change found starting from x = {}",
        t0.exp()
    )))
}

fn refine<H: Fn(f64) -> f64>(
    h: &H,
    (mut a, mut ha): (f64, f64),
    (mut b, mut hb): (f64, f64),
    rtol: f64,
    max_iter: usize,
) -> Result<f64> {
    if ha == 0.0 {
        return Ok(a.exp());
    }
    if hb == 0.0 {
        return Ok(b.exp());
    }
    // 0 = none, -1 = left endpoint replaced last, 1 = right endpoint.
    let mut side = 0i8;
    let mut width_prev = b - a;
    let mut force_bisect = false;
    for _ in 0..max_iter {
        let width = b - a;
        if width <= rtol {
            break;
        }
        let mut t = if ha.is_finite() && hb.is_finite() && !force_bisect {
            (a * hb - b * ha) / (hb - ha)
        } else {
            0.5 * (a + b)
        };
        if !(t > a && t < b) {
            t = 0.5 * (a + b);
        }
        let ht = h(t.exp());
        if ht.is_nan() {
            return Err(Error::Solver(format!("function is NaN at x = {}", t.exp())));
        }
        if ht == 0.0 {
            return Ok(t.exp());
        }
        if ht < 0.0 {
            a = t;
            ha = ht;
            if side == -1 {
                hb *= 0.5;
            }
            side = -1;
        } else {
            b = t;
            hb = ht;
            if side == 1 {
                ha *= 0.5;
            }
            side = 1;
        }
        force_bisect = b - a > 0.5 * width_prev;
        width_prev = width;
    }
    Ok((0.5 * (a + b)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_root() {
        let x = solve_increasing(|x| x * x * x - 27.0, 1.0, 1e-14, 200).unwrap();
        assert!((x - 3.0).abs() < 1e-12);
    }

    #[test]
    fn root_far_below_seed() {
        let x = solve_increasing(|x| x - 1e-200, 1.0, 1e-13, 200).unwrap();
        assert!((x / 1e-200 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn no_root() {
        assert!(solve_increasing(|_| -1.0, 1.0, 1e-12, 200).is_err());
    }

    #[test]
    fn given_bracket_is_respected() {
        let x = solve_increasing_in(|x| x.ln() - 2.0, 1.0, 100.0, 1e-14, 200).unwrap();
        assert!((x - 2f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn flat_steps_fall_back_to_bisection() {
        // Staircase with a jump at x = 5; the solver must still converge onto it.
        let x = solve_increasing(|x| if x < 5.0 { -1.0 } else { 1.0 }, 1.0, 1e-12, 200).unwrap();
        assert!((x - 5.0).abs() < 1e-10);
    }
}
