//! Safeguarded Newton iteration for increasing scalar functions.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
    /// Whether `|fx| <= f_tol` was reached, as opposed to the bracket
    /// shrinking below `x_tol`.
    pub converged: bool,
}

/// Finds a root of an increasing function `f` on `[lo, hi]` with
/// `f(lo) < 0 < f(hi)`. `f` returns the value and the derivative.
///
/// Newton steps are taken from `x0` while they stay strictly inside the
/// current bracket and halve the bracket-scaled step; otherwise the iteration
/// bisects. Stops on `|f| <= f_tol`, on a bracket narrower than
/// `x_tol(x)`, or fails after `max_iter` evaluations.
pub fn newton_bisect<F, T>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    x0: f64,
    f_tol: f64,
    x_tol: T,
    max_iter: usize,
) -> Result<Root>
where
    F: FnMut(f64) -> (f64, f64),
    T: Fn(f64) -> f64,
{
    debug_assert!(lo < hi);
    let mut x = if x0 > lo && x0 < hi { x0 } else { 0.5 * (lo + hi) };
    let mut best = Root { x, fx: f64::INFINITY, iterations: 0, converged: false };
    let mut dx_old = hi - lo;
    for it in 1..=max_iter {
        let (fx, dfx) = f(x);
        if fx.is_nan() {
            return Err(Error::NonFinite(format!("root function at {x}")));
        }
        if fx.abs() < best.fx.abs() {
            best = Root { x, fx, iterations: it, converged: false };
        }
        best.iterations = it;
        if fx.abs() <= f_tol {
            best.converged = true;
            return Ok(best);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= x_tol(x) {
            return Ok(best);
        }
        let newton = x - fx / dfx;
        let dx = (newton - x).abs();
        let accept = newton.is_finite() && newton > lo && newton < hi && 2.0 * dx <= dx_old;
        if accept {
            dx_old = dx;
            x = newton;
        } else {
            dx_old = hi - lo;
            x = 0.5 * (lo + hi);
        }
        if x <= lo || x >= hi {
            // Bracket is at floating-point resolution.
            return Ok(best);
        }
    }
    Err(Error::NoConvergence { iterations: max_iter, residual: best.fx.abs() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = newton_bisect(|x| (x * x - 2.0, 2.0 * x), 0.0, 2.0, 1.0, 1e-15, |_| 0.0, 100).unwrap();
        assert!((r.x - 2f64.sqrt()).abs() < 1e-15);
        assert!(r.converged);
        assert!(r.iterations < 10);
    }

    #[test]
    fn falls_back_to_bisection_on_flat_derivative() {
        // Newton from 0.9 overshoots far outside the bracket.
        let r = newton_bisect(|x: f64| (x.atan(), 1.0 / (1.0 + x * x)), -10.0, 5.0, 3.0, 1e-14, |_| 0.0, 200).unwrap();
        assert!(r.x.abs() < 1e-14);
    }

    #[test]
    fn stops_on_bracket_width() {
        // A step function has no root to f_tol; the bracket collapses on the jump.
        let r = newton_bisect(|x: f64| (if x < 0.3 { -1.0 } else { 1.0 }, 0.0), 0.0, 1.0, 0.5, 1e-12, |_| 1e-12, 200)
            .unwrap();
        assert!(!r.converged);
        assert!(r.iterations < 60);
    }

    #[test]
    fn reports_iteration_cap() {
        let err = newton_bisect(|x: f64| (x - 0.123456789, 1e-30), 0.0, 1.0, 0.5, 0.0, |_| 0.0, 5).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { iterations: 5, .. }));
    }
}
