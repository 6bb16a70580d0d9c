//! Bracketing root finder shared by the threshold solvers.

use crate::error::{ModelError, Result};

/// Bisection on a continuous `f` with a sign change over `[lo, hi]`.
///
/// Stops when `|f(x)| <= f_tol` or the bracket is narrower than `x_tol`;
/// returns the midpoint of the final bracket or the exact hit.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, f_tol: f64, x_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(ModelError::NoRoot { lo, hi, f_lo, f_hi });
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid.abs() <= f_tol || (hi - lo) <= x_tol {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
