//! Adaptive Simpson quadrature.

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 50;

/// Integral of `f` over `[breaks[0], breaks.last()]`, restarting the recursion at every
/// interior break. The absolute tolerance `tol` is shared out by interval length.
pub fn integrate<F: Fn(f64) -> f64>(f: F, breaks: &[f64], tol: f64, max_evals: usize) -> Result<f64> {
    let (a, b) = (breaks[0], *breaks.last().unwrap());
    let total_len = b - a;
    if total_len <= 0.0 {
        return Ok(0.0);
    }
    let mut evals = 0usize;
    let mut sum = 0.0;
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let local_tol = tol * (hi - lo) / total_len;
        let (flo, fmid, fhi) = (f(lo), f(0.5 * (lo + hi)), f(hi));
        evals += 3;
        let whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        // explicit stack of (lo, hi, f(lo), f(mid), f(hi), estimate, tol, depth)
        let mut stack = vec![(lo, hi, flo, fmid, fhi, whole, local_tol, 0u32)];
        while let Some((a, b, fa, fm, fb, s, eps, depth)) = stack.pop() {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            evals += 2;
            if evals > max_evals {
                return Err(Error::Numerical(format!(
                    "quadrature exceeded {max_evals} function evaluations"
                )));
            }
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            let delta = left + right - s;
            if depth >= MAX_DEPTH || delta.abs() <= 15.0 * eps {
                sum += left + right + delta / 15.0;
            } else {
                stack.push((a, m, fa, flm, fm, left, eps / 2.0, depth + 1));
                stack.push((m, b, fm, frm, fb, right, eps / 2.0, depth + 1));
            }
        }
    }
    Ok(sum)
}
