//! Bracketed root finding: sign-change scans plus Brent refinement.

use crate::error::{Error, Result};

/// Scan [lo, hi] on a uniform grid of `n` points and return all sign-change
/// brackets of `f`, in increasing order.
pub fn scan_sign_changes(
    f: &mut dyn FnMut(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    n: usize,
) -> Result<Vec<(f64, f64)>> {
    assert!(n >= 2 && hi > lo);
    let mut brackets = Vec::new();
    let mut x_prev = lo;
    let mut f_prev = f(lo)?;
    for i in 1..n {
        let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let fx = f(x)?;
        if f_prev == 0.0 {
            brackets.push((x_prev, x_prev));
        } else if f_prev * fx < 0.0 {
            brackets.push((x_prev, x));
        }
        x_prev = x;
        f_prev = fx;
    }
    if f_prev == 0.0 {
        brackets.push((x_prev, x_prev));
    }
    Ok(brackets)
}

/// Brent's method on a bracket [a, b] with f(a)·f(b) <= 0.
pub fn brent(
    f: &mut dyn FnMut(f64) -> Result<f64>,
    a0: f64,
    b0: f64,
    tol: f64,
    max_iter: usize,
) -> Result<f64> {
    if a0 == b0 {
        return Ok(a0);
    }
    let mut a = a0;
    let mut b = b0;
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa * fb > 0.0 {
        return Err(Error::NoBracket(format!("[{a0}, {b0}]")));
    }
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut mflag = true;
    for _ in 0..max_iter {
        if fb == 0.0 || (b - a).abs() < tol {
            return Ok(b);
        }
        let mut s = if fa != fc && fb != fc {
            // inverse quadratic interpolation
            a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let lo = (3.0 * a + b) / 4.0;
        let cond = (s - lo) * (s - b) >= 0.0
            || (mflag && (s - b).abs() >= (b - c).abs() / 2.0)
            || (!mflag && (s - b).abs() >= (c - d).abs() / 2.0)
            || (mflag && (b - c).abs() < tol)
            || (!mflag && (c - d).abs() < tol);
        if cond {
            s = 0.5 * (a + b);
            mflag = true;
        } else {
            mflag = false;
        }
        let fs = f(s)?;
        d = c;
        c = b;
        fc = fb;
        if fa * fs < 0.0 {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    Ok(b)
}
