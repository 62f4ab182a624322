//! Adaptive Simpson quadrature.

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 48;

/// `∫ₐᵇ f` to absolute tolerance `tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    let v = refine(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Numeric(format!(
            "non-finite integral over [{a}, {b}]"
        )))
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if !delta.is_finite() {
        return Err(Error::Numeric(format!(
            "non-finite integrand on [{a}, {b}]"
        )));
    }
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Numeric(format!(
            "quadrature did not converge on [{a}, {b}]"
        )));
    }
    Ok(refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}
