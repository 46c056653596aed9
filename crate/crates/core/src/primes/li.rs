use crate::error::{Error, Result};

fn integrand(u: f64) -> f64 {
    u.exp() / u
}

fn simpson(a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = integrand(lm);
    let frm = integrand(rm);
    let left = simpson(a, fa, m, fm, flm);
    let right = simpson(m, fm, b, fb, frm);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive(a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
        + adaptive(m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
}

/// `∫_2^x dt / ln t`, by adaptive Simpson quadrature in the variable `u = ln t`.
pub fn logarithmic_integral(x: f64) -> Result<f64> {
    if !x.is_finite() || x < 2.0 {
        return Err(Error::arg(format!(
            "logarithmic integral needs finite x >= 2, got {x}"
        )));
    }
    if x == 2.0 {
        return Ok(0.0);
    }
    let a = std::f64::consts::LN_2;
    let b = x.ln();
    let fa = integrand(a);
    let fb = integrand(b);
    let m = 0.5 * (a + b);
    let fm = integrand(m);
    let whole = simpson(a, fa, b, fb, fm);
    // The integrand is positive, so a crude estimate scales the tolerance.
    let tol = 1e-12 * whole.abs().max(f64::MIN_POSITIVE);
    Ok(adaptive(a, fa, b, fb, m, fm, whole, tol, 60))
}
