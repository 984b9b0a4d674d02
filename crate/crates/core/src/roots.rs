//! Bracketed root finding for monotone scalar functions.
//!
//! Every inversion in the crate (normal and t quantiles, noncentrality
//! solving) reduces to finding the unique zero of a monotone function, so a
//! single safeguarded Brent solver is shared by all of them.

use crate::error::{Error, Result};

/// Stopping rule for [`brent`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    /// Absolute width of the final bracket.
    pub x_abs: f64,
    /// Stop as soon as `|f(x)| <= f_abs`.
    pub f_abs: f64,
    pub max_iter: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            x_abs: 1e-12,
            f_abs: 0.0,
            max_iter: 200,
        }
    }
}

/// Finds a zero of `f` in `[lo, hi]`, where `f(lo)` and `f(hi)` have
/// opposite signs (or one of them is zero).
///
/// Inverse quadratic interpolation and secant steps are accepted only while
/// they shrink the bracket fast enough; otherwise the step falls back to
/// bisection, so convergence is never slower than bisection.
pub fn brent<F>(mut f: F, lo: f64, hi: f64, tol: Tolerance) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa.is_nan() || fb.is_nan() {
        return Err(Error::numeric("brent", "function is NaN at bracket end"));
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::numeric(
            "brent",
            format!("root not bracketed: f({a}) = {fa}, f({b}) = {fb}"),
        ));
    }

    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;

    for _ in 0..tol.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }

        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol.x_abs;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 || fb.abs() <= tol.f_abs {
            return Ok(b);
        }

        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }

        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::numeric("brent", format!("function is NaN at {b}")));
        }
    }

    Err(Error::numeric(
        "brent",
        format!(
            "no convergence after {} iterations; bracket [{}, {}]",
            tol.max_iter,
            b.min(c),
            b.max(c)
        ),
    ))
}

/// Grows `[center - half_width, center + half_width]` by doubling the half
/// width until `f` changes sign across it. Returns the bracket.
pub fn expand_bracket<F>(
    mut f: F,
    center: f64,
    half_width: f64,
    max_expansions: usize,
) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let mut w = half_width;
    for _ in 0..=max_expansions {
        let (lo, hi) = (center - w, center + w);
        let (flo, fhi) = (f(lo), f(hi));
        if flo.is_nan() || fhi.is_nan() {
            return Err(Error::numeric(
                "expand_bracket",
                format!("function is NaN on [{lo}, {hi}]"),
            ));
        }
        if flo == 0.0 || fhi == 0.0 || flo.signum() != fhi.signum() {
            return Ok((lo, hi));
        }
        w *= 2.0;
    }
    Err(Error::numeric(
        "expand_bracket",
        format!("no sign change within {max_expansions} expansions around {center}"),
    ))
}
