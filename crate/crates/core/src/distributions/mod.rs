//! Standard normal, central t and noncentral t distributions.
//!
//! All functions are pure. Public entry points validate their arguments and
//! return [`Error::Domain`] for inputs outside the support; crate-internal
//! callers that have already validated use the unchecked helpers.

mod noncentral;
pub mod special;

pub(crate) use noncentral::noncentral_t_cdf_unchecked;
pub use noncentral::{noncentral_t_cdf, NONCENTRAL_MAX_TERMS, NONCENTRAL_TOL};
pub use special::regularized_incomplete_beta;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::{self, Tolerance};

/// Degrees of freedom of a t distribution. Any positive real is accepted.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct DegreesOfFreedom(f64);

impl DegreesOfFreedom {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && !value.is_nan() {
            Ok(Self(value))
        } else {
            Err(Error::domain(format!(
                "degrees of freedom must be > 0, got {value}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Noncentrality parameter of a noncentral t distribution.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Noncentrality(f64);

impl Noncentrality {
    pub const ZERO: Noncentrality = Noncentrality(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(Self(value))
        } else {
            Err(Error::domain(format!(
                "noncentrality must be finite, got {value}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

fn check_finite(what: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{what} must be finite, got {x}")))
    }
}

fn check_open_unit(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "probability must lie in (0, 1), got {p}"
        )))
    }
}

/// Φ(x).
pub fn std_normal_cdf(x: f64) -> Result<f64> {
    check_finite("normal cdf argument", x)?;
    Ok(special::ndtr(x))
}

/// Φ⁻¹(p) for `0 < p < 1`.
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    check_open_unit(p)?;
    Ok(normal_quantile_unchecked(p))
}

/// Acklam's rational approximation followed by two Halley corrections
/// against the full-precision CDF.
pub(crate) fn normal_quantile_unchecked(p: f64) -> f64 {
    if p == 0.5 {
        return 0.0;
    }
    if p > 0.5 {
        return -normal_quantile_unchecked(1.0 - p);
    }
    const A: [f64; 6] = [
        -3.969683028665376e1,
        2.209460984245205e2,
        -2.759285104469687e2,
        1.383_577_518_672_69e2,
        -3.066479806614716e1,
        2.506628277459239,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e1,
        1.615858368580409e2,
        -1.556989798598866e2,
        6.680131188771972e1,
        -1.328068155288572e1,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-3,
        -3.223964580411365e-1,
        -2.400758277161838,
        -2.549732539343734,
        4.374664141464968,
        2.938163982698783,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-3,
        3.224671290700398e-1,
        2.445134137142996,
        3.754408661907416,
    ];
    const P_LOW: f64 = 0.02425;

    let mut x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };

    let sqrt_2pi = (2.0 * std::f64::consts::PI).sqrt();
    for _ in 0..2 {
        let e = special::ndtr(x) - p;
        let u = e * sqrt_2pi * (0.5 * x * x).exp();
        if !u.is_finite() {
            break;
        }
        x -= u / (1.0 + 0.5 * x * u);
    }
    x
}

/// Central t CDF `F_{ν,0}(x)` via the incomplete beta identity.
pub fn central_t_cdf(x: f64, df: DegreesOfFreedom) -> Result<f64> {
    check_finite("t cdf argument", x)?;
    central_t_cdf_unchecked(x, df.value())
}

pub(crate) fn central_t_cdf_unchecked(x: f64, nu: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.5);
    }
    let x2 = x * x;
    let denom = nu + x2;
    // tail = P(T > |x|) = I_{ν/(ν+x²)}(ν/2, 1/2) / 2
    let tail = 0.5 * special::beta_reg(0.5 * nu, 0.5, nu / denom, x2 / denom)?;
    Ok(if x > 0.0 { 1.0 - tail } else { tail })
}

/// Central t quantile `F_{ν,0}⁻¹(p)`.
///
/// The root is bracketed around the normal quantile and then refined with
/// Brent's method until the CDF residual is below 1e-12.
pub fn central_t_quantile(p: f64, df: DegreesOfFreedom) -> Result<f64> {
    check_open_unit(p)?;
    if p == 0.5 {
        return Ok(0.0);
    }
    if p > 0.5 {
        return central_t_quantile(1.0 - p, df).map(|q| -q);
    }
    let nu = df.value();
    let mut err = None;
    let mut f = |t: f64| match central_t_cdf_unchecked(t, nu) {
        Ok(v) => v - p,
        Err(e) => {
            err.get_or_insert(e);
            f64::NAN
        }
    };
    // p < 0.5 so the quantile is negative; the t quantile is always further
    // from zero than the normal one.
    let z = normal_quantile_unchecked(p);
    let mut lo = 2.0 * z - 1.0;
    let mut expansions = 0;
    while f(lo) > 0.0 {
        lo *= 2.0;
        expansions += 1;
        if expansions > 1100 || !lo.is_finite() {
            return Err(err.unwrap_or_else(|| {
                Error::numeric(
                    "central_t_quantile",
                    format!("cannot bracket p = {p}, df = {nu}"),
                )
            }));
        }
    }
    let tol = Tolerance {
        x_abs: 1e-13,
        f_abs: 1e-13 * p.min(1.0),
        max_iter: 300,
    };
    let r = roots::brent(&mut f, lo, 0.0, tol);
    match (r, err) {
        (_, Some(e)) => Err(e),
        (r, None) => r,
    }
}
