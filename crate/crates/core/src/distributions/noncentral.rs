//! Noncentral t CDF.
//!
//! For `x >= 0`, with `y = x²/(ν + x²)` and `λ = δ²/2`,
//!
//! ```text
//! F_{ν,δ}(x) = Φ(-δ) + ½ Σ_j [ p_j I_y(j + ½, ν/2) + (δ/√2) q_j I_y(j + 1, ν/2) ]
//! p_j = e^{-λ} λ^j / Γ(j + 1),   q_j = e^{-λ} λ^j / Γ(j + 3/2)
//! ```
//!
//! The sum starts at the dominant index `⌊λ⌋` and runs outward in both
//! directions, carrying the incomplete beta values with their two-term
//! recurrences so that only two continued fractions are evaluated per call.
//! Negative `x` goes through `F_{ν,δ}(x) = 1 - F_{ν,-δ}(-x)`.

use super::special::{beta_power_terms, beta_reg, ln_gamma, log1p_excess, ndtr, stirling_error};
use super::{check_finite, DegreesOfFreedom, Noncentrality};
use crate::error::{Error, Result};

/// Absolute truncation tolerance of the series.
pub const NONCENTRAL_TOL: f64 = 1e-14;
/// Maximum number of series terms visited.
pub const NONCENTRAL_MAX_TERMS: usize = 10_000;

/// `F_{ν,δ}(x)`, the noncentral t CDF.
pub fn noncentral_t_cdf(x: f64, df: DegreesOfFreedom, delta: Noncentrality) -> Result<f64> {
    check_finite("noncentral t cdf argument", x)?;
    noncentral_t_cdf_unchecked(x, df.value(), delta.value())
}

pub(crate) fn noncentral_t_cdf_unchecked(x: f64, nu: f64, delta: f64) -> Result<f64> {
    let (flip, v) = if x < 0.0 {
        (true, series(-x, nu, -delta)?)
    } else {
        (false, series(x, nu, delta)?)
    };
    // Within the truncation tolerance of 1 the series cannot resolve the
    // complement, so report exactly 1 (or 0 after reflection).
    let v = if v > 1.0 - NONCENTRAL_TOL {
        1.0
    } else {
        v.max(0.0)
    };
    Ok(if flip { 1.0 - v } else { v })
}

/// Incomplete beta `I_y(s, b)` together with the step
/// `g(s) = I_y(s, b) - I_y(s + 1, b) = y^s (1-y)^b / (s B(s, b))`.
#[derive(Clone, Copy)]
struct BetaTerm {
    shape: f64,
    value: f64,
    step: f64,
}

impl BetaTerm {
    fn new(shape: f64, b: f64, y: f64, y_comp: f64) -> Result<Self> {
        Ok(Self {
            shape,
            value: beta_reg(shape, b, y, y_comp)?,
            step: beta_power_terms(shape, b, y, y_comp) / shape,
        })
    }

    fn forward(&mut self, b: f64, y: f64) {
        self.value = (self.value - self.step).max(0.0);
        self.step *= y * (self.shape + b) / (self.shape + 1.0);
        self.shape += 1.0;
    }

    /// Moves to `shape - 1`. Requires `shape >= 1`.
    fn backward(&mut self, b: f64, y: f64) {
        self.step *= self.shape / (y * (self.shape - 1.0 + b));
        self.shape -= 1.0;
        self.value = (self.value + self.step).min(1.0);
    }
}

/// `e^{-λ} λ^k / k!` in saddle-point form, which keeps full relative
/// precision when `k` and `λ` are both large.
fn poisson_weight(k: f64, lambda: f64) -> f64 {
    if k == 0.0 {
        return (-lambda).exp();
    }
    let t = (k - lambda) / lambda;
    let deviance = lambda * t * t - k * log1p_excess(t);
    (-stirling_error(k) - deviance).exp() / (std::f64::consts::TAU * k).sqrt()
}

/// `Γ(a) / Γ(a + ½)`.
fn gamma_half_ratio(a: f64) -> f64 {
    if a >= 8.0 {
        (-0.5 * a.ln() + a * log1p_excess(0.5 / a) + stirling_error(a) - stirling_error(a + 0.5))
            .exp()
    } else {
        (ln_gamma(a) - ln_gamma(a + 0.5)).exp()
    }
}

fn series(x: f64, nu: f64, delta: f64) -> Result<f64> {
    let base = ndtr(-delta);
    if x == 0.0 {
        return Ok(base);
    }
    let x2 = x * x;
    let denom = nu + x2;
    let y = x2 / denom;
    let y_comp = nu / denom;
    let b = 0.5 * nu;

    let lambda = 0.5 * delta * delta;
    let k = lambda.floor();
    let k_us = k as usize;
    let p_k = poisson_weight(k, lambda);
    let q_k = p_k * gamma_half_ratio(k + 1.0);
    let q_scale = delta * std::f64::consts::FRAC_1_SQRT_2;

    let beta_p_k = BetaTerm::new(k + 0.5, b, y, y_comp)?;
    let beta_q_k = BetaTerm::new(k + 1.0, b, y, y_comp)?;

    let mut sum = p_k * beta_p_k.value + q_scale * q_k * beta_q_k.value;
    let mut terms = 1usize;

    // backward from k - 1 to 0
    {
        let (mut p, mut q) = (p_k, q_k);
        let (mut bp, mut bq) = (beta_p_k, beta_q_k);
        let mut j = k_us;
        while j > 0 {
            let jf = j as f64;
            p *= jf / lambda;
            q *= (jf + 0.5) / lambda;
            bp.backward(b, y);
            bq.backward(b, y);
            j -= 1;
            sum += p * bp.value + q_scale * q * bq.value;
            terms += 1;
            // Below the mode the weights shrink with ratio j/λ, but the
            // incomplete beta factors grow, so only I <= 1 bounds them.
            let r = (j as f64) / lambda;
            if (p + q_scale.abs() * q) * r / (1.0 - r) < NONCENTRAL_TOL {
                break;
            }
            if terms > NONCENTRAL_MAX_TERMS {
                return Err(not_converged(x, nu, delta, sum));
            }
        }
    }

    // forward from k + 1
    let (mut p, mut q) = (p_k, q_k);
    let (mut bp, mut bq) = (beta_p_k, beta_q_k);
    let mut j = k;
    loop {
        // Past the mode both weight sequences shrink at least geometrically
        // with ratio r = λ/(j+1), and the incomplete beta factors decrease,
        // so the unvisited remainder is below (p_j + |δ/√2| q_j) r / (1 - r).
        let r = lambda / (j + 1.0);
        if r < 1.0 {
            let bound = (p * bp.value + q_scale.abs() * q * bq.value) * r / (1.0 - r);
            if bound < NONCENTRAL_TOL {
                break;
            }
        }
        if bp.value + bq.value == 0.0 {
            break;
        }
        j += 1.0;
        p *= lambda / j;
        q *= lambda / (j + 0.5);
        bp.forward(b, y);
        bq.forward(b, y);
        sum += p * bp.value + q_scale * q * bq.value;
        terms += 1;
        if terms > NONCENTRAL_MAX_TERMS {
            return Err(not_converged(x, nu, delta, sum));
        }
    }

    Ok(base + 0.5 * sum)
}

fn not_converged(x: f64, nu: f64, delta: f64, sum: f64) -> Error {
    Error::numeric(
        "noncentral_t_cdf",
        format!(
            "series did not reach tolerance {NONCENTRAL_TOL} within {NONCENTRAL_MAX_TERMS} terms \
             (x = {x}, df = {nu}, delta = {delta}, partial sum = {sum})"
        ),
    )
}
