//! Exceedance probabilities `Pr(θ̂ʳᵉᵖ_j > c)` for an exact replication of
//! size `m`, their noncentral-t confidence intervals, and the companion
//! parameter intervals and p-values.
//!
//! The interval rests on the pivot `q = √n (c - θ̂_j) / σ̂_j`, which follows a
//! noncentral t with `n - d` degrees of freedom and noncentrality
//! `δ(c) = √n (c - θ_j) / σ_j`. Inverting `F_{n-d,δ}(q)` in `δ` bounds
//! `δ(c)`, and since the true exceedance probability equals
//! `1 - Φ(√(m/n) δ(c))`, the `δ` bounds map directly to probability bounds.

use std::cell::RefCell;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::special::ndtr;
use crate::distributions::{
    central_t_cdf_unchecked, central_t_quantile, noncentral_t_cdf_unchecked,
    normal_quantile_unchecked, DegreesOfFreedom, Noncentrality,
};
use crate::error::{Error, Result};
use crate::models::FitSummary;
use crate::roots::{self, Tolerance};

/// Half width of the initial noncentrality bracket around `q`.
pub const DELTA_BRACKET_HALF_WIDTH: f64 = 10.0;
/// Maximum number of bracket doublings.
pub const DELTA_BRACKET_EXPANSIONS: usize = 60;
/// Width of the final noncentrality bracket.
pub const DELTA_TOLERANCE: f64 = 1e-10;
/// Number of points in the default cutoff grid.
pub const DEFAULT_GRID_POINTS: usize = 201;
/// Half width of the default cutoff grid, in standard errors.
pub const DEFAULT_GRID_HALF_WIDTH: f64 = 4.0;

/// Which confidence statement to make.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    TwoSided,
    /// Lower confidence bound only: intervals of the form `[L, 1]` for the
    /// exceedance probability and `[θ̂_L, ∞)` for the parameter.
    LowerOneSided,
    /// Upper confidence bound only: `[0, U]` and `(-∞, θ̂_U]`.
    UpperOneSided,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::TwoSided => "two_sided",
            Side::LowerOneSided => "lower_one_sided",
            Side::UpperOneSided => "upper_one_sided",
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two_sided" | "two-sided" | "two" => Ok(Side::TwoSided),
            "lower_one_sided" | "lower-one-sided" | "lower" => Ok(Side::LowerOneSided),
            "upper_one_sided" | "upper-one-sided" | "upper" => Ok(Side::UpperOneSided),
            other => Err(Error::Validation(format!("unknown side '{other}'"))),
        }
    }
}

/// A cutoff, replication size, confidence level and coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExceedanceQuery {
    cutoff: f64,
    rep_size: u64,
    alpha: f64,
    side: Side,
    coefficient: usize,
}

impl ExceedanceQuery {
    /// Two-sided query for the first coefficient.
    pub fn new(cutoff: f64, rep_size: u64, alpha: f64) -> Result<Self> {
        if !cutoff.is_finite() {
            return Err(Error::Validation(format!(
                "cutoff must be finite, got {cutoff}"
            )));
        }
        if rep_size == 0 {
            return Err(Error::Validation(
                "replication size must be at least 1".into(),
            ));
        }
        check_alpha(alpha)?;
        Ok(Self {
            cutoff,
            rep_size,
            alpha,
            side: Side::TwoSided,
            coefficient: 1,
        })
    }

    pub fn with_side(mut self, side: Side) -> Self {
        self.side = side;
        self
    }

    /// Selects coefficient `j`, counted from 1 (the intercept in a
    /// regression).
    pub fn with_coefficient(mut self, j: usize) -> Result<Self> {
        if j == 0 {
            return Err(Error::Validation("coefficient index is 1-based".into()));
        }
        self.coefficient = j;
        Ok(self)
    }

    pub fn with_cutoff(mut self, cutoff: f64) -> Result<Self> {
        if !cutoff.is_finite() {
            return Err(Error::Validation(format!(
                "cutoff must be finite, got {cutoff}"
            )));
        }
        self.cutoff = cutoff;
        Ok(self)
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn rep_size(&self) -> u64 {
        self.rep_size
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn coefficient(&self) -> usize {
        self.coefficient
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Validation(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )))
    }
}

/// Point estimate with confidence bounds, all on the probability scale.
///
/// `lower <= point <= upper` holds for two-sided intervals with `α <= 0.5`
/// and for one-sided bounds with `α <= 0.25`. Closer to `α = 0.5` a one-sided
/// bound can cross the point, because the noncentral t is skewed and
/// `F_{ν,q}(q)` differs from one half (it stays within [0.317, 0.683]).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalEstimate {
    pub point: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Interval for the parameter itself; one-sided bounds are infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParameterInterval {
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
}

/// `Pr(θ̂ʳᵉᵖ > c) = 1 - Φ(√m (c - θ) / σ)` for known `θ` and `σ`.
pub fn true_exceedance(theta: f64, sigma: f64, c: f64, m: u64) -> Result<f64> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::domain(format!(
            "sigma must be positive and finite, got {sigma}"
        )));
    }
    if !theta.is_finite() || !c.is_finite() {
        return Err(Error::domain("theta and cutoff must be finite"));
    }
    if m == 0 {
        return Err(Error::domain("replication size must be at least 1"));
    }
    Ok(ndtr(-(m as f64).sqrt() * (c - theta) / sigma))
}

/// Plug-in estimate of the exceedance probability at the fitted values.
pub fn point_estimate(fit: &FitSummary, query: &ExceedanceQuery) -> Result<f64> {
    let (theta, sigma) = fit.coefficient(query.coefficient)?;
    true_exceedance(theta, sigma, query.cutoff, query.rep_size)
}

/// Finds `δ` with `F_{ν,δ}(q) = target`.
///
/// The CDF is strictly decreasing in `δ`, so the root is unique. The bracket
/// starts at `q ± 10`, doubles its half width until the target is straddled,
/// and is then narrowed by Brent's method to a width of 1e-10.
pub fn solve_noncentrality(q: f64, df: DegreesOfFreedom, target: f64) -> Result<Noncentrality> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::domain(format!(
            "target probability must lie in (0, 1), got {target}"
        )));
    }
    if !q.is_finite() {
        return Err(Error::domain(format!("pivot must be finite, got {q}")));
    }
    solve_delta(q, df.value(), target).and_then(Noncentrality::new)
}

fn solve_delta(q: f64, nu: f64, target: f64) -> Result<f64> {
    // The root finders only see f64s; a failed CDF evaluation is parked here
    // and reported in preference to whatever the finder makes of the NaN.
    let failure = RefCell::new(None);
    let f = |delta: f64| match noncentral_t_cdf_unchecked(q, nu, delta) {
        Ok(v) => v - target,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let tol = Tolerance {
        x_abs: DELTA_TOLERANCE,
        f_abs: 0.0,
        max_iter: 200,
    };
    let root = roots::expand_bracket(f, q, DELTA_BRACKET_HALF_WIDTH, DELTA_BRACKET_EXPANSIONS)
        .and_then(|(lo, hi)| roots::brent(f, lo, hi, tol));
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    root.map_err(|e| match e {
        Error::Numeric { detail, .. } => Error::numeric(
            "solve_noncentrality",
            format!("q = {q}, df = {nu}, target = {target}: {detail}"),
        ),
        other => other,
    })
}

/// Pivot `q = √n (c - θ̂) / σ̂` and the residual degrees of freedom.
fn pivot(fit: &FitSummary, query: &ExceedanceQuery) -> Result<(f64, f64)> {
    let (theta, sigma) = fit.coefficient(query.coefficient)?;
    let q = (fit.n() as f64).sqrt() * (query.cutoff - theta) / sigma;
    Ok((q, fit.residual_df()))
}

/// Confidence interval for the exceedance probability, together with the
/// plug-in point estimate.
pub fn ep_confidence_interval(
    fit: &FitSummary,
    query: &ExceedanceQuery,
) -> Result<IntervalEstimate> {
    let point = point_estimate(fit, query)?;
    let (q, nu) = pivot(fit, query)?;
    let scale = (query.rep_size as f64 / fit.n() as f64).sqrt();
    let alpha = query.alpha;
    let to_prob = |delta: f64| ndtr(-scale * delta);

    let (lower, upper) = match query.side {
        Side::TwoSided => {
            let delta_upper = solve_delta(q, nu, 0.5 * alpha)?;
            let delta_lower = solve_delta(q, nu, 1.0 - 0.5 * alpha)?;
            (to_prob(delta_upper), to_prob(delta_lower))
        }
        Side::LowerOneSided => (to_prob(solve_delta(q, nu, alpha)?), 1.0),
        Side::UpperOneSided => (0.0, to_prob(solve_delta(q, nu, 1.0 - alpha)?)),
    };
    Ok(IntervalEstimate {
        point,
        lower,
        upper: upper.max(lower),
    })
}

/// Point estimates and pointwise bands over a grid of cutoffs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpCurve {
    pub cutoffs: Vec<f64>,
    pub estimates: Vec<IntervalEstimate>,
    pub fit: FitSummary,
    pub rep_size: u64,
    pub alpha: f64,
    pub side: Side,
    pub coefficient: usize,
}

impl EpCurve {
    pub fn len(&self) -> usize {
        self.cutoffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cutoffs.is_empty()
    }

    pub fn iter(
        &self,
    ) -> impl DoubleEndedIterator<Item = (f64, &IntervalEstimate)> + ExactSizeIterator {
        self.cutoffs.iter().copied().zip(self.estimates.iter())
    }
}

/// 201 equally spaced cutoffs spanning `θ̂_j ± 4 σ̂_j / √n`.
pub fn default_cutoff_grid(fit: &FitSummary, coefficient: usize) -> Result<Vec<f64>> {
    let (theta, _) = fit.coefficient(coefficient)?;
    let half = DEFAULT_GRID_HALF_WIDTH * fit.standard_error(coefficient)?;
    Ok(linspace(theta - half, theta + half, DEFAULT_GRID_POINTS))
}

/// `count` equally spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (count - 1) as f64;
            (0..count)
                .map(|i| {
                    if i + 1 == count {
                        hi
                    } else {
                        lo + step * i as f64
                    }
                })
                .collect()
        }
    }
}

/// Evaluates [`ep_confidence_interval`] at every cutoff of a strictly
/// increasing grid. `template` supplies `m`, `α`, side and coefficient.
pub fn ep_curve(fit: &FitSummary, cutoffs: &[f64], template: &ExceedanceQuery) -> Result<EpCurve> {
    if cutoffs.is_empty() {
        return Err(Error::Validation("cutoff grid is empty".into()));
    }
    if let Some(c) = cutoffs.iter().find(|c| !c.is_finite()) {
        return Err(Error::Validation(format!("cutoff {c} is not finite")));
    }
    if let Some(w) = cutoffs.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::Validation(format!(
            "cutoffs must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    fit.coefficient(template.coefficient)?;

    let estimates = cutoffs
        .par_iter()
        .map(|&c| {
            let query = template.with_cutoff(c)?;
            ep_confidence_interval(fit, &query).map_err(|e| Error::AtCutoff {
                cutoff: c,
                source: Box::new(e),
            })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    Ok(EpCurve {
        cutoffs: cutoffs.to_vec(),
        estimates,
        fit: fit.clone(),
        rep_size: template.rep_size,
        alpha: template.alpha,
        side: template.side,
        coefficient: template.coefficient,
    })
}

/// t-based confidence interval for `θ_j`.
pub fn parameter_ci(
    fit: &FitSummary,
    j: usize,
    alpha: f64,
    side: Side,
) -> Result<ParameterInterval> {
    check_alpha(alpha)?;
    let (theta, _) = fit.coefficient(j)?;
    let se = fit.standard_error(j)?;
    let df = DegreesOfFreedom::new(fit.residual_df())?;
    let level = match side {
        Side::TwoSided => 1.0 - 0.5 * alpha,
        Side::LowerOneSided | Side::UpperOneSided => 1.0 - alpha,
    };
    let half = central_t_quantile(level, df)? * se;
    let (lower, upper) = match side {
        Side::TwoSided => (theta - half, theta + half),
        Side::LowerOneSided => (theta - half, f64::INFINITY),
        Side::UpperOneSided => (f64::NEG_INFINITY, theta + half),
    };
    Ok(ParameterInterval {
        estimate: theta,
        lower,
        upper,
    })
}

/// t-test p-value for `θ_j` against the value `c`.
///
/// Two-sided tests `θ_j = c`; lower one-sided tests `H0: θ_j ≤ c` against
/// `θ_j > c` (the test dual to the `[θ̂_L, ∞)` interval); upper one-sided
/// tests `H0: θ_j ≥ c`.
pub fn p_value(fit: &FitSummary, j: usize, c: f64, side: Side) -> Result<f64> {
    if !c.is_finite() {
        return Err(Error::Validation(format!("cutoff must be finite, got {c}")));
    }
    let (theta, sigma) = fit.coefficient(j)?;
    let nu = fit.residual_df();
    let t = (fit.n() as f64).sqrt() * (c - theta) / sigma;
    match side {
        Side::TwoSided => Ok((2.0 * central_t_cdf_unchecked(-t.abs(), nu)?).min(1.0)),
        Side::LowerOneSided => central_t_cdf_unchecked(t, nu),
        Side::UpperOneSided => central_t_cdf_unchecked(-t, nu),
    }
}

/// Cutoff `θ₀ + z_{1-α} σ / √n` at which the exceedance probability with
/// `m = n` equals the power of the one-sided level-`α` z-test of
/// `θ ≤ θ₀`.
pub fn power_cutoff(theta0: f64, sigma: f64, n: u64, alpha: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::domain(format!(
            "sigma must be positive and finite, got {sigma}"
        )));
    }
    if !theta0.is_finite() {
        return Err(Error::domain("theta0 must be finite"));
    }
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    check_alpha(alpha)
        .map_err(|_| Error::domain(format!("alpha must lie in (0, 1), got {alpha}")))?;
    Ok(theta0 + normal_quantile_unchecked(1.0 - alpha) * sigma / (n as f64).sqrt())
}
