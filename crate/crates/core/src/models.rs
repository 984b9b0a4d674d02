//! Estimators for linear combinations of normal observations, reduced to the
//! sufficient statistics consumed by the exceedance layer.
//!
//! Every estimator here has the form `θ̂ = A y` with `y ~ N(μ, ν² V)`. The
//! fitted marginal scale is stored as `σ̂_j = √Σ̂_jj` with
//! `Σ̂ = n ν̂² A V Aᵀ`, so the standard error of `θ̂_j` is always `σ̂_j / √n`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use nalgebra::DMatrix as Matrix;

/// Relative pivot threshold below which a design column is treated as
/// linearly dependent on the preceding ones.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Observed data for one study.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    outcome: Vec<f64>,
    covariates: Option<DMatrix<f64>>,
    weights: Option<DMatrix<f64>>,
}

impl Dataset {
    /// Outcome-only data set (sample mean).
    pub fn new(outcome: Vec<f64>) -> Result<Self> {
        if outcome.len() < 2 {
            return Err(Error::InsufficientData {
                n: outcome.len(),
                d: 1,
            });
        }
        if let Some(i) = outcome.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!(
                "outcome[{i}] = {} is not finite",
                outcome[i]
            )));
        }
        Ok(Self {
            outcome,
            covariates: None,
            weights: None,
        })
    }

    /// Attaches an `n × k` covariate matrix. The intercept column is added
    /// by the regression fit and must not be included here; `k = 0` gives an
    /// intercept-only design.
    pub fn with_covariates(mut self, covariates: DMatrix<f64>) -> Result<Self> {
        if covariates.nrows() != self.outcome.len() {
            return Err(Error::Validation(format!(
                "covariate matrix has {} rows for {} outcomes",
                covariates.nrows(),
                self.outcome.len()
            )));
        }
        if covariates.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("covariates must be finite".into()));
        }
        self.covariates = Some(covariates);
        Ok(self)
    }

    /// Attaches the known `n × n` covariance structure `V` of the outcome.
    pub fn with_weights(mut self, weights: DMatrix<f64>) -> Result<Self> {
        let n = self.outcome.len();
        if weights.nrows() != n || weights.ncols() != n {
            return Err(Error::WeightMatrix(format!(
                "expected {n}×{n}, got {}×{}",
                weights.nrows(),
                weights.ncols()
            )));
        }
        if weights.iter().any(|v| !v.is_finite()) {
            return Err(Error::WeightMatrix("entries must be finite".into()));
        }
        let scale = weights.amax();
        for i in 0..n {
            for j in 0..i {
                if (weights[(i, j)] - weights[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::WeightMatrix(format!("not symmetric at ({i}, {j})")));
                }
            }
        }
        if weights.clone().cholesky().is_none() {
            return Err(Error::WeightMatrix("Cholesky factorization failed".into()));
        }
        self.weights = Some(weights);
        Ok(self)
    }

    pub fn outcome(&self) -> &[f64] {
        &self.outcome
    }

    pub fn covariates(&self) -> Option<&DMatrix<f64>> {
        self.covariates.as_ref()
    }

    pub fn weights(&self) -> Option<&DMatrix<f64>> {
        self.weights.as_ref()
    }

    pub fn len(&self) -> usize {
        self.outcome.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcome.is_empty()
    }
}

/// Sufficient statistics of a fitted model.
///
/// `theta_hat` and `sigma_hat` hold one entry per reported coefficient; `d`
/// is the number of mean parameters in the model and sets the residual
/// degrees of freedom `n - d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    theta_hat: Vec<f64>,
    sigma_hat: Vec<f64>,
    nu_hat_sq: Option<f64>,
    n: usize,
    d: usize,
}

impl FitSummary {
    pub fn new(
        theta_hat: Vec<f64>,
        sigma_hat: Vec<f64>,
        nu_hat_sq: Option<f64>,
        n: usize,
        d: usize,
    ) -> Result<Self> {
        if d == 0 {
            return Err(Error::Validation("d must be at least 1".into()));
        }
        if n <= d {
            return Err(Error::InsufficientData { n, d });
        }
        if theta_hat.is_empty() || theta_hat.len() > d || theta_hat.len() != sigma_hat.len() {
            return Err(Error::Validation(format!(
                "need 1..={d} coefficients with matching scales, got {} and {}",
                theta_hat.len(),
                sigma_hat.len()
            )));
        }
        if theta_hat.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation(
                "coefficient estimates must be finite".into(),
            ));
        }
        if sigma_hat.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(Error::Validation(
                "marginal standard deviations must be finite and nonnegative".into(),
            ));
        }
        if let Some(v) = nu_hat_sq {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Validation(format!(
                    "residual variance must be finite and nonnegative, got {v}"
                )));
            }
        }
        Ok(Self {
            theta_hat,
            sigma_hat,
            nu_hat_sq,
            n,
            d,
        })
    }

    pub fn theta_hat(&self) -> &[f64] {
        &self.theta_hat
    }

    pub fn sigma_hat(&self) -> &[f64] {
        &self.sigma_hat
    }

    /// Residual variance `ν̂²`; absent for summaries built from published
    /// statistics of a multi-parameter model.
    pub fn nu_hat_sq(&self) -> Option<f64> {
        self.nu_hat_sq
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Residual degrees of freedom `n - d`.
    pub fn residual_df(&self) -> f64 {
        (self.n - self.d) as f64
    }

    pub fn num_coefficients(&self) -> usize {
        self.theta_hat.len()
    }

    /// Estimate and marginal scale of coefficient `j` (1-based), checking
    /// that the scale is usable for inference.
    pub fn coefficient(&self, j: usize) -> Result<(f64, f64)> {
        if j == 0 || j > self.theta_hat.len() {
            return Err(Error::Validation(format!(
                "coefficient index {j} outside 1..={}",
                self.theta_hat.len()
            )));
        }
        let (theta, sigma) = (self.theta_hat[j - 1], self.sigma_hat[j - 1]);
        if sigma <= 0.0 {
            return Err(Error::DegenerateFit { index: j, sigma });
        }
        Ok((theta, sigma))
    }

    /// Standard error `σ̂_j / √n` of coefficient `j` (1-based).
    pub fn standard_error(&self, j: usize) -> Result<f64> {
        let (_, sigma) = self.coefficient(j)?;
        Ok(sigma / (self.n as f64).sqrt())
    }
}

/// Sample mean of outcome-only data.
pub fn fit_sample_mean(data: &Dataset) -> Result<FitSummary> {
    if data.covariates.is_some() || data.weights.is_some() {
        return Err(Error::Validation(
            "sample mean takes outcome-only data; use fit_linear_regression".into(),
        ));
    }
    fit_mean_slice(&data.outcome)
}

pub(crate) fn fit_mean_slice(y: &[f64]) -> Result<FitSummary> {
    let n = y.len();
    if n < 2 {
        return Err(Error::InsufficientData { n, d: 1 });
    }
    let nf = n as f64;
    let mean = y.iter().sum::<f64>() / nf;
    let ss: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    let var = ss / (nf - 1.0);
    Ok(FitSummary {
        theta_hat: vec![mean],
        sigma_hat: vec![var.sqrt()],
        nu_hat_sq: Some(var),
        n,
        d: 1,
    })
}

/// Generalized least squares with an intercept prepended to the covariates.
///
/// With `V = L Lᵀ`, the problem is whitened to `L⁻¹y = L⁻¹X θ + ε` and solved
/// by a Householder QR of the whitened design. The residual variance uses
/// the whitened residuals, which reduce to `‖ŷ - y‖²` when `V = I`.
pub fn fit_linear_regression(data: &Dataset) -> Result<FitSummary> {
    let covariates = data.covariates.as_ref().ok_or_else(|| {
        Error::Validation("linear regression needs a covariate matrix (use zero columns for an intercept-only fit)".into())
    })?;
    let n = data.outcome.len();
    let d = covariates.ncols() + 1;
    if n <= d {
        return Err(Error::InsufficientData { n, d });
    }

    let mut x = DMatrix::<f64>::from_element(n, d, 1.0);
    x.view_mut((0, 1), (n, d - 1)).copy_from(covariates);
    let mut y = DVector::from_column_slice(&data.outcome);

    if let Some(v) = &data.weights {
        let chol = v
            .clone()
            .cholesky()
            .ok_or_else(|| Error::WeightMatrix("Cholesky factorization failed".into()))?;
        let l = chol.l();
        x = l
            .solve_lower_triangular(&x)
            .ok_or_else(|| Error::WeightMatrix("singular Cholesky factor".into()))?;
        y = l
            .solve_lower_triangular(&y)
            .ok_or_else(|| Error::WeightMatrix("singular Cholesky factor".into()))?;
    }

    fit_whitened(&x, &y)
}

/// Least squares on an already whitened design that includes the intercept.
pub(crate) fn fit_whitened(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<FitSummary> {
    let (n, d) = x.shape();
    let col_norms: Vec<f64> = x.column_iter().map(|c| c.norm()).collect();
    let qr = x.clone().qr();
    let r = qr.r();
    for j in 0..d {
        if col_norms[j] == 0.0 || r[(j, j)].abs() <= RANK_TOLERANCE * col_norms[j] {
            return Err(Error::SingularDesign { column: j + 1 });
        }
    }
    let qty = qr.q().transpose() * y;
    let theta = r
        .solve_upper_triangular(&qty)
        .ok_or(Error::SingularDesign { column: d })?;
    let resid = y - x * &theta;
    let nu_hat_sq = resid.norm_squared() / (n - d) as f64;

    // diag((XᵀX)⁻¹) = squared row norms of R⁻¹
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(d, d))
        .ok_or(Error::SingularDesign { column: d })?;
    let nf = n as f64;
    let sigma_hat = r_inv
        .row_iter()
        .map(|row| (nf * nu_hat_sq * row.norm_squared()).sqrt())
        .collect();

    Ok(FitSummary {
        theta_hat: theta.iter().copied().collect(),
        sigma_hat,
        nu_hat_sq: Some(nu_hat_sq),
        n,
        d,
    })
}

/// Single-coefficient summary from published statistics.
///
/// `sigma_hat` is on the `√Σ̂_jj` scale, i.e. the sample standard deviation
/// for a mean, so that `sigma_hat / √n` is the reported standard error.
pub fn summary_from_stats(
    theta_hat: f64,
    sigma_hat: f64,
    n: usize,
    d: usize,
) -> Result<FitSummary> {
    if !(sigma_hat > 0.0 && sigma_hat.is_finite()) {
        return Err(Error::Validation(format!(
            "sigma_hat must be positive and finite, got {sigma_hat}"
        )));
    }
    let nu_hat_sq = (d == 1).then_some(sigma_hat * sigma_hat);
    FitSummary::new(vec![theta_hat], vec![sigma_hat], nu_hat_sq, n, d)
}
