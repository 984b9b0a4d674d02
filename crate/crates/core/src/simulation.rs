//! Monte Carlo coverage of the exceedance-probability intervals.
//!
//! Every replicate draws from its own ChaCha8 stream whose seed is a hash of
//! `(master_seed, scenario, n, replicate)`, and coverage is tallied as integer
//! counts, so results do not depend on thread count or scheduling.

use nalgebra::{DMatrix, DVector};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::normal_quantile_unchecked;
use crate::error::{Error, Result};
use crate::exceedance::{ep_confidence_interval, linspace, true_exceedance, ExceedanceQuery};
use crate::models::{fit_mean_slice, fit_whitened, FitSummary};

pub const TAG_MEAN: u64 = 0x6d65_616e;
pub const TAG_REGRESSION: u64 = 0x7265_6772;
pub const TAG_COVARIATE: u64 = 0x636f_7661;

/// Data-generating model of a coverage study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Scenario {
    /// `y_i ~ N(θ, σ²)` i.i.d.; the target is the mean.
    SampleMean { theta: f64, sigma: f64 },
    /// `y_i = θ₁ + θ₂ x_i + ε_i`, `ε_i ~ N(0, ν²)`, with `x_i ~ U(low, high)`
    /// drawn once per sample size; the target is the slope.
    LinearRegression {
        intercept: f64,
        slope: f64,
        nu: f64,
        covariate_low: f64,
        covariate_high: f64,
    },
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::SampleMean { .. } => "sample_mean",
            Scenario::LinearRegression { .. } => "linear_regression",
        }
    }

    /// Number of regression parameters including the intercept.
    pub fn dimension(&self) -> usize {
        match self {
            Scenario::SampleMean { .. } => 1,
            Scenario::LinearRegression { .. } => 2,
        }
    }
}

/// How the replication size `m` relates to the study size `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepSizeRule {
    #[default]
    EqualToN,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageConfig {
    pub scenario: Scenario,
    pub sample_sizes: Vec<usize>,
    pub cutoffs: Vec<f64>,
    pub replications: usize,
    pub alpha: f64,
    pub rep_size_rule: RepSizeRule,
    pub master_seed: u64,
}

impl CoverageConfig {
    /// Standard-normal means, `n ∈ {20, …, 100}`, 11 cutoffs on `[-0.5, 0.5]`.
    pub fn sample_mean_default(master_seed: u64) -> Self {
        Self {
            scenario: Scenario::SampleMean {
                theta: 0.0,
                sigma: 1.0,
            },
            sample_sizes: vec![20, 40, 60, 80, 100],
            cutoffs: linspace(-0.5, 0.5, 11),
            replications: 10_000,
            alpha: 0.05,
            rep_size_rule: RepSizeRule::EqualToN,
            master_seed,
        }
    }

    /// Simple regression with `θ = (1, 2)`, `ν² = 25`, `x ~ U(0, 10)`, and 21
    /// slope cutoffs on `[1, 3]`.
    pub fn regression_default(master_seed: u64) -> Self {
        Self {
            scenario: Scenario::LinearRegression {
                intercept: 1.0,
                slope: 2.0,
                nu: 5.0,
                covariate_low: 0.0,
                covariate_high: 10.0,
            },
            sample_sizes: vec![20, 40, 60, 80, 100],
            cutoffs: linspace(1.0, 3.0, 21),
            replications: 10_000,
            alpha: 0.05,
            rep_size_rule: RepSizeRule::EqualToN,
            master_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::Validation(msg));
        if self.replications == 0 {
            return invalid("replications must be at least 1".into());
        }
        if self.cutoffs.is_empty() {
            return invalid("no cutoffs given".into());
        }
        if let Some(c) = self.cutoffs.iter().find(|c| !c.is_finite()) {
            return invalid(format!("cutoff {c} is not finite"));
        }
        if self.sample_sizes.is_empty() {
            return invalid("no sample sizes given".into());
        }
        let d = self.scenario.dimension();
        if let Some(&n) = self.sample_sizes.iter().find(|&&n| n <= d) {
            return Err(Error::InsufficientData { n, d });
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return invalid(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        match self.scenario {
            Scenario::SampleMean { theta, sigma } => {
                if !theta.is_finite() || !(sigma > 0.0 && sigma.is_finite()) {
                    return invalid(format!(
                        "need finite theta and sigma > 0, got ({theta}, {sigma})"
                    ));
                }
            }
            Scenario::LinearRegression {
                intercept,
                slope,
                nu,
                covariate_low,
                covariate_high,
            } => {
                if !intercept.is_finite() || !slope.is_finite() || !(nu > 0.0 && nu.is_finite()) {
                    return invalid("need finite coefficients and nu > 0".into());
                }
                if !(covariate_low < covariate_high)
                    || !covariate_high.is_finite()
                    || !covariate_low.is_finite()
                {
                    return invalid(format!(
                        "covariate range [{covariate_low}, {covariate_high}] is empty"
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Coverage tally for one `(n, c)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageCell {
    pub n: usize,
    pub cutoff: f64,
    pub covered: u64,
    pub replications: u64,
    pub coverage: f64,
    pub mc_se: f64,
    pub true_ep: f64,
}

/// Realized fixed design for one sample size of the regression scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignSummary {
    pub n: usize,
    /// `(XᵀX)⁻¹₂₂` of the realized design `[1, x]`.
    pub xtx_inv_22: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageResult {
    pub scenario: Scenario,
    pub alpha: f64,
    pub master_seed: u64,
    /// Row-major over `sample_sizes × cutoffs`.
    pub cells: Vec<CoverageCell>,
    pub designs: Vec<DesignSummary>,
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stream seed for one `(scenario tag, n, replicate)` under a master seed.
pub fn derive_seed(master_seed: u64, tag: u64, n: usize, replicate: usize) -> u64 {
    let mut h = mix(master_seed);
    for part in [tag, n as u64, replicate as u64] {
        h = mix(h ^ part);
    }
    h
}

/// Uniform on the open interval (0, 1) with 53 random bits.
fn open_uniform(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// `n` draws of `θ + σ z` with `z = Φ⁻¹(u)` and `u` from a ChaCha8 stream
/// seeded with `seed`.
pub fn generate_normal_sample(seed: u64, n: usize, theta: f64, sigma: f64) -> Result<Vec<f64>> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::domain(format!(
            "sigma must be positive and finite, got {sigma}"
        )));
    }
    if !theta.is_finite() {
        return Err(Error::domain(format!("theta must be finite, got {theta}")));
    }
    if n == 0 {
        return Err(Error::domain("sample size must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| theta + sigma * normal_quantile_unchecked(open_uniform(&mut rng)))
        .collect())
}

/// Covariate column drawn once for sample size `n`.
pub fn regression_covariate(master_seed: u64, n: usize, low: f64, high: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(master_seed, TAG_COVARIATE, n, 0));
    (0..n)
        .map(|_| low + (high - low) * open_uniform(&mut rng))
        .collect()
}

/// Coverage of the two-sided intervals for the mean scenario.
pub fn run_mean_coverage(config: &CoverageConfig) -> Result<CoverageResult> {
    config.validate()?;
    let (theta, sigma) = match config.scenario {
        Scenario::SampleMean { theta, sigma } => (theta, sigma),
        _ => {
            return Err(Error::Validation(
                "run_mean_coverage needs the sample_mean scenario".into(),
            ))
        }
    };
    let mut cells = Vec::with_capacity(config.sample_sizes.len() * config.cutoffs.len());
    for &n in &config.sample_sizes {
        let truth = true_eps(config, theta, sigma, n)?;
        let counts = tally(config, n, &truth, |replicate| {
            let seed = derive_seed(config.master_seed, TAG_MEAN, n, replicate);
            fit_mean_slice(&generate_normal_sample(seed, n, theta, sigma)?)
        })?;
        push_cells(&mut cells, config, n, &truth, &counts);
    }
    Ok(CoverageResult {
        scenario: config.scenario,
        alpha: config.alpha,
        master_seed: config.master_seed,
        cells,
        designs: Vec::new(),
    })
}

/// Coverage of the two-sided slope intervals for the regression scenario.
pub fn run_regression_coverage(config: &CoverageConfig) -> Result<CoverageResult> {
    config.validate()?;
    let (intercept, slope, nu, low, high) = match config.scenario {
        Scenario::LinearRegression {
            intercept,
            slope,
            nu,
            covariate_low,
            covariate_high,
        } => (intercept, slope, nu, covariate_low, covariate_high),
        _ => {
            return Err(Error::Validation(
                "run_regression_coverage needs the linear_regression scenario".into(),
            ))
        }
    };
    let mut cells = Vec::with_capacity(config.sample_sizes.len() * config.cutoffs.len());
    let mut designs = Vec::with_capacity(config.sample_sizes.len());
    for &n in &config.sample_sizes {
        let x = regression_covariate(config.master_seed, n, low, high);
        let mean_x = x.iter().sum::<f64>() / n as f64;
        let sxx: f64 = x.iter().map(|v| (v - mean_x) * (v - mean_x)).sum();
        let xtx_inv_22 = 1.0 / sxx;
        designs.push(DesignSummary { n, xtx_inv_22 });

        let sigma_slope = (n as f64 * nu * nu * xtx_inv_22).sqrt();
        let truth = true_eps(config, slope, sigma_slope, n)?;
        let design = DMatrix::from_fn(n, 2, |i, j| if j == 0 { 1.0 } else { x[i] });
        let counts = tally(config, n, &truth, |replicate| {
            let seed = derive_seed(config.master_seed, TAG_REGRESSION, n, replicate);
            let noise = generate_normal_sample(seed, n, 0.0, nu)?;
            let y = DVector::from_iterator(
                n,
                x.iter()
                    .zip(&noise)
                    .map(|(xi, e)| intercept + slope * xi + e),
            );
            fit_whitened(&design, &y)
        })?;
        push_cells(&mut cells, config, n, &truth, &counts);
    }
    Ok(CoverageResult {
        scenario: config.scenario,
        alpha: config.alpha,
        master_seed: config.master_seed,
        cells,
        designs,
    })
}

/// Dispatches on the configured scenario.
pub fn run_coverage(config: &CoverageConfig) -> Result<CoverageResult> {
    match config.scenario {
        Scenario::SampleMean { .. } => run_mean_coverage(config),
        Scenario::LinearRegression { .. } => run_regression_coverage(config),
    }
}

fn true_eps(config: &CoverageConfig, theta: f64, sigma: f64, n: usize) -> Result<Vec<f64>> {
    let m = match config.rep_size_rule {
        RepSizeRule::EqualToN => n as u64,
    };
    config
        .cutoffs
        .iter()
        .map(|&c| true_exceedance(theta, sigma, c, m))
        .collect()
}

/// Per-cutoff counts of replicates whose interval contains the truth.
fn tally<F>(config: &CoverageConfig, n: usize, truth: &[f64], fit: F) -> Result<Vec<u64>>
where
    F: Fn(usize) -> Result<FitSummary> + Sync,
{
    let j = config.scenario.dimension();
    let template =
        ExceedanceQuery::new(config.cutoffs[0], n as u64, config.alpha)?.with_coefficient(j)?;
    let hits = (0..config.replications)
        .into_par_iter()
        .map(|replicate| {
            let run = || -> Result<Vec<bool>> {
                let summary = fit(replicate)?;
                config
                    .cutoffs
                    .iter()
                    .zip(truth)
                    .map(|(&c, &p)| {
                        let ci = ep_confidence_interval(&summary, &template.with_cutoff(c)?)?;
                        Ok(ci.lower <= p && p <= ci.upper)
                    })
                    .collect()
            };
            run().map_err(|e| Error::AtReplicate {
                n,
                replicate,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut counts = vec![0u64; truth.len()];
    for row in hits {
        for (count, hit) in counts.iter_mut().zip(row) {
            *count += u64::from(hit);
        }
    }
    Ok(counts)
}

fn push_cells(
    cells: &mut Vec<CoverageCell>,
    config: &CoverageConfig,
    n: usize,
    truth: &[f64],
    counts: &[u64],
) {
    let k = config.replications as u64;
    for ((&cutoff, &true_ep), &covered) in config.cutoffs.iter().zip(truth).zip(counts) {
        let coverage = covered as f64 / k as f64;
        cells.push(CoverageCell {
            n,
            cutoff,
            covered,
            replications: k,
            coverage,
            mc_se: (coverage * (1.0 - coverage) / k as f64).sqrt(),
            true_ep,
        });
    }
}
