//! Exceedance probabilities for replication studies: given a fitted mean or
//! regression coefficient, estimate the chance that an exact replication of
//! size `m` lands above a cutoff, with exact noncentral-t confidence bounds.

pub mod distributions;
pub mod error;
pub mod exceedance;
pub mod models;
pub mod roots;
pub mod simulation;

pub use error::{Error, Result};
pub use exceedance::{
    ep_confidence_interval, ep_curve, p_value, parameter_ci, point_estimate, power_cutoff,
    solve_noncentrality, true_exceedance, EpCurve, ExceedanceQuery, IntervalEstimate,
    ParameterInterval, Side,
};
pub use models::{fit_linear_regression, fit_sample_mean, summary_from_stats, Dataset, FitSummary};
