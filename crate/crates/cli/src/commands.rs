//! Subcommand definitions and their implementations. Every command renders
//! its full output in memory so that nothing is written on failure.

use std::fmt::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use exceedance::exceedance::default_cutoff_grid;
use exceedance::simulation::{run_coverage, CoverageConfig, CoverageResult};
use exceedance::{ep_curve, p_value, parameter_ci, EpCurve, ExceedanceQuery, FitSummary, Side};

use crate::error::{input, Result};
use crate::format::sig9;
use crate::input::{load_fit, parse_cutoffs, parse_sizes, Source};
use crate::plot::{render_svg, PlotOptions};

/// Seed used by `coverage` when none is given.
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Parser)]
#[command(
    name = "exceedance",
    version,
    about = "Exceedance probabilities for replication studies"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Point estimates and pointwise confidence bands over a cutoff grid
    Curve(CurveArgs),
    /// Parameter confidence interval and p-value
    Ci(CiArgs),
    /// Monte Carlo coverage of the exceedance intervals
    Coverage(CoverageArgs),
    /// SVG figure of the curve and band
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// CSV with a `y` column and optional covariate columns
    #[arg(long, value_name = "CSV")]
    pub input: Option<PathBuf>,
    /// Header-less n×n covariance structure V of the outcome
    #[arg(long, value_name = "CSV")]
    pub weights: Option<PathBuf>,
    /// Published estimate θ̂
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    /// Published scale σ̂ (standard error × √n)
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: Option<f64>,
    /// Sample size of the published study
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of regression parameters, intercept included
    #[arg(long)]
    pub d: Option<usize>,
}

impl InputArgs {
    fn source(&self) -> Result<Source<'_>> {
        let summary =
            self.theta.is_some() || self.sigma.is_some() || self.n.is_some() || self.d.is_some();
        match (&self.input, summary) {
            (Some(_), true) => Err(input(
                "--input cannot be combined with --theta/--sigma/--n/--d",
            )),
            (None, false) => Err(input("give either --input or --theta, --sigma and --n")),
            (Some(path), false) => Ok(Source::Data {
                path,
                weights: self.weights.as_deref(),
            }),
            (None, true) => {
                if self.weights.is_some() {
                    return Err(input("--weights needs --input"));
                }
                match (self.theta, self.sigma, self.n) {
                    (Some(theta), Some(sigma), Some(n)) => {
                        if !theta.is_finite() || !sigma.is_finite() {
                            return Err(input("--theta and --sigma must be finite"));
                        }
                        Ok(Source::Summary {
                            theta,
                            sigma,
                            n,
                            d: self.d.unwrap_or(1),
                        })
                    }
                    _ => Err(input("summary input needs all of --theta, --sigma and --n")),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct QueryArgs {
    /// 1-based coefficient index (1 = mean or intercept)
    #[arg(long, default_value_t = 1)]
    pub coef: usize,
    /// Replication sample size; defaults to n
    #[arg(long)]
    pub m: Option<u64>,
    /// One minus the confidence level
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// two_sided, lower_one_sided or upper_one_sided
    #[arg(long, default_value = "two_sided")]
    pub side: String,
    /// Cutoffs as `c1,c2,...` or `lo:hi:count`
    #[arg(long, allow_negative_numbers = true, allow_hyphen_values = true)]
    pub cutoff: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write here instead of standard output
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Random seed; results of deterministic commands do not depend on it
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub query: QueryArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CiArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// 1-based coefficient index
    #[arg(long, default_value_t = 1)]
    pub coef: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value = "two_sided")]
    pub side: String,
    /// Null value for the p-value
    #[arg(
        long,
        default_value = "0",
        allow_negative_numbers = true,
        allow_hyphen_values = true
    )]
    pub cutoff: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CoverageArgs {
    /// sample_mean or linear_regression
    #[arg(long, default_value = "sample_mean")]
    pub scenario: String,
    /// Sample sizes, e.g. `20,40,60,80,100`
    #[arg(long)]
    pub sizes: Option<String>,
    /// Cutoffs as `c1,c2,...` or `lo:hi:count`
    #[arg(long, allow_negative_numbers = true, allow_hyphen_values = true)]
    pub cutoff: Option<String>,
    /// Monte Carlo replications per sample size
    #[arg(long, default_value_t = 10_000)]
    pub replications: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub query: QueryArgs,
    #[arg(long, default_value_t = 800)]
    pub width: u32,
    #[arg(long, default_value_t = 500)]
    pub height: u32,
    /// Omit the parameter interval marker at height 0.5
    #[arg(long)]
    pub no_param_ci: bool,
    /// Write here instead of standard output
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Accepted for uniformity; plotting is deterministic
    #[arg(long)]
    pub seed: Option<u64>,
}

impl Command {
    pub fn output_path(&self) -> Option<&PathBuf> {
        match self {
            Command::Curve(a) => a.output.output.as_ref(),
            Command::Ci(a) => a.output.output.as_ref(),
            Command::Coverage(a) => a.output.output.as_ref(),
            Command::Plot(a) => a.output.as_ref(),
        }
    }
}

/// Runs a command and returns the complete output document.
pub fn run(command: &Command) -> Result<String> {
    match command {
        Command::Curve(args) => cmd_curve(args),
        Command::Ci(args) => cmd_ci(args),
        Command::Coverage(args) => cmd_coverage(args),
        Command::Plot(args) => cmd_plot(args),
    }
}

fn parse_side(s: &str) -> Result<Side> {
    s.parse().map_err(|_| input(format!("unknown side '{s}'")))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(input(format!("--alpha must lie in (0, 1), got {alpha}")))
    }
}

fn check_coef(fit: &FitSummary, j: usize) -> Result<()> {
    if j == 0 || j > fit.num_coefficients() {
        return Err(input(format!(
            "--coef {j} is out of range; the fit has {} coefficient(s)",
            fit.num_coefficients()
        )));
    }
    Ok(())
}

/// Validates the query flags, loads the fit, and computes the curve.
fn build_curve(input_args: &InputArgs, query: &QueryArgs) -> Result<EpCurve> {
    let side = parse_side(&query.side)?;
    check_alpha(query.alpha)?;
    if query.m == Some(0) {
        return Err(input("--m must be at least 1"));
    }
    let requested = query.cutoff.as_deref().map(parse_cutoffs).transpose()?;
    let source = input_args.source()?;
    let fit = load_fit(&source)?;
    check_coef(&fit, query.coef)?;
    let cutoffs = match requested {
        Some(c) => c,
        None => default_cutoff_grid(&fit, query.coef)?,
    };
    let m = query.m.unwrap_or(fit.n() as u64);
    let template = ExceedanceQuery::new(cutoffs[0], m, query.alpha)?
        .with_side(side)
        .with_coefficient(query.coef)?;
    Ok(ep_curve(&fit, &cutoffs, &template)?)
}

fn json_num(x: f64) -> String {
    if x.is_finite() {
        sig9(x)
    } else {
        "null".into()
    }
}

pub fn cmd_curve(args: &CurveArgs) -> Result<String> {
    let curve = build_curve(&args.input, &args.query)?;
    Ok(match args.output.format {
        Format::Csv => curve_csv(&curve),
        Format::Json => curve_json(&curve),
    })
}

pub fn curve_csv(curve: &EpCurve) -> String {
    let mut s = String::from("cutoff,point,lower,upper\n");
    for (c, e) in curve.iter() {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            sig9(c),
            sig9(e.point),
            sig9(e.lower),
            sig9(e.upper)
        );
    }
    s
}

fn curve_json(curve: &EpCurve) -> String {
    let (theta, sigma) = curve
        .fit
        .coefficient(curve.coefficient)
        .expect("validated coefficient");
    let rows: Vec<String> = curve
        .iter()
        .map(|(c, e)| {
            format!(
                r#"    {{"cutoff": {}, "point": {}, "lower": {}, "upper": {}}}"#,
                json_num(c),
                json_num(e.point),
                json_num(e.lower),
                json_num(e.upper)
            )
        })
        .collect();
    format!(
        "{{\n  \"coefficient\": {},\n  \"theta_hat\": {},\n  \"sigma_hat\": {},\n  \"n\": {},\n  \"d\": {},\n  \"m\": {},\n  \"alpha\": {},\n  \"side\": \"{}\",\n  \"rows\": [\n{}\n  ]\n}}\n",
        curve.coefficient,
        json_num(theta),
        json_num(sigma),
        curve.fit.n(),
        curve.fit.d(),
        curve.rep_size,
        json_num(curve.alpha),
        curve.side,
        rows.join(",\n")
    )
}

pub fn cmd_ci(args: &CiArgs) -> Result<String> {
    let side = parse_side(&args.side)?;
    check_alpha(args.alpha)?;
    let cutoffs = parse_cutoffs(&args.cutoff)?;
    if cutoffs.len() != 1 {
        return Err(input("ci takes a single --cutoff value"));
    }
    let c = cutoffs[0];
    let fit = load_fit(&args.input.source()?)?;
    check_coef(&fit, args.coef)?;
    let ci = parameter_ci(&fit, args.coef, args.alpha, side)?;
    let p = p_value(&fit, args.coef, c, side)?;
    Ok(match args.output.format {
        Format::Csv => format!(
            "coefficient,estimate,lower,upper,cutoff,p_value,side,alpha\n{},{},{},{},{},{},{},{}\n",
            args.coef,
            sig9(ci.estimate),
            sig9(ci.lower),
            sig9(ci.upper),
            sig9(c),
            sig9(p),
            side,
            sig9(args.alpha)
        ),
        Format::Json => format!(
            "{{\n  \"coefficient\": {},\n  \"estimate\": {},\n  \"lower\": {},\n  \"upper\": {},\n  \"cutoff\": {},\n  \"p_value\": {},\n  \"side\": \"{}\",\n  \"alpha\": {},\n  \"n\": {},\n  \"d\": {}\n}}\n",
            args.coef,
            json_num(ci.estimate),
            json_num(ci.lower),
            json_num(ci.upper),
            json_num(c),
            json_num(p),
            side,
            json_num(args.alpha),
            fit.n(),
            fit.d()
        ),
    })
}

pub fn coverage_config(args: &CoverageArgs) -> Result<CoverageConfig> {
    let seed = args.output.seed.unwrap_or(DEFAULT_SEED);
    let mut config = match args.scenario.as_str() {
        "sample_mean" | "mean" => CoverageConfig::sample_mean_default(seed),
        "linear_regression" | "regression" => CoverageConfig::regression_default(seed),
        other => return Err(input(format!("unknown scenario '{other}'"))),
    };
    if let Some(sizes) = &args.sizes {
        config.sample_sizes = parse_sizes(sizes)?;
    }
    if let Some(cutoffs) = &args.cutoff {
        config.cutoffs = parse_cutoffs(cutoffs)?;
    }
    if args.replications == 0 {
        return Err(input("--replications must be at least 1"));
    }
    check_alpha(args.alpha)?;
    config.replications = args.replications;
    config.alpha = args.alpha;
    config.validate()?;
    Ok(config)
}

pub fn cmd_coverage(args: &CoverageArgs) -> Result<String> {
    let config = coverage_config(args)?;
    let result = run_coverage(&config)?;
    Ok(match args.output.format {
        Format::Csv => coverage_csv(&result),
        Format::Json => coverage_json(&result),
    })
}

pub fn coverage_csv(result: &CoverageResult) -> String {
    let mut s = String::from("scenario,n,cutoff,coverage,mc_se,K\n");
    for cell in &result.cells {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            result.scenario.name(),
            cell.n,
            sig9(cell.cutoff),
            sig9(cell.coverage),
            sig9(cell.mc_se),
            cell.replications
        );
    }
    s
}

fn coverage_json(result: &CoverageResult) -> String {
    let cells: Vec<String> = result
        .cells
        .iter()
        .map(|c| {
            format!(
                r#"    {{"n": {}, "cutoff": {}, "coverage": {}, "mc_se": {}, "K": {}, "covered": {}, "true_ep": {}}}"#,
                c.n,
                json_num(c.cutoff),
                json_num(c.coverage),
                json_num(c.mc_se),
                c.replications,
                c.covered,
                json_num(c.true_ep)
            )
        })
        .collect();
    let designs: Vec<String> = result
        .designs
        .iter()
        .map(|d| {
            format!(
                r#"    {{"n": {}, "xtx_inv_22": {}}}"#,
                d.n,
                json_num(d.xtx_inv_22)
            )
        })
        .collect();
    format!(
        "{{\n  \"scenario\": \"{}\",\n  \"alpha\": {},\n  \"seed\": {},\n  \"cells\": [\n{}\n  ],\n  \"designs\": [{}{}]\n}}\n",
        result.scenario.name(),
        json_num(result.alpha),
        result.master_seed,
        cells.join(",\n"),
        if designs.is_empty() { "" } else { "\n" },
        if designs.is_empty() {
            String::new()
        } else {
            designs.join(",\n") + "\n  "
        }
    )
}

pub fn cmd_plot(args: &PlotArgs) -> Result<String> {
    if args.width < 200 || args.height < 150 {
        return Err(input(
            "--width must be at least 200 and --height at least 150",
        ));
    }
    let curve = build_curve(&args.input, &args.query)?;
    let marker = if args.no_param_ci {
        None
    } else {
        Some(parameter_ci(
            &curve.fit,
            curve.coefficient,
            curve.alpha,
            curve.side,
        )?)
    };
    let half_width = 4.0 * curve.fit.standard_error(curve.coefficient)?;
    Ok(render_svg(
        &curve,
        marker.as_ref(),
        half_width,
        PlotOptions {
            width: args.width,
            height: args.height,
        },
    ))
}
