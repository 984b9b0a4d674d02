//! Turning files or summary flags into a fitted summary.

use std::path::Path;

use exceedance::models::{fit_linear_regression, fit_sample_mean, Dataset, Matrix};
use exceedance::{summary_from_stats, FitSummary};

use crate::error::{input, Result};

/// Where the fit comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source<'a> {
    /// CSV with a `y` column and optional covariate columns, plus an
    /// optional header-less `n × n` covariance file.
    Data {
        path: &'a Path,
        weights: Option<&'a Path>,
    },
    Summary {
        theta: f64,
        sigma: f64,
        n: usize,
        d: usize,
    },
}

pub fn load_fit(source: &Source<'_>) -> Result<FitSummary> {
    match *source {
        Source::Summary { theta, sigma, n, d } => {
            if !(sigma > 0.0) {
                return Err(exceedance::Error::DegenerateFit { index: 1, sigma }.into());
            }
            if n <= d {
                return Err(exceedance::Error::InsufficientData { n, d }.into());
            }
            Ok(summary_from_stats(theta, sigma, n, d)?)
        }
        Source::Data { path, weights } => {
            let (y, covariates) = read_table(path)?;
            let n = y.len();
            let mut data = Dataset::new(y)?;
            let regression = covariates.ncols() > 0 || weights.is_some();
            if regression {
                data = data.with_covariates(covariates)?;
            }
            if let Some(w) = weights {
                data = data.with_weights(read_matrix(w, n)?)?;
            }
            let fit = if regression {
                fit_linear_regression(&data)?
            } else {
                fit_sample_mean(&data)?
            };
            Ok(fit)
        }
    }
}

fn parse_cell(raw: &str, row: usize, column: &str) -> Result<f64> {
    let v: f64 = raw.trim().parse().map_err(|_| {
        input(format!(
            "row {row}, column '{column}': '{raw}' is not a number"
        ))
    })?;
    if !v.is_finite() {
        return Err(input(format!(
            "row {row}, column '{column}': value is not finite"
        )));
    }
    Ok(v)
}

/// Reads the outcome column `y` and every other column as a covariate.
pub fn read_table(path: &Path) -> Result<(Vec<f64>, Matrix<f64>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| input(format!("cannot read {}: {e}", path.display())))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| input(format!("{}: {e}", path.display())))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if headers.iter().all(|h| h.is_empty()) {
        return Err(input(format!("{} is empty", path.display())));
    }
    let y_col = headers
        .iter()
        .position(|h| h == "y")
        .ok_or_else(|| input(format!("{} has no 'y' column", path.display())))?;
    let x_cols: Vec<usize> = (0..headers.len()).filter(|&i| i != y_col).collect();

    let mut y = Vec::new();
    let mut x = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| input(format!("{}: {e}", path.display())))?;
        if record.len() != headers.len() {
            return Err(input(format!(
                "row {row} has {} fields, header has {}",
                record.len(),
                headers.len()
            )));
        }
        y.push(parse_cell(&record[y_col], row, "y")?);
        for &j in &x_cols {
            x.push(parse_cell(&record[j], row, &headers[j])?);
        }
    }
    if y.is_empty() {
        return Err(input(format!("{} has no data rows", path.display())));
    }
    let covariates = Matrix::from_row_slice(y.len(), x_cols.len(), &x);
    Ok((y, covariates))
}

/// Reads a header-less `n × n` numeric matrix.
pub fn read_matrix(path: &Path, n: usize) -> Result<Matrix<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| input(format!("cannot read {}: {e}", path.display())))?;
    let mut values = Vec::with_capacity(n * n);
    let mut rows = 0;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| input(format!("{}: {e}", path.display())))?;
        if record.len() != n {
            return Err(input(format!(
                "weights row {} has {} entries, expected {n}",
                i + 1,
                record.len()
            )));
        }
        for (j, raw) in record.iter().enumerate() {
            values.push(parse_cell(raw, i + 1, &format!("{}", j + 1))?);
        }
        rows += 1;
    }
    if rows != n {
        return Err(input(format!("weights file has {rows} rows, expected {n}")));
    }
    Ok(Matrix::from_row_slice(n, n, &values))
}

/// Cutoffs from `c1,c2,...` or `lo:hi:count`.
pub fn parse_cutoffs(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err(input("empty cutoff specification"));
    }
    let number = |s: &str| -> Result<f64> {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| input(format!("'{s}' is not a number in cutoff specification")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(input(format!("cutoff '{s}' is not finite")))
        }
    };
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(input(format!("range '{spec}' must look like lo:hi:count")));
        }
        let (lo, hi) = (number(parts[0])?, number(parts[1])?);
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| input(format!("count '{}' is not a positive integer", parts[2])))?;
        if count == 0 {
            return Err(input("range count must be at least 1"));
        }
        if count > 1 && !(hi > lo) {
            return Err(input(format!("range '{spec}' needs hi > lo")));
        }
        Ok(exceedance::exceedance::linspace(lo, hi, count))
    } else {
        spec.split(',').map(number).collect()
    }
}

/// Positive integers from `a,b,c`.
pub fn parse_sizes(spec: &str) -> Result<Vec<usize>> {
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| input(format!("'{s}' is not a positive sample size")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_lists_and_ranges() {
        assert_eq!(parse_cutoffs("0").unwrap(), vec![0.0]);
        assert_eq!(parse_cutoffs("1, 2,3.5").unwrap(), vec![1.0, 2.0, 3.5]);
        let r = parse_cutoffs("-0.5:0.5:11").unwrap();
        assert_eq!(r.len(), 11);
        assert_eq!(r[0], -0.5);
        assert_eq!(r[10], 0.5);
        assert_eq!(parse_cutoffs("2:2:1").unwrap(), vec![2.0]);
        for bad in ["", "a", "1:2", "1:2:0", "2:1:5", "1,,2", "nan", "1:inf:3"] {
            assert!(parse_cutoffs(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn sizes() {
        assert_eq!(parse_sizes("20,100").unwrap(), vec![20, 100]);
        assert!(parse_sizes("0").is_err());
        assert!(parse_sizes("x").is_err());
    }
}
