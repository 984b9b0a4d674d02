//! Canonical number formatting for every emitted table.

/// Significant digits in emitted numbers.
pub const SIGNIFICANT_DIGITS: usize = 9;

/// Formats `x` with 9 significant digits, rounding exact ties to even.
///
/// Magnitudes in `[1e-6, 1e15)` are written positionally (`0.988478690`,
/// `107.000000`); anything else in exponent form (`1.23456789e-7`).
/// Non-finite values become `inf`, `-inf` and `nan`.
pub fn sig9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return format!("0.{}", "0".repeat(SIGNIFICANT_DIGITS - 1));
    }
    // std float formatting is exact and breaks ties to even
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    if !(-6..15).contains(&exp) {
        return format!("{sign}{mantissa}e{exp}");
    }
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let point = exp + 1;
    let body = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), digits)
    } else if point as usize >= digits.len() {
        format!("{}{}", digits, "0".repeat(point as usize - digits.len()))
    } else {
        let (int, frac) = digits.split_at(point as usize);
        format!("{int}.{frac}")
    };
    format!("{sign}{body}")
}

/// Parses a number emitted by [`sig9`] (or any decimal) back to `f64`.
pub fn parse_number(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        "nan" => Some(f64::NAN),
        t => t.parse().ok(),
    }
}
