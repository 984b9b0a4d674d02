//! Independent reference implementations used only by the test suites.
//!
//! Nothing here calls into the crate's numerical code: the normal CDF and
//! log-gamma come from `statrs`, integrals from an adaptive Gauss-Kronrod
//! rule, and inversions from plain bisection.

#![allow(dead_code)]

use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

/// 15-point Kronrod estimate and its difference from the embedded 7-point
/// Gauss estimate.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kronrod * h, (kronrod - gauss).abs() * h)
}

/// Globally adaptive Gauss-Kronrod integration: repeatedly bisects the
/// interval with the largest error estimate until the total estimate falls
/// below `max(tol, 1e-15 |value|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (v, e) = gk15(f, a, b);
    let mut parts = vec![(a, b, v, e)];
    for _ in 0..5000 {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if err <= tol.max(1e-15 * total.abs()) {
            break;
        }
        let worst = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap();
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(f, lo, mid);
        let (v2, e2) = gk15(f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
    parts.iter().map(|p| p.2).sum()
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Lower normal tail by direct quadrature of the density, for `x <= 0`.
/// Slower than `normal_cdf` but accurate to a few ulps relative deep in the
/// tail, where the library erfc loses digits.
pub fn normal_tail_quadrature(x: f64) -> f64 {
    assert!(x <= 0.0);
    let pdf = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    integrate(&pdf, x - 40.0, x, 0.0)
}

/// Normal CDF accurate to a few ulps anywhere, via the tail quadrature.
pub fn normal_cdf_precise(x: f64) -> f64 {
    if x <= 0.0 {
        normal_tail_quadrature(x)
    } else {
        1.0 - normal_tail_quadrature(-x)
    }
}

/// Noncentral t CDF as the normal/chi-square mixture
/// `∫ Φ(x √(s/ν) - δ) f_{χ²_ν}(s) ds`.
pub fn noncentral_t_cdf(x: f64, nu: f64, delta: f64) -> f64 {
    let ln_norm = -0.5 * nu * 2f64.ln() - ln_gamma(0.5 * nu);
    let density = |s: f64| {
        if s <= 0.0 {
            return 0.0;
        }
        (ln_norm + (0.5 * nu - 1.0) * s.ln() - 0.5 * s).exp()
    };
    let integrand = |s: f64| normal_cdf(x * (s / nu).sqrt() - delta) * density(s);
    let sd = (2.0 * nu).sqrt();
    let upper = nu + 40.0 * sd + 100.0;
    // split at the bulk of the chi-square so the adaptive rule sees the peak
    let knots = [
        0.0,
        (nu - 4.0 * sd).max(0.0) * 0.5,
        (nu - 4.0 * sd).max(0.0),
        nu,
        nu + 4.0 * sd,
        nu + 12.0 * sd,
        upper,
    ];
    knots
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| integrate(&integrand, w[0], w[1], 1e-15))
        .sum()
}

/// Central t CDF by integrating the density from 0.
pub fn central_t_cdf(x: f64, nu: f64) -> f64 {
    let ln_c =
        ln_gamma(0.5 * (nu + 1.0)) - ln_gamma(0.5 * nu) - 0.5 * (nu * std::f64::consts::PI).ln();
    let pdf = |t: f64| (ln_c - 0.5 * (nu + 1.0) * (1.0 + t * t / nu).ln()).exp();
    let half = integrate(&pdf, 0.0, x.abs(), 1e-15);
    if x >= 0.0 {
        0.5 + half
    } else {
        0.5 - half
    }
}

/// Root of a monotone function on `[lo, hi]` by bisection.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let f_lo = f(lo);
    assert!(f_lo * f(hi) <= 0.0, "bisection needs a sign change");
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if (fm < 0.0) == (f_lo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// δ with `F_{ν,δ}(q) = target`, by bisection on the quadrature CDF.
pub fn solve_noncentrality(q: f64, nu: f64, target: f64) -> f64 {
    bisect(
        |d| noncentral_t_cdf(q, nu, d) - target,
        q - 20.0,
        q + 20.0,
        1e-11,
    )
}

/// Exact sum of a slice of doubles using integer-scaled big arithmetic:
/// every finite double is `m · 2^e`, so scaling to a common exponent makes
/// the sum exact in i128 for moderate ranges.
pub fn exact_mean(values: &[f64]) -> f64 {
    let min_exp = -80i32;
    let scale = 2f64.powi(-min_exp);
    let mut acc: i128 = 0;
    let mut remainder = 0.0f64;
    for &v in values {
        let scaled = v * scale;
        let int = scaled.trunc();
        acc += int as i128;
        remainder += scaled - int;
    }
    ((acc as f64) + remainder) / scale / values.len() as f64
}
