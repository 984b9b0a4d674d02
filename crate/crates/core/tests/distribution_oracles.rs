mod common;

use exceedance::distributions::{
    central_t_cdf, central_t_quantile, noncentral_t_cdf, regularized_incomplete_beta,
    std_normal_cdf, std_normal_quantile, DegreesOfFreedom, Noncentrality,
};
use proptest::prelude::*;

fn df(v: f64) -> DegreesOfFreedom {
    DegreesOfFreedom::new(v).unwrap()
}

fn nc(v: f64) -> Noncentrality {
    Noncentrality::new(v).unwrap()
}

#[test]
fn quadrature_oracle_is_sane() {
    // polynomial exactness of the Kronrod rule
    let v = common::integrate(&|x: f64| x.powi(5) - 3.0 * x * x, 0.0, 2.0, 1e-14);
    assert!((v - (64.0 / 6.0 - 8.0)).abs() < 1e-13);
    // mixture oracle at δ = 0 agrees with the density-integral oracle
    for &(x, nu) in &[(1.3, 4.0), (-2.0, 31.0), (0.4, 2.0)] {
        let a = common::noncentral_t_cdf(x, nu, 0.0);
        let b = common::central_t_cdf(x, nu);
        assert!((a - b).abs() < 1e-10, "x = {x}, nu = {nu}: {a} vs {b}");
    }
}

#[test]
fn normal_cdf_matches_reference() {
    for i in -80..=80 {
        let x = i as f64 * 0.1;
        let got = std_normal_cdf(x).unwrap();
        // statrs erfc drifts by up to ~1e-13 around |x| = 3, so the reference
        // is direct quadrature of the density
        let tail = common::normal_tail_quadrature(-x.abs());
        if x <= 0.0 {
            assert!(
                ((got - tail) / tail).abs() < 1e-13,
                "x = {x}: {got:e} vs {tail:e}"
            );
        } else {
            assert!(
                (got - (1.0 - tail)).abs() < 2e-16,
                "x = {x}: {got:e} vs {:e}",
                1.0 - tail
            );
        }
    }
}

#[test]
fn central_t_matches_density_integral() {
    for &nu in &[1.0, 2.0, 3.7, 31.0, 98.0] {
        for i in -24..=24 {
            let x = i as f64 * 0.33;
            let got = central_t_cdf(x, df(nu)).unwrap();
            let want = common::central_t_cdf(x, nu);
            assert!(
                (got - want).abs() < 1e-12,
                "nu = {nu}, x = {x}: {got} vs {want}"
            );
        }
    }
    let v = central_t_cdf(2.398, df(31.0)).unwrap();
    assert!((v - common::central_t_cdf(2.398, 31.0)).abs() < 1e-12);
    assert!((v - 0.98865).abs() < 5e-4);
}

#[test]
fn incomplete_beta_matches_quadrature() {
    let cases = [
        (0.25, 2.0, 3.0),
        (0.1, 0.5, 4.5),
        (0.8, 7.5, 2.5),
        (0.5, 20.0, 20.0),
    ];
    for &(x, a, b) in &cases {
        let ln_b = statrs::function::beta::ln_beta(a, b);
        let integrand = |t: f64| {
            if t <= 0.0 || t >= 1.0 {
                0.0
            } else {
                ((a - 1.0) * t.ln() + (b - 1.0) * (1.0 - t).ln() - ln_b).exp()
            }
        };
        let want = if a >= 1.0 {
            common::integrate(&integrand, 0.0, x, 1e-15)
        } else {
            // substitute t = u^2 to remove the endpoint singularity
            let g = |u: f64| 2.0 * u * integrand(u * u);
            common::integrate(&g, 0.0, x.sqrt(), 1e-15)
        };
        let got = regularized_incomplete_beta(x, a, b).unwrap();
        assert!(
            (got - want).abs() < 1e-12,
            "({x}, {a}, {b}): {got} vs {want}"
        );
    }
}

#[test]
fn noncentral_example_against_oracle() {
    let got = noncentral_t_cdf(1.0, df(31.0), nc(1.0)).unwrap();
    let want = common::noncentral_t_cdf(1.0, 31.0, 1.0);
    assert!((got - want).abs() < 1e-8, "{got} vs {want}");

    let reduce = noncentral_t_cdf(1.5, df(10.0), Noncentrality::ZERO).unwrap();
    assert!((reduce - central_t_cdf(1.5, df(10.0)).unwrap()).abs() < 1e-15);

    let limit = noncentral_t_cdf(3.0, df(1e6), nc(1.0)).unwrap();
    assert!((limit - std_normal_cdf(2.0).unwrap()).abs() < 1e-4);
}

#[test]
fn noncentral_grid_against_oracle() {
    let mut worst = (0.0f64, 0.0, 0.0, 0.0);
    for &nu in &[2.0, 5.0, 31.0, 98.0] {
        for i in 0..=24 {
            let delta = -6.0 + 0.5 * i as f64;
            for j in 0..=32 {
                let x = -8.0 + 0.5 * j as f64;
                let got = noncentral_t_cdf(x, df(nu), nc(delta)).unwrap();
                let want = common::noncentral_t_cdf(x, nu, delta);
                let err = (got - want).abs();
                if err > worst.0 {
                    worst = (err, nu, delta, x);
                }
            }
        }
    }
    assert!(
        worst.0 < 1e-8,
        "max error {:e} at nu = {}, delta = {}, x = {}",
        worst.0,
        worst.1,
        worst.2,
        worst.3
    );
}

#[test]
fn normal_limit_of_central_t() {
    for &nu in &[1e5, 1e6, 1e8] {
        for i in -40..=40 {
            let q = i as f64 * 0.1;
            let t = central_t_cdf(q, df(nu)).unwrap();
            let z = std_normal_cdf(q).unwrap();
            assert!((t - z).abs() < 1e-3, "nu = {nu}, q = {q}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn noncentral_reflection(x in -10.0f64..10.0, nu in 0.5f64..200.0, delta in -8.0f64..8.0) {
        let a = noncentral_t_cdf(x, df(nu), nc(delta)).unwrap();
        let b = noncentral_t_cdf(-x, df(nu), nc(-delta)).unwrap();
        prop_assert!((a - (1.0 - b)).abs() < 1e-10);
    }

    #[test]
    fn noncentral_monotone_in_x(x in -10.0f64..10.0, step in 1e-3f64..2.0, nu in 0.5f64..200.0, delta in -8.0f64..8.0) {
        let a = noncentral_t_cdf(x, df(nu), nc(delta)).unwrap();
        let b = noncentral_t_cdf(x + step, df(nu), nc(delta)).unwrap();
        prop_assert!(a <= b + 1e-15);
    }

    #[test]
    fn central_t_symmetric(x in -50.0f64..50.0, nu in 0.2f64..1e4) {
        let a = central_t_cdf(x, df(nu)).unwrap();
        let b = central_t_cdf(-x, df(nu)).unwrap();
        prop_assert!((a + b - 1.0).abs() < 1e-14);
    }

    #[test]
    fn quantiles_invert_cdfs(p in 1e-9f64..(1.0 - 1e-9), nu in 0.5f64..500.0) {
        let z = std_normal_quantile(p).unwrap();
        prop_assert!((std_normal_cdf(z).unwrap() - p).abs() < 1e-10);
        let t = central_t_quantile(p, df(nu)).unwrap();
        prop_assert!((central_t_cdf(t, df(nu)).unwrap() - p).abs() < 1e-9);
    }

    #[test]
    fn cdf_then_quantile_is_identity(x in -6.0f64..6.0, nu in 1.0f64..300.0) {
        let p = central_t_cdf(x, df(nu)).unwrap();
        let back = central_t_quantile(p, df(nu)).unwrap();
        prop_assert!((back - x).abs() < 1e-8 * (1.0 + x.abs()));
        let pz = std_normal_cdf(x).unwrap();
        prop_assert!((std_normal_quantile(pz).unwrap() - x).abs() < 1e-8);
    }
}
