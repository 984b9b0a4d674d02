mod common;

use exceedance::distributions::{
    central_t_quantile, noncentral_t_cdf, DegreesOfFreedom, Noncentrality,
};
use exceedance::exceedance::default_cutoff_grid;
use exceedance::{
    ep_confidence_interval, ep_curve, p_value, parameter_ci, point_estimate, power_cutoff,
    solve_noncentrality, summary_from_stats, true_exceedance, ExceedanceQuery, FitSummary, Side,
};
use proptest::prelude::*;

fn df(v: f64) -> DegreesOfFreedom {
    DegreesOfFreedom::new(v).unwrap()
}

#[test]
fn solver_matches_quadrature_inversion() {
    for &(q, nu, target) in &[
        (-2.398, 31.0, 0.025),
        (-2.398, 31.0, 0.975),
        (-2.2727, 99.0, 0.025),
        (1.7, 4.0, 0.1),
        (0.3, 2.0, 0.9),
    ] {
        let got = solve_noncentrality(q, df(nu), target).unwrap().value();
        let want = common::solve_noncentrality(q, nu, target);
        assert!(
            (got - want).abs() < 1e-7,
            "q = {q}, nu = {nu}, target = {target}: {got} vs {want}"
        );
    }
}

#[test]
fn parameter_interval_tends_to_normal() {
    let fit = summary_from_stats(1.5, 2.0, 1_000_000, 1).unwrap();
    let ci = parameter_ci(&fit, 1, 0.05, Side::TwoSided).unwrap();
    let half = 1.959_963_984_540_054 * 2.0 / 1000.0;
    assert!(((ci.upper - 1.5) - half).abs() < 1e-3 * half);
    assert!(((1.5 - ci.lower) - half).abs() < 1e-3 * half);
}

#[test]
fn power_cutoff_gives_power_curve() {
    let (theta0, sigma, n, alpha) = (0.4, 1.3, 50u64, 0.05);
    let c = power_cutoff(theta0, sigma, n, alpha).unwrap();
    let z = 1.644_853_626_951_472_2;
    for i in -10..=10 {
        let theta = theta0 + 0.05 * i as f64;
        let ep = true_exceedance(theta, sigma, c, n).unwrap();
        let shift = z - (n as f64).sqrt() * (theta - theta0) / sigma;
        let power = common::normal_cdf_precise(-shift);
        assert!(
            (ep - power).abs() < 1e-12,
            "theta = {theta}: {ep} vs {power}"
        );
    }
}

#[test]
fn one_sided_p_approaches_lower_exceedance() {
    let fit = summary_from_stats(0.3, 1.7, 100_000, 1).unwrap();
    let se = fit.standard_error(1).unwrap();
    for i in 0..21 {
        let c = 0.3 - 4.0 * se + 8.0 * se * i as f64 / 20.0;
        let p = p_value(&fit, 1, c, Side::LowerOneSided).unwrap();
        let q = ExceedanceQuery::new(c, 100_000, 0.05).unwrap();
        let ep = point_estimate(&fit, &q).unwrap();
        assert!((p - (1.0 - ep)).abs() < 1e-3, "c = {c}");
    }
}

#[test]
fn curve_agrees_with_scalar_and_is_monotone() {
    let fit = summary_from_stats(0.25, 1.1, 100, 1).unwrap();
    let grid = default_cutoff_grid(&fit, 1).unwrap();
    let template = ExceedanceQuery::new(0.0, 100, 0.05).unwrap();
    let curve = ep_curve(&fit, &grid, &template).unwrap();
    let nearest = grid
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .unwrap()
        .0;
    let scalar =
        ep_confidence_interval(&fit, &template.with_cutoff(grid[nearest]).unwrap()).unwrap();
    assert_eq!(curve.estimates[nearest], scalar);
    for w in curve.estimates.windows(2) {
        assert!(w[1].point <= w[0].point);
        assert!(w[1].lower <= w[0].lower);
        assert!(w[1].upper <= w[0].upper);
    }
}

#[test]
fn curve_does_not_depend_on_thread_count() {
    let fit = summary_from_stats(-1.0, 3.0, 25, 2).unwrap();
    let grid = default_cutoff_grid(&fit, 1).unwrap();
    let template = ExceedanceQuery::new(0.0, 40, 0.1).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| ep_curve(&fit, &grid, &template).unwrap())
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn huge_replication_collapses_the_band() {
    let fit = summary_from_stats(0.25, 1.1, 100, 1).unwrap();
    let limits = parameter_ci(&fit, 1, 0.05, Side::TwoSided).unwrap();
    let template = ExceedanceQuery::new(0.0, 100_000_000, 0.05).unwrap();
    let at = |c: f64| ep_confidence_interval(&fit, &template.with_cutoff(c).unwrap()).unwrap();
    for i in 1..=20 {
        let off = 0.01 * i as f64;
        assert!(at(limits.lower - off).lower >= 0.99);
        assert!(at(limits.lower + off).lower <= 0.01);
        assert!(at(limits.upper - off).upper >= 0.99);
        assert!(at(limits.upper + off).upper <= 0.01);
    }
}

#[test]
fn one_sided_bound_near_one_half_can_pass_the_point() {
    // The noncentral t is skewed, so F(q; ν, q) < 0.5 for q > 0 and the
    // median-level one-sided bound exceeds the plug-in estimate.
    let fit = summary_from_stats(0.0, 0.05, 31, 1).unwrap();
    let c = 1.952_192_790_895_025_4 * fit.standard_error(1).unwrap();
    let q = ExceedanceQuery::new(c, 1, 0.498_670_622_956_021_94)
        .unwrap()
        .with_side(Side::LowerOneSided);
    let ci = ep_confidence_interval(&fit, &q).unwrap();
    assert!(ci.lower > ci.point);
    let t = noncentral_t_cdf(
        1.952_192_790_895_025_4,
        df(30.0),
        Noncentrality::new(1.952_192_790_895_025_4).unwrap(),
    )
    .unwrap();
    assert!(t < 0.498_670_622_956_021_94);
}

#[test]
fn degenerate_summary_is_rejected_everywhere() {
    let fit = FitSummary::new(vec![2.0], vec![0.0], Some(0.0), 10, 1).unwrap();
    let q = ExceedanceQuery::new(1.0, 10, 0.05).unwrap();
    assert!(point_estimate(&fit, &q).is_err());
    assert!(ep_confidence_interval(&fit, &q).is_err());
    assert!(ep_curve(&fit, &[0.0, 1.0], &q).is_err());
    assert!(parameter_ci(&fit, 1, 0.05, Side::TwoSided).is_err());
    assert!(p_value(&fit, 1, 0.0, Side::TwoSided).is_err());
}

fn fit_strategy() -> impl Strategy<Value = FitSummary> {
    (-50.0f64..50.0, 0.05f64..40.0, 3usize..400, 1usize..3)
        .prop_filter("n > d", |(_, _, n, d)| n > d)
        .prop_map(|(t, s, n, d)| summary_from_stats(t, s, n, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn interval_contains_point(fit in fit_strategy(), z in -6.0f64..6.0, m in 1u64..500, alpha in 0.001f64..0.5) {
        let c = fit.theta_hat()[0] + z * fit.standard_error(1).unwrap();
        // A one-sided bound at level α/2 is the matching end of the two-sided
        // interval at α, so one-sided containment is checked for α/2 ≤ 0.25.
        for (side, level) in [
            (Side::TwoSided, alpha),
            (Side::LowerOneSided, alpha / 2.0),
            (Side::UpperOneSided, alpha / 2.0),
        ] {
            let q = ExceedanceQuery::new(c, m, level).unwrap().with_side(side);
            let ci = ep_confidence_interval(&fit, &q).unwrap();
            prop_assert!(0.0 <= ci.lower && ci.lower <= ci.upper && ci.upper <= 1.0, "{:?}", ci);
            prop_assert!(ci.lower <= ci.point + 1e-12 && ci.point <= ci.upper + 1e-12, "{:?} {:?}", side, ci);
        }
    }

    #[test]
    fn p_value_equals_alpha_at_interval_ends(fit in fit_strategy(), alpha in 0.001f64..0.5) {
        let ci = parameter_ci(&fit, 1, alpha, Side::TwoSided).unwrap();
        prop_assert!((p_value(&fit, 1, ci.lower, Side::TwoSided).unwrap() - alpha).abs() < 1e-8);
        prop_assert!((p_value(&fit, 1, ci.upper, Side::TwoSided).unwrap() - alpha).abs() < 1e-8);
        prop_assert_eq!(p_value(&fit, 1, fit.theta_hat()[0], Side::TwoSided).unwrap(), 1.0);
    }

    #[test]
    fn solver_round_trip(q in -15.0f64..15.0, nu in 1.0f64..300.0, target in 0.001f64..0.999) {
        let delta = solve_noncentrality(q, df(nu), target).unwrap();
        let back = noncentral_t_cdf(q, df(nu), delta).unwrap();
        prop_assert!((back - target).abs() < 1e-9, "{} vs {}", back, target);
    }

    #[test]
    fn central_bound_is_zero_noncentrality(nu in 1.0f64..300.0, alpha in 0.001f64..0.5) {
        let t = central_t_quantile(1.0 - alpha / 2.0, df(nu)).unwrap();
        let d = solve_noncentrality(-t, df(nu), alpha / 2.0).unwrap();
        prop_assert!(d.value().abs() < 1e-8);
        prop_assert!(Noncentrality::new(d.value()).is_ok());
    }
}
