//! Oracle tests for the analytical metric evaluator. Every reference number
//! was frozen from an independent high-precision implementation of the same
//! formulas before this crate was written.

use approx::assert_relative_eq;
use satcox::analysis::{Evaluator, LinkBudget, ScenarioConfig, ZenithDistribution};
use satcox::coxnet::Densities;
use satcox::Error;

/// Table-1 scenario with the given densities and platform flag.
fn scenario(lambda: f64, mu: f64, platform: bool) -> ScenarioConfig<f64> {
    let mut cfg = ScenarioConfig::table1();
    cfg.densities = Densities::new(lambda, mu).unwrap();
    cfg.platform_enabled = platform;
    cfg
}

/// Table-1 scenario with the ground hop at −101 dBm total noise
/// (−171 dBm/Hz over 10 MHz), the throughput study's link budget.
fn throughput_scenario() -> ScenarioConfig<f64> {
    let mut cfg = ScenarioConfig::table1();
    cfg.platform_link = LinkBudget::new(30.0, 26.0, 1.0e7, -171.0, 2.0).unwrap();
    cfg
}

#[test]
fn link_budget_derives_the_linear_snr_scale() {
    let sat = LinkBudget::new(30.0_f64, 26.0, 1.0e7, -174.0, 2.0).unwrap();
    assert_relative_eq!(sat.eta(), 1.0e16, max_relative = 1e-12);
    let ground = LinkBudget::new(30.0_f64, 26.0, 1.0e7, -171.0, 2.0).unwrap();
    assert_relative_eq!(ground.eta(), 10.0_f64.powf(15.7), max_relative = 1e-12);
    assert!(LinkBudget::new(30.0_f64, 26.0, 1.0e7, -174.0, 1.5).is_err());
    assert!(LinkBudget::new(30.0_f64, 26.0, 0.0, -174.0, 2.0).is_err());
}

#[test]
fn effective_orbit_counts_match_reference_values() {
    assert_relative_eq!(
        Evaluator::new(scenario(15.0, 10.0, false)).avg_effective_orbits(),
        5.860017606524937,
        epsilon = 1e-12
    );
    assert_relative_eq!(
        Evaluator::new(scenario(15.0, 10.0, true)).avg_effective_orbits(),
        6.933208983750672,
        epsilon = 1e-12
    );
}

#[test]
fn effective_satellite_counts_match_reference_values() {
    assert_relative_eq!(
        Evaluator::new(scenario(15.0, 10.0, false))
            .avg_effective_satellites()
            .unwrap(),
        5.960121369744256,
        epsilon = 1e-9
    );
    assert_relative_eq!(
        Evaluator::new(scenario(15.0, 10.0, true))
            .avg_effective_satellites()
            .unwrap(),
        8.492366380309583,
        epsilon = 1e-9
    );
}

#[test]
fn gain_factors_match_reference_values() {
    let g = Evaluator::new(scenario(15.0, 10.0, true)).gain_factors().unwrap();
    assert_relative_eq!(g.orbit_factor, 1.1831379100347363, epsilon = 1e-12);
    assert_relative_eq!(g.orbit_factor_linearized, 1.186461855985733, epsilon = 1e-12);
    assert_relative_eq!(g.satellite_factor, 1.4248646719544882, epsilon = 1e-9);
}

#[test]
fn connectivity_matches_reference_values() {
    let cases: &[(f64, f64, bool, f64)] = &[
        (9.0, 15.0, false, 0.9306576255637342),
        (9.0, 15.0, true, 0.9663343155050215),
        (9.0, 9.0, true, 0.933338137286542),
        (9.0, 9.0, false, 0.8723671930304085),
        (25.0, 25.0, true, 0.9999774971586533),
        (25.0, 25.0, false, 0.9998363327253592),
    ];
    for &(lambda, mu, platform, expect) in cases {
        let c = Evaluator::new(scenario(lambda, mu, platform))
            .connectivity()
            .unwrap();
        assert_relative_eq!(c, expect, epsilon = 1e-9);
    }
}

#[test]
fn connectivity_grows_with_density_and_the_platform_tier() {
    let base = Evaluator::new(scenario(9.0, 9.0, false)).connectivity().unwrap();
    let denser = Evaluator::new(scenario(12.0, 9.0, false)).connectivity().unwrap();
    let lifted = Evaluator::new(scenario(9.0, 9.0, true)).connectivity().unwrap();
    assert!(denser > base);
    assert!(lifted > base);
}

#[test]
fn min_elevation_connectivity_masks_the_visible_cap() {
    let ev = Evaluator::new(scenario(9.0, 15.0, false));
    assert_relative_eq!(
        ev.connectivity_min_elevation(10.0_f64.to_radians()).unwrap(),
        0.7580892656393245,
        epsilon = 1e-9
    );
    // κ = 0 is the unmasked visible cap.
    assert_relative_eq!(
        ev.connectivity_min_elevation(0.0).unwrap(),
        ev.connectivity().unwrap(),
        epsilon = 1e-12
    );
    // The mask only applies to the direct link.
    let err = Evaluator::new(scenario(9.0, 15.0, true))
        .connectivity_min_elevation(0.2)
        .unwrap_err();
    assert!(matches!(err, Error::InvalidParameter { .. }), "got {err:?}");
}

#[test]
fn random_zenith_connectivity_matches_reference_values() {
    let ev = Evaluator::new(scenario(9.0, 15.0, true));
    // Platform straight overhead recovers the fixed-cap connectivity.
    assert_relative_eq!(
        ev.connectivity_random_zenith(&ZenithDistribution::Degenerate(0.0))
            .unwrap(),
        ev.connectivity().unwrap(),
        epsilon = 1e-12
    );
    let max = 30.0_f64.to_radians();
    assert_relative_eq!(
        ev.connectivity_random_zenith(&ZenithDistribution::Uniform { min: 0.0, max })
            .unwrap(),
        0.9663362513985894,
        epsilon = 1e-9
    );
    // A one-point sample list is the degenerate case.
    let one = ev
        .connectivity_random_zenith(&ZenithDistribution::Samples(vec![0.2]))
        .unwrap();
    let degenerate = ev
        .connectivity_random_zenith(&ZenithDistribution::Degenerate(0.2))
        .unwrap();
    assert_relative_eq!(one, degenerate, epsilon = 1e-14);
    // Averaging a fine zenith grid approaches the uniform expectation.
    let grid: Vec<f64> = (0..1000).map(|k| (k as f64 + 0.5) * max / 1000.0).collect();
    let riemann = ev
        .connectivity_random_zenith(&ZenithDistribution::Samples(grid))
        .unwrap();
    assert_relative_eq!(riemann, 0.9663362513985894, epsilon = 1e-7);
    // Invalid supports are rejected.
    assert!(ev
        .connectivity_random_zenith(&ZenithDistribution::Uniform { min: 0.3, max: 0.2 })
        .is_err());
    assert!(ev
        .connectivity_random_zenith(&ZenithDistribution::Samples(vec![]))
        .is_err());
}

#[test]
fn nearest_distance_ccdf_matches_reference_values() {
    let ev = Evaluator::new(scenario(10.0, 15.0, true));
    assert_eq!(ev.nearest_distance_ccdf(0.0).unwrap(), 1.0);
    assert_eq!(ev.nearest_distance_ccdf(529.0).unwrap(), 1.0);
    let cases: &[(f64, f64)] = &[
        (800.0, 0.7747361219498178),
        (1200.0, 0.48578986899452997),
        (2000.0, 0.1554771093142774),
    ];
    for &(d, expect) in cases {
        assert_relative_eq!(ev.nearest_distance_ccdf(d).unwrap(), expect, epsilon = 1e-9);
    }
    // Beyond the widest chord the CCDF floors at the empty-cap probability.
    let floor = 1.0 - ev.connectivity().unwrap();
    assert_relative_eq!(ev.nearest_distance_ccdf(4000.0).unwrap(), floor, epsilon = 1e-12);
    assert_relative_eq!(ev.nearest_distance_ccdf(9000.0).unwrap(), floor, epsilon = 1e-12);
    assert!(ev.nearest_distance_ccdf(-1.0).is_err());
}

#[test]
fn nearest_distance_quantiles_match_reference_values() {
    let ev = Evaluator::new(scenario(10.0, 15.0, true));
    assert_relative_eq!(
        ev.nearest_distance_quantile(0.5).unwrap(),
        1177.348543972427,
        epsilon = 1e-7
    );
    assert_relative_eq!(
        ev.nearest_distance_quantile(0.9).unwrap(),
        2284.8866701022957,
        epsilon = 1e-7
    );
    // Levels above the connectivity probability are unreachable.
    assert!(matches!(
        ev.nearest_distance_quantile(0.99),
        Err(Error::Bracketing { .. })
    ));
    assert!(ev.nearest_distance_quantile(0.0).is_err());
    assert!(ev.nearest_distance_quantile(1.0).is_err());
}

#[test]
fn no_platform_median_distances_match_reference_values() {
    let ev = Evaluator::new(scenario(10.0, 23.0, false));
    assert_relative_eq!(
        ev.nearest_distance_quantile(0.5).unwrap(),
        1039.5510241576562,
        epsilon = 1e-7
    );
    let ev = Evaluator::new(scenario(10.0, 15.0, false));
    assert_relative_eq!(
        ev.nearest_distance_quantile(0.5).unwrap(),
        1185.027773986349,
        epsilon = 1e-7
    );
}

#[test]
fn snr_coverage_matches_reference_values() {
    let ev = Evaluator::new(ScenarioConfig::table1());
    let cases: &[(f64, f64)] = &[
        (0.0, 0.999906106492541),
        (10.0, 0.9992639563691625),
        (30.0, 0.9324059050677878),
    ];
    for &(tau_db, expect) in cases {
        let tau = 10.0_f64.powf(tau_db / 10.0);
        assert_relative_eq!(
            ev.snr_coverage_platform(tau).unwrap(),
            expect,
            epsilon = 1e-7
        );
    }
    assert!(ev.snr_coverage_platform(-0.5).is_err());
}

#[test]
fn snr_coverage_at_zero_threshold_is_connectivity() {
    for &(lambda, mu, platform) in &[(25.0, 25.0, true), (13.7, 6.3, true), (9.0, 15.0, false)] {
        let ev = Evaluator::new(scenario(lambda, mu, platform));
        let p0 = ev.snr_coverage_platform(0.0).unwrap();
        let conn = ev.connectivity().unwrap();
        assert_relative_eq!(p0, conn, epsilon = 1e-8);
    }
}

#[test]
fn conditional_snr_coverage_rescales_by_connectivity() {
    let ev = Evaluator::new(ScenarioConfig::table1());
    let conn = ev.connectivity().unwrap();
    for &tau in &[0.5, 1.0, 100.0] {
        let joint = ev.snr_coverage_platform(tau).unwrap();
        let conditional = ev.snr_coverage_platform_conditional(tau).unwrap();
        assert_relative_eq!(conditional * conn, joint, epsilon = 1e-10);
    }
    assert_relative_eq!(
        ev.snr_coverage_platform_conditional(0.0).unwrap(),
        1.0,
        epsilon = 1e-8
    );
}

#[test]
fn ground_hop_coverage_is_the_closed_form() {
    let ev = Evaluator::new(throughput_scenario());
    let cases: &[(f64, f64)] = &[
        (-5.0, 0.9999999747617065),
        (0.0, 0.9999999201895106),
        (10.0, 0.9999992018953925),
        (30.0, 0.9999201926921739),
        (60.0, 0.9232913003434973),
        (70.0, 0.45018128310886735),
    ];
    for &(tau_db, expect) in cases {
        let tau = 10.0_f64.powf(tau_db / 10.0);
        assert_relative_eq!(ev.snr_coverage_ground(tau).unwrap(), expect, epsilon = 1e-12);
    }
    assert!(ev.snr_coverage_ground(-1.0).is_err());
}

#[test]
fn throughput_matches_reference_values() {
    let ev = Evaluator::new(throughput_scenario());
    let t = ev.throughput().unwrap();
    assert_relative_eq!(t.rate_platform_bps_hz, 13.20873682, epsilon = 2e-5);
    assert_relative_eq!(t.rate_ground_bps_hz, 22.746102083875563, epsilon = 1e-7);
    assert_relative_eq!(
        t.end_to_end_bps_hz,
        t.rate_platform_bps_hz.min(t.rate_ground_bps_hz),
        epsilon = 1e-14
    );
}

#[test]
fn throughput_without_platforms_is_the_direct_rate() {
    let mut cfg = throughput_scenario();
    cfg.platform_enabled = false;
    let t = Evaluator::new(cfg).throughput().unwrap();
    assert_relative_eq!(t.rate_platform_bps_hz, 13.15084777, epsilon = 2e-5);
    assert!(t.rate_ground_bps_hz.is_infinite());
    assert_eq!(t.end_to_end_bps_hz, t.rate_platform_bps_hz);
}

#[test]
fn delay_ccdf_matches_reference_values() {
    let ev = Evaluator::new(ScenarioConfig::table1());
    // t = 0 is exactly the empty-cap probability.
    let conn = ev.connectivity().unwrap();
    assert_relative_eq!(ev.delay_ccdf(0.0).unwrap(), 1.0 - conn, epsilon = 1e-10);
    assert_relative_eq!(
        ev.delay_ccdf(50.0).unwrap(),
        1.9027623312988483e-5,
        epsilon = 1e-8
    );
    assert_relative_eq!(
        ev.delay_ccdf(100.0).unwrap(),
        1.662841363887541e-5,
        epsilon = 1e-8
    );
    assert!(ev.delay_ccdf(-1.0).is_err());
}

#[test]
fn delay_ccdf_is_monotone_and_floored_by_the_orbit_void() {
    let ev = Evaluator::new(scenario(6.0, 4.0, true));
    let floor = ev.delay_ccdf_asymptotic();
    let mut prev = 1.0;
    for k in 0..=12 {
        let t = 100.0 * f64::from(k);
        let c = ev.delay_ccdf(t).unwrap();
        assert!(c <= prev + 1e-12, "CCDF increased at t = {t}");
        assert!(c >= floor - 1e-9, "CCDF fell below the orbit-void floor at t = {t}");
        prev = c;
    }
}

#[test]
fn dense_orbits_reach_the_delay_floor() {
    // With μ → ∞ every crossing orbit already holds a satellite in the cap:
    // the CCDF collapses onto e^{−λ sin(cap)} immediately.
    let ev = Evaluator::new(scenario(10.0, 1.0e4, true));
    let floor = ev.delay_ccdf_asymptotic();
    for &t in &[10.0, 100.0] {
        let diff = (ev.delay_ccdf(t).unwrap() - floor).abs();
        assert!(diff <= 1e-3, "floor gap {diff} at t = {t}");
    }
}

#[test]
fn delay_quantiles_round_trip_through_the_ccdf() {
    // Connectivity here is ≈ 0.653 and the orbit-void floor ≈ 0.0625, so
    // the reachable window by waiting is p ∈ (0.653, 0.9375).
    let ev = Evaluator::new(scenario(6.0, 4.0, true));
    for &p in &[0.7, 0.9] {
        let t = ev.delay_quantile(p).unwrap();
        assert!(t > 0.0);
        assert_relative_eq!(ev.delay_ccdf(t).unwrap(), 1.0 - p, epsilon = 1e-6);
    }
    // Levels inside the t = 0 atom (a satellite is already in the cap with
    // probability `connectivity`) need no waiting at all.
    assert_eq!(ev.delay_quantile(0.5).unwrap(), 0.0);
    // Levels beyond 1 − floor are unreachable: the orbit void never fills.
    assert!(matches!(
        ev.delay_quantile(0.95),
        Err(Error::Bracketing { .. })
    ));
    assert!(ev.delay_quantile(0.0).is_err());
    assert!(ev.delay_quantile(1.0).is_err());
}

#[test]
fn propagation_delay_stats_match_reference_values() {
    let stats = Evaluator::new(scenario(10.0, 15.0, true))
        .propagation_delay_stats()
        .unwrap();
    assert_relative_eq!(stats.min_s, 550.0 / 300_000.0, epsilon = 1e-12);
    assert_relative_eq!(stats.mean_s, 0.00438286690461843, epsilon = 1e-6);
    let expect = [
        (0.5, 0.003930887181482979),
        (0.7, 0.005129266802629107),
        (0.9, 0.007279413928174564),
    ];
    assert_eq!(stats.quantiles.len(), expect.len());
    for ((p, t), (ep, et)) in stats.quantiles.iter().zip(expect) {
        assert_eq!(*p, ep);
        assert_relative_eq!(*t, et, epsilon = 1e-6);
    }
}

#[test]
fn degenerate_processes_have_zero_connectivity() {
    let ev = Evaluator::new(scenario(0.0, 10.0, true));
    assert_eq!(ev.avg_effective_orbits(), 0.0);
    assert_relative_eq!(ev.connectivity().unwrap(), 0.0, epsilon = 1e-14);
    assert!(ev.propagation_delay_stats().is_err());

    let ev = Evaluator::new(scenario(10.0, 0.0, true));
    assert_relative_eq!(ev.avg_effective_satellites().unwrap(), 0.0, epsilon = 1e-14);
    assert_relative_eq!(ev.connectivity().unwrap(), 0.0, epsilon = 1e-14);
}
