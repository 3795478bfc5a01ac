//! Tests for the simulation estimators: determinism, agreement with the
//! analytical layer, and the validation-report machinery.

use satcox::analysis::{Evaluator, LinkBudget, ScenarioConfig, ZenithDistribution};
use satcox::coxnet::Densities;
use satcox::montecarlo::{
    default_validation_grid, estimate, point_label, validate, MetricSpec,
};
use satcox::Error;

fn scenario(lambda: f64, mu: f64, platform: bool) -> ScenarioConfig<f64> {
    let mut cfg = ScenarioConfig::table1();
    cfg.densities = Densities::new(lambda, mu).unwrap();
    cfg.platform_enabled = platform;
    cfg
}

fn z_score(analytical: f64, mean: f64, stderr: f64) -> f64 {
    (analytical - mean).abs() / stderr.max(1e-300)
}

#[test]
fn estimates_are_deterministic_per_seed() {
    let cfg = scenario(9.0, 9.0, true);
    let a = estimate(&cfg, &MetricSpec::Connectivity, 8192, 77).unwrap();
    let b = estimate(&cfg, &MetricSpec::Connectivity, 8192, 77).unwrap();
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
    let c = estimate(&cfg, &MetricSpec::Connectivity, 8192, 78).unwrap();
    assert_ne!(a.mean.to_bits(), c.mean.to_bits());
    assert_eq!(a.metric_id, "connectivity");
    assert_eq!(a.n_trials, 8192);
    assert_eq!(a.seed, 77);
}

#[test]
fn partial_blocks_extend_full_blocks_deterministically() {
    // 4097 trials spans two RNG streams with the second almost empty; the
    // layout must not disturb the first block's draws.
    let cfg = scenario(6.0, 6.0, true);
    let small = estimate(&cfg, &MetricSpec::EffectiveOrbits, 4096, 5).unwrap();
    let plus_one = estimate(&cfg, &MetricSpec::EffectiveOrbits, 4097, 5).unwrap();
    // Means differ by at most one trial's worth of weight.
    let max_shift = (small.mean.abs() + 20.0) / 4097.0;
    assert!((small.mean - plus_one.mean).abs() <= max_shift);
}

#[test]
fn too_few_trials_are_rejected() {
    let cfg = scenario(9.0, 9.0, true);
    let err = estimate(&cfg, &MetricSpec::Connectivity, 99, 1).unwrap_err();
    assert!(matches!(err, Error::InvalidParameter { .. }), "got {err:?}");
    assert!(estimate(&cfg, &MetricSpec::Connectivity, 100, 1).is_ok());
}

#[test]
fn invalid_metric_parameters_are_rejected() {
    let cfg = scenario(9.0, 9.0, true);
    assert!(estimate(&cfg, &MetricSpec::DistanceCcdf { d_km: -1.0 }, 1000, 1).is_err());
    assert!(estimate(&cfg, &MetricSpec::SnrCoveragePlatform { tau: -0.5 }, 1000, 1).is_err());
    assert!(estimate(&cfg, &MetricSpec::DelayCcdf { t_s: -2.0 }, 1000, 1).is_err());
    assert!(
        estimate(&cfg, &MetricSpec::ConnectivityMinElevation { kappa_rad: 1.6 }, 1000, 1)
            .is_err()
    );
    assert!(
        estimate(&cfg, &MetricSpec::ConnectivityRandomZenith { max_zenith_rad: 0.0 }, 1000, 1)
            .is_err()
    );
}

#[test]
fn count_estimates_match_the_analytical_values() {
    let cfg = scenario(15.0, 10.0, true);
    let ev = Evaluator::new(cfg);
    let n = 65_536;

    let orbits = estimate(&cfg, &MetricSpec::EffectiveOrbits, n, 101).unwrap();
    let z = z_score(ev.avg_effective_orbits(), orbits.mean, orbits.stderr);
    assert!(z <= 3.0, "effective orbits z = {z}");

    let sats = estimate(&cfg, &MetricSpec::EffectiveSatellites, n, 102).unwrap();
    let z = z_score(
        ev.avg_effective_satellites().unwrap(),
        sats.mean,
        sats.stderr,
    );
    assert!(z <= 3.0, "effective satellites z = {z}");
}

#[test]
fn connectivity_estimate_matches_the_analytical_value() {
    let cfg = scenario(9.0, 15.0, false);
    let est = estimate(&cfg, &MetricSpec::Connectivity, 65_536, 103).unwrap();
    let z = z_score(0.9306576255637342, est.mean, est.stderr);
    assert!(z <= 3.0, "connectivity z = {z} (mean {})", est.mean);
}

#[test]
fn distance_ccdf_estimate_matches_the_analytical_value() {
    let cfg = scenario(10.0, 15.0, true);
    let est = estimate(&cfg, &MetricSpec::DistanceCcdf { d_km: 1200.0 }, 65_536, 104).unwrap();
    let z = z_score(0.48578986899452997, est.mean, est.stderr);
    assert!(z <= 3.0, "distance CCDF z = {z} (mean {})", est.mean);
}

#[test]
fn delay_ccdf_estimate_matches_the_analytical_value() {
    // At t = 0 the delay CCDF is the empty-cap probability — a healthy
    // event rate for a binomial check.
    let cfg = scenario(9.0, 9.0, true);
    let est = estimate(&cfg, &MetricSpec::DelayCcdf { t_s: 0.0 }, 65_536, 105).unwrap();
    let z = z_score(1.0 - 0.933338137286542, est.mean, est.stderr);
    assert!(z <= 3.0, "delay CCDF z = {z} (mean {})", est.mean);

    // And a genuine waiting-time point on a sparser constellation.
    let cfg = scenario(4.0, 5.0, true);
    let expect = Evaluator::new(cfg).delay_ccdf(300.0).unwrap();
    let est = estimate(&cfg, &MetricSpec::DelayCcdf { t_s: 300.0 }, 65_536, 106).unwrap();
    let z = z_score(expect, est.mean, est.stderr);
    assert!(z <= 3.0, "delay CCDF(300) z = {z} (mean {})", est.mean);
}

#[test]
fn ground_snr_estimate_matches_the_closed_form() {
    let mut cfg = scenario(25.0, 25.0, true);
    cfg.platform_link = LinkBudget::new(30.0, 26.0, 1.0e7, -171.0, 2.0).unwrap();
    let tau = 10.0_f64.powf(7.0); // 70 dB
    let est = estimate(&cfg, &MetricSpec::SnrCoverageGround { tau }, 65_536, 107).unwrap();
    let z = z_score(0.45018128310886735, est.mean, est.stderr);
    assert!(z <= 3.0, "ground SNR z = {z} (mean {})", est.mean);
}

#[test]
fn platform_snr_estimate_matches_the_analytical_value() {
    let cfg = ScenarioConfig::table1();
    let tau = 10.0_f64; // 10 dB
    let est = estimate(&cfg, &MetricSpec::SnrCoveragePlatform { tau }, 65_536, 108).unwrap();
    let z = z_score(0.9992639563691625, est.mean, est.stderr);
    assert!(z <= 3.0, "platform SNR z = {z} (mean {})", est.mean);
}

#[test]
fn rate_estimates_match_the_analytical_values() {
    let mut cfg = ScenarioConfig::table1();
    cfg.platform_link = LinkBudget::new(30.0, 26.0, 1.0e7, -171.0, 2.0).unwrap();
    let n = 32_768;

    let platform = estimate(&cfg, &MetricSpec::RatePlatform, n, 109).unwrap();
    let z = z_score(13.20873682, platform.mean, platform.stderr);
    assert!(z <= 3.0, "platform rate z = {z} (mean {})", platform.mean);

    let ground = estimate(&cfg, &MetricSpec::RateGround, n, 110).unwrap();
    let z = z_score(22.746102083875563, ground.mean, ground.stderr);
    assert!(z <= 3.0, "ground rate z = {z} (mean {})", ground.mean);
}

#[test]
fn min_elevation_estimate_matches_the_analytical_value() {
    let cfg = scenario(9.0, 15.0, false);
    let est = estimate(
        &cfg,
        &MetricSpec::ConnectivityMinElevation {
            kappa_rad: 10.0_f64.to_radians(),
        },
        65_536,
        111,
    )
    .unwrap();
    let z = z_score(0.7580892656393245, est.mean, est.stderr);
    assert!(z <= 3.0, "min-elevation connectivity z = {z} (mean {})", est.mean);
}

#[test]
fn random_zenith_estimate_matches_the_analytical_value() {
    let cfg = scenario(9.0, 15.0, true);
    let max_zenith_rad = 30.0_f64.to_radians();
    let expect = Evaluator::new(cfg)
        .connectivity_random_zenith(&ZenithDistribution::Uniform {
            min: 0.0,
            max: max_zenith_rad,
        })
        .unwrap();
    let est = estimate(
        &cfg,
        &MetricSpec::ConnectivityRandomZenith { max_zenith_rad },
        65_536,
        112,
    )
    .unwrap();
    let z = z_score(expect, est.mean, est.stderr);
    assert!(z <= 3.0, "random-zenith connectivity z = {z} (mean {})", est.mean);
}

#[test]
fn metric_ids_are_stable() {
    assert_eq!(MetricSpec::EffectiveOrbits.id(), "effective_orbits");
    assert_eq!(MetricSpec::EffectiveSatellites.id(), "effective_satellites");
    assert_eq!(MetricSpec::Connectivity.id(), "connectivity");
    assert_eq!(
        MetricSpec::DistanceCcdf { d_km: 1200.0 }.id(),
        "distance_ccdf@d=1200"
    );
    assert_eq!(
        MetricSpec::SnrCoveragePlatform { tau: 1.0 }.id(),
        "snr_platform@tau=1"
    );
    assert_eq!(MetricSpec::RatePlatform.id(), "rate_platform");
    assert_eq!(MetricSpec::DelayCcdf { t_s: 100.0 }.id(), "delay_ccdf@t=100");
}

#[test]
fn default_grid_spans_densities_and_the_platform_flag() {
    let grid = default_validation_grid();
    assert_eq!(grid.len(), 12);
    assert_eq!(point_label(&grid[0]), "lambda=4;mu=5;platform=off");
    assert_eq!(point_label(&grid[11]), "lambda=12;mu=10;platform=on");
    let on = grid.iter().filter(|c| c.platform_enabled).count();
    assert_eq!(on, 6);
}

#[test]
fn validation_passes_clean_and_flags_a_corrupted_fixture() {
    // Two grid points (one per platform flag) keep this affordable; the
    // full default grid runs in the acceptance suite.
    let grid = [
        scenario(4.0, 5.0, false),
        scenario(4.0, 5.0, true),
    ];
    let report = validate(&grid, 8192, 2024, false).unwrap();
    assert_eq!(report.n_trials, 8192);
    assert!(
        report.passed(),
        "clean validation flagged {} rows:\n{}",
        report.n_flagged,
        report.to_csv()
    );

    let corrupted = validate(&grid, 8192, 2024, true).unwrap();
    assert!(!corrupted.passed(), "5% bias went undetected");
    assert!(corrupted.n_flagged >= 2);

    let csv = report.to_csv();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "metric_id,param_point,analytical,mc_mean,mc_stderr,z_score"
    );
    let body: Vec<&str> = lines.collect();
    assert_eq!(body.len(), report.rows.len());
    for line in &body {
        assert_eq!(line.split(',').count(), 6, "malformed row: {line}");
    }
    assert!(report.summary().contains("comparisons"));
    assert!(validate(&[], 8192, 1, false).is_err());
}
