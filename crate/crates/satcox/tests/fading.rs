//! Oracle tests for the fading-power models: frozen CCDF/CDF values,
//! distribution identities, and sampler moments.

use approx::assert_relative_eq;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use satcox::fading::{shadowed_rice_cdf, FadingModel};
use satcox::Error;

#[test]
fn nakagami_ccdf_matches_reference_values() {
    let cases: &[(f64, f64, f64, f64)] = &[
        (2.0, 1.0, 1.0, 0.909795989568950),
        (2.5, 1.3, 0.8, 0.974947540595611),
        (1.0, 1.0, 1.0, 0.367879441171442),
        (3.0, 2.0, 2.5, 0.765995500396779),
    ];
    for &(m, omega, x, expect) in cases {
        let f = FadingModel::nakagami(m, omega).unwrap();
        assert_relative_eq!(f.ccdf(x).unwrap(), expect, epsilon = 1e-12);
    }
}

#[test]
fn unit_shape_nakagami_is_exponential() {
    let f = FadingModel::nakagami(1.0_f64, 1.0).unwrap();
    for &x in &[0.1, 0.5, 1.0, 3.0, 8.0] {
        assert_relative_eq!(f.ccdf(x).unwrap(), (-x).exp(), epsilon = 1e-13);
    }
}

#[test]
fn mean_power_parameterization_bridges_the_convention() {
    let f = FadingModel::nakagami_with_mean_power(2.0_f64, 3.0).unwrap();
    assert_relative_eq!(f.ccdf(2.0).unwrap(), 0.615059988936696, epsilon = 1e-12);
    assert_relative_eq!(f.mean_power(), 3.0, epsilon = 1e-14);
    // Source parameterization: mean = m²/Ω.
    let g = FadingModel::nakagami(2.0_f64, 1.0).unwrap();
    assert_relative_eq!(g.mean_power(), 4.0, epsilon = 1e-14);
}

#[test]
fn shadowed_rice_cdf_matches_reference_values() {
    let cases: &[(f64, f64, f64, f64, f64)] = &[
        // Light shadowing (b, m̃, Ω̃, x, CDF).
        (0.126, 10.1, 0.835, 0.5, 0.232355408014982),
        (0.126, 10.1, 0.835, 1.0, 0.530832155719004),
        (0.126, 10.1, 0.835, 2.0, 0.883666368354171),
        (0.126, 10.1, 0.835, 1.087, 0.576614919155974),
        // Heavy shadowing.
        (0.063, 0.739, 8.97e-4, 0.05, 0.325661551977886),
        (0.063, 0.739, 8.97e-4, 0.126, 0.629512543772138),
        (0.063, 0.739, 8.97e-4, 0.5, 0.980555085493229),
    ];
    for &(b, m, omega, x, expect) in cases {
        assert_relative_eq!(
            shadowed_rice_cdf(b, m, omega, x).unwrap(),
            expect,
            epsilon = 1e-11
        );
        let f = FadingModel::shadowed_rice(b, m, omega).unwrap();
        assert_relative_eq!(f.cdf(x).unwrap(), expect, epsilon = 1e-11);
    }
}

#[test]
fn shadowed_rice_without_los_is_exponential() {
    // Ω̃ = 0 removes the line-of-sight term: H ~ Exp(mean 2b).
    let b = 0.5_f64;
    let f = FadingModel::shadowed_rice(b, 3.0, 0.0).unwrap();
    assert_relative_eq!(
        f.cdf(2.0 * b).unwrap(),
        0.632120558828543,
        epsilon = 1e-12
    );
    assert_relative_eq!(f.mean_power(), 2.0 * b, epsilon = 1e-14);
}

#[test]
fn cdf_and_ccdf_are_complementary() {
    let models = [
        FadingModel::nakagami(2.0_f64, 1.0).unwrap(),
        FadingModel::nakagami(0.7_f64, 2.4).unwrap(),
        FadingModel::shadowed_rice(0.126_f64, 10.1, 0.835).unwrap(),
        FadingModel::shadowed_rice(0.063_f64, 0.739, 8.97e-4).unwrap(),
    ];
    for f in &models {
        for k in 0..=40 {
            let x = 0.1 * f64::from(k);
            let total = f.cdf(x).unwrap() + f.ccdf(x).unwrap();
            assert!(
                (total - 1.0).abs() < 1e-10,
                "CDF + CCDF = {total} at x = {x} for {f:?}"
            );
        }
    }
}

#[test]
fn negative_thresholds_clamp_to_certain_coverage() {
    let f = FadingModel::nakagami(2.0_f64, 1.0).unwrap();
    assert_eq!(f.ccdf(-3.0).unwrap(), 1.0);
    assert_eq!(f.cdf(-3.0).unwrap(), 0.0);
}

#[test]
fn no_fading_is_a_unit_point_mass() {
    let f = FadingModel::<f64>::no_fading();
    assert_eq!(f.ccdf(0.5).unwrap(), 1.0);
    assert_eq!(f.ccdf(1.0).unwrap(), 1.0);
    assert_eq!(f.ccdf(1.5).unwrap(), 0.0);
    assert_eq!(f.cdf(0.5).unwrap(), 0.0);
    assert_eq!(f.cdf(1.5).unwrap(), 1.0);
    assert_eq!(f.mean_power(), 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    assert_eq!(f.sample(&mut rng), 1.0);
}

#[test]
fn constructors_reject_invalid_parameters() {
    assert!(FadingModel::nakagami(0.0_f64, 1.0).is_err());
    assert!(FadingModel::nakagami(-1.0_f64, 1.0).is_err());
    assert!(FadingModel::nakagami(2.0_f64, 0.0).is_err());
    assert!(FadingModel::nakagami_with_mean_power(2.0_f64, -1.0).is_err());
    assert!(FadingModel::shadowed_rice(0.0_f64, 1.0, 1.0).is_err());
    assert!(FadingModel::shadowed_rice(0.1_f64, 0.0, 1.0).is_err());
    assert!(FadingModel::shadowed_rice(0.1_f64, 1.0, -0.1).is_err());
    assert!(FadingModel::shadowed_rice(0.1_f64, 1.0, 0.0).is_ok());
}

#[test]
fn pathological_shadowing_reports_series_divergence() {
    // q → 1 makes the series need ~10¹⁵ terms; the evaluator must refuse
    // rather than return a silently truncated value.
    let err = shadowed_rice_cdf(1e-8_f64, 1.01, 1e8, 1.0).unwrap_err();
    assert!(matches!(err, Error::SeriesDivergence { .. }), "got {err:?}");
}

#[test]
fn sampler_moments_match_the_model() {
    let n = 200_000;
    let mut rng = ChaCha8Rng::seed_from_u64(42);

    // Nakagami source parameterization: mean m²/Ω = 4, sd √8.
    let f = FadingModel::nakagami(2.0_f64, 1.0).unwrap();
    let mean: f64 = (0..n).map(|_| f.sample(&mut rng)).sum::<f64>() / f64::from(n);
    assert!((mean - 4.0).abs() < 0.03, "Nakagami sample mean {mean}");

    // Shadowed-Rician: mean 2b + Ω̃ = 1.087.
    let f = FadingModel::shadowed_rice(0.126_f64, 10.1, 0.835).unwrap();
    let draws: Vec<f64> = (0..n).map(|_| f.sample(&mut rng)).collect();
    let mean = draws.iter().sum::<f64>() / f64::from(n);
    assert!((mean - 1.087).abs() < 0.01, "shadowed-Rice sample mean {mean}");

    // Empirical CDF against the analytical CDF at a few probes (4σ bands
    // for a binomial proportion at n = 2·10⁵ are below 0.005).
    for &x in &[0.5, 1.0, 2.0] {
        let frac = draws.iter().filter(|&&h| h <= x).count() as f64 / f64::from(n);
        let cdf = f.cdf(x).unwrap();
        assert!(
            (frac - cdf).abs() < 0.005,
            "empirical CDF {frac} vs analytical {cdf} at x = {x}"
        );
    }
}

#[test]
fn sampling_is_deterministic_per_seed() {
    let f = FadingModel::shadowed_rice(0.126_f64, 10.1, 0.835).unwrap();
    let mut a = ChaCha8Rng::seed_from_u64(11);
    let mut b = ChaCha8Rng::seed_from_u64(11);
    let xs: Vec<f64> = (0..32).map(|_| f.sample(&mut a)).collect();
    let ys: Vec<f64> = (0..32).map(|_| f.sample(&mut b)).collect();
    assert_eq!(xs, ys);
}

#[test]
fn single_precision_fading_is_close() {
    let f = FadingModel::nakagami(2.0_f32, 1.0).unwrap();
    assert_relative_eq!(f.ccdf(1.0).unwrap(), 0.909796_f32, epsilon = 1e-5);
}
