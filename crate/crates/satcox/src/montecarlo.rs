//! Simulation estimators mirroring every analytical metric, with standard
//! errors — the independent oracle for the analysis module.
//!
//! Determinism contract: trials are grouped into fixed-size blocks, and
//! block `b` runs on the ChaCha stream `b` of the master seed. Blocks are
//! mapped (possibly in parallel) to per-block sums which are then reduced in
//! block order with pairwise summation, so the estimate is bit-identical
//! regardless of worker count or scheduling.

use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::{Evaluator, ScenarioConfig, ZenithDistribution};
use crate::coxnet::{
    nearest_satellite_distance, sample_constellation, satellites_in_cap, time_to_first_contact,
    ConstellationSample,
};
use crate::geometry::{
    elevation_from_central_angle, min_elevation_cap_angle, zenith_extended_cap_angle,
};
use crate::{Error, Result};

/// Trials per RNG block/stream.
pub const BLOCK_TRIALS: usize = 4096;

/// Distances enter link budgets in meters.
const KM_TO_M: f64 = 1000.0;

/// A Monte Carlo estimate with its standard error and provenance.
#[derive(Clone, Debug)]
pub struct MetricEstimate {
    pub metric_id: String,
    pub mean: f64,
    pub stderr: f64,
    pub n_trials: usize,
    pub seed: u64,
}

/// Which metric to estimate; parameters that the analytical counterpart
/// takes as arguments appear here as fields.
#[derive(Clone, Debug, PartialEq)]
pub enum MetricSpec {
    /// Mean number of orbits crossing the serving cap.
    EffectiveOrbits,
    /// Mean number of satellites inside the serving cap.
    EffectiveSatellites,
    /// Probability of a non-empty serving cap.
    Connectivity,
    /// CCDF of the apex-to-nearest-satellite distance at `d_km`
    /// (an empty cap counts as distance +∞).
    DistanceCcdf { d_km: f64 },
    /// Satellite-hop SNR coverage at linear threshold `tau` (an empty cap
    /// counts as not covered).
    SnrCoveragePlatform { tau: f64 },
    /// Ground-hop SNR coverage at linear threshold `tau`.
    SnrCoverageGround { tau: f64 },
    /// Mean satellite-hop spectral efficiency, bits/s/Hz.
    RatePlatform,
    /// Mean ground-hop spectral efficiency, bits/s/Hz.
    RateGround,
    /// CCDF of the geometric association delay at `t_s` seconds.
    DelayCcdf { t_s: f64 },
    /// Direct-link connectivity under a minimum elevation mask, with the
    /// per-satellite elevation computed from the ground–satellite–origin
    /// triangle (independent of the cap-angle shortcut).
    ConnectivityMinElevation { kappa_rad: f64 },
    /// Connectivity with the platform zenith angle drawn uniformly from
    /// `[0, max_zenith_rad]` per trial.
    ConnectivityRandomZenith { max_zenith_rad: f64 },
}

impl MetricSpec {
    /// Stable identifier used in reports and CSV output.
    pub fn id(&self) -> String {
        match self {
            Self::EffectiveOrbits => "effective_orbits".into(),
            Self::EffectiveSatellites => "effective_satellites".into(),
            Self::Connectivity => "connectivity".into(),
            Self::DistanceCcdf { d_km } => format!("distance_ccdf@d={d_km}"),
            Self::SnrCoveragePlatform { tau } => format!("snr_platform@tau={tau}"),
            Self::SnrCoverageGround { tau } => format!("snr_ground@tau={tau}"),
            Self::RatePlatform => "rate_platform".into(),
            Self::RateGround => "rate_ground".into(),
            Self::DelayCcdf { t_s } => format!("delay_ccdf@t={t_s}"),
            Self::ConnectivityMinElevation { kappa_rad } => {
                format!("connectivity_min_elevation@kappa={kappa_rad}")
            }
            Self::ConnectivityRandomZenith { max_zenith_rad } => {
                format!("connectivity_random_zenith@max={max_zenith_rad}")
            }
        }
    }

    /// Whether each trial yields a Bernoulli indicator, making the metric a
    /// probability (validation then uses the score-test standard error under
    /// the analytical value, which stays meaningful when every trial agrees).
    pub fn is_probability(&self) -> bool {
        !matches!(
            self,
            Self::EffectiveOrbits
                | Self::EffectiveSatellites
                | Self::RatePlatform
                | Self::RateGround
        )
    }
}

/// Sums in index order with pairwise splitting (deterministic and
/// cancellation-resistant regardless of how blocks were produced).
fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Runs `n_trials` of `trial` under the deterministic block/stream layout
/// and returns (mean, stderr).
fn run_trials<F>(n_trials: usize, master_seed: u64, trial: F) -> (f64, f64)
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Send + Sync,
{
    let n_blocks = n_trials.div_ceil(BLOCK_TRIALS);
    let block_sums: Vec<(f64, f64)> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
            rng.set_stream(b as u64);
            let lo = b * BLOCK_TRIALS;
            let hi = n_trials.min(lo + BLOCK_TRIALS);
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in lo..hi {
                let v = trial(&mut rng);
                sum += v;
                sum_sq += v * v;
            }
            (sum, sum_sq)
        })
        .collect();
    let sums: Vec<f64> = block_sums.iter().map(|&(s, _)| s).collect();
    let squares: Vec<f64> = block_sums.iter().map(|&(_, s2)| s2).collect();
    let n = n_trials as f64;
    let mean = pairwise_sum(&sums) / n;
    let variance = ((pairwise_sum(&squares) - n * mean * mean) / (n - 1.0)).max(0.0);
    (mean, (variance / n).sqrt())
}

/// Estimates one metric by simulation.
///
/// The estimate is fully determined by `(cfg, metric, n_trials,
/// master_seed)`; worker count and scheduling cannot change it.
pub fn estimate(
    cfg: &ScenarioConfig<f64>,
    metric: &MetricSpec,
    n_trials: usize,
    master_seed: u64,
) -> Result<MetricEstimate> {
    if n_trials < 100 {
        return Err(Error::InvalidParameter {
            name: "n_trials",
            value: n_trials as f64,
            reason: "at least 100 trials are required",
        });
    }
    let geom = cfg.geom;
    let densities = cfg.densities;
    let cap = cfg.cap();
    let cap_angle = cap.central_half_angle_rad();
    let fading = cfg.fading;
    let alpha_sat = cfg.sat_link.path_loss_exponent();
    let eta_sat = cfg.sat_link.eta();
    let alpha_ground = cfg.platform_link.path_loss_exponent();
    let eta_ground = cfg.platform_link.eta();
    let h_ground_m = KM_TO_M * geom.platform_altitude_km();

    let draw = |rng: &mut ChaCha8Rng| sample_constellation(&densities, rng);
    let orbit_crosses = move |sample: &ConstellationSample| {
        sample
            .orbits
            .iter()
            .filter(|o| o.inclination_rad.sin() > cap_angle.cos())
            .count() as f64
    };

    let trial: Box<dyn Fn(&mut ChaCha8Rng) -> f64 + Send + Sync> = match *metric {
        MetricSpec::EffectiveOrbits => Box::new(move |rng| orbit_crosses(&draw(rng))),
        MetricSpec::EffectiveSatellites => {
            Box::new(move |rng| satellites_in_cap(&draw(rng), &geom, cap_angle).len() as f64)
        }
        MetricSpec::Connectivity => Box::new(move |rng| {
            f64::from(!satellites_in_cap(&draw(rng), &geom, cap_angle).is_empty())
        }),
        MetricSpec::DistanceCcdf { d_km } => {
            if d_km < 0.0 {
                return Err(Error::InvalidParameter {
                    name: "d_km",
                    value: d_km,
                    reason: "distance must be non-negative",
                });
            }
            Box::new(move |rng| {
                let d = nearest_satellite_distance(&draw(rng), &geom, &cap)
                    .unwrap_or(f64::INFINITY);
                f64::from(d > d_km)
            })
        }
        MetricSpec::SnrCoveragePlatform { tau } => {
            if tau < 0.0 {
                return Err(Error::InvalidParameter {
                    name: "tau",
                    value: tau,
                    reason: "SNR threshold must be non-negative",
                });
            }
            Box::new(move |rng| {
                match nearest_satellite_distance(&draw(rng), &geom, &cap) {
                    None => 0.0,
                    Some(d) => {
                        let h = fading.sample(rng);
                        f64::from(h >= tau * (KM_TO_M * d).powf(alpha_sat) / eta_sat)
                    }
                }
            })
        }
        MetricSpec::SnrCoverageGround { tau } => {
            if tau < 0.0 {
                return Err(Error::InvalidParameter {
                    name: "tau",
                    value: tau,
                    reason: "SNR threshold must be non-negative",
                });
            }
            Box::new(move |rng| {
                let h = fading.sample(rng);
                f64::from(h >= tau * h_ground_m.powf(alpha_ground) / eta_ground)
            })
        }
        MetricSpec::RatePlatform => Box::new(move |rng| {
            match nearest_satellite_distance(&draw(rng), &geom, &cap) {
                None => 0.0,
                Some(d) => {
                    let h = fading.sample(rng);
                    let snr = eta_sat * h * (KM_TO_M * d).powf(-alpha_sat);
                    (1.0 + snr).log2()
                }
            }
        }),
        MetricSpec::RateGround => Box::new(move |rng| {
            let h = fading.sample(rng);
            let snr = eta_ground * h * h_ground_m.powf(-alpha_ground);
            (1.0 + snr).log2()
        }),
        MetricSpec::DelayCcdf { t_s } => {
            if t_s < 0.0 {
                return Err(Error::InvalidParameter {
                    name: "t_s",
                    value: t_s,
                    reason: "delay horizon must be non-negative",
                });
            }
            Box::new(move |rng| {
                f64::from(time_to_first_contact(&draw(rng), &geom, cap_angle) > t_s)
            })
        }
        MetricSpec::ConnectivityMinElevation { kappa_rad } => {
            if !(0.0..FRAC_PI_2).contains(&kappa_rad) {
                return Err(Error::InvalidParameter {
                    name: "kappa_rad",
                    value: kappa_rad,
                    reason: "minimum elevation must lie in [0, π/2)",
                });
            }
            // Sanity-check the configuration against the analytical cap.
            min_elevation_cap_angle(&geom, kappa_rad)?;
            Box::new(move |rng| {
                let sample = draw(rng);
                let visible = sample
                    .orbits
                    .iter()
                    .zip(&sample.arguments)
                    .any(|(orbit, omegas)| {
                        omegas.iter().any(|&w| {
                            let cos_gamma =
                                (w.sin() * orbit.inclination_rad.sin()).clamp(-1.0, 1.0);
                            elevation_from_central_angle(&geom, cos_gamma.acos()) >= kappa_rad
                        })
                    });
                f64::from(visible)
            })
        }
        MetricSpec::ConnectivityRandomZenith { max_zenith_rad } => {
            if !(max_zenith_rad > 0.0 && max_zenith_rad < FRAC_PI_2) {
                return Err(Error::InvalidParameter {
                    name: "max_zenith_rad",
                    value: max_zenith_rad,
                    reason: "zenith bound must lie in (0, π/2)",
                });
            }
            // The extended cap grows with the zenith angle; validating the
            // bound covers the whole support.
            zenith_extended_cap_angle(&geom, max_zenith_rad)?;
            Box::new(move |rng| {
                let z = rng.random::<f64>() * max_zenith_rad;
                let cap_z = zenith_extended_cap_angle(&geom, z)
                    .expect("zenith within validated support");
                f64::from(!satellites_in_cap(&draw(rng), &geom, cap_z).is_empty())
            })
        }
    };

    let (mean, stderr) = run_trials(n_trials, master_seed, trial.as_ref());
    Ok(MetricEstimate {
        metric_id: metric.id(),
        mean,
        stderr,
        n_trials,
        seed: master_seed,
    })
}

/// One analytical-vs-simulation comparison.
#[derive(Clone, Debug)]
pub struct ValidationRow {
    pub metric_id: String,
    pub param_point: String,
    pub analytical: f64,
    pub mc_mean: f64,
    pub mc_stderr: f64,
    pub z_score: f64,
}

/// Outcome of a validation sweep.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub rows: Vec<ValidationRow>,
    pub n_flagged: usize,
    pub n_trials: usize,
    pub master_seed: u64,
}

impl ValidationReport {
    /// True when no row exceeded the 3-standard-error band.
    pub fn passed(&self) -> bool {
        self.n_flagged == 0
    }

    /// CSV rendering (header + one row per comparison, LF line endings).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric_id,param_point,analytical,mc_mean,mc_stderr,z_score\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{:.12e},{:.12e},{:.12e},{:.4}\n",
                row.metric_id,
                row.param_point,
                row.analytical,
                row.mc_mean,
                row.mc_stderr,
                row.z_score
            ));
        }
        out
    }

    /// One-line human-readable verdict.
    pub fn summary(&self) -> String {
        format!(
            "{} comparisons, {} flagged (|z| > 3), {} trials each, seed {}",
            self.rows.len(),
            self.n_flagged,
            self.n_trials,
            self.master_seed
        )
    }
}

/// The default 12-point grid: λ ∈ {4, 8, 12} × μ ∈ {5, 10} × platform
/// {off, on}, all other parameters at their defaults.
pub fn default_validation_grid() -> Vec<ScenarioConfig<f64>> {
    let mut grid = Vec::new();
    for &lambda in &[4.0, 8.0, 12.0] {
        for &mu in &[5.0, 10.0] {
            for &platform in &[false, true] {
                let mut cfg = ScenarioConfig::table1();
                cfg.densities = crate::coxnet::Densities::new(lambda, mu)
                    .expect("grid densities are valid");
                cfg.platform_enabled = platform;
                grid.push(cfg);
            }
        }
    }
    grid
}

/// Human-readable grid-point label (semicolon-separated so it stays a
/// single CSV field).
pub fn point_label(cfg: &ScenarioConfig<f64>) -> String {
    format!(
        "lambda={};mu={};platform={}",
        cfg.densities.mean_orbits(),
        cfg.densities.mean_sats_per_orbit(),
        if cfg.platform_enabled { "on" } else { "off" }
    )
}

fn derived_seed(master_seed: u64, index: usize) -> u64 {
    // SplitMix64-style spreading keeps per-point streams well separated.
    let mut x = master_seed ^ (0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index as u64 + 1));
    x ^= x >> 30;
    x = x.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Runs every applicable metric on every grid point and compares the
/// analytical value against the simulation estimate.
///
/// `corrupt_fixture` deliberately biases each analytical value by 5% — the
/// detector-sanity fixture, which must raise flags.
pub fn validate(
    grid: &[ScenarioConfig<f64>],
    n_trials: usize,
    master_seed: u64,
    corrupt_fixture: bool,
) -> Result<ValidationReport> {
    if grid.is_empty() {
        return Err(Error::Empty {
            context: "validate: empty scenario grid",
        });
    }
    let kappa = 10f64.to_radians();
    let max_zenith = 30f64.to_radians();
    let mut rows = Vec::new();
    for (pi, cfg) in grid.iter().enumerate() {
        let point_seed = derived_seed(master_seed, pi);
        let label = point_label(cfg);
        let ev = Evaluator::new(*cfg);
        let cap = cfg.cap();
        let d_mid = 0.5 * (cap.min_chord_km(&cfg.geom) + cap.max_chord_km());

        let mut checks: Vec<(MetricSpec, f64)> = vec![
            (MetricSpec::EffectiveOrbits, ev.avg_effective_orbits()),
            (
                MetricSpec::EffectiveSatellites,
                ev.avg_effective_satellites()?,
            ),
            (MetricSpec::Connectivity, ev.connectivity()?),
            (
                MetricSpec::DistanceCcdf { d_km: d_mid },
                ev.nearest_distance_ccdf(d_mid)?,
            ),
            (
                MetricSpec::SnrCoveragePlatform { tau: 1.0 },
                ev.snr_coverage_platform(1.0)?,
            ),
            (
                MetricSpec::DelayCcdf { t_s: 100.0 },
                ev.delay_ccdf(100.0)?,
            ),
        ];
        if cfg.platform_enabled {
            let throughput = ev.throughput()?;
            checks.push((
                MetricSpec::SnrCoverageGround { tau: 1.0 },
                ev.snr_coverage_ground(1.0)?,
            ));
            checks.push((MetricSpec::RatePlatform, throughput.rate_platform_bps_hz));
            checks.push((MetricSpec::RateGround, throughput.rate_ground_bps_hz));
            checks.push((
                MetricSpec::ConnectivityRandomZenith {
                    max_zenith_rad: max_zenith,
                },
                ev.connectivity_random_zenith(&ZenithDistribution::Uniform {
                    min: 0.0,
                    max: max_zenith,
                })?,
            ));
        } else {
            checks.push((
                MetricSpec::ConnectivityMinElevation { kappa_rad: kappa },
                ev.connectivity_min_elevation(kappa)?,
            ));
        }

        for (metric, analytical) in checks {
            let analytical = if corrupt_fixture {
                analytical * 1.05
            } else {
                analytical
            };
            let est = estimate(cfg, &metric, n_trials, point_seed)?;
            let diff = (analytical - est.mean).abs();
            // Probability metrics use the one-sample score test: the
            // standard error under the analytical value, which judges a
            // degenerate all-success sample by the analytical event rate
            // instead of its own zero variance.
            let se = if metric.is_probability() {
                let a = analytical.clamp(0.0, 1.0);
                (a * (1.0 - a) / n_trials as f64).sqrt()
            } else {
                est.stderr
            };
            let z_score = if se > 0.0 {
                diff / se
            } else if diff < 1e-12 {
                0.0
            } else {
                f64::INFINITY
            };
            rows.push(ValidationRow {
                metric_id: est.metric_id,
                param_point: label.clone(),
                analytical,
                mc_mean: est.mean,
                mc_stderr: est.stderr,
                z_score,
            });
        }
    }
    let n_flagged = rows.iter().filter(|r| r.z_score > 3.0).count();
    Ok(ValidationReport {
        rows,
        n_flagged,
        n_trials,
        master_seed,
    })
}
