//! Analytical evaluators for every network metric: effective orbit and
//! satellite counts, connectivity, nearest-distance CCDF, SNR coverage,
//! throughput, association delay, and the elevation-angle extensions.
//!
//! The central object is [`Evaluator`], which owns a scenario plus the
//! quadrature machinery. All coverage-type metrics reduce to two inner
//! integrals over the orbit co-inclination `w ∈ [0, ζ]`:
//!
//! * `I(ζ) = ∫ cos w (1 − e^{−(μ/π) a(w,ζ)}) dw` — the void-probability
//!   exponent (`Λ(ζ) = λ·I(ζ)`), and
//! * `J(ζ) = ∫ e^{−(μ/π) a(w,ζ)} / sqrt(1 − cos²ζ sec²w) dw` — the
//!   conditional intersection density, whose integrand has an integrable
//!   `1/sqrt` endpoint singularity,
//!
//! where `a(w, ζ) = arcsin(sqrt(1 − cos²ζ sec²w))` is the in-cap half-arc.
//! Both are computed in the substituted angle `v` with `sin w = sin ζ sin v`,
//! under which the half-arc becomes `a = atan(tan ζ cos v)`, the cusp at
//! `w = ζ` and the `1/sqrt` singularity cancel against the Jacobian
//! `cos w dw = sin ζ cos v dv`, and both integrands are analytic:
//!
//! * `I(ζ) = sin ζ ∫₀^{π/2} (1 − e^{−(μ/π) a(v)}) cos v dv`,
//! * `J(ζ) = ∫₀^{π/2} e^{−(μ/π) a(v)} dv`.
//!
//! The pair is memoized per quantized ζ, which together with the smooth
//! substituted forms keeps the nested coverage and rate integrals cheap.

use core::cell::RefCell;
use core::f64::consts::{FRAC_PI_2, PI};

use crate::coxnet::Densities;
use crate::fading::FadingModel;
use crate::geometry::{
    critical_inclination, min_elevation_cap_angle, zenith_extended_cap_angle, CapSpec,
    NetworkGeometry,
};
use crate::quadrature::{
    integrate, integrate_semi_infinite, Memoized, Quadrature, QuadratureSettings,
};
use crate::{Error, FloatScalar, Result};

/// Propagation speed used for the propagation-delay summary, km/s.
pub const SPEED_OF_LIGHT_KM_S: f64 = 300_000.0;

/// Path-loss distances enter the link budget in meters (received power is
/// referenced at 1 m), while the geometry is in kilometres.
const KM_TO_M: f64 = 1000.0;

/// Absolute error-estimate ceiling for the SNR coverage integral; a larger
/// estimate fails the evaluation rather than silently degrading.
const COVERAGE_ACCURACY_LIMIT: f64 = 1e-4;

/// Quantization step for the memoized ζ-kernel.
const KERNEL_QUANTUM: f64 = 1e-12;

/// Probability levels reported by the propagation-delay summary.
const DELAY_SUMMARY_QUANTILES: [f64; 3] = [0.5, 0.7, 0.9];

/// Radio-link parameters in dB units, with the linear SNR-at-1m factor
/// `η = p·g / (N_o·B)` derived once at construction — all downstream math is
/// linear.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkBudget<S> {
    rx_power_at_1m_dbm: S,
    aggregate_gain_db: S,
    bandwidth_hz: S,
    noise_density_dbm_hz: S,
    path_loss_exponent: S,
    eta: S,
}

impl<S: FloatScalar> LinkBudget<S> {
    pub fn new(
        rx_power_at_1m_dbm: S,
        aggregate_gain_db: S,
        bandwidth_hz: S,
        noise_density_dbm_hz: S,
        path_loss_exponent: S,
    ) -> Result<Self> {
        if !bandwidth_hz.is_finite() || bandwidth_hz <= S::zero() {
            return Err(Error::InvalidParameter {
                name: "bandwidth_hz",
                value: bandwidth_hz.to_f64_lossy(),
                reason: "must be finite and positive",
            });
        }
        if !path_loss_exponent.is_finite() || path_loss_exponent < S::of(2.0) {
            return Err(Error::InvalidParameter {
                name: "path_loss_exponent",
                value: path_loss_exponent.to_f64_lossy(),
                reason: "must be at least 2",
            });
        }
        for (name, v) in [
            ("rx_power_at_1m_dbm", rx_power_at_1m_dbm),
            ("aggregate_gain_db", aggregate_gain_db),
            ("noise_density_dbm_hz", noise_density_dbm_hz),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value: v.to_f64_lossy(),
                    reason: "must be finite",
                });
            }
        }
        let exponent_db = rx_power_at_1m_dbm + aggregate_gain_db - noise_density_dbm_hz;
        let eta = S::of(10.0).powf(exponent_db / S::of(10.0)) / bandwidth_hz;
        Ok(Self {
            rx_power_at_1m_dbm,
            aggregate_gain_db,
            bandwidth_hz,
            noise_density_dbm_hz,
            path_loss_exponent,
            eta,
        })
    }

    /// Linear SNR at 1 m distance, `η = p·g/(N_o B)`.
    pub fn eta(&self) -> S {
        self.eta
    }

    pub fn path_loss_exponent(&self) -> S {
        self.path_loss_exponent
    }

    pub fn bandwidth_hz(&self) -> S {
        self.bandwidth_hz
    }

    pub fn rx_power_at_1m_dbm(&self) -> S {
        self.rx_power_at_1m_dbm
    }

    pub fn aggregate_gain_db(&self) -> S {
        self.aggregate_gain_db
    }

    pub fn noise_density_dbm_hz(&self) -> S {
        self.noise_density_dbm_hz
    }
}

/// A complete evaluation scenario: geometry, process densities, the two
/// radio links, the fading model, and whether the aerial-platform relay tier
/// is present.
#[derive(Clone, Copy, Debug)]
pub struct ScenarioConfig<S> {
    pub geom: NetworkGeometry<S>,
    pub densities: Densities,
    pub platform_enabled: bool,
    /// Platform-to-satellite link.
    pub sat_link: LinkBudget<S>,
    /// Platform-to-ground link.
    pub platform_link: LinkBudget<S>,
    pub fading: FadingModel<S>,
}

impl<S: FloatScalar> ScenarioConfig<S> {
    /// The default simulation setting: λ = μ = 25, satellites at 550 km,
    /// platforms at 20 km, ν = 0.0011 rad/s, both links at 30 dBm with
    /// 26 dB aggregate gain over 10 MHz against −174 dBm/Hz noise, α = 2,
    /// Nakagami m = 1 (Rayleigh power) fading.
    pub fn table1() -> Self {
        let geom = NetworkGeometry::from_altitudes(S::of(20.0), S::of(550.0), S::of(0.0011))
            .expect("default geometry is valid");
        let link = LinkBudget::new(
            S::of(30.0),
            S::of(26.0),
            S::of(1.0e7),
            S::of(-174.0),
            S::of(2.0),
        )
        .expect("default link budget is valid");
        Self {
            geom,
            densities: Densities::new(25.0, 25.0).expect("default densities are valid"),
            platform_enabled: true,
            sat_link: link,
            platform_link: link,
            fading: FadingModel::nakagami(S::one(), S::one()).expect("default fading is valid"),
        }
    }

    /// Cap half-angle implied by the platform flag.
    pub fn cap_angle(&self) -> S {
        self.geom.cap_angle(self.platform_enabled)
    }

    /// Cap specification implied by the platform flag.
    pub fn cap(&self) -> CapSpec<S> {
        self.geom.cap(self.platform_enabled)
    }
}

/// Orbit- and satellite-count gain factors of the platform tier over the
/// bare ground user.
#[derive(Clone, Copy, Debug)]
pub struct GainFactors<S> {
    /// `sin φ̄ / sin ξ̄`.
    pub orbit_factor: S,
    /// Ratio of the two effective-satellite integrals.
    pub satellite_factor: S,
    /// Small-altitude linearization `1 + (φ̄ − ξ̄)·cot ξ̄` of the orbit factor.
    pub orbit_factor_linearized: S,
}

/// Expected spectral efficiencies of the two hops and their end-to-end
/// minimum, all in bits/s/Hz.
#[derive(Clone, Copy, Debug)]
pub struct Throughput<S> {
    pub rate_platform_bps_hz: S,
    pub rate_ground_bps_hz: S,
    pub end_to_end_bps_hz: S,
}

/// Summary of the propagation delay `T = (D + h_a)/c`, conditional on the
/// extended cap being non-empty.
#[derive(Clone, Debug)]
pub struct PropagationDelaySummary<S> {
    /// Smallest possible delay, `(r_s − r_a + h_a)/c`.
    pub min_s: S,
    /// Conditional mean delay.
    pub mean_s: S,
    /// `(p, t_p)` pairs: conditional delay quantiles at p ∈ {0.5, 0.7, 0.9}.
    pub quantiles: Vec<(S, S)>,
}

/// Distribution of the platform zenith angle `Z` seen from the gateway.
#[derive(Clone, Debug)]
pub enum ZenithDistribution<S> {
    /// `Z` fixed at one angle (0 = platform straight overhead).
    Degenerate(S),
    /// `Z` uniform on `[min, max]` with `0 ≤ min < max < π/2`.
    Uniform { min: S, max: S },
    /// Empirical sample of zenith angles, averaged directly.
    Samples(Vec<S>),
}

/// Memoized per-ζ kernel values.
#[derive(Clone, Copy, Debug)]
struct KernelValue<S> {
    /// `I(ζ)` — the λ-free void-probability exponent.
    i_lambda: S,
    /// `J(ζ)` — the singular intersection-density integral.
    j_raw: S,
}

/// Collects the first error raised inside a quadrature integrand, letting
/// the integrand itself stay a plain `Fn(S) -> S`.
struct ErrorSlot(RefCell<Option<Error>>);

impl ErrorSlot {
    fn new() -> Self {
        Self(RefCell::new(None))
    }

    fn absorb<S: FloatScalar>(&self, r: Result<S>) -> S {
        match r {
            Ok(v) => v,
            Err(e) => {
                let mut slot = self.0.borrow_mut();
                if slot.is_none() {
                    *slot = Some(e);
                }
                S::zero()
            }
        }
    }

    /// Re-raises the captured error (integrand errors take precedence over
    /// the quadrature outcome computed from poisoned values).
    fn rethrow<S: FloatScalar>(self, outcome: Result<Quadrature<S>>) -> Result<Quadrature<S>> {
        match self.0.into_inner() {
            Some(e) => Err(e),
            None => outcome,
        }
    }
}

/// Analytical metric evaluator for one scenario.
pub struct Evaluator<S: FloatScalar> {
    cfg: ScenarioConfig<S>,
    /// Settings for the outer chord, rate, and zenith-averaging integrals.
    smooth: QuadratureSettings<S>,
    /// Tighter settings for the angular kernel integrals, so inner-kernel
    /// noise never dominates an outer error estimate. Floored at a small
    /// multiple of the scalar's epsilon to stay attainable in f32.
    tight: QuadratureSettings<S>,
    kernel: Memoized<S, Result<KernelValue<S>>>,
}

impl<S: FloatScalar> Evaluator<S> {
    pub fn new(cfg: ScenarioConfig<S>) -> Self {
        let tight = QuadratureSettings::default().with_tolerances(
            S::of(1e-11).max(S::epsilon() * S::of(64.0)),
            S::of(1e-14).max(S::epsilon()),
        );
        let mu = S::of(cfg.densities.mean_sats_per_orbit());
        let kernel = Memoized::new(KERNEL_QUANTUM, move |zeta: S| {
            compute_kernel(mu, zeta, &tight)
        });
        Self {
            cfg,
            smooth: QuadratureSettings::default(),
            tight,
            kernel,
        }
    }

    pub fn cfg(&self) -> &ScenarioConfig<S> {
        &self.cfg
    }

    fn lambda(&self) -> S {
        S::of(self.cfg.densities.mean_orbits())
    }

    fn mu(&self) -> S {
        S::of(self.cfg.densities.mean_sats_per_orbit())
    }

    fn kernel_at(&self, zeta: S) -> Result<KernelValue<S>> {
        self.kernel.eval(zeta)
    }

    /// Connectivity through a cap of arbitrary half-angle:
    /// `1 − e^{−λ I(cap)}`.
    fn connectivity_for_cap(&self, cap: S) -> Result<S> {
        let i = self.kernel_at(cap)?.i_lambda;
        Ok(S::one() - (-self.lambda() * i).exp())
    }

    /// Mean number of orbits crossing the serving cap: `λ sin(cap)`.
    pub fn avg_effective_orbits(&self) -> S {
        self.lambda() * self.cfg.cap_angle().sin()
    }

    /// λμ-free effective-satellite integral `∫₀^cap cos w · a(w, cap) dw`,
    /// evaluated as `sin(cap) ∫₀^{π/2} a(v) cos v dv` in the substituted
    /// angle.
    fn effective_sat_integral(&self, cap: S) -> Result<S> {
        if cap <= S::zero() {
            return Ok(S::zero());
        }
        let sin_cap = cap.sin();
        let q = integrate(
            |v: S| half_arc_substituted(sin_cap, v) * v.cos(),
            S::zero(),
            S::of(FRAC_PI_2),
            &self.tight,
        )?;
        Ok(sin_cap * q.value)
    }

    /// Mean number of satellites inside the serving cap:
    /// `(λμ/π) ∫₀^cap cos w · a(w, cap) dw`.
    pub fn avg_effective_satellites(&self) -> Result<S> {
        let cap = self.cfg.cap_angle();
        Ok(self.lambda() * self.mu() / S::of(PI) * self.effective_sat_integral(cap)?)
    }

    /// Orbit/satellite gain factors of the platform tier relative to the
    /// bare visible cap, plus the small-altitude linearization.
    pub fn gain_factors(&self) -> Result<GainFactors<S>> {
        let xi = self.cfg.geom.visible_cap_angle();
        let phi = self.cfg.geom.extended_cap_angle();
        let eps = phi - xi;
        Ok(GainFactors {
            orbit_factor: phi.sin() / xi.sin(),
            satellite_factor: self.effective_sat_integral(phi)?
                / self.effective_sat_integral(xi)?,
            orbit_factor_linearized: S::one() + eps * xi.cos() / xi.sin(),
        })
    }

    /// Probability that the serving cap contains at least one satellite.
    pub fn connectivity(&self) -> Result<S> {
        self.connectivity_for_cap(self.cfg.cap_angle())
    }

    /// CCDF of the distance from the cap apex to its nearest in-cap
    /// satellite. Piecewise: 1 up to the zenith chord `r_s − apex`,
    /// `e^{−λ I(ζ(d))}` across the cap, and the constant empty-cap
    /// probability `1 − connectivity` beyond the cap's largest chord.
    pub fn nearest_distance_ccdf(&self, d: S) -> Result<S> {
        if d < S::zero() {
            return Err(Error::InvalidParameter {
                name: "d",
                value: d.to_f64_lossy(),
                reason: "distance must be non-negative",
            });
        }
        let cap = self.cfg.cap();
        let geom = &self.cfg.geom;
        if d <= cap.min_chord_km(geom) {
            return Ok(S::one());
        }
        let zeta = if d >= cap.max_chord_km() {
            cap.central_half_angle_rad()
        } else {
            critical_inclination(geom, cap.apex_radius_km(), d)?
        };
        let i = self.kernel_at(zeta)?.i_lambda;
        Ok((-self.lambda() * i).exp())
    }

    /// Unconditional quantile of the nearest-satellite distance:
    /// the `d` with `P(D ≤ d) = p`. Fails with a bracketing error when
    /// `p` exceeds the connectivity probability (the CCDF floors above
    /// `1 − p` forever).
    pub fn nearest_distance_quantile(&self, p: S) -> Result<S> {
        if p <= S::zero() || p >= S::one() {
            return Err(Error::InvalidParameter {
                name: "p",
                value: p.to_f64_lossy(),
                reason: "quantile level must lie in (0, 1)",
            });
        }
        let cap = self.cfg.cap();
        let lo = cap.min_chord_km(&self.cfg.geom);
        let hi = cap.max_chord_km();
        bisect_decreasing(
            |d| self.nearest_distance_ccdf(d),
            lo,
            hi,
            S::one() - p,
            "nearest_distance_quantile",
        )
    }

    /// Association-chord length at critical inclination `ζ`:
    /// `d(ζ) = sqrt((r_s − r_x)² + 4 r_s r_x sin²(ζ/2))`, the inverse of
    /// [`critical_inclination`] in a form with no cancellation at small ζ.
    fn chord_at_inclination(&self, zeta: S) -> S {
        let r_s = self.cfg.geom.satellite_orbit_radius_km();
        let r_x = self.cfg.cap().apex_radius_km();
        let min_chord = r_s - r_x;
        let half_sin = (zeta * S::of(0.5)).sin();
        (min_chord * min_chord + S::of(4.0) * r_s * r_x * half_sin * half_sin).sqrt()
    }

    /// SNR coverage probability of the satellite hop at linear threshold
    /// `tau`: the chord-density integral
    /// `∫ (λμ z / (π r_s r_x)) F̄_H(τ (1000z)^α / η_s) e^{−λ I(ζ(z))} J(ζ(z)) dz`
    /// over the admissible chord range, where the apex `r_x` and the cap are
    /// those of the serving association (the aerial platform when the
    /// platform tier is enabled, the ground user otherwise). Evaluated in
    /// the inclination variable (`z dz = r_s r_x sin ζ dζ`), where the
    /// integrand is smooth:
    /// `(λμ/π) ∫₀^cap F̄_H(τ (1000 d(ζ))^α / η_s) e^{−λ I(ζ)} J(ζ) sin ζ dζ`.
    /// Unconditional: an empty cap counts as not covered, so the τ → 0
    /// limit is the connectivity probability.
    pub fn snr_coverage_platform(&self, tau: S) -> Result<S> {
        if tau < S::zero() {
            return Err(Error::InvalidParameter {
                name: "tau",
                value: tau.to_f64_lossy(),
                reason: "SNR threshold must be non-negative",
            });
        }
        let cap_angle = self.cfg.cap().central_half_angle_rad();
        let lambda = self.lambda();
        let prefactor = lambda * self.mu() / S::of(PI);
        let alpha = self.cfg.sat_link.path_loss_exponent();
        let eta = self.cfg.sat_link.eta();

        let slot = ErrorSlot::new();
        let integrand = |zeta: S| {
            let kernel = match self.kernel_at(zeta) {
                Ok(k) => k,
                Err(e) => {
                    slot.absorb::<S>(Err(e));
                    return S::zero();
                }
            };
            let d = self.chord_at_inclination(zeta);
            let x = tau * (S::of(KM_TO_M) * d).powf(alpha) / eta;
            let fbar = slot.absorb(self.cfg.fading.ccdf(x));
            prefactor * fbar * (-lambda * kernel.i_lambda).exp() * kernel.j_raw * zeta.sin()
        };
        let outcome = integrate(integrand, S::zero(), cap_angle, &self.smooth);
        let q = slot.rethrow(outcome)?;
        if q.error_estimate > S::of(COVERAGE_ACCURACY_LIMIT) {
            return Err(Error::Accuracy {
                context: "snr_coverage_platform",
                error_estimate: q.error_estimate.to_f64_lossy(),
                limit: COVERAGE_ACCURACY_LIMIT,
            });
        }
        Ok(q.value)
    }

    /// [`Self::snr_coverage_platform`] conditioned on a non-empty cap.
    pub fn snr_coverage_platform_conditional(&self, tau: S) -> Result<S> {
        let conn = self.connectivity()?;
        if conn <= S::zero() {
            return Err(Error::Empty {
                context: "snr_coverage_platform_conditional: zero connectivity",
            });
        }
        Ok(self.snr_coverage_platform(tau)? / conn)
    }

    /// SNR coverage of the platform-to-ground hop at linear threshold `tau`:
    /// a single fading-CCDF evaluation at `τ (1000 h_a)^α / η_a`.
    pub fn snr_coverage_ground(&self, tau: S) -> Result<S> {
        if tau < S::zero() {
            return Err(Error::InvalidParameter {
                name: "tau",
                value: tau.to_f64_lossy(),
                reason: "SNR threshold must be non-negative",
            });
        }
        let h_m = S::of(KM_TO_M) * self.cfg.geom.platform_altitude_km();
        let alpha = self.cfg.platform_link.path_loss_exponent();
        self.cfg
            .fading
            .ccdf(tau * h_m.powf(alpha) / self.cfg.platform_link.eta())
    }

    /// Expected spectral efficiencies `R_A = ∫₀^∞ P_A(2^u − 1) du` and
    /// `R_G = ∫₀^∞ F̄_H((2^u−1)(1000 h_a)^α/η_a) du`, and their minimum —
    /// the end-to-end rate of the two-hop chain. Without the platform tier
    /// there is no second hop: the ground rate is reported as +∞ and the
    /// end-to-end rate is the direct satellite-hop rate.
    ///
    /// `R_A` is computed with the threshold integral pulled inside the
    /// chord integral (the integrand is non-negative, so the swap is
    /// exact), which evaluates the ζ-kernels once per chord node instead
    /// of once per (threshold, chord) pair:
    /// `R_A = (λμ/π) ∫₀^cap E[log₂(1 + H η_s (1000 d(ζ))^{−α})]
    ///        e^{−λ I(ζ)} J(ζ) sin ζ dζ`.
    pub fn throughput(&self) -> Result<Throughput<S>> {
        let cap_angle = self.cfg.cap().central_half_angle_rad();
        let lambda = self.lambda();
        let prefactor = lambda * self.mu() / S::of(PI);
        let alpha = self.cfg.sat_link.path_loss_exponent();
        let eta = self.cfg.sat_link.eta();

        let slot = ErrorSlot::new();
        let rate_platform = {
            let integrand = |zeta: S| {
                let kernel = match self.kernel_at(zeta) {
                    Ok(k) => k,
                    Err(e) => {
                        slot.absorb::<S>(Err(e));
                        return S::zero();
                    }
                };
                let d = self.chord_at_inclination(zeta);
                let scale = (S::of(KM_TO_M) * d).powf(alpha) / eta;
                // E[log₂(1 + H/scale)] by the layer-cake identity.
                let spectral = slot.absorb(
                    integrate_semi_infinite(
                        |u: S| {
                            slot.absorb(
                                self.cfg.fading.ccdf((u.exp2() - S::one()) * scale),
                            )
                        },
                        &self.smooth,
                    )
                    .map(|q| q.value),
                );
                prefactor
                    * spectral
                    * (-lambda * kernel.i_lambda).exp()
                    * kernel.j_raw
                    * zeta.sin()
            };
            integrate(integrand, S::zero(), cap_angle, &self.smooth)
        };
        let rate_platform = slot.rethrow(rate_platform)?.value;

        if !self.cfg.platform_enabled {
            return Ok(Throughput {
                rate_platform_bps_hz: rate_platform,
                rate_ground_bps_hz: S::infinity(),
                end_to_end_bps_hz: rate_platform,
            });
        }

        let slot = ErrorSlot::new();
        let rate_ground = {
            let integrand = |u: S| slot.absorb(self.snr_coverage_ground(u.exp2() - S::one()));
            integrate_semi_infinite(integrand, &self.smooth)
        };
        let rate_ground = slot.rethrow(rate_ground)?.value;

        Ok(Throughput {
            rate_platform_bps_hz: rate_platform,
            rate_ground_bps_hz: rate_ground,
            end_to_end_bps_hz: rate_platform.min(rate_ground),
        })
    }

    /// CCDF of the geometric association delay at `t` seconds:
    /// `e^{−λ ∫₀^cap cos w (1 − e^{−(μ/2π)(νt + 2 a(w,cap))}) dw}`.
    ///
    /// The void arc grows by `νt` as satellites sweep forward, so the t = 0
    /// value is exactly `1 − connectivity`. The closed form describes arcs
    /// before they wrap the full orbit (`νt + 2a ≤ 2π`); beyond that it
    /// continues monotonically below the true CCDF, which has already
    /// reached its asymptotic floor there.
    pub fn delay_ccdf(&self, t: S) -> Result<S> {
        if t < S::zero() {
            return Err(Error::InvalidParameter {
                name: "t",
                value: t.to_f64_lossy(),
                reason: "delay horizon must be non-negative",
            });
        }
        let cap = self.cfg.cap_angle();
        let sin_cap = cap.sin();
        let swept = self.cfg.geom.satellite_angular_speed_rad_s() * t;
        let rate = self.mu() / S::of(2.0 * PI);
        let q = integrate(
            |v: S| {
                let arc = swept + S::of(2.0) * half_arc_substituted(sin_cap, v);
                v.cos() * (S::one() - (-rate * arc).exp())
            },
            S::zero(),
            S::of(FRAC_PI_2),
            &self.tight,
        )?;
        Ok((-self.lambda() * sin_cap * q.value).exp())
    }

    /// The μ → ∞ floor of the delay CCDF, `e^{−λ sin(cap)}` — the
    /// probability that no orbit crosses the cap at all.
    pub fn delay_ccdf_asymptotic(&self) -> S {
        (-self.lambda() * self.cfg.cap_angle().sin()).exp()
    }

    /// Delay quantile: smallest `t` with `P(T_A ≤ t) ≥ p`. Fails with a
    /// bracketing error when the asymptotic floor keeps the CCDF above
    /// `1 − p` for the whole sweep range.
    pub fn delay_quantile(&self, p: S) -> Result<S> {
        if p <= S::zero() || p >= S::one() {
            return Err(Error::InvalidParameter {
                name: "p",
                value: p.to_f64_lossy(),
                reason: "quantile level must lie in (0, 1)",
            });
        }
        // T has an atom at 0 of mass `connectivity`; levels inside it are
        // met without waiting.
        if S::one() - p >= self.delay_ccdf(S::zero())? {
            return Ok(S::zero());
        }
        let full_sweep = S::of(2.0 * PI) / self.cfg.geom.satellite_angular_speed_rad_s();
        bisect_decreasing(
            |t| self.delay_ccdf(t),
            S::zero(),
            full_sweep,
            S::one() - p,
            "delay_quantile",
        )
    }

    /// Conditional propagation-delay summary for `T = (D + h_a)/c`, given a
    /// non-empty cap: support minimum, mean, and quantiles.
    pub fn propagation_delay_stats(&self) -> Result<PropagationDelaySummary<S>> {
        let conn = self.connectivity()?;
        if conn <= S::zero() {
            return Err(Error::Empty {
                context: "propagation_delay_stats: zero connectivity",
            });
        }
        let cap = self.cfg.cap();
        let geom = &self.cfg.geom;
        let lo = cap.min_chord_km(geom);
        let hi = cap.max_chord_km();
        let floor = S::one() - conn;
        let lambda = self.lambda();
        let r_prod = geom.satellite_orbit_radius_km() * cap.apex_radius_km();

        // E[D | non-empty] = d_min + (1/conn) ∫ (CCDF(d) − floor) dd, with
        // the distance integral taken in the inclination variable
        // (`dd = r_s r_x sin ζ / d(ζ) dζ`), where it is smooth.
        let slot = ErrorSlot::new();
        let excess = integrate(
            |zeta: S| {
                let i = match self.kernel_at(zeta) {
                    Ok(k) => k.i_lambda,
                    Err(e) => {
                        slot.absorb::<S>(Err(e));
                        return S::zero();
                    }
                };
                ((-lambda * i).exp() - floor) * r_prod * zeta.sin()
                    / self.chord_at_inclination(zeta)
            },
            S::zero(),
            cap.central_half_angle_rad(),
            &self.tight,
        );
        let excess = slot.rethrow(excess)?.value;
        let mean_d = lo + excess / conn;

        let c = S::of(SPEED_OF_LIGHT_KM_S);
        let h_a = geom.platform_altitude_km();
        let mut quantiles = Vec::with_capacity(DELAY_SUMMARY_QUANTILES.len());
        for &p in &DELAY_SUMMARY_QUANTILES {
            let p = S::of(p);
            // Conditional CCDF target (1 − p) maps back to the
            // unconditional CCDF level (1 − p)·conn + floor.
            let target = (S::one() - p) * conn + floor;
            let d_p = bisect_decreasing(
                |d| self.nearest_distance_ccdf(d),
                lo,
                hi,
                target,
                "propagation_delay_stats",
            )?;
            quantiles.push((p, (d_p + h_a) / c));
        }
        Ok(PropagationDelaySummary {
            min_s: (lo + h_a) / c,
            mean_s: (mean_d + h_a) / c,
            quantiles,
        })
    }

    /// Connectivity when the platform's zenith angle `Z` is random: the
    /// expectation over `Z` of the cap-connectivity at half-angle
    /// `φ̂(Z) = arccos(r_e/r_l) + ξ̄`, `r_l = sqrt(r_a² + (r_a−r_e)² tan²Z)`.
    pub fn connectivity_random_zenith(&self, zenith: &ZenithDistribution<S>) -> Result<S> {
        let geom = &self.cfg.geom;
        match zenith {
            ZenithDistribution::Degenerate(z) => {
                self.connectivity_for_cap(zenith_extended_cap_angle(geom, *z)?)
            }
            ZenithDistribution::Uniform { min, max } => {
                if !(*min >= S::zero() && min < max) {
                    return Err(Error::InvalidParameter {
                        name: "zenith_range",
                        value: min.to_f64_lossy(),
                        reason: "requires 0 <= min < max < π/2",
                    });
                }
                // φ̂ is increasing in Z, so validating the upper endpoint
                // covers the whole support.
                zenith_extended_cap_angle(geom, *max)?;
                let slot = ErrorSlot::new();
                let outcome = integrate(
                    |z: S| {
                        let cap = slot.absorb(zenith_extended_cap_angle(geom, z));
                        slot.absorb(self.connectivity_for_cap(cap))
                    },
                    *min,
                    *max,
                    &self.smooth,
                );
                let q = slot.rethrow(outcome)?;
                Ok(q.value / (*max - *min))
            }
            ZenithDistribution::Samples(samples) => {
                if samples.is_empty() {
                    return Err(Error::Empty {
                        context: "connectivity_random_zenith: no samples",
                    });
                }
                let mut acc = S::zero();
                for &z in samples {
                    acc = acc
                        + self.connectivity_for_cap(zenith_extended_cap_angle(geom, z)?)?;
                }
                Ok(acc / S::of(samples.len() as f64))
            }
        }
    }

    /// Connectivity of the direct ground-to-satellite link under a minimum
    /// elevation mask `κ`: cap connectivity at half-angle `ξ̃(κ)`. Defined
    /// for the no-platform configuration only.
    pub fn connectivity_min_elevation(&self, kappa: S) -> Result<S> {
        if self.cfg.platform_enabled {
            return Err(Error::InvalidParameter {
                name: "platform_enabled",
                value: 1.0,
                reason: "minimum-elevation connectivity applies to the direct link only",
            });
        }
        self.connectivity_for_cap(min_elevation_cap_angle(&self.cfg.geom, kappa)?)
    }
}

/// In-cap half-arc `a(w, ζ)` in the substituted angle `v ∈ [0, π/2]`, where
/// the co-inclination is mapped by `sin w = sin ζ sin v`:
/// `a = asin(sin ζ cos v / sqrt(1 − sin²ζ sin²v)) = atan(tan ζ cos v)`.
/// The asin form with a clamp stays exact for hemisphere caps, where the
/// ratio reaches 1.
fn half_arc_substituted<S: FloatScalar>(sin_zeta: S, v: S) -> S {
    let s = sin_zeta * v.sin();
    let denom_sq = (S::one() - s * s).max(S::zero());
    if denom_sq == S::zero() {
        return S::of(FRAC_PI_2);
    }
    (sin_zeta * v.cos() / denom_sq.sqrt()).min(S::one()).asin()
}

/// Evaluates the two per-ζ kernel integrals in the substituted angle (see
/// the module docs): both integrands are analytic on `[0, π/2]`, so the
/// plain adaptive rule converges in a handful of panels.
fn compute_kernel<S: FloatScalar>(
    mu: S,
    zeta: S,
    settings: &QuadratureSettings<S>,
) -> Result<KernelValue<S>> {
    if zeta < S::zero() || zeta > S::of(FRAC_PI_2) {
        return Err(Error::Domain {
            context: "coverage kernel",
            value: zeta.to_f64_lossy(),
            expected: "cap half-angle in [0, π/2]",
        });
    }
    if zeta == S::zero() {
        // Limits as the cap shrinks to a point: no void exponent, and the
        // intersection-density integral tends to π/2.
        return Ok(KernelValue {
            i_lambda: S::zero(),
            j_raw: S::of(FRAC_PI_2),
        });
    }
    let rate = mu / S::of(PI);
    let sin_zeta = zeta.sin();
    let half_pi = S::of(FRAC_PI_2);
    let i_lambda = sin_zeta
        * integrate(
            |v: S| {
                v.cos() * (S::one() - (-rate * half_arc_substituted(sin_zeta, v)).exp())
            },
            S::zero(),
            half_pi,
            settings,
        )?
        .value;
    let j_raw = integrate(
        |v: S| (-rate * half_arc_substituted(sin_zeta, v)).exp(),
        S::zero(),
        half_pi,
        settings,
    )?
    .value;
    Ok(KernelValue { i_lambda, j_raw })
}

/// Finds `x` in `[lo, hi]` with `f(x) = target` for a nonincreasing `f`.
fn bisect_decreasing<S: FloatScalar>(
    f: impl Fn(S) -> Result<S>,
    mut lo: S,
    mut hi: S,
    target: S,
    context: &'static str,
) -> Result<S> {
    let f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if !(f_lo >= target && target >= f_hi) {
        return Err(Error::Bracketing { context });
    }
    for _ in 0..200 {
        let mid = (lo + hi) * S::of(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) * S::of(0.5))
}
