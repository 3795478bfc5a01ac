//! Pure spherical geometry: cap angles, orbit–cap intersections, arc
//! lengths, and distances shared by the analytical and simulation paths.
//!
//! Everything here is a stateless function of the network radii; all angles
//! are radians and all lengths kilometres unless a name says otherwise.

use crate::{Error, FloatScalar, Result};

/// Mean Earth radius in kilometres.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Absolute tolerance for clamping cosine/square-root arguments that land
/// just outside their domain: within this distance the excursion is treated
/// as roundoff and clamped; beyond it the inputs are inconsistent and the
/// call fails. All clamped quantities are O(1), so an absolute tolerance
/// doubles as a relative one.
pub(crate) const DOMAIN_TOL: f64 = 1e-12;

/// Clamps `x` into `[-1, 1]`, failing when it lies beyond the tolerance.
pub(crate) fn clamp_unit<S: FloatScalar>(x: S, context: &'static str) -> Result<S> {
    let tol = S::of(DOMAIN_TOL);
    if x > S::one() + tol || x < -(S::one() + tol) {
        return Err(Error::Domain {
            context,
            value: x.to_f64_lossy(),
            expected: "within [-1, 1] up to roundoff",
        });
    }
    Ok(x.min(S::one()).max(-S::one()))
}

/// Radii and motion rate of the two-shell network.
///
/// The Earth sphere (radius `r_e`) carries the typical ground user, the
/// platform shell (radius `r_a = r_e + h_a`) carries the aerial relays, and
/// the orbit sphere (radius `r_s`) carries the satellites, which move along
/// their orbits at angular speed `ν`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NetworkGeometry<S> {
    earth_radius_km: S,
    platform_orbit_radius_km: S,
    satellite_orbit_radius_km: S,
    satellite_angular_speed_rad_s: S,
}

impl<S: FloatScalar> NetworkGeometry<S> {
    /// Builds a geometry from explicit radii, validating
    /// `0 < r_e ≤ r_a < r_s`, `ν > 0`, and the sub-hemisphere condition
    /// `φ̄ ≤ π/2` on the extended cap.
    ///
    /// `r_a = r_e` is the degenerate "platform at ground level" case, in
    /// which the extended cap collapses onto the visible cap.
    pub fn new(
        earth_radius_km: S,
        platform_orbit_radius_km: S,
        satellite_orbit_radius_km: S,
        satellite_angular_speed_rad_s: S,
    ) -> Result<Self> {
        let all = [
            ("earth_radius_km", earth_radius_km),
            ("platform_orbit_radius_km", platform_orbit_radius_km),
            ("satellite_orbit_radius_km", satellite_orbit_radius_km),
            (
                "satellite_angular_speed_rad_s",
                satellite_angular_speed_rad_s,
            ),
        ];
        for (name, v) in all {
            if !v.is_finite() || v <= S::zero() {
                return Err(Error::InvalidParameter {
                    name,
                    value: v.to_f64_lossy(),
                    reason: "must be finite and positive",
                });
            }
        }
        if platform_orbit_radius_km < earth_radius_km {
            return Err(Error::InvalidParameter {
                name: "platform_orbit_radius_km",
                value: platform_orbit_radius_km.to_f64_lossy(),
                reason: "platform shell must not lie below the Earth surface",
            });
        }
        if satellite_orbit_radius_km <= platform_orbit_radius_km {
            return Err(Error::InvalidParameter {
                name: "satellite_orbit_radius_km",
                value: satellite_orbit_radius_km.to_f64_lossy(),
                reason: "satellite shell must lie strictly above the platform shell",
            });
        }
        let geom = Self {
            earth_radius_km,
            platform_orbit_radius_km,
            satellite_orbit_radius_km,
            satellite_angular_speed_rad_s,
        };
        let phi_bar = geom.extended_cap_angle();
        if phi_bar > S::of(core::f64::consts::FRAC_PI_2) {
            return Err(Error::InvalidParameter {
                name: "extended_cap_angle",
                value: phi_bar.to_f64_lossy(),
                reason: "extended cap exceeds a hemisphere; coverage formulas assume φ̄ ≤ π/2",
            });
        }
        Ok(geom)
    }

    /// Builds a geometry from altitudes above the mean Earth radius.
    pub fn from_altitudes(
        platform_altitude_km: S,
        satellite_altitude_km: S,
        satellite_angular_speed_rad_s: S,
    ) -> Result<Self> {
        let r_e = S::of(EARTH_RADIUS_KM);
        Self::new(
            r_e,
            r_e + platform_altitude_km,
            r_e + satellite_altitude_km,
            satellite_angular_speed_rad_s,
        )
    }

    pub fn earth_radius_km(&self) -> S {
        self.earth_radius_km
    }

    pub fn platform_orbit_radius_km(&self) -> S {
        self.platform_orbit_radius_km
    }

    pub fn satellite_orbit_radius_km(&self) -> S {
        self.satellite_orbit_radius_km
    }

    pub fn satellite_angular_speed_rad_s(&self) -> S {
        self.satellite_angular_speed_rad_s
    }

    pub fn platform_altitude_km(&self) -> S {
        self.platform_orbit_radius_km - self.earth_radius_km
    }

    pub fn satellite_altitude_km(&self) -> S {
        self.satellite_orbit_radius_km - self.earth_radius_km
    }

    /// Half-angle `ξ̄ = arccos(r_e/r_s)` of the cap visible from the ground
    /// user above the local horizon.
    pub fn visible_cap_angle(&self) -> S {
        (self.earth_radius_km / self.satellite_orbit_radius_km)
            .min(S::one())
            .acos()
    }

    /// Half-angle `φ̄ = arccos(r_e/r_a) + arccos(r_e/r_s)` of the extended
    /// cap: the set of satellite positions reachable through some aerial
    /// platform on the horizon circle.
    pub fn extended_cap_angle(&self) -> S {
        let horizon = (self.earth_radius_km / self.platform_orbit_radius_km)
            .min(S::one())
            .acos();
        horizon + self.visible_cap_angle()
    }

    /// Cap half-angle selected by the platform flag: `φ̄` when relaying
    /// through platforms is available, `ξ̄` otherwise.
    pub fn cap_angle(&self, platform_enabled: bool) -> S {
        if platform_enabled {
            self.extended_cap_angle()
        } else {
            self.visible_cap_angle()
        }
    }

    /// The cap specification matching [`Self::cap_angle`]: apex at the
    /// platform shell (extended cap) or at the ground user (visible cap),
    /// with the largest chord that still touches the cap.
    pub fn cap(&self, platform_enabled: bool) -> CapSpec<S> {
        let r_s = self.satellite_orbit_radius_km;
        if platform_enabled {
            let r_a = self.platform_orbit_radius_km;
            let phi_bar = self.extended_cap_angle();
            let chord =
                (r_a * r_a + r_s * r_s - S::of(2.0) * r_a * r_s * phi_bar.cos()).sqrt();
            CapSpec {
                apex_radius_km: r_a,
                max_chord_km: chord,
                central_half_angle_rad: phi_bar,
            }
        } else {
            let r_e = self.earth_radius_km;
            CapSpec {
                apex_radius_km: r_e,
                max_chord_km: (r_s * r_s - r_e * r_e).sqrt(),
                central_half_angle_rad: self.visible_cap_angle(),
            }
        }
    }
}

/// A spherical cap on the orbit sphere, anchored to a point on the positive
/// z-axis at distance `apex_radius_km` from the center: the set of satellite
/// positions within `max_chord_km` of that point, equivalently within
/// `central_half_angle_rad` of the zenith direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CapSpec<S> {
    apex_radius_km: S,
    max_chord_km: S,
    central_half_angle_rad: S,
}

impl<S: FloatScalar> CapSpec<S> {
    /// Builds the cap cut out by chord length `max_chord_km` from the axis
    /// point at `apex_radius_km`, validating the admissible chord range
    /// `r_s − apex ≤ d ≤ r_s + apex`.
    pub fn from_chord(
        geom: &NetworkGeometry<S>,
        apex_radius_km: S,
        max_chord_km: S,
    ) -> Result<Self> {
        let r_s = geom.satellite_orbit_radius_km();
        let slack = S::of(DOMAIN_TOL) * r_s;
        if max_chord_km < r_s - apex_radius_km - slack
            || max_chord_km > r_s + apex_radius_km + slack
        {
            return Err(Error::InvalidParameter {
                name: "max_chord_km",
                value: max_chord_km.to_f64_lossy(),
                reason: "chord must lie in [r_s - apex, r_s + apex]",
            });
        }
        Ok(Self {
            apex_radius_km,
            max_chord_km,
            central_half_angle_rad: critical_inclination(geom, apex_radius_km, max_chord_km)?,
        })
    }

    pub fn apex_radius_km(&self) -> S {
        self.apex_radius_km
    }

    pub fn max_chord_km(&self) -> S {
        self.max_chord_km
    }

    pub fn central_half_angle_rad(&self) -> S {
        self.central_half_angle_rad
    }

    /// Shortest chord from the apex point to the orbit sphere.
    pub fn min_chord_km(&self, geom: &NetworkGeometry<S>) -> S {
        geom.satellite_orbit_radius_km() - self.apex_radius_km
    }
}

/// Smallest orbit inclination that lets an orbit intersect the cap of chord
/// `d` around the axis point at `apex_radius`: `ζ(d)` with
/// `cos ζ = (apex² + r_s² − d²) / (2 r_s · apex)`.
pub fn critical_inclination<S: FloatScalar>(
    geom: &NetworkGeometry<S>,
    apex_radius: S,
    d: S,
) -> Result<S> {
    if apex_radius <= S::zero() {
        return Err(Error::InvalidParameter {
            name: "apex_radius",
            value: apex_radius.to_f64_lossy(),
            reason: "must be positive",
        });
    }
    let r_s = geom.satellite_orbit_radius_km();
    let cos_zeta = (apex_radius * apex_radius + r_s * r_s - d * d)
        / (S::of(2.0) * r_s * apex_radius);
    Ok(clamp_unit(cos_zeta, "critical_inclination")?.acos())
}

/// Square of `sin` of the half-arc angle: `1 − cos²ζ / sin²(inclination)`,
/// evaluated in the cancellation-free product form.
///
/// Writing `w = |π/2 − inclination|` (the orbit's closest approach to the
/// zenith, as a polar angle), the argument equals
/// `2 sin((ζ+w)/2) sin((ζ−w)/2) (cos w + cos ζ) / cos²w`, which keeps full
/// precision as the orbit becomes tangent to the cap (`w → ζ`).
pub(crate) fn arc_sine_sq<S: FloatScalar>(zeta: S, inclination: S) -> S {
    let w = (S::of(core::f64::consts::FRAC_PI_2) - inclination).abs();
    arc_sine_sq_colat(zeta, w)
}

/// Same as [`arc_sine_sq`] with the orbit given by its co-inclination
/// `w = |π/2 − inclination|`.
fn arc_sine_sq_colat<S: FloatScalar>(zeta: S, w: S) -> S {
    let half = S::of(0.5);
    let cos_w = w.cos();
    S::of(2.0) * ((zeta + w) * half).sin() * ((zeta - w) * half).sin() * (cos_w + zeta.cos())
        / (cos_w * cos_w)
}

/// Half of the central angle of the arc an orbit of the given inclination
/// traces inside a cap of half-angle `zeta`:
/// `arcsin(sqrt(1 − cos²ζ · csc²(inclination)))`.
///
/// Returns 0 for a tangent orbit (argument within tolerance of zero) and a
/// domain error when the orbit does not reach the cap at all. The full
/// in-cap arc length is `2 · r_s ·` this value.
pub fn cap_arc_half_angle<S: FloatScalar>(zeta: S, inclination: S) -> Result<S> {
    let arg = arc_sine_sq(zeta, inclination);
    let tol = S::of(DOMAIN_TOL);
    if arg < -tol {
        return Err(Error::Domain {
            context: "cap_arc_half_angle",
            value: arg.to_f64_lossy(),
            expected: "non-negative (orbit must reach the cap)",
        });
    }
    if arg > S::one() + tol {
        return Err(Error::Domain {
            context: "cap_arc_half_angle",
            value: arg.to_f64_lossy(),
            expected: "at most 1",
        });
    }
    Ok(arg.max(S::zero()).min(S::one()).sqrt().asin())
}

/// Distance from the axis point `(0, 0, axis_height)` to the satellite at
/// argument `omega` on an orbit of the given inclination:
/// `sqrt(r_s² − 2 r_s · h · sin ω · sin φ + h²)`.
pub fn distance_from_axis_point<S: FloatScalar>(
    geom: &NetworkGeometry<S>,
    axis_height: S,
    omega: S,
    inclination: S,
) -> Result<S> {
    if axis_height < S::zero() {
        return Err(Error::InvalidParameter {
            name: "axis_height",
            value: axis_height.to_f64_lossy(),
            reason: "must be non-negative",
        });
    }
    let r_s = geom.satellite_orbit_radius_km();
    let cos_gamma = omega.sin() * inclination.sin();
    let sq = r_s * r_s - S::of(2.0) * r_s * axis_height * cos_gamma + axis_height * axis_height;
    Ok(sq.max(S::zero()).sqrt())
}

/// Cartesian position of the satellite at argument `omega` on the orbit
/// with ascending-node longitude `theta` and inclination `phi`.
///
/// This is the rotation form `R_z(θ) · r_s (cos ω, sin ω cos φ, sin ω sin φ)`,
/// which equals the longitude-offset parameterization with the offset
/// resolved by the two-argument arctangent `atan2(sin ω cos φ, cos ω)` — the
/// point traces the whole orbit continuously as `ω` sweeps `[0, 2π)`.
pub fn satellite_cartesian<S: FloatScalar>(
    geom: &NetworkGeometry<S>,
    theta: S,
    inclination: S,
    omega: S,
) -> [S; 3] {
    let r_s = geom.satellite_orbit_radius_km();
    let (sin_t, cos_t) = (theta.sin(), theta.cos());
    let (sin_w, cos_w) = (omega.sin(), omega.cos());
    let (sin_p, cos_p) = (inclination.sin(), inclination.cos());
    [
        r_s * (cos_t * cos_w - sin_t * sin_w * cos_p),
        r_s * (sin_t * cos_w + cos_t * sin_w * cos_p),
        r_s * sin_w * sin_p,
    ]
}

/// True when the satellite at `(omega, inclination)` lies inside the cap of
/// the given half-angle around the zenith: `sin ω · sin φ ≥ cos(cap)`.
///
/// Equivalent to `distance_from_axis_point(r_a, ω, φ) ≤ |AC|` for the
/// matching chord threshold; the z-coordinate form needs no geometry data.
pub fn in_extended_cap<S: FloatScalar>(
    _geom: &NetworkGeometry<S>,
    omega: S,
    inclination: S,
    cap_half_angle: S,
) -> bool {
    omega.sin() * inclination.sin() >= cap_half_angle.cos()
}

/// Elevation angle (above the local horizon) at which the ground user sees a
/// satellite separated by central angle `gamma`.
pub fn elevation_from_central_angle<S: FloatScalar>(geom: &NetworkGeometry<S>, gamma: S) -> S {
    let r_e = geom.earth_radius_km();
    let r_s = geom.satellite_orbit_radius_km();
    let cos_g = gamma.cos();
    let dist = (r_s * r_s + r_e * r_e - S::of(2.0) * r_s * r_e * cos_g).sqrt();
    ((r_s * cos_g - r_e) / dist).min(S::one()).max(-S::one()).asin()
}

/// Half-angle `ξ̃(κ)` of the cap of satellites seen above elevation `κ` by
/// the ground user.
///
/// The slant range to the elevation-κ circle is
/// `y = −r_e sin κ + sqrt(r_s² − r_e² cos²κ)` (the positive root of the
/// law-of-cosines quadratic), and the central angle follows from the chord:
/// `cos ξ̃ = (r_e² + r_s² − y²) / (2 r_e r_s)`.
pub fn min_elevation_cap_angle<S: FloatScalar>(geom: &NetworkGeometry<S>, kappa: S) -> Result<S> {
    if kappa < S::zero() || kappa > S::of(core::f64::consts::FRAC_PI_2) {
        return Err(Error::InvalidParameter {
            name: "kappa",
            value: kappa.to_f64_lossy(),
            reason: "minimum elevation must lie in [0, π/2]",
        });
    }
    let r_e = geom.earth_radius_km();
    let r_s = geom.satellite_orbit_radius_km();
    let cos_k = kappa.cos();
    let y = -r_e * kappa.sin() + (r_s * r_s - r_e * r_e * cos_k * cos_k).sqrt();
    let cos_xi = (r_e * r_e + r_s * r_s - y * y) / (S::of(2.0) * r_e * r_s);
    Ok(clamp_unit(cos_xi, "min_elevation_cap_angle")?.acos())
}

/// Half-angle `φ̂(z)` of the extended cap served by a platform whose zenith
/// angle (from the ground user) is `z`.
///
/// The platform sits at distance `r_l = sqrt(r_a² + (r_a − r_e)² tan²z)`
/// from the Earth center along its own local vertical picture, and the cap
/// it contributes is `arccos(r_e/r_l) + ξ̄`.
pub fn zenith_extended_cap_angle<S: FloatScalar>(geom: &NetworkGeometry<S>, zenith: S) -> Result<S> {
    if zenith < S::zero() || zenith >= S::of(core::f64::consts::FRAC_PI_2) {
        return Err(Error::InvalidParameter {
            name: "zenith",
            value: zenith.to_f64_lossy(),
            reason: "platform zenith angle must lie in [0, π/2)",
        });
    }
    let r_e = geom.earth_radius_km();
    let r_a = geom.platform_orbit_radius_km();
    let t = zenith.tan();
    let h = r_a - r_e;
    let r_l = (r_a * r_a + h * h * t * t).sqrt();
    let cap = (r_e / r_l).min(S::one()).acos() + geom.visible_cap_angle();
    if cap > S::of(core::f64::consts::FRAC_PI_2) {
        return Err(Error::Domain {
            context: "zenith_extended_cap_angle",
            value: cap.to_f64_lossy(),
            expected: "at most π/2 (sub-hemisphere cap)",
        });
    }
    Ok(cap)
}
