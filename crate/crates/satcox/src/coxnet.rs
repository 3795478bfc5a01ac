//! Sampling and time evolution of the orbit-satellite Cox point process,
//! plus exact geometric queries on a realization.
//!
//! Orbits form a Poisson process on the longitude–inclination rectangle
//! `[0, π) × [0, π)` with density `λ sin(φ)/(2π)` — longitude uniform and
//! inclination sine-weighted, which makes the constellation isotropic.
//! Conditioned on its orbit, each satellite set is Poisson(μ) with uniform
//! argument angles, i.e. intensity `μ/(2π r_s)` per unit arc length.
//!
//! Entry-edge closed form used by [`time_to_first_contact`]: a satellite at
//! argument ω on an orbit of inclination φ is inside the cap of half-angle
//! `c` iff `sin ω sin φ ≥ cos c`, so the in-cap argument arc is
//! `[ω_entry, π − ω_entry]` with `ω_entry = arcsin(cos c / sin φ)`; orbits
//! with `sin φ ≤ cos c` never enter. Motion is fixed at `dω/dt = +ν` for
//! every satellite (the sweep argument is direction-symmetric, but a fixed
//! direction is required for reproducibility).

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::geometry::{
    distance_from_axis_point, in_extended_cap, satellite_cartesian, CapSpec, NetworkGeometry,
};
use crate::{Error, Result};

/// Mean orbit count λ and mean satellites per orbit μ.
///
/// Zero is allowed for either (the process degenerates gracefully; several
/// limit identities are stated at λ = 0 or μ = 0).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Densities {
    mean_orbits: f64,
    mean_sats_per_orbit: f64,
}

impl Densities {
    pub fn new(mean_orbits: f64, mean_sats_per_orbit: f64) -> Result<Self> {
        if !mean_orbits.is_finite() || mean_orbits < 0.0 {
            return Err(Error::InvalidParameter {
                name: "mean_orbits",
                value: mean_orbits,
                reason: "must be finite and non-negative",
            });
        }
        if !mean_sats_per_orbit.is_finite() || mean_sats_per_orbit < 0.0 {
            return Err(Error::InvalidParameter {
                name: "mean_sats_per_orbit",
                value: mean_sats_per_orbit,
                reason: "must be finite and non-negative",
            });
        }
        Ok(Self {
            mean_orbits,
            mean_sats_per_orbit,
        })
    }

    pub fn mean_orbits(&self) -> f64 {
        self.mean_orbits
    }

    pub fn mean_sats_per_orbit(&self) -> f64 {
        self.mean_sats_per_orbit
    }
}

/// Longitude and inclination of one orbit plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitAngles {
    /// θ ∈ [0, π).
    pub longitude_rad: f64,
    /// φ ∈ [0, π).
    pub inclination_rad: f64,
}

/// One realization of the constellation.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstellationSample {
    /// Orbit planes.
    pub orbits: Vec<OrbitAngles>,
    /// Per-orbit satellite argument angles, each in [0, 2π).
    pub arguments: Vec<Vec<f64>>,
    /// Time offset of this snapshot in seconds.
    pub epoch_s: f64,
}

impl ConstellationSample {
    /// Total satellite count across all orbits.
    pub fn satellite_count(&self) -> usize {
        self.arguments.iter().map(Vec::len).sum()
    }
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let draw: f64 = Poisson::new(mean)
        .expect("positive Poisson mean")
        .sample(rng);
    draw as usize
}

/// Draws one constellation: Poisson(λ) orbits with θ ~ U[0, π) and
/// φ = arccos(1 − 2U) (density sin(φ)/2), then Poisson(μ) satellites per
/// orbit with ω ~ U[0, 2π).
pub fn sample_constellation<R: Rng + ?Sized>(
    densities: &Densities,
    rng: &mut R,
) -> ConstellationSample {
    let n_orbits = poisson_count(densities.mean_orbits, rng);
    let mut orbits = Vec::with_capacity(n_orbits);
    let mut arguments = Vec::with_capacity(n_orbits);
    for _ in 0..n_orbits {
        let theta = rng.random::<f64>() * PI;
        let phi = (1.0 - 2.0 * rng.random::<f64>()).acos();
        orbits.push(OrbitAngles {
            longitude_rad: theta,
            inclination_rad: phi,
        });
        let n_sats = poisson_count(densities.mean_sats_per_orbit, rng);
        let omegas = (0..n_sats)
            .map(|_| rng.random::<f64>() * TAU)
            .collect::<Vec<_>>();
        arguments.push(omegas);
    }
    ConstellationSample {
        orbits,
        arguments,
        epoch_s: 0.0,
    }
}

/// Advances every satellite by `ν·dt` along its orbit; orbit planes are
/// unchanged.
pub fn propagate(
    sample: &ConstellationSample,
    dt: f64,
    geom: &NetworkGeometry<f64>,
) -> ConstellationSample {
    let step = geom.satellite_angular_speed_rad_s() * dt;
    ConstellationSample {
        orbits: sample.orbits.clone(),
        arguments: sample
            .arguments
            .iter()
            .map(|omegas| {
                omegas
                    .iter()
                    .map(|&w| (w + step).rem_euclid(TAU))
                    .collect()
            })
            .collect(),
        epoch_s: sample.epoch_s + dt,
    }
}

/// Rotates the whole constellation by `beta` about the z-axis, re-normalizing
/// the orbit angles into their canonical ranges.
///
/// A longitude passing π flips to the representative with inclination
/// `π − φ` and argument `π − ω` (the same great circle traversed from the
/// opposite node). In-cap statistics are invariant under this map because
/// the z-coordinate `sin ω sin φ` is unchanged.
pub fn rotate_about_z(sample: &ConstellationSample, beta: f64) -> ConstellationSample {
    let mut orbits = Vec::with_capacity(sample.orbits.len());
    let mut arguments = Vec::with_capacity(sample.arguments.len());
    for (orbit, omegas) in sample.orbits.iter().zip(&sample.arguments) {
        let turned = (orbit.longitude_rad + beta).rem_euclid(TAU);
        if turned < PI {
            orbits.push(OrbitAngles {
                longitude_rad: turned,
                inclination_rad: orbit.inclination_rad,
            });
            arguments.push(omegas.clone());
        } else {
            orbits.push(OrbitAngles {
                longitude_rad: turned - PI,
                inclination_rad: PI - orbit.inclination_rad,
            });
            arguments.push(omegas.iter().map(|&w| (PI - w).rem_euclid(TAU)).collect());
        }
    }
    ConstellationSample {
        orbits,
        arguments,
        epoch_s: sample.epoch_s,
    }
}

/// All satellites inside the cap of the given half-angle, as
/// `(orbit index, ω)` pairs.
pub fn satellites_in_cap(
    sample: &ConstellationSample,
    geom: &NetworkGeometry<f64>,
    cap_half_angle: f64,
) -> Vec<(usize, f64)> {
    let mut found = Vec::new();
    for (i, (orbit, omegas)) in sample.orbits.iter().zip(&sample.arguments).enumerate() {
        for &omega in omegas {
            if in_extended_cap(geom, omega, orbit.inclination_rad, cap_half_angle) {
                found.push((i, omega));
            }
        }
    }
    found
}

/// Distance from the cap's apex point to the nearest satellite inside the
/// cap, or `None` when the cap is empty (the association rule never reaches
/// outside the cap).
pub fn nearest_satellite_distance(
    sample: &ConstellationSample,
    geom: &NetworkGeometry<f64>,
    cap: &CapSpec<f64>,
) -> Option<f64> {
    let apex = cap.apex_radius_km();
    let half_angle = cap.central_half_angle_rad();
    let mut best: Option<f64> = None;
    for (orbit, omegas) in sample.orbits.iter().zip(&sample.arguments) {
        let phi = orbit.inclination_rad;
        for &omega in omegas {
            if !in_extended_cap(geom, omega, phi, half_angle) {
                continue;
            }
            let d = distance_from_axis_point(geom, apex, omega, phi)
                .expect("non-negative apex radius");
            best = Some(best.map_or(d, |b: f64| b.min(d)));
        }
    }
    best
}

/// Seconds until the first satellite enters the cap (0 when one is already
/// inside, +∞ when no orbit crosses the cap at all).
pub fn time_to_first_contact(
    sample: &ConstellationSample,
    geom: &NetworkGeometry<f64>,
    cap_half_angle: f64,
) -> f64 {
    let cos_cap = cap_half_angle.cos();
    let nu = geom.satellite_angular_speed_rad_s();
    let mut best = f64::INFINITY;
    for (orbit, omegas) in sample.orbits.iter().zip(&sample.arguments) {
        let sin_phi = orbit.inclination_rad.sin();
        if sin_phi <= cos_cap {
            continue;
        }
        let omega_entry = (cos_cap / sin_phi).asin();
        for &omega in omegas {
            if omega.sin() * sin_phi >= cos_cap {
                return 0.0;
            }
            let wait = (omega_entry - omega).rem_euclid(TAU) / nu;
            best = best.min(wait);
        }
    }
    best
}

/// One row of the exportable constellation snapshot.
#[derive(Clone, Copy, Debug)]
pub struct SnapshotRow {
    pub orbit_id: usize,
    pub theta_rad: f64,
    pub phi_rad: f64,
    pub omega_rad: f64,
    pub x_km: f64,
    pub y_km: f64,
    pub z_km: f64,
}

/// Flattens a sample into snapshot rows with Cartesian positions.
pub fn snapshot_rows(
    sample: &ConstellationSample,
    geom: &NetworkGeometry<f64>,
) -> Vec<SnapshotRow> {
    let mut rows = Vec::with_capacity(sample.satellite_count());
    for (i, (orbit, omegas)) in sample.orbits.iter().zip(&sample.arguments).enumerate() {
        for &omega in omegas {
            let [x, y, z] =
                satellite_cartesian(geom, orbit.longitude_rad, orbit.inclination_rad, omega);
            rows.push(SnapshotRow {
                orbit_id: i,
                theta_rad: orbit.longitude_rad,
                phi_rad: orbit.inclination_rad,
                omega_rad: omega,
                x_km: x,
                y_km: y,
                z_km: z,
            });
        }
    }
    rows
}
