//! Orbit-structured Cox satellite point process toolkit.
//!
//! An isotropic low-Earth-orbit constellation is modeled as a Cox point
//! process: orbits (great circles of radius `r_s`) are drawn from a Poisson
//! process on the longitude–inclination rectangle with a `sin`-weighted
//! inclination density, and satellites form independent Poisson processes
//! along each orbit. A terrestrial gateway reaches satellites either directly
//! (through the visible spherical cap) or through an aerial relay platform at
//! altitude `h_a`, which enlarges the cap it can see.
//!
//! The crate provides three pillars that cross-validate one another:
//!
//! * [`coxnet`] — exact sampling and time evolution of the constellation,
//!   with realization-level queries (in-cap satellites, nearest satellite,
//!   time to first contact).
//! * [`analysis`] — closed-form/quadrature evaluators for the performance
//!   metrics: effective orbit/satellite counts, connectivity, nearest-distance
//!   CCDF, SNR coverage, end-to-end throughput, association delay, and the
//!   elevation-angle extensions (random platform zenith angle, minimum ground
//!   elevation mask).
//! * [`montecarlo`] — deterministic parallel simulation estimators mirroring
//!   every analytical metric, with standard errors, plus a validation harness
//!   that flags any analytical/simulation disagreement beyond 3 standard
//!   errors.
//!
//! Supporting modules: [`geometry`] (spherical caps, orbit–cap intersections,
//! the satellite Cartesian parameterization), [`fading`] (Nakagami and
//! shadowed-Rice power fading), [`quadrature`] (adaptive Gauss–Kronrod and
//! double-exponential integration with a quantized-key memoizer), and
//! [`special`] (log-gamma and regularized incomplete gamma functions).
//!
//! All numeric routines are generic over the [`FloatScalar`] abstraction so
//! metrics can be evaluated in `f32` or `f64`; sampling and simulation are
//! `f64`. Concrete `f64` aliases for the main domain types are exported at
//! the crate root.

pub mod analysis;
pub mod coxnet;
pub mod error;
pub mod fading;
pub mod geometry;
pub mod montecarlo;
pub mod quadrature;
pub mod special;

pub use error::{Error, Result};

use core::fmt::{Debug, Display};
use num_traits::{Float, FromPrimitive};

/// Floating-point scalar abstraction.
///
/// Every analytical routine in this crate is generic over this trait, so the
/// whole metric surface can run in `f32` or `f64`. The two methods exist to
/// move literals and reporting values across the generic boundary; both are
/// infallible for the `f32`/`f64` implementations.
pub trait FloatScalar:
    Float + FromPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` constant into `Self` (lossy for `f32`).
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal converts to scalar")
    }

    /// Widens `self` to `f64` for hashing, reporting, and error messages.
    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl FloatScalar for f32 {}
impl FloatScalar for f64 {}

/// `f64` alias for [`geometry::NetworkGeometry`].
pub type NetworkGeometry64 = geometry::NetworkGeometry<f64>;
/// `f64` alias for [`geometry::CapSpec`].
pub type CapSpec64 = geometry::CapSpec<f64>;
/// `f64` alias for [`fading::FadingModel`].
pub type FadingModel64 = fading::FadingModel<f64>;
/// `f64` alias for [`quadrature::QuadratureSettings`].
pub type QuadratureSettings64 = quadrature::QuadratureSettings<f64>;
/// `f64` alias for [`analysis::LinkBudget`].
pub type LinkBudget64 = analysis::LinkBudget<f64>;
/// `f64` alias for [`analysis::ScenarioConfig`].
pub type ScenarioConfig64 = analysis::ScenarioConfig<f64>;
/// `f64` alias for [`analysis::Evaluator`].
pub type Evaluator64 = analysis::Evaluator<f64>;
