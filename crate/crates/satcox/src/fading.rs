//! Small-scale fading models: CCDF/CDF evaluation and random sampling.
//!
//! Every SNR formula in the analysis layer consumes the channel only through
//! `F̄_H`, so the model is a plug-in tagged union. The Nakagami branch keeps
//! the source parameterization (gamma power with CCDF `Q(m, Ωx/m)`, hence
//! mean `m²/Ω`), which differs from the conventional gamma-power convention
//! (mean Ω); [`FadingModel::nakagami_with_mean_power`] bridges the two.

use rand::Rng;
use rand_distr::{Distribution, Gamma, Normal};

use crate::special::{reg_gamma_lower, reg_gamma_upper};
use crate::{Error, FloatScalar, Result};

/// A fading power distribution for the serving link.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FadingModel<S> {
    /// Gamma-distributed power with CCDF `1 − γ(m, Ωx/m)/Γ(m)`.
    NakagamiPower { m: S, omega: S },
    /// Shadowed-Rician power: Rician multipath (half-power `b` per
    /// quadrature branch) around a line-of-sight amplitude whose power is
    /// gamma-shadowed with shape `m̃` and mean `Ω̃`.
    ShadowedRice { b: S, m_tilde: S, omega_tilde: S },
    /// Deterministic unit power, `H ≡ 1`.
    NoFading,
}

impl<S: FloatScalar> FadingModel<S> {
    /// Nakagami power fading in the source parameterization (mean `m²/Ω`).
    pub fn nakagami(m: S, omega: S) -> Result<Self> {
        if !m.is_finite() || m <= S::zero() {
            return Err(Error::InvalidParameter {
                name: "m",
                value: m.to_f64_lossy(),
                reason: "Nakagami shape must be finite and positive",
            });
        }
        if !omega.is_finite() || omega <= S::zero() {
            return Err(Error::InvalidParameter {
                name: "omega",
                value: omega.to_f64_lossy(),
                reason: "Nakagami scale must be finite and positive",
            });
        }
        Ok(Self::NakagamiPower { m, omega })
    }

    /// Nakagami power fading in the conventional parameterization: shape `m`
    /// and mean power `P` (internally `Ω = m²/P`).
    pub fn nakagami_with_mean_power(m: S, mean_power: S) -> Result<Self> {
        if !mean_power.is_finite() || mean_power <= S::zero() {
            return Err(Error::InvalidParameter {
                name: "mean_power",
                value: mean_power.to_f64_lossy(),
                reason: "mean power must be finite and positive",
            });
        }
        Self::nakagami(m, m * m / mean_power)
    }

    /// Shadowed-Rician power fading.
    pub fn shadowed_rice(b: S, m_tilde: S, omega_tilde: S) -> Result<Self> {
        if !b.is_finite() || b <= S::zero() {
            return Err(Error::InvalidParameter {
                name: "b",
                value: b.to_f64_lossy(),
                reason: "half multipath power must be finite and positive",
            });
        }
        if !m_tilde.is_finite() || m_tilde <= S::zero() {
            return Err(Error::InvalidParameter {
                name: "m_tilde",
                value: m_tilde.to_f64_lossy(),
                reason: "shadowing shape must be finite and positive",
            });
        }
        if !omega_tilde.is_finite() || omega_tilde < S::zero() {
            return Err(Error::InvalidParameter {
                name: "omega_tilde",
                value: omega_tilde.to_f64_lossy(),
                reason: "LOS average power must be finite and non-negative",
            });
        }
        Ok(Self::ShadowedRice {
            b,
            m_tilde,
            omega_tilde,
        })
    }

    /// The degenerate `H ≡ 1` channel.
    pub fn no_fading() -> Self {
        Self::NoFading
    }

    /// Complementary CDF `P(H > x)`.
    pub fn ccdf(&self, x: S) -> Result<S> {
        let x = x.max(S::zero());
        match *self {
            Self::NakagamiPower { m, omega } => {
                reg_gamma_upper(m.to_f64_lossy(), (omega * x / m).to_f64_lossy()).map(S::of)
            }
            Self::ShadowedRice {
                b,
                m_tilde,
                omega_tilde,
            } => Ok(S::one() - shadowed_rice_cdf(b, m_tilde, omega_tilde, x)?),
            Self::NoFading => Ok(if x <= S::one() { S::one() } else { S::zero() }),
        }
    }

    /// CDF `P(H ≤ x)`.
    pub fn cdf(&self, x: S) -> Result<S> {
        let x = x.max(S::zero());
        match *self {
            Self::NakagamiPower { m, omega } => {
                reg_gamma_lower(m.to_f64_lossy(), (omega * x / m).to_f64_lossy()).map(S::of)
            }
            Self::ShadowedRice {
                b,
                m_tilde,
                omega_tilde,
            } => shadowed_rice_cdf(b, m_tilde, omega_tilde, x),
            Self::NoFading => Ok(if x < S::one() { S::zero() } else { S::one() }),
        }
    }

    /// Mean of `H`.
    pub fn mean_power(&self) -> S {
        match *self {
            Self::NakagamiPower { m, omega } => m * m / omega,
            Self::ShadowedRice {
                b, omega_tilde, ..
            } => S::of(2.0) * b + omega_tilde,
            Self::NoFading => S::one(),
        }
    }

    /// Draws one fading power from the model.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::NakagamiPower { m, omega } => {
                let shape = m.to_f64_lossy();
                let scale = shape / omega.to_f64_lossy();
                Gamma::new(shape, scale)
                    .expect("validated Nakagami parameters")
                    .sample(rng)
            }
            Self::ShadowedRice {
                b,
                m_tilde,
                omega_tilde,
            } => {
                let b = b.to_f64_lossy();
                let m_tilde = m_tilde.to_f64_lossy();
                let omega_tilde = omega_tilde.to_f64_lossy();
                // LOS power is gamma-shadowed; the multipath adds a complex
                // Gaussian of power 2b around the LOS amplitude.
                let los_amplitude = if omega_tilde > 0.0 {
                    Gamma::new(m_tilde, omega_tilde / m_tilde)
                        .expect("validated shadowed-Rice parameters")
                        .sample(rng)
                        .sqrt()
                } else {
                    0.0
                };
                let normal = Normal::new(0.0, 1.0).expect("unit normal");
                let in_phase = los_amplitude + b.sqrt() * normal.sample(rng);
                let quadrature = b.sqrt() * normal.sample(rng);
                in_phase * in_phase + quadrature * quadrature
            }
            Self::NoFading => 1.0,
        }
    }
}

/// Relative truncation tolerance for the shadowed-Rice Pochhammer series.
const SR_SERIES_TOL: f64 = 1e-12;
/// Hard cap on series terms.
const SR_SERIES_MAX_TERMS: usize = 10_000;

/// CDF of the shadowed-Rician power at `x`:
/// `K Σ_n (m̃)_n δ̃ⁿ (2b)^{1+n} / (n!)² · γ(1+n, x/(2b))`
/// with `K = (2bm̃/(2bm̃+Ω̃))^m̃ / (2b)` and `δ̃ = Ω̃ / (2b(2bm̃+Ω̃))`.
///
/// Folding `γ(1+n, y) = n!·P(1+n, y)` gives the evaluated form
/// `(2bm̃/(2bm̃+Ω̃))^m̃ Σ_n c_n P(1+n, y)` with the stable recurrence
/// `c_n = c_{n−1} (m̃+n−1) q / n`, `q = 2bδ̃ = Ω̃/(2bm̃+Ω̃) < 1`, so the
/// coefficient series converges geometrically. Truncation: the next term's
/// bound (coefficient times the current `P`, which decreases in the shape)
/// below `1e−12` of the running sum, with a 10⁴-term cap.
pub fn shadowed_rice_cdf<S: FloatScalar>(b: S, m_tilde: S, omega_tilde: S, x: S) -> Result<S> {
    if b <= S::zero() || m_tilde <= S::zero() || omega_tilde < S::zero() {
        return Err(Error::InvalidParameter {
            name: "shadowed_rice",
            value: b.to_f64_lossy(),
            reason: "requires b > 0, m_tilde > 0, omega_tilde >= 0",
        });
    }
    if x <= S::zero() {
        return Ok(S::zero());
    }
    let b = b.to_f64_lossy();
    let m_tilde = m_tilde.to_f64_lossy();
    let omega_tilde = omega_tilde.to_f64_lossy();
    let y = x.to_f64_lossy() / (2.0 * b);

    let q = omega_tilde / (2.0 * b * m_tilde + omega_tilde);
    let prefactor = (1.0 - q).powf(m_tilde);
    let mut coeff = 1.0f64;
    let mut sum = 0.0f64;
    let mut p_shape = reg_gamma_lower(1.0, y)?;
    for n in 0..SR_SERIES_MAX_TERMS {
        sum += coeff * p_shape;
        let next_coeff = coeff * (m_tilde + n as f64) * q / (n as f64 + 1.0);
        if next_coeff * p_shape <= SR_SERIES_TOL * sum && n as f64 >= m_tilde {
            return Ok(S::of((prefactor * sum).min(1.0)));
        }
        coeff = next_coeff;
        p_shape = reg_gamma_lower(n as f64 + 2.0, y)?;
    }
    Err(Error::SeriesDivergence {
        context: "shadowed_rice_cdf",
        terms: SR_SERIES_MAX_TERMS,
    })
}
