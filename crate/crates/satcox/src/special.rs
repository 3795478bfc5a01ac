//! Log-gamma and regularized incomplete gamma functions.
//!
//! These are the only special functions the fading models need. They are
//! implemented generically over [`FloatScalar`] with classic, well-conditioned
//! algorithms: a Lanczos approximation for `ln Γ`, the power series for the
//! lower regularized incomplete gamma `P(a, x)` when `x < a + 1`, and the
//! Lentz continued fraction for the upper `Q(a, x)` otherwise. Accuracy is
//! near machine precision in `f64` over the parameter range exercised here
//! (`a` up to a few hundred).

use crate::{Error, FloatScalar, Result};

/// Lanczos coefficients (g = 7, n = 9), giving ~15 significant digits in f64.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Hard iteration cap for the series and continued fraction; both converge in
/// well under 100 iterations for all arguments used by the fading models.
const MAX_ITER: usize = 500;

/// Natural log of the absolute gamma function, `ln|Γ(x)|`.
///
/// Uses the Lanczos approximation directly for `x ≥ 0.5` and the reflection
/// formula below that (+∞ at the non-positive-integer poles).
pub fn ln_gamma<S: FloatScalar>(x: S) -> S {
    let half = S::of(0.5);
    if x < half {
        // Reflection: ln|Γ(x)| = ln(π / |sin(πx)|) − ln|Γ(1 − x)|. Γ itself
        // alternates sign left of zero, so this returns ln|Γ| there (the
        // usual lgamma convention), and +∞ at the poles.
        let pi = S::of(core::f64::consts::PI);
        return (pi / (pi * x).sin().abs()).ln() - ln_gamma(S::one() - x);
    }
    let xm1 = x - S::one();
    let mut acc = S::of(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + S::of(c) / (xm1 + S::of(i as f64));
    }
    let t = xm1 + S::of(LANCZOS_G) + half;
    let ln_sqrt_two_pi = S::of(0.918_938_533_204_672_67);
    ln_sqrt_two_pi + (xm1 + half) * t.ln() - t + acc.ln()
}

/// Regularized lower incomplete gamma `P(a, x) = γ(a, x) / Γ(a)` for
/// `a > 0`, `x ≥ 0`.
pub fn reg_gamma_lower<S: FloatScalar>(a: S, x: S) -> Result<S> {
    check_gamma_args(a, x)?;
    if x == S::zero() {
        return Ok(S::zero());
    }
    if x < a + S::one() {
        lower_series(a, x)
    } else {
        Ok(S::one() - upper_continued_fraction(a, x)?)
    }
}

/// Regularized upper incomplete gamma `Q(a, x) = 1 − P(a, x)`.
///
/// Computed directly by the continued fraction when `x ≥ a + 1`, so the tail
/// keeps full relative precision even when it is tiny.
pub fn reg_gamma_upper<S: FloatScalar>(a: S, x: S) -> Result<S> {
    check_gamma_args(a, x)?;
    if x == S::zero() {
        return Ok(S::one());
    }
    if x < a + S::one() {
        Ok(S::one() - lower_series(a, x)?)
    } else {
        upper_continued_fraction(a, x)
    }
}

fn check_gamma_args<S: FloatScalar>(a: S, x: S) -> Result<()> {
    if !(a > S::zero()) || !a.is_finite() {
        return Err(Error::Domain {
            context: "regularized incomplete gamma",
            value: a.to_f64_lossy(),
            expected: "shape a > 0",
        });
    }
    if x < S::zero() || !x.is_finite() {
        return Err(Error::Domain {
            context: "regularized incomplete gamma",
            value: x.to_f64_lossy(),
            expected: "argument x >= 0",
        });
    }
    Ok(())
}

/// Shared prefactor `exp(a ln x − x − ln Γ(a))`.
fn gamma_prefactor<S: FloatScalar>(a: S, x: S) -> S {
    (a * x.ln() - x - ln_gamma(a)).exp()
}

/// Power series for P(a, x), effective for `x < a + 1`.
fn lower_series<S: FloatScalar>(a: S, x: S) -> Result<S> {
    let mut ap = a;
    let mut term = S::one() / a;
    let mut sum = term;
    for _ in 0..MAX_ITER {
        ap = ap + S::one();
        term = term * x / ap;
        sum = sum + term;
        if term.abs() < sum.abs() * S::epsilon() {
            return Ok(sum * gamma_prefactor(a, x));
        }
    }
    Err(Error::SeriesDivergence {
        context: "incomplete gamma lower series",
        terms: MAX_ITER,
    })
}

/// Modified Lentz continued fraction for Q(a, x), effective for `x ≥ a + 1`.
fn upper_continued_fraction<S: FloatScalar>(a: S, x: S) -> Result<S> {
    let tiny = S::of(1e-300);
    let eps = S::epsilon();
    let mut b = x + S::one() - a;
    let mut c = S::one() / tiny;
    let mut d = S::one() / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -S::of(i as f64) * (S::of(i as f64) - a);
        b = b + S::of(2.0);
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = S::one() / d;
        let delta = d * c;
        h = h * delta;
        if (delta - S::one()).abs() < eps {
            return Ok(gamma_prefactor(a, x) * h);
        }
    }
    Err(Error::SeriesDivergence {
        context: "incomplete gamma continued fraction",
        terms: MAX_ITER,
    })
}
