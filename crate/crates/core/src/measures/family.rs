//! Closed-form positive distributions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{ln_beta, ln_gamma, lit, Real};

/// A named closed-form family with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family<T> {
    /// Point mass at `c`.
    Dirac { c: T },
    /// `c_b / (1 - 2x cos b + x²)` on `(0, ∞)`, `c_b = sin b / (π - b)`.
    Lambda { b: T },
    /// Law of `|X|`, `X ~ N(0, t)`.
    HalfNormal { t: T },
    /// Shape `p`, scale `theta`.
    Gamma { p: T, theta: T },
    Beta { p: T, q: T },
    /// `(1/2π) √((4 - x)/x)` on `(0, 4]`.
    MarchenkoPastur,
    /// Image of the Marchenko–Pastur law under `x ↦ 1/x`.
    MarchenkoPasturInverse,
    /// Positive Boolean stable law of index `alpha ∈ (0, 1)`.
    BooleanStable { alpha: T },
    UniformInterval { alpha: T, beta: T },
    /// `exp(N(m, s²))`.
    LogNormal { m: T, s: T },
}

fn check(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvariantViolation(what.to_string()))
    }
}

fn finite_pos<T: Real>(v: T) -> bool {
    v.is_finite() && v > T::zero()
}

impl<T: Real> Family<T> {
    /// Enforces the parameter domain of each family.
    pub fn validate(&self) -> Result<()> {
        match *self {
            Family::Dirac { c } => check(finite_pos(c), "dirac: c must be > 0"),
            Family::Lambda { b } => check(b > T::zero() && b < T::PI(), "lambda: b must lie in (0, pi)"),
            Family::HalfNormal { t } => check(finite_pos(t), "half_normal: t must be > 0"),
            Family::Gamma { p, theta } => check(finite_pos(p) && finite_pos(theta), "gamma: p, theta must be > 0"),
            Family::Beta { p, q } => check(finite_pos(p) && finite_pos(q), "beta: p, q must be > 0"),
            Family::MarchenkoPastur | Family::MarchenkoPasturInverse => Ok(()),
            Family::BooleanStable { alpha } => {
                check(alpha > T::zero() && alpha < T::one(), "boolean_stable: alpha must lie in (0, 1)")
            }
            Family::UniformInterval { alpha, beta } => check(
                finite_pos(alpha) && beta.is_finite() && alpha < beta,
                "uniform: need 0 < alpha < beta",
            ),
            Family::LogNormal { m, s } => check(m.is_finite() && finite_pos(s), "lognormal: need finite m and s > 0"),
        }
    }

    /// Lebesgue density at `x > 0`; zero outside the support.
    pub fn density(&self, x: T) -> Result<T> {
        let zero = T::zero();
        let one = T::one();
        let pi = T::PI();
        if !(x > zero) || !x.is_finite() {
            return Ok(zero);
        }
        Ok(match *self {
            Family::Dirac { .. } => return Err(Error::AtomicHasNoDensity),
            Family::Lambda { b } => lambda_density(b, x),
            Family::HalfNormal { t } => {
                lit::<T>(2.0) / (lit::<T>(2.0) * pi * t).sqrt() * (-x * x / (lit::<T>(2.0) * t)).exp()
            }
            Family::Gamma { p, theta } => {
                ((p - one) * x.ln() - x / theta - p * theta.ln() - ln_gamma(p)).exp()
            }
            Family::Beta { p, q } => {
                if x >= one {
                    if x == one && q < one {
                        T::infinity()
                    } else if x == one && q == one {
                        (-ln_beta(p, q)).exp()
                    } else {
                        zero
                    }
                } else {
                    ((p - one) * x.ln() + (q - one) * (-x).ln_1p() - ln_beta(p, q)).exp()
                }
            }
            Family::MarchenkoPastur => {
                let four: T = lit(4.0);
                if x > four {
                    zero
                } else {
                    ((four - x) / x).sqrt() / (lit::<T>(2.0) * pi)
                }
            }
            Family::MarchenkoPasturInverse => {
                let quarter: T = lit(0.25);
                if x < quarter {
                    zero
                } else {
                    (lit::<T>(4.0) * x - one).sqrt() / (lit::<T>(2.0) * pi * x * x)
                }
            }
            Family::BooleanStable { alpha } => {
                let xa = x.powf(alpha);
                (pi * alpha).sin() / pi * x.powf(alpha - one)
                    / (xa * xa + lit::<T>(2.0) * xa * (pi * alpha).cos() + one)
            }
            Family::UniformInterval { alpha, beta } => {
                if x < alpha || x > beta {
                    zero
                } else {
                    one / (beta - alpha)
                }
            }
            Family::LogNormal { m, s } => {
                let z = (x.ln() - m) / s;
                (-lit::<T>(0.5) * z * z).exp() / (x * s * (lit::<T>(2.0) * pi).sqrt())
            }
        })
    }

    /// Closed support `[lo, hi]` (`hi` may be `+∞`, `lo` may be 0).
    pub fn support(&self) -> (T, T) {
        let inf = T::infinity();
        let zero = T::zero();
        match *self {
            Family::Dirac { c } => (c, c),
            Family::Beta { .. } => (zero, T::one()),
            Family::MarchenkoPastur => (zero, lit(4.0)),
            Family::MarchenkoPasturInverse => (lit(0.25), inf),
            Family::UniformInterval { alpha, beta } => (alpha, beta),
            _ => (zero, inf),
        }
    }

    /// Range `[y_lo, y_hi]` in `y = ln x` outside of which each tail holds
    /// less than `tail` mass.
    pub fn log_range(&self, tail: T) -> (T, T) {
        let one = T::one();
        let two: T = lit(2.0);
        let pi = T::PI();
        let ln_inv = -tail.ln();
        match *self {
            Family::Dirac { c } => (c.ln(), c.ln()),
            Family::Lambda { b } => {
                let cb = b.sin() / (pi - b);
                // tail ≈ c_b / X
                let y = (cb / tail).ln() + one;
                (-y, y)
            }
            Family::HalfNormal { t } => {
                let st = t.sqrt();
                let lo = tail * (two * pi * t).sqrt() / two;
                let hi = st * ((two * ln_inv).sqrt() + one);
                (lo.ln(), hi.ln())
            }
            Family::Gamma { p, theta } => {
                let lo = theta * (tail * p * ln_gamma(p).exp()).powf(one / p);
                let hi = theta * (p + lit::<T>(10.0) + two * ln_inv + p * (p + one).ln());
                (lo.ln(), hi.ln())
            }
            Family::Beta { p, q } => {
                let lo = (tail * p * ln_beta(p, q).exp()).powf(one / p);
                (lo.min(lit(0.5)).ln(), T::zero())
            }
            Family::MarchenkoPastur => {
                let lo = (pi * tail / two).powi(2);
                (lo.ln(), lit::<T>(4.0).ln())
            }
            Family::MarchenkoPasturInverse => {
                let hi = (pi * tail / two).powi(2);
                (-lit::<T>(4.0).ln(), -hi.ln())
            }
            Family::BooleanStable { alpha } => {
                let x = ((pi * alpha).sin() / (pi * alpha * tail)).ln() / alpha + one;
                (-x, x)
            }
            Family::UniformInterval { alpha, beta } => (alpha.ln(), beta.ln()),
            Family::LogNormal { m, s } => {
                let z = (two * ln_inv).sqrt() + one;
                (m - z * s, m + z * s)
            }
        }
    }

    /// Whether the first moment is finite.
    pub fn has_finite_mean(&self) -> bool {
        !matches!(self, Family::Lambda { .. } | Family::BooleanStable { .. } | Family::MarchenkoPasturInverse)
    }

    /// Closed-form image under `x ↦ 1/x`, where one exists inside the family list.
    pub fn inverse(&self) -> Option<Self> {
        match *self {
            Family::Dirac { c } => Some(Family::Dirac { c: c.recip() }),
            Family::Lambda { b } => Some(Family::Lambda { b }),
            Family::MarchenkoPastur => Some(Family::MarchenkoPasturInverse),
            Family::MarchenkoPasturInverse => Some(Family::MarchenkoPastur),
            Family::BooleanStable { alpha } => Some(Family::BooleanStable { alpha }),
            Family::LogNormal { m, s } => Some(Family::LogNormal { m: -m, s }),
            _ => None,
        }
    }

    /// Mode of `x·density(x)` as stated for the classical log-unimodal families.
    pub fn known_log_mode(&self) -> Option<T> {
        let one = T::one();
        match *self {
            Family::Dirac { c } => Some(c),
            Family::Lambda { .. } | Family::BooleanStable { .. } => Some(one),
            Family::HalfNormal { t } => Some(t.sqrt()),
            Family::Gamma { p, theta } => Some(p * theta),
            Family::Beta { p, q } => Some(if q > one { p / (p + q - one) } else { one }),
            Family::MarchenkoPastur => Some(lit(2.0)),
            Family::MarchenkoPasturInverse => Some(lit(0.5)),
            Family::UniformInterval { beta, .. } => Some(beta),
            Family::LogNormal { m, .. } => Some(m.exp()),
        }
    }
}

/// Normalising constant of the λ_b family.
pub fn lambda_constant<T: Real>(b: T) -> T {
    b.sin() / (T::PI() - b)
}

/// Density of λ_b at `x > 0`.
pub fn lambda_density<T: Real>(b: T, x: T) -> T {
    lambda_constant(b) / (T::one() - lit::<T>(2.0) * x * b.cos() + x * x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn lambda_at_one_half_pi() {
        let d = Family::Lambda { b: PI / 2.0 }.density(1.0).unwrap();
        // c_{π/2} = 1/(π/2) and the denominator at x = 1 is 2.
        assert!((d - (2.0 / PI) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn exponential_near_zero() {
        let d = Family::<f64>::Gamma { p: 1.0, theta: 1.0 }.density(1e-300).unwrap();
        assert!((d - 1.0).abs() < 1e-14);
    }

    #[test]
    fn marchenko_pastur_at_two() {
        let d = Family::MarchenkoPastur.density(2.0).unwrap();
        assert!((d - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert_eq!(Family::MarchenkoPastur.density(4.5).unwrap(), 0.0);
    }

    #[test]
    fn parameter_domains() {
        assert!(Family::Lambda { b: 4.0 }.validate().is_err());
        assert!(Family::Lambda { b: 3.0 }.validate().is_ok());
        assert!(Family::UniformInterval { alpha: 2.0, beta: 1.0 }.validate().is_err());
        assert!(Family::BooleanStable { alpha: 1.0 }.validate().is_err());
        assert!(Family::Dirac { c: 0.0 }.validate().is_err());
        assert!(Family::Gamma { p: 2.0, theta: -1.0 }.validate().is_err());
    }

    #[test]
    fn dirac_has_no_density() {
        assert_eq!(Family::Dirac { c: 1.0 }.density(1.0), Err(Error::AtomicHasNoDensity));
    }

    #[test]
    fn f32_density() {
        let d = Family::<f32>::Gamma { p: 2.0, theta: 1.0 }.density(1.0).unwrap();
        assert!((d - (-1.0f32).exp()).abs() < 1e-6);
    }
}
