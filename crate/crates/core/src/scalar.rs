//! Arithmetic backends.
//!
//! Every computation in this crate is generic over [`Scalar`]. Two backends
//! exist: `f64`, where sign tests use a small pivot tolerance, and
//! [`Rational`] (arbitrary precision fractions), where every comparison is
//! exact.

use core::fmt::{Debug, Display};
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};
use rand::Rng;

/// Exact rational numbers backed by big integers.
pub type Rational = BigRational;

/// Field operations plus the sign tests the simplex kernel needs.
pub trait Scalar:
    Signed + PartialOrd + Clone + Debug + Display + FromStr + Send + Sync + 'static
{
    /// `true` when arithmetic is exact and every tolerance collapses to zero.
    const EXACT: bool;

    /// Short name used in reports (`float` / `rational`).
    const MODE: &'static str;

    /// Magnitude below which a value is treated as zero during pivoting.
    fn pivot_tol() -> Self;

    fn from_ratio(num: i64, den: i64) -> Self;

    /// Lossy for rationals with huge components.
    fn to_f64(&self) -> f64;

    /// Exact conversion for rationals (every finite double is a dyadic fraction).
    fn from_f64(v: f64) -> Option<Self>;

    /// Uniform sample from `[lo, hi]`. Rationals are drawn on a grid of step
    /// `(hi - lo) / 2000`.
    fn sample<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> Self;

    /// `self > other`, ignoring a few ulps of rounding in the float backend.
    fn exceeds(&self, other: &Self) -> bool;

    fn is_negligible(&self) -> bool {
        self.abs() <= Self::pivot_tol()
    }

    fn is_clearly_positive(&self) -> bool {
        *self > Self::pivot_tol()
    }

    fn is_clearly_negative(&self) -> bool {
        *self < -Self::pivot_tol()
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
}

/// Pivot threshold of the floating-point backend.
pub const FLOAT_PIVOT_TOL: f64 = 1e-11;

impl Scalar for f64 {
    const EXACT: bool = false;
    const MODE: &'static str = "float";

    fn pivot_tol() -> Self {
        FLOAT_PIVOT_TOL
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_f64(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }

    fn sample<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> Self {
        rng.gen_range(lo..=hi)
    }

    fn exceeds(&self, other: &Self) -> bool {
        let scale = self.abs().max(other.abs()).max(1.0);
        *self > *other + 4.0 * f64::EPSILON * scale
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const MODE: &'static str = "rational";

    fn pivot_tol() -> Self {
        Rational::zero()
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_f64(v: f64) -> Option<Self> {
        <Rational as FromPrimitive>::from_f64(v)
    }

    fn sample<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> Self {
        const STEPS: i64 = 2000;
        let k = rng.gen_range(0..=STEPS);
        let lo = <Rational as FromPrimitive>::from_f64(lo).unwrap_or_else(Rational::zero);
        let hi = <Rational as FromPrimitive>::from_f64(hi).unwrap_or_else(Rational::zero);
        let width = hi - &lo;
        lo + width * Rational::from_ratio(k, STEPS)
    }

    fn exceeds(&self, other: &Self) -> bool {
        self > other
    }
}

/// Maximum absolute value of a slice (zero when empty).
pub fn max_abs<S: Scalar>(values: &[S]) -> S {
    values
        .iter()
        .fold(S::zero(), |acc, v| S::max_of(acc, v.abs()))
}

/// Sum of absolute values.
pub fn l1_norm<S: Scalar>(values: &[S]) -> S {
    values.iter().fold(S::zero(), |acc, v| acc + v.abs())
}
