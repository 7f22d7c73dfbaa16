//! Scalar abstraction shared by the exact geometry layer.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Signed};

/// Ordered exact field element. Anything that is an ordered, signed,
/// exactly-divisible number qualifies; floats do not (no `Ord`/`Hash`).
pub trait Scalar:
    Clone + Ord + Hash + Signed + FromPrimitive + Debug + Display + Send + Sync + 'static
{
    fn from_frac(num: i64, den: i64) -> Self {
        Self::from_i64(num).expect("numerator") / Self::from_i64(den).expect("denominator")
    }

    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer")
    }

    /// floor(self / period) as a scalar integer.
    fn floor_div(&self, period: &Self) -> Self;

    /// True if self is an integer multiple of `period`.
    fn is_multiple_of(&self, period: &Self) -> bool {
        let q = self.clone() / period.clone();
        q.floor_div(&Self::one()) == q
    }

    fn half(&self) -> Self {
        self.clone() / Self::from_int(2)
    }

    fn to_f64_lossy(&self) -> f64;
}

impl Scalar for BigRational {
    fn floor_div(&self, period: &Self) -> Self {
        (self / period).floor()
    }

    fn to_f64_lossy(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

impl Scalar for Ratio<i128> {
    fn floor_div(&self, period: &Self) -> Self {
        (self / period).floor()
    }

    fn to_f64_lossy(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

/// The scalar used by every construction in this crate.
pub type Rat = BigRational;

/// Shorthand constructor for `Rat`.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parse "p/q" or "n".
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q == BigInt::from(0) {
                return None;
            }
            Some(Rat::new(p, q))
        }
        None => Some(Rat::from_integer(s.parse().ok()?)),
    }
}

/// Reduced "p/q", or "n" when the denominator is 1.
pub fn fmt_rat(x: &Rat) -> String {
    if x.denom() == &BigInt::from(1) {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn min_s<S: Scalar>(a: &S, b: &S) -> S {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn max_s<S: Scalar>(a: &S, b: &S) -> S {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}
