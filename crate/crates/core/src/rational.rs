//! Exact rational arithmetic for frequency coordinates.
//!
//! Every breakpoint, angle and evaluation point in this crate is a rational
//! multiple of pi, stored as an arbitrary-precision coefficient. Comparisons,
//! set algebra and congruences never go through floating point.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::{BigRational, One, Signed, Zero};

use crate::error::Error;

/// Arbitrary-precision rational, used for plain (non-pi) quantities such as
/// modulations and dilation factors.
pub type Ratio = BigRational;

/// Parses the `p/q` grammar (`p` alone means `p/1`). Rejects zero or negative
/// denominators and anything that is not a pair of integers.
pub fn parse_ratio(text: &str) -> Result<Ratio, Error> {
    let bad = || Error::RationalSyntax {
        text: text.to_string(),
    };
    let mut parts = text.splitn(2, '/');
    let num_part = parts.next().ok_or_else(bad)?.trim();
    let numerator = BigInt::from_str(num_part).map_err(|_| bad())?;
    let denominator = match parts.next() {
        Some(den_part) => {
            let den = BigInt::from_str(den_part.trim()).map_err(|_| bad())?;
            if den <= BigInt::zero() {
                return Err(bad());
            }
            den
        }
        None => BigInt::one(),
    };
    Ok(Ratio::new(numerator, denominator))
}

/// Formats a rational in the `p/q` grammar used by all documents.
pub fn format_ratio(value: &Ratio) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Converts to `f64`; exact rationals of interest are far from overflow.
pub fn ratio_to_f64(value: &Ratio) -> f64 {
    use num::ToPrimitive;
    value.to_f64().expect("rational out of f64 range")
}

/// Exact conversion of a finite float into a rational (every finite `f64` is
/// a dyadic rational).
pub fn ratio_from_f64_exact(value: f64) -> Ratio {
    Ratio::from_float(value).expect("non-finite float")
}

/// An exact rational multiple of pi. The stored value is the coefficient, so
/// `RationalPi::new(1, 2)` is pi/2.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalPi(Ratio);

impl RationalPi {
    pub fn new(numerator: i64, denominator: i64) -> Self {
        assert!(denominator > 0, "denominator must be positive");
        RationalPi(Ratio::new(BigInt::from(numerator), BigInt::from(denominator)))
    }

    pub fn from_ratio(coefficient: Ratio) -> Self {
        RationalPi(coefficient)
    }

    pub fn from_integer(value: i64) -> Self {
        RationalPi(Ratio::from_integer(BigInt::from(value)))
    }

    pub fn zero() -> Self {
        RationalPi(Ratio::zero())
    }

    pub fn pi() -> Self {
        RationalPi::from_integer(1)
    }

    /// The coefficient of pi.
    pub fn coefficient(&self) -> &Ratio {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn abs(&self) -> Self {
        RationalPi(self.0.abs())
    }

    /// Floating-point value in radians; the only lossy view of this type.
    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.0) * std::f64::consts::PI
    }

    /// Scales by an exact rational factor.
    pub fn scale(&self, factor: &Ratio) -> Self {
        RationalPi(&self.0 * factor)
    }

    /// Divides by an exact rational factor.
    pub fn unscale(&self, factor: &Ratio) -> Self {
        assert!(!factor.is_zero(), "division by zero factor");
        RationalPi(&self.0 / factor)
    }

    /// Canonical representative modulo 2*pi, in [-pi, pi).
    pub fn reduce_mod_2pi(&self) -> Self {
        let two = Ratio::from_integer(BigInt::from(2));
        let shifted = (&self.0 + Ratio::one()) / &two;
        let reduced = &self.0 - two * shifted.floor();
        RationalPi(reduced)
    }

    /// Whether `self` is an exact integer multiple of 2*pi.
    pub fn is_multiple_of_2pi(&self) -> bool {
        let half = &self.0 / Ratio::from_integer(BigInt::from(2));
        half.is_integer()
    }

    /// Midpoint of two points, exact.
    pub fn midpoint(a: &RationalPi, b: &RationalPi) -> Self {
        RationalPi((&a.0 + &b.0) / Ratio::from_integer(BigInt::from(2)))
    }
}

impl PartialOrd for RationalPi {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RationalPi {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl Add for &RationalPi {
    type Output = RationalPi;
    fn add(self, rhs: &RationalPi) -> RationalPi {
        RationalPi(&self.0 + &rhs.0)
    }
}

impl Sub for &RationalPi {
    type Output = RationalPi;
    fn sub(self, rhs: &RationalPi) -> RationalPi {
        RationalPi(&self.0 - &rhs.0)
    }
}

impl Neg for &RationalPi {
    type Output = RationalPi;
    fn neg(self) -> RationalPi {
        RationalPi(-&self.0)
    }
}

impl Add for RationalPi {
    type Output = RationalPi;
    fn add(self, rhs: RationalPi) -> RationalPi {
        &self + &rhs
    }
}

impl Sub for RationalPi {
    type Output = RationalPi;
    fn sub(self, rhs: RationalPi) -> RationalPi {
        &self - &rhs
    }
}

impl Neg for RationalPi {
    type Output = RationalPi;
    fn neg(self) -> RationalPi {
        -&self
    }
}

impl AddAssign<&RationalPi> for RationalPi {
    fn add_assign(&mut self, rhs: &RationalPi) {
        self.0 += &rhs.0;
    }
}

impl Mul<i64> for &RationalPi {
    type Output = RationalPi;
    fn mul(self, rhs: i64) -> RationalPi {
        RationalPi(&self.0 * Ratio::from_integer(BigInt::from(rhs)))
    }
}

impl Div<i64> for &RationalPi {
    type Output = RationalPi;
    fn div(self, rhs: i64) -> RationalPi {
        assert!(rhs != 0);
        RationalPi(&self.0 / Ratio::from_integer(BigInt::from(rhs)))
    }
}

impl fmt::Display for RationalPi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_ratio(&self.0))
    }
}

impl fmt::Debug for RationalPi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·π", format_ratio(&self.0))
    }
}

impl FromStr for RationalPi {
    type Err = Error;
    fn from_str(text: &str) -> Result<Self, Error> {
        Ok(RationalPi(parse_ratio(text)?))
    }
}

/// The offset `2*k*pi` as a `RationalPi`.
pub fn two_k_pi(k: i64) -> RationalPi {
    RationalPi::from_integer(2 * k)
}

/// Integer range `[ceil(lo), floor(hi)]` of a rational interval, empty when
/// `lo > hi`.
pub fn integer_range(lo: &Ratio, hi: &Ratio) -> std::ops::RangeInclusive<i64> {
    use num::ToPrimitive;
    let start = lo.ceil().to_integer().to_i64().expect("range start overflow");
    let end = hi.floor().to_integer().to_i64().expect("range end overflow");
    start..=end
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for text in ["0", "1", "-3", "1/2", "-7/3", "100/1024"] {
            let r = parse_ratio(text).unwrap();
            let canonical = format_ratio(&r);
            assert_eq!(parse_ratio(&canonical).unwrap(), r);
        }
        assert_eq!(format_ratio(&parse_ratio("2/4").unwrap()), "1/2");
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(parse_ratio("3/0").is_err());
        assert!(parse_ratio("3/-2").is_err());
        assert!(parse_ratio("a/b").is_err());
        assert!(parse_ratio("1.5").is_err());
    }

    #[test]
    fn reduce_mod_2pi_canonical_window() {
        // 4/3 -> -2/3, 2 -> 0, -1 -> -1 (already canonical), 1 -> -1.
        let cases = [
            (RationalPi::new(4, 3), RationalPi::new(-2, 3)),
            (RationalPi::from_integer(2), RationalPi::zero()),
            (RationalPi::from_integer(-1), RationalPi::from_integer(-1)),
            (RationalPi::from_integer(1), RationalPi::from_integer(-1)),
            (RationalPi::new(7, 2), RationalPi::new(-1, 2)),
        ];
        for (input, expected) in cases {
            assert_eq!(input.reduce_mod_2pi(), expected);
        }
    }

    #[test]
    fn multiple_of_2pi_detection() {
        assert!(RationalPi::from_integer(4).is_multiple_of_2pi());
        assert!(RationalPi::zero().is_multiple_of_2pi());
        assert!(!RationalPi::from_integer(1).is_multiple_of_2pi());
        assert!(!RationalPi::new(2, 3).is_multiple_of_2pi());
    }

    #[test]
    fn integer_range_bounds() {
        let lo = parse_ratio("-3/2").unwrap();
        let hi = parse_ratio("5/2").unwrap();
        let range: Vec<i64> = integer_range(&lo, &hi).collect();
        assert_eq!(range, vec![-1, 0, 1, 2]);
        let empty = integer_range(&parse_ratio("1/2").unwrap(), &parse_ratio("1/3").unwrap());
        assert!(empty.collect::<Vec<_>>().is_empty());
    }
}
