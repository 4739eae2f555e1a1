//! Exact rational arithmetic for ratios, averages and shares.
//!
//! Decimal products stay exact as long as they fit in 96 bits, but averages
//! over three years and ratios between amounts do not terminate in general.
//! Those go through [`Exact`] and are rounded once, at the presentation edge.

use std::fmt;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rust_decimal::Decimal;

/// Arbitrary-precision rational number.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exact(BigRational);

impl Exact {
    pub fn zero() -> Self {
        Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Exact(BigRational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Exact(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn max_zero(self) -> Self {
        if self.is_negative() {
            Exact::zero()
        } else {
            self
        }
    }

    /// `None` when `den` is zero.
    pub fn checked_div(&self, den: &Exact) -> Option<Exact> {
        if den.is_zero() {
            None
        } else {
            Some(Exact(&self.0 / &den.0))
        }
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    /// Rounds half-to-even to `dp` decimal places.
    pub fn round_dp(&self, dp: u32) -> Decimal {
        let scale = BigInt::from(10u8).pow(dp);
        let scaled = &self.0 * BigRational::from_integer(scale);
        let floor = scaled.floor();
        let frac = &scaled - &floor;
        let half = BigRational::new(BigInt::one(), BigInt::from(2u8));
        let mut units = floor.to_integer();
        if frac > half || (frac == half && (&units % BigInt::from(2u8)) != BigInt::zero()) {
            units += BigInt::one();
        }
        let mantissa = units
            .to_i128()
            .expect("rounded value exceeds decimal range");
        Decimal::from_i128_with_scale(mantissa, dp)
    }

    /// Nearest decimal with as many places as the 96-bit mantissa allows.
    pub fn to_decimal(&self) -> Decimal {
        let int_digits = self.0.abs().to_integer().to_string().len() as u32;
        self.round_dp(28u32.saturating_sub(int_digits)).normalize()
    }
}

impl From<Decimal> for Exact {
    fn from(d: Decimal) -> Self {
        let mantissa = BigInt::from(d.mantissa());
        let den = BigInt::from(10u8).pow(d.scale());
        Exact(BigRational::new(mantissa, den))
    }
}

impl From<&Decimal> for Exact {
    fn from(d: &Decimal) -> Self {
        Exact::from(*d)
    }
}

impl Add for Exact {
    type Output = Exact;
    fn add(self, rhs: Exact) -> Exact {
        Exact(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a Exact> for &'a Exact {
    type Output = Exact;
    fn add(self, rhs: &Exact) -> Exact {
        Exact(&self.0 + &rhs.0)
    }
}

impl Sub for Exact {
    type Output = Exact;
    fn sub(self, rhs: Exact) -> Exact {
        Exact(self.0 - rhs.0)
    }
}

impl Mul for Exact {
    type Output = Exact;
    fn mul(self, rhs: Exact) -> Exact {
        Exact(self.0 * rhs.0)
    }
}

impl<'a> Mul<&'a Exact> for &'a Exact {
    type Output = Exact;
    fn mul(self, rhs: &Exact) -> Exact {
        Exact(&self.0 * &rhs.0)
    }
}

/// Panics on a zero divisor; use [`Exact::checked_div`] when that can happen.
impl Div for Exact {
    type Output = Exact;
    fn div(self, rhs: Exact) -> Exact {
        Exact(self.0 / rhs.0)
    }
}

impl std::iter::Sum for Exact {
    fn sum<I: Iterator<Item = Exact>>(iter: I) -> Exact {
        iter.fold(Exact::zero(), Add::add)
    }
}

/// A dimensionless quotient (solvency ratio, share of the denominator).
///
/// Held exactly, so `ratio == 8%` is a true equality test rather than a
/// tolerance check. `Display` renders a percentage with two decimals.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ratio(Exact);

impl Ratio {
    /// `None` when `den` is zero.
    pub fn of(num: Decimal, den: Decimal) -> Option<Ratio> {
        Exact::from(num).checked_div(&Exact::from(den)).map(Ratio)
    }

    pub fn from_fraction(f: Decimal) -> Ratio {
        Ratio(Exact::from(f))
    }

    pub fn exact(&self) -> &Exact {
        &self.0
    }

    pub fn is_at_least(&self, floor: Decimal) -> bool {
        self.0 >= Exact::from(floor)
    }

    pub fn equals(&self, f: Decimal) -> bool {
        self.0 == Exact::from(f)
    }

    /// Percentage points rounded half-to-even to `dp` places.
    pub fn percent(&self, dp: u32) -> Decimal {
        (&self.0 * &Exact::from_integer(100)).round_dp(dp)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2}%", self.percent(2))
    }
}
