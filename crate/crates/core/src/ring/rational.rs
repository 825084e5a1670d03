//! Exact rational numbers.
//!
//! [`Rational`] is an arbitrary-precision rational kept in canonical form
//! (gcd 1, positive denominator). Values that fit a machine word are stored
//! inline; everything else falls back to [`BigRational`]. The inline branch
//! is an optimization only — both branches represent the same value space and
//! the canonical invariant guarantees that equal values compare equal
//! structurally.

use alloc::boxed::Box;
use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// An exact rational number. No floating point anywhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rational {
    /// `n / d` with `gcd(|n|, d) = 1`, `d > 0`. Preferred whenever it fits.
    Small(i64, u64),
    /// Reduced, positive denominator, and out of `Small` range.
    Big(Box<BigRational>),
}

use Rational::{Big, Small};

impl Rational {
    pub fn zero() -> Self {
        Small(0, 1)
    }

    pub fn one() -> Self {
        Small(1, 1)
    }

    pub fn from_i64(n: i64) -> Self {
        Small(n, 1)
    }

    /// `n / d`, reduced. Panics if `d == 0`.
    pub fn from_pair(n: i64, d: i64) -> Self {
        assert!(d != 0, "rational with zero denominator");
        let neg = d < 0;
        let (mut un, ud) = (n.unsigned_abs(), d.unsigned_abs());
        let g = un.gcd(&ud);
        un /= g;
        let sign_neg = (n < 0) != neg;
        match i64::try_from(un) {
            Ok(v) => Small(if sign_neg { -v } else { v }, ud / g),
            Err(_) => Self::normalize_big(BigRational::new(
                if sign_neg {
                    -BigInt::from(un)
                } else {
                    BigInt::from(un)
                },
                BigInt::from(ud / g),
            )),
        }
    }

    pub fn from_big(r: BigRational) -> Self {
        Self::normalize_big(r)
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Small(n, d) => BigRational::new(BigInt::from(*n), BigInt::from(*d)),
            Big(r) => (**r).clone(),
        }
    }

    /// Demote to the inline representation when the value fits.
    fn normalize_big(r: BigRational) -> Self {
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_u64()) {
            Small(n, d)
        } else {
            Big(Box::new(r))
        }
    }

    fn from_i128_parts(num: i128, den: u128) -> Self {
        debug_assert!(den != 0);
        let g = num.unsigned_abs().gcd(&den);
        let (num, den) = (num / g as i128, den / g);
        match (i64::try_from(num), u64::try_from(den)) {
            (Ok(n), Ok(d)) => Small(n, d),
            _ => Big(Box::new(BigRational::new(BigInt::from(num), BigInt::from(den)))),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Small(1, 1))
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Small(n, _) => *n < 0,
            Big(r) => r.numer().is_negative(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Small(_, d) => *d == 1,
            Big(r) => r.is_integer(),
        }
    }

    pub fn abs(&self) -> Rational {
        if self.is_negative() {
            self.neg_ref()
        } else {
            self.clone()
        }
    }

    pub fn neg_ref(&self) -> Rational {
        match self {
            Small(n, d) => match n.checked_neg() {
                Some(m) => Small(m, *d),
                None => Self::normalize_big(-self.to_big()),
            },
            Big(r) => Self::normalize_big(-(**r).clone()),
        }
    }

    pub fn add_ref(&self, other: &Rational) -> Rational {
        match (self, other) {
            // Integer + integer dominates expanded determinants; skip the gcd.
            (Small(n1, 1), Small(n2, 1)) => match n1.checked_add(*n2) {
                Some(n) => Small(n, 1),
                None => Self::from_i128_parts(*n1 as i128 + *n2 as i128, 1),
            },
            (Small(n1, d1), Small(n2, d2)) => {
                let num = *n1 as i128 * *d2 as i128 + *n2 as i128 * *d1 as i128;
                let den = *d1 as u128 * *d2 as u128;
                Self::from_i128_parts(num, den)
            }
            _ => Self::normalize_big(self.to_big() + other.to_big()),
        }
    }

    pub fn sub_ref(&self, other: &Rational) -> Rational {
        match (self, other) {
            (Small(n1, 1), Small(n2, 1)) => match n1.checked_sub(*n2) {
                Some(n) => Small(n, 1),
                None => Self::from_i128_parts(*n1 as i128 - *n2 as i128, 1),
            },
            (Small(n1, d1), Small(n2, d2)) => {
                let num = *n1 as i128 * *d2 as i128 - *n2 as i128 * *d1 as i128;
                let den = *d1 as u128 * *d2 as u128;
                Self::from_i128_parts(num, den)
            }
            _ => Self::normalize_big(self.to_big() - other.to_big()),
        }
    }

    pub fn mul_ref(&self, other: &Rational) -> Rational {
        match (self, other) {
            (Small(n1, d1), Small(n2, d2)) => {
                // Integer-by-integer products (the common case in expanded
                // determinants) skip the gcd entirely.
                if *d1 == 1 && *d2 == 1 {
                    return match n1.checked_mul(*n2) {
                        Some(n) => Small(n, 1),
                        None => Self::from_i128_parts(*n1 as i128 * *n2 as i128, 1),
                    };
                }
                let num = *n1 as i128 * *n2 as i128;
                let den = *d1 as u128 * *d2 as u128;
                Self::from_i128_parts(num, den)
            }
            _ => Self::normalize_big(self.to_big() * other.to_big()),
        }
    }

    /// Exact division. Panics if `other` is zero.
    pub fn div_ref(&self, other: &Rational) -> Rational {
        assert!(!other.is_zero(), "rational division by zero");
        match (self, other) {
            (Small(n1, d1), Small(n2, d2)) => {
                let num = *n1 as i128 * *d2 as i128 * if *n2 < 0 { -1 } else { 1 };
                let den = *d1 as u128 * n2.unsigned_abs() as u128;
                Self::from_i128_parts(num, den)
            }
            _ => Self::normalize_big(self.to_big() / other.to_big()),
        }
    }

    /// `self^e`. Returns `None` for `0^e` with `e < 0`.
    pub fn try_pow(&self, e: i32) -> Option<Rational> {
        if e == 0 {
            return Some(Rational::one());
        }
        if self.is_zero() {
            return if e > 0 { Some(Rational::zero()) } else { None };
        }
        let base = if e > 0 {
            self.clone()
        } else {
            Rational::one().div_ref(self)
        };
        let mut result = Rational::one();
        let mut sq = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul_ref(&sq);
            }
            k >>= 1;
            if k > 0 {
                sq = sq.mul_ref(&sq);
            }
        }
        Some(result)
    }

    /// Parse `"p"` or `"p/q"`; arbitrarily large literals are accepted.
    pub fn parse(text: &str) -> Option<Rational> {
        let text = text.trim();
        let (num, den) = match text.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (text, "1"),
        };
        let n: BigInt = num.parse().ok()?;
        let d: BigInt = den.parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Self::normalize_big(BigRational::new(n, d)))
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Small(n1, d1), Small(n2, d2)) => {
                (*n1 as i128 * *d2 as i128).cmp(&(*n2 as i128 * *d1 as i128))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Small(n, 1) => write!(f, "{}", n),
            Small(n, d) => write!(f, "{}/{}", n, d),
            Big(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
        }
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_i64(n)
    }
}

impl core::ops::Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        self.neg_ref()
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $imp:ident) => {
        impl core::ops::$trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                self.$imp(rhs)
            }
        }
        impl core::ops::$trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                self.$imp(&rhs)
            }
        }
    };
}

binop!(Add, add, add_ref);
binop!(Sub, sub, sub_ref);
binop!(Mul, mul, mul_ref);
binop!(Div, div, div_ref);

/// `n!` as a rational, for the `1/d!` normalizations.
pub fn factorial(n: usize) -> Rational {
    let mut acc = Rational::one();
    for k in 2..=n {
        acc = acc.mul_ref(&Rational::from_i64(k as i64));
    }
    acc
}

/// Binomial coefficient `C(n, k)`.
pub fn binomial(n: usize, k: usize) -> Rational {
    if k > n {
        return Rational::zero();
    }
    let k = k.min(n - k);
    let mut acc = Rational::one();
    for i in 0..k {
        acc = acc.mul_ref(&Rational::from_i64((n - i) as i64));
        acc = acc.div_ref(&Rational::from_i64((i + 1) as i64));
    }
    acc
}

impl Rational {
    /// Canonical text used by serialization: `p` or `p/q`.
    pub fn to_text(&self) -> String {
        use alloc::string::ToString;
        self.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_reduction() {
        assert_eq!(Rational::from_pair(2, 4), Rational::from_pair(1, 2));
        assert_eq!(Rational::from_pair(-2, -4), Rational::from_pair(1, 2));
        assert_eq!(Rational::from_pair(2, -4), Rational::from_pair(-1, 2));
        assert_eq!(Rational::from_pair(0, 7), Rational::zero());
    }

    #[test]
    fn arithmetic() {
        let a = Rational::from_pair(1, 2);
        let b = Rational::from_pair(1, 3);
        assert_eq!(a.add_ref(&b), Rational::from_pair(5, 6));
        assert_eq!(a.sub_ref(&b), Rational::from_pair(1, 6));
        assert_eq!(a.mul_ref(&b), Rational::from_pair(1, 6));
        assert_eq!(a.div_ref(&b), Rational::from_pair(3, 2));
        assert_eq!(a.add_ref(&a), Rational::one());
    }

    #[test]
    fn overflow_promotes_and_demotes() {
        let big = Rational::from_i64(i64::MAX);
        let sq = big.mul_ref(&big);
        assert!(matches!(sq, Big(_)));
        let back = sq.div_ref(&big);
        assert_eq!(back, big);
        assert!(matches!(back, Small(_, _)));
    }

    #[test]
    fn pow() {
        let a = Rational::from_pair(2, 3);
        assert_eq!(a.try_pow(2), Some(Rational::from_pair(4, 9)));
        assert_eq!(a.try_pow(-1), Some(Rational::from_pair(3, 2)));
        assert_eq!(a.try_pow(0), Some(Rational::one()));
        assert_eq!(Rational::zero().try_pow(-1), None);
        assert_eq!(Rational::zero().try_pow(3), Some(Rational::zero()));
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(Rational::parse("3/2"), Some(Rational::from_pair(3, 2)));
        assert_eq!(Rational::parse("-7"), Some(Rational::from_i64(-7)));
        assert_eq!(Rational::parse("4/6"), Some(Rational::from_pair(2, 3)));
        assert_eq!(Rational::parse("1/0"), None);
        assert_eq!(Rational::parse("x"), None);
        use alloc::string::ToString;
        assert_eq!(Rational::from_pair(-3, 2).to_string(), "-3/2");
        assert_eq!(Rational::from_i64(5).to_string(), "5");
    }

    #[test]
    fn factorial_and_binomial() {
        assert_eq!(factorial(0), Rational::one());
        assert_eq!(factorial(4), Rational::from_i64(24));
        assert_eq!(binomial(4, 2), Rational::from_i64(6));
        assert_eq!(binomial(3, 0), Rational::one());
        assert_eq!(binomial(2, 5), Rational::zero());
    }
}
