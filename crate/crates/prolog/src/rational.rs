//! Exact rational numbers for the term universe and arithmetic evaluation.
//!
//! Grade-school word problems are dominated by small integers, but model
//! output routinely contains decimals, currency amounts and intermediate
//! divisions. All numeric values are kept as exact rationals so no float
//! error can creep in before the final answer comparison.

use std::fmt;
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};

/// An exact rational number. Always stored in reduced form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(BigRational);

impl Rat {
    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn from_int(n: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Rat(BigRational::from_integer(n))
    }

    pub fn new(numer: BigInt, denom: BigInt) -> Option<Self> {
        if denom.is_zero() {
            None
        } else {
            Some(Rat(BigRational::new(numer, denom)))
        }
    }

    /// Parse a plain integer literal, e.g. `42` or `-7`.
    pub fn parse_integer(s: &str) -> Option<Self> {
        BigInt::from_str(s).ok().map(Rat::from_bigint)
    }

    /// Parse a decimal literal such as `2.5` into the exact rational 5/2.
    /// Accepts an optional leading sign; requires digits on both sides of
    /// the point when one is present.
    pub fn parse_decimal(s: &str) -> Option<Self> {
        let (sign, rest) = match s.strip_prefix('-') {
            Some(r) => (-1, r),
            None => (1, s.strip_prefix('+').unwrap_or(s)),
        };
        if rest.is_empty() {
            return None;
        }
        let (int_part, frac_part) = match rest.split_once('.') {
            Some((i, f)) => (i, f),
            None => (rest, ""),
        };
        if int_part.is_empty() || !int_part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        if !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        if rest.contains('.') && frac_part.is_empty() {
            return None;
        }
        let mut numer = BigInt::from_str(int_part).ok()?;
        let mut denom = BigInt::one();
        if !frac_part.is_empty() {
            let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
            numer = numer * &scale + BigInt::from_str(frac_part).ok()?;
            denom = scale;
        }
        Some(Rat(BigRational::new(numer * BigInt::from(sign), denom)))
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// The integer value, when the denominator is one.
    pub fn as_integer(&self) -> Option<BigInt> {
        if self.is_integer() {
            Some(self.0.numer().clone())
        } else {
            None
        }
    }

    pub fn checked_add(&self, other: &Rat) -> Rat {
        Rat(&self.0 + &other.0)
    }

    pub fn checked_sub(&self, other: &Rat) -> Rat {
        Rat(&self.0 - &other.0)
    }

    pub fn checked_mul(&self, other: &Rat) -> Rat {
        Rat(&self.0 * &other.0)
    }

    pub fn checked_div(&self, other: &Rat) -> Option<Rat> {
        if other.0.is_zero() {
            None
        } else {
            Some(Rat(&self.0 / &other.0))
        }
    }

    /// Truncating integer division. Both operands must be integers and the
    /// divisor nonzero.
    pub fn int_div_trunc(&self, other: &Rat) -> Option<Rat> {
        let a = self.as_integer()?;
        let b = other.as_integer()?;
        if b.is_zero() {
            return None;
        }
        // BigInt division truncates toward zero.
        Some(Rat::from_bigint(a / b))
    }

    /// Floor modulo (result takes the sign of the divisor), matching the
    /// usual Prolog `mod`. Both operands must be integers, divisor nonzero.
    pub fn int_mod_floor(&self, other: &Rat) -> Option<Rat> {
        let a = self.as_integer()?;
        let b = other.as_integer()?;
        if b.is_zero() {
            return None;
        }
        Some(Rat::from_bigint(a.mod_floor(&b)))
    }

    pub fn neg(&self) -> Rat {
        Rat(-self.0.clone())
    }

    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }

    pub fn succ(&self) -> Rat {
        Rat(&self.0 + BigRational::one())
    }

    pub fn pred(&self) -> Rat {
        Rat(&self.0 - BigRational::one())
    }

    /// Exponent k such that the reduced denominator divides 10^k, when one
    /// exists (denominator of the form 2^a * 5^b).
    fn decimal_exponent(&self) -> Option<u32> {
        let mut d = self.0.denom().clone();
        let two = BigInt::from(2u32);
        let five = BigInt::from(5u32);
        let mut twos = 0u32;
        let mut fives = 0u32;
        while (&d % &two).is_zero() {
            d /= &two;
            twos += 1;
        }
        while (&d % &five).is_zero() {
            d /= &five;
            fives += 1;
        }
        if d.is_one() {
            Some(twos.max(fives))
        } else {
            None
        }
    }

    /// Canonical text: integers print bare, finite decimals print exactly
    /// (`5/2` as `2.5`), everything else as a `numer/denom` fraction.
    /// The first two forms re-read as the same value; only rationals that
    /// cannot arise from the reader fall back to fraction form.
    pub fn to_text(&self) -> String {
        if let Some(n) = self.as_integer() {
            return n.to_string();
        }
        if let Some(k) = self.decimal_exponent() {
            let scale = BigInt::from(10u32).pow(k);
            let scaled = self.0.numer() * &scale / self.0.denom();
            let neg = scaled.is_negative();
            let mut digits = scaled.magnitude().to_string();
            let k = k as usize;
            if digits.len() <= k {
                digits = format!("{}{}", "0".repeat(k - digits.len() + 1), digits);
            }
            let point = digits.len() - k;
            let (int_part, frac_part) = digits.split_at(point);
            let frac_part = frac_part.trim_end_matches('0');
            let frac_part = if frac_part.is_empty() { "0" } else { frac_part };
            format!("{}{}.{}", if neg { "-" } else { "" }, int_part, frac_part)
        } else {
            format!("{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_prints_bare() {
        assert_eq!(Rat::from_int(7).to_text(), "7");
        assert_eq!(Rat::from_int(-3).to_text(), "-3");
    }

    #[test]
    fn decimal_parses_exactly() {
        let r = Rat::parse_decimal("2.5").unwrap();
        assert_eq!(r, Rat::new(BigInt::from(5), BigInt::from(2)).unwrap());
        assert_eq!(r.to_text(), "2.5");
        assert_eq!(Rat::parse_decimal("0.25").unwrap().to_text(), "0.25");
        assert_eq!(Rat::parse_decimal("-1.50").unwrap().to_text(), "-1.5");
    }

    #[test]
    fn decimal_rejects_garbage() {
        assert!(Rat::parse_decimal("").is_none());
        assert!(Rat::parse_decimal(".5").is_none());
        assert!(Rat::parse_decimal("5.").is_none());
        assert!(Rat::parse_decimal("1.2.3").is_none());
        assert!(Rat::parse_decimal("twelve").is_none());
    }

    #[test]
    fn nondecimal_denominator_prints_as_fraction() {
        let r = Rat::new(BigInt::from(1), BigInt::from(3)).unwrap();
        assert_eq!(r.to_text(), "1/3");
        let r = Rat::new(BigInt::from(-7), BigInt::from(6)).unwrap();
        assert_eq!(r.to_text(), "-7/6");
    }

    #[test]
    fn trunc_div_and_floor_mod() {
        let div = |a: i64, b: i64| {
            Rat::from_int(a)
                .int_div_trunc(&Rat::from_int(b))
                .unwrap()
                .as_integer()
                .unwrap()
        };
        let m = |a: i64, b: i64| {
            Rat::from_int(a)
                .int_mod_floor(&Rat::from_int(b))
                .unwrap()
                .as_integer()
                .unwrap()
        };
        assert_eq!(div(7, 2), BigInt::from(3));
        assert_eq!(div(-7, 2), BigInt::from(-3));
        assert_eq!(m(7, 2), BigInt::from(1));
        assert_eq!(m(-7, 2), BigInt::from(1));
        assert_eq!(m(7, -2), BigInt::from(-1));
        assert!(Rat::from_int(1).int_div_trunc(&Rat::from_int(0)).is_none());
        assert!(Rat::parse_decimal("2.5")
            .unwrap()
            .int_div_trunc(&Rat::from_int(2))
            .is_none());
    }

    #[test]
    fn small_denominator_scaling() {
        // 1/8 = 0.125, 3/40 = 0.075 (leading zeros in the fraction part)
        assert_eq!(
            Rat::new(BigInt::from(1), BigInt::from(8)).unwrap().to_text(),
            "0.125"
        );
        assert_eq!(
            Rat::new(BigInt::from(3), BigInt::from(40)).unwrap().to_text(),
            "0.075"
        );
    }
}
