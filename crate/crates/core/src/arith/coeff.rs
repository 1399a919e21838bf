use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// A rational number in lowest terms, used as an element of Z localized at p.
///
/// The prime is not stored; callers that care about p-locality check it with
/// [`Coefficient::is_p_integral`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Coefficient(BigRational);

impl Coefficient {
    pub fn new(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        Ok(Coefficient(BigRational::new(num, den)))
    }

    pub fn from_int<T: Into<BigInt>>(n: T) -> Self {
        Coefficient(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Coefficient(BigRational::zero())
    }

    pub fn one() -> Self {
        Coefficient(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.0.numer().clone())
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    /// p-adic valuation; `None` for zero.
    pub fn valuation(&self, p: u64) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        Some(int_valuation(self.0.numer(), p) as i64 - int_valuation(self.0.denom(), p) as i64)
    }

    /// True when the denominator is prime to p.
    pub fn is_p_integral(&self, p: u64) -> bool {
        !self.0.denom().is_multiple_of(&BigInt::from(p))
    }

    pub fn checked_div(&self, other: &Coefficient) -> Option<Coefficient> {
        (!other.is_zero()).then(|| Coefficient(&self.0 / &other.0))
    }

    pub fn div_int(&self, n: &BigInt) -> Coefficient {
        Coefficient(&self.0 / BigRational::from_integer(n.clone()))
    }

    pub fn pow(&self, e: u32) -> Coefficient {
        Coefficient(num_traits::pow(self.0.clone(), e as usize))
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Coefficient {
        Coefficient(self.0.abs())
    }
}

/// Exponent of p in a nonzero integer (0 for zero).
pub fn int_valuation(n: &BigInt, p: u64) -> u32 {
    if n.is_zero() {
        return 0;
    }
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

impl From<i64> for Coefficient {
    fn from(n: i64) -> Self {
        Coefficient::from_int(n)
    }
}

impl From<BigInt> for Coefficient {
    fn from(n: BigInt) -> Self {
        Coefficient::from_int(n)
    }
}

impl From<BigRational> for Coefficient {
    fn from(r: BigRational) -> Self {
        Coefficient(r)
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Coefficient {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse =
            |t: &str| t.trim().parse::<BigInt>().map_err(|_| Error::Parse(format!("bad integer '{t}'")));
        match s.split_once('/') {
            Some((n, d)) => Coefficient::new(parse(n)?, parse(d)?),
            None => Ok(Coefficient::from_int(parse(s)?)),
        }
    }
}

impl Serialize for Coefficient {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Coefficient {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::String(s) => s.parse().map_err(serde::de::Error::custom),
            serde_json::Value::Number(n) => n.to_string().parse().map_err(serde::de::Error::custom),
            other => Err(serde::de::Error::custom(format!("expected coefficient, got {other}"))),
        }
    }
}

impl Add for &Coefficient {
    type Output = Coefficient;
    fn add(self, o: &Coefficient) -> Coefficient {
        Coefficient(&self.0 + &o.0)
    }
}

impl Sub for &Coefficient {
    type Output = Coefficient;
    fn sub(self, o: &Coefficient) -> Coefficient {
        Coefficient(&self.0 - &o.0)
    }
}

impl Mul for &Coefficient {
    type Output = Coefficient;
    fn mul(self, o: &Coefficient) -> Coefficient {
        Coefficient(&self.0 * &o.0)
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        Coefficient(-&self.0)
    }
}

impl AddAssign<&Coefficient> for Coefficient {
    fn add_assign(&mut self, o: &Coefficient) {
        self.0 += &o.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuation_of_fractions() {
        let c: Coefficient = "12/5".parse().unwrap();
        assert_eq!(c.valuation(2), Some(2));
        assert_eq!(c.valuation(5), Some(-1));
        assert!(c.is_p_integral(2));
        assert!(!c.is_p_integral(5));
        assert_eq!(Coefficient::zero().valuation(3), None);
    }

    #[test]
    fn lowest_terms_and_display() {
        let c: Coefficient = "6/-4".parse().unwrap();
        assert_eq!(c.to_string(), "-3/2");
        assert_eq!(Coefficient::from_int(0).denom(), &BigInt::from(1));
    }
}
