use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::coeff::Coefficient;
use super::poly::MPoly;
use crate::{Error, Result};

/// Operations every coefficient ring of a Witt vector or power series needs.
///
/// Constructors take `&self` as a template so that context (variable lists,
/// moduli) travels with the values.
pub trait CommRing: Clone + PartialEq + fmt::Debug + fmt::Display {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn int_like(&self, n: &BigInt) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;

    /// Exact division by an integer, `None` when the quotient does not exist
    /// (not divisible, or division is ambiguous because of torsion).
    fn try_div_int(&self, n: &BigInt) -> Option<Self>;

    fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    fn scale_int(&self, n: &BigInt) -> Self {
        self.mul(&self.int_like(n))
    }

    /// Whether the element lies in the p-local subring (always true for
    /// rings without denominators).
    fn is_p_integral(&self, _p: u64) -> bool {
        true
    }
}

impl CommRing for BigInt {
    fn zero_like(&self) -> Self {
        BigInt::zero()
    }
    fn one_like(&self) -> Self {
        BigInt::one()
    }
    fn int_like(&self, n: &BigInt) -> Self {
        n.clone()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn try_div_int(&self, n: &BigInt) -> Option<Self> {
        if Zero::is_zero(n) {
            return None;
        }
        let (q, r) = self.div_rem(n);
        Zero::is_zero(&r).then_some(q)
    }
}

impl CommRing for Coefficient {
    fn zero_like(&self) -> Self {
        Coefficient::zero()
    }
    fn one_like(&self) -> Self {
        Coefficient::one()
    }
    fn int_like(&self, n: &BigInt) -> Self {
        Coefficient::from_int(n.clone())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Coefficient::is_zero(self)
    }
    fn try_div_int(&self, n: &BigInt) -> Option<Self> {
        (!Zero::is_zero(n)).then(|| self.div_int(n))
    }
    fn is_p_integral(&self, p: u64) -> bool {
        Coefficient::is_p_integral(self, p)
    }
}

impl CommRing for MPoly {
    fn zero_like(&self) -> Self {
        MPoly::zero(self.vars())
    }
    fn one_like(&self) -> Self {
        MPoly::one(self.vars())
    }
    fn int_like(&self, n: &BigInt) -> Self {
        MPoly::constant(self.vars(), Coefficient::from_int(n.clone()))
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        MPoly::is_zero(self)
    }
    fn try_div_int(&self, n: &BigInt) -> Option<Self> {
        (!Zero::is_zero(n)).then(|| self.div_int(n))
    }
    fn is_p_integral(&self, p: u64) -> bool {
        MPoly::is_p_integral(self, p)
    }
}

/// Residue class modulo a positive integer.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ZMod {
    value: BigInt,
    modulus: BigInt,
}

impl ZMod {
    pub fn new(value: BigInt, modulus: BigInt) -> Self {
        assert!(modulus.is_positive(), "modulus must be positive");
        ZMod { value: value.mod_floor(&modulus), modulus }
    }

    pub fn value(&self) -> &BigInt {
        &self.value
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }
}

impl fmt::Display for ZMod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Debug for ZMod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus)
    }
}

impl CommRing for ZMod {
    fn zero_like(&self) -> Self {
        ZMod::new(BigInt::zero(), self.modulus.clone())
    }
    fn one_like(&self) -> Self {
        ZMod::new(BigInt::one(), self.modulus.clone())
    }
    fn int_like(&self, n: &BigInt) -> Self {
        ZMod::new(n.clone(), self.modulus.clone())
    }
    fn add(&self, o: &Self) -> Self {
        ZMod::new(&self.value + &o.value, self.modulus.clone())
    }
    fn sub(&self, o: &Self) -> Self {
        ZMod::new(&self.value - &o.value, self.modulus.clone())
    }
    fn mul(&self, o: &Self) -> Self {
        ZMod::new(&self.value * &o.value, self.modulus.clone())
    }
    fn neg(&self) -> Self {
        ZMod::new(-&self.value, self.modulus.clone())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.value)
    }
    fn try_div_int(&self, n: &BigInt) -> Option<Self> {
        let g = n.extended_gcd(&self.modulus);
        if !g.gcd.is_one() {
            return None;
        }
        Some(self.mul(&self.int_like(&g.x)))
    }
}

/// A ring homomorphism between polynomial rings, given by generator images.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RingMap {
    source: Vec<String>,
    target: Vec<String>,
    images: Vec<MPoly>,
}

impl RingMap {
    pub fn new(source: &[String], target: &[String], images: Vec<MPoly>) -> Result<Self> {
        if images.len() != source.len() {
            return Err(Error::ArityMismatch { expected: source.len(), found: images.len() });
        }
        for im in &images {
            if im.vars() != target {
                return Err(Error::InvalidInput(format!("image {im} is not in the target ring {target:?}")));
            }
        }
        Ok(RingMap { source: source.to_vec(), target: target.to_vec(), images })
    }

    pub fn identity(vars: &[String]) -> Self {
        let images = (0..vars.len()).map(|i| MPoly::var(vars, i)).collect();
        RingMap { source: vars.to_vec(), target: vars.to_vec(), images }
    }

    /// Parses images written as polynomials in the target variables.
    pub fn parse(source: &[String], target: &[String], images: &[&str]) -> Result<Self> {
        let images = images.iter().map(|s| MPoly::parse(target, s)).collect::<Result<Vec<_>>>()?;
        RingMap::new(source, target, images)
    }

    pub fn source(&self) -> &[String] {
        &self.source
    }

    pub fn target(&self) -> &[String] {
        &self.target
    }

    pub fn images(&self) -> &[MPoly] {
        &self.images
    }

    pub fn image(&self, i: usize) -> &MPoly {
        &self.images[i]
    }

    /// Simultaneous substitution of the generator images into `q`.
    pub fn apply(&self, q: &MPoly) -> Result<MPoly> {
        if q.vars() != self.source.as_slice() {
            return Err(Error::ArityMismatch { expected: self.source.len(), found: q.arity() });
        }
        let mut powers: HashMap<(usize, u32), MPoly> = HashMap::new();
        let mut out = MPoly::zero(&self.target);
        for (m, c) in q.terms() {
            let mut t = MPoly::constant(&self.target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let pw = powers.entry((i, e)).or_insert_with(|| self.images[i].pow(e)).clone();
                t = &t * &pw;
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &RingMap) -> Result<RingMap> {
        if other.target != self.source {
            return Err(Error::ArityMismatch { expected: self.source.len(), found: other.target.len() });
        }
        let images = other.images.iter().map(|q| self.apply(q)).collect::<Result<Vec<_>>>()?;
        RingMap::new(&other.source, &self.target, images)
    }
}

/// Free-function form of [`RingMap::apply`].
pub fn apply_map(f: &RingMap, q: &MPoly) -> Result<MPoly> {
    f.apply(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::poly::var_names;

    #[test]
    fn apply_map_examples() {
        let v = var_names(&["x"]);
        let q = MPoly::parse(&v, "x^2 + 1").unwrap();
        assert_eq!(apply_map(&RingMap::identity(&v), &q).unwrap(), q);

        let sq = RingMap::parse(&v, &v, &["x^2"]).unwrap();
        let lin = MPoly::parse(&v, "x + 1").unwrap();
        assert_eq!(sq.apply(&lin).unwrap(), q);

        let lift = RingMap::parse(&v, &v, &["x^2 + 2*x"]).unwrap();
        let want = MPoly::parse(&v, "(x^2 + 2*x)^2").unwrap();
        assert_eq!(lift.apply(&MPoly::parse(&v, "x^2").unwrap()).unwrap(), want);
        assert_eq!(want.to_string(), "x^4 + 4*x^3 + 4*x^2");
    }

    #[test]
    fn apply_map_arity_mismatch() {
        let v = var_names(&["x"]);
        let w = var_names(&["x", "y"]);
        let f = RingMap::identity(&v);
        let q = MPoly::parse(&w, "x*y").unwrap();
        assert!(matches!(f.apply(&q), Err(Error::ArityMismatch { .. })));
        assert!(RingMap::parse(&v, &v, &["x", "x"]).is_err());
    }

    #[test]
    fn zmod_division_by_units_only() {
        let a = ZMod::new(BigInt::from(3), BigInt::from(9));
        assert!(a.try_div_int(&BigInt::from(3)).is_none());
        let h = a.try_div_int(&BigInt::from(2)).unwrap();
        assert_eq!(h.mul(&h.int_like(&BigInt::from(2))), a);
    }
}
