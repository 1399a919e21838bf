use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::universal::universal;
use crate::arith::{is_prime, CommRing};
use crate::{Error, Result};

/// A p-typical Witt vector of length n: coordinates (a_0, …, a_{n-1}).
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct WittVector<R> {
    p: u64,
    coords: Vec<R>,
}

impl<R: CommRing> WittVector<R> {
    pub fn new(p: u64, coords: Vec<R>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if coords.is_empty() {
            return Err(Error::InvalidInput("Witt vectors need length at least 1".into()));
        }
        Ok(WittVector { p, coords })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[R] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<R> {
        self.coords
    }

    pub fn zero(p: u64, n: usize, template: &R) -> Self {
        WittVector { p, coords: vec![template.zero_like(); n] }
    }

    pub fn one(p: u64, n: usize, template: &R) -> Self {
        WittVector::teichmuller(template.one_like(), p, n)
    }

    /// Teichmüller representative [a] = (a, 0, …, 0).
    pub fn teichmuller(a: R, p: u64, n: usize) -> Self {
        let mut coords = vec![a.zero_like(); n];
        coords[0] = a;
        WittVector { p, coords }
    }

    /// The image of an integer k under Z → W_n(R).
    pub fn from_int(p: u64, n: usize, k: &BigInt, template: &R) -> Self {
        let over_z = WittVector::from_ghost(p, &vec![k.clone(); n])
            .expect("integers always have integral Witt coordinates");
        over_z.map(|c| template.int_like(c))
    }

    pub fn map<S, F: Fn(&R) -> S>(&self, f: F) -> WittVector<S> {
        WittVector { p: self.p, coords: self.coords.iter().map(f).collect() }
    }

    /// Ghost components w_k = Σ_{i≤k} p^i a_i^{p^{k-i}} for k < n.
    pub fn ghost(&self) -> Vec<R> {
        let p = BigInt::from(self.p);
        (0..self.len())
            .map(|k| {
                let mut w = self.coords[0].zero_like();
                for i in 0..=k {
                    let t = self.coords[i].pow(self.p.pow((k - i) as u32));
                    w = w.add(&t.scale_int(&p.pow(i as u32)));
                }
                w
            })
            .collect()
    }

    /// Inverts the ghost map; `NotInImage` names the first coordinate whose
    /// inductive quotient by p^k fails to exist in the p-local ring.
    pub fn from_ghost(p: u64, g: &[R]) -> Result<Self> {
        if g.is_empty() {
            return Err(Error::InvalidInput("empty ghost vector".into()));
        }
        let pb = BigInt::from(p);
        let mut coords: Vec<R> = Vec::with_capacity(g.len());
        for (k, gk) in g.iter().enumerate() {
            let mut r = gk.clone();
            for (i, a) in coords.iter().enumerate() {
                let t = a.pow(p.pow((k - i) as u32)).scale_int(&pb.pow(i as u32));
                r = r.sub(&t);
            }
            let a = r
                .try_div_int(&pb.pow(k as u32))
                .filter(|a| a.is_p_integral(p))
                .ok_or(Error::NotInImage { index: k })?;
            coords.push(a);
        }
        WittVector::new(p, coords)
    }

    fn check_shape(&self, o: &Self) -> Result<()> {
        if self.p != o.p || self.len() != o.len() {
            return Err(Error::ShapeMismatch(format!(
                "W_{} over p = {} vs W_{} over p = {}",
                self.len(),
                self.p,
                o.len(),
                o.p
            )));
        }
        Ok(())
    }

    fn joined(&self, o: &Self) -> Vec<R> {
        self.coords.iter().chain(&o.coords).cloned().collect()
    }

    /// Witt sum via the universal sum polynomials.
    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_shape(o)?;
        let u = universal(self.p, self.len())?;
        let inputs = self.joined(o);
        let coords = u.sum.iter().map(|s| s.eval(&inputs, &self.coords[0])).collect();
        Ok(WittVector { p: self.p, coords })
    }

    /// Witt product via the universal product polynomials.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check_shape(o)?;
        let u = universal(self.p, self.len())?;
        let inputs = self.joined(o);
        let coords = u.prod.iter().map(|s| s.eval(&inputs, &self.coords[0])).collect();
        Ok(WittVector { p: self.p, coords })
    }

    pub fn neg(&self) -> Result<Self> {
        let m1 = WittVector::from_int(self.p, self.len(), &-BigInt::one(), &self.coords[0]);
        m1.mul(self)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg()?)
    }

    /// Multiplication by an integer, through its Witt image.
    pub fn scale_int(&self, k: &BigInt) -> Result<Self> {
        WittVector::from_int(self.p, self.len(), k, &self.coords[0]).mul(self)
    }

    /// F: W_n → W_{n-1}, the ghost shift, via the universal Frobenius polynomials.
    pub fn frobenius(&self) -> Result<Self> {
        if self.len() < 2 {
            return Err(Error::ShapeMismatch("Frobenius needs length at least 2".into()));
        }
        let u = universal(self.p, self.len() - 1)?;
        let coords = u.frob.iter().map(|f| f.eval(&self.coords, &self.coords[0])).collect();
        Ok(WittVector { p: self.p, coords })
    }

    /// V: W_n → W_{n+1}, (a_0, a_1, …) ↦ (0, a_0, a_1, …).
    pub fn verschiebung(&self) -> Self {
        let mut coords = Vec::with_capacity(self.len() + 1);
        coords.push(self.coords[0].zero_like());
        coords.extend(self.coords.iter().cloned());
        WittVector { p: self.p, coords }
    }

    /// Restriction W_n → W_m for m ≤ n.
    pub fn truncate(&self, m: usize) -> Self {
        assert!(m >= 1 && m <= self.len(), "truncation length");
        WittVector { p: self.p, coords: self.coords[..m].to_vec() }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(CommRing::is_zero)
    }
}

impl WittVector<BigInt> {
    /// Sum computed by ghost inversion over Z; independent of the universal
    /// polynomials and used to cross-check them.
    pub fn add_via_ghost(&self, o: &Self) -> Result<Self> {
        self.check_shape(o)?;
        let g: Vec<BigInt> = self.ghost().iter().zip(o.ghost()).map(|(a, b)| a + b).collect();
        WittVector::from_ghost(self.p, &g)
    }

    pub fn mul_via_ghost(&self, o: &Self) -> Result<Self> {
        self.check_shape(o)?;
        let g: Vec<BigInt> = self.ghost().iter().zip(o.ghost()).map(|(a, b)| a * b).collect();
        WittVector::from_ghost(self.p, &g)
    }

    pub fn frobenius_via_ghost(&self) -> Result<Self> {
        if self.len() < 2 {
            return Err(Error::ShapeMismatch("Frobenius needs length at least 2".into()));
        }
        WittVector::from_ghost(self.p, &self.ghost()[1..])
    }

    pub fn from_i64s(p: u64, coords: &[i64]) -> Result<Self> {
        WittVector::new(p, coords.iter().map(|&c| BigInt::from(c)).collect())
    }
}

impl<R: fmt::Display> fmt::Display for WittVector<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl<R: fmt::Display> fmt::Debug for WittVector<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W[p={}]{}", self.p, self)
    }
}

pub fn ghost<R: CommRing>(x: &WittVector<R>) -> Vec<R> {
    x.ghost()
}

pub fn from_ghost<R: CommRing>(g: &[R], p: u64) -> Result<WittVector<R>> {
    WittVector::from_ghost(p, g)
}

pub fn witt_add<R: CommRing>(x: &WittVector<R>, y: &WittVector<R>) -> Result<WittVector<R>> {
    x.add(y)
}

pub fn witt_mul<R: CommRing>(x: &WittVector<R>, y: &WittVector<R>) -> Result<WittVector<R>> {
    x.mul(y)
}

pub fn frobenius<R: CommRing>(x: &WittVector<R>) -> Result<WittVector<R>> {
    x.frobenius()
}

pub fn verschiebung<R: CommRing>(x: &WittVector<R>) -> WittVector<R> {
    x.verschiebung()
}

pub fn teichmuller<R: CommRing>(a: R, p: u64, n: usize) -> WittVector<R> {
    WittVector::teichmuller(a, p, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{var_names, Coefficient, MPoly, ZMod};
    use num_traits::Zero;

    fn w(p: u64, c: &[i64]) -> WittVector<BigInt> {
        WittVector::from_i64s(p, c).unwrap()
    }

    fn ints(c: &[i64]) -> Vec<BigInt> {
        c.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn ghost_examples() {
        assert_eq!(w(2, &[3, 5]).ghost(), ints(&[3, 19]));
        assert_eq!(w(5, &[1, 0, 0]).ghost(), ints(&[1, 1, 1]));
        let v = var_names(&["a0", "a1"]);
        let sym = WittVector::new(3, vec![MPoly::var(&v, 0), MPoly::var(&v, 1)]).unwrap();
        let g = sym.ghost();
        assert_eq!(g[1], MPoly::parse(&v, "a0^3 + 3*a1").unwrap());
    }

    #[test]
    fn from_ghost_examples() {
        let g = ints(&[2, 2]);
        assert_eq!(WittVector::from_ghost(2, &g).unwrap(), w(2, &[2, -1]));
        assert_eq!(WittVector::from_ghost(2, &ints(&[1, 2])), Err(Error::NotInImage { index: 1 }));
        let q: Vec<Coefficient> = vec![Coefficient::from_int(1), Coefficient::from_int(2)];
        assert_eq!(WittVector::from_ghost(2, &q), Err(Error::NotInImage { index: 1 }));
        let q: Vec<Coefficient> = vec!["1/3".parse().unwrap(), "7/9".parse().unwrap()];
        let x = WittVector::from_ghost(2, &q).unwrap();
        assert_eq!(x.coords()[1], "1/3".parse::<Coefficient>().unwrap());
    }

    #[test]
    fn sum_of_teichmuller_ones() {
        let one = w(2, &[1, 0]);
        assert_eq!(one.add(&one).unwrap(), w(2, &[2, -1]));
        let z = w(2, &[0, 0]);
        let x = w(2, &[4, -7]);
        assert_eq!(x.add(&z).unwrap(), x);
    }

    #[test]
    fn frobenius_of_v_one() {
        // ghost (0, 2, 2) shifts to (2, 2), which inverts to (2, -1)
        let x = w(2, &[0, 1, 0]);
        assert_eq!(x.frobenius().unwrap(), w(2, &[2, -1]));
        assert_eq!(x.frobenius_via_ghost().unwrap(), w(2, &[2, -1]));
        assert!(w(2, &[1]).frobenius().is_err());
    }

    #[test]
    fn verschiebung_examples() {
        assert_eq!(w(3, &[1, 0]).verschiebung(), w(3, &[0, 1, 0]));
        let x = w(3, &[2, -1]);
        let g = x.ghost();
        let gv = x.verschiebung().ghost();
        assert_eq!(gv, vec![BigInt::zero(), &g[0] * 3, &g[1] * 3]);
    }

    #[test]
    fn teichmuller_multiplicative() {
        let a = WittVector::teichmuller(BigInt::from(4), 3, 3);
        let b = WittVector::teichmuller(BigInt::from(-2), 3, 3);
        assert_eq!(a.mul(&b).unwrap(), WittVector::teichmuller(BigInt::from(-8), 3, 3));
        assert_eq!(a.frobenius().unwrap(), WittVector::teichmuller(BigInt::from(64), 3, 2));
    }

    #[test]
    fn torsion_coefficients_specialize() {
        // W_2(F_2) = Z/4: 1 + 1 = (0, 1) = V(1)
        let m = BigInt::from(2);
        let one = WittVector::teichmuller(ZMod::new(BigInt::one(), m.clone()), 2, 2);
        let two = one.add(&one).unwrap();
        assert_eq!(two.coords()[0], ZMod::new(BigInt::zero(), m.clone()));
        assert_eq!(two.coords()[1], ZMod::new(BigInt::one(), m.clone()));
        let four = two.add(&two).unwrap();
        assert!(four.is_zero());
    }

    #[test]
    fn shape_mismatch() {
        assert!(w(2, &[1, 0]).add(&w(3, &[1, 0])).is_err());
        assert!(w(2, &[1, 0]).mul(&w(2, &[1])).is_err());
    }
}
