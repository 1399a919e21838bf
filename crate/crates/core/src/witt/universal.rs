//! Universal Witt polynomials over Z, generated by ghost inversion.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::CommRing;
use crate::{Error, Result};

const BITS: u32 = 10;
const MAX_VARS: usize = 12;
const MAX_EXP: u64 = (1 << BITS) - 1;

/// Integer polynomial with exponent vectors packed into a `u128`
/// (10 bits per variable, at most 12 variables).
#[derive(Clone, Debug, Default, PartialEq)]
pub(crate) struct IntPoly {
    terms: HashMap<u128, BigInt>,
}

fn exponent(key: u128, var: usize) -> u32 {
    ((key >> (BITS as usize * var)) & MAX_EXP as u128) as u32
}

impl IntPoly {
    fn zero() -> Self {
        IntPoly::default()
    }

    fn constant(c: BigInt) -> Self {
        let mut p = IntPoly::zero();
        if !Zero::is_zero(&c) {
            p.terms.insert(0, c);
        }
        p
    }

    fn var(i: usize) -> Self {
        let mut p = IntPoly::zero();
        p.terms.insert(1u128 << (BITS as usize * i), BigInt::one());
        p
    }

    fn add_term(&mut self, k: u128, c: BigInt) {
        use std::collections::hash_map::Entry;
        match self.terms.entry(k) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if Zero::is_zero(e.get()) {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                if !Zero::is_zero(&c) {
                    e.insert(c);
                }
            }
        }
    }

    fn add_scaled(&mut self, o: &IntPoly, s: &BigInt) {
        for (k, c) in &o.terms {
            self.add_term(*k, c * s);
        }
    }

    fn mul(&self, o: &IntPoly) -> IntPoly {
        let mut out = IntPoly::zero();
        out.terms.reserve(self.terms.len().max(o.terms.len()));
        for (k1, c1) in &self.terms {
            for (k2, c2) in &o.terms {
                out.add_term(k1 + k2, c1 * c2);
            }
        }
        out
    }

    fn pow(&self, mut e: u64) -> IntPoly {
        let mut acc = IntPoly::constant(BigInt::one());
        let mut base = self.clone();
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

    /// Exact division; fails if some coefficient is not divisible.
    fn div_exact(&self, d: &BigInt) -> Option<IntPoly> {
        let mut out = IntPoly::zero();
        for (k, c) in &self.terms {
            let (q, r) = c.div_rem(d);
            if !Zero::is_zero(&r) {
                return None;
            }
            out.terms.insert(*k, q);
        }
        Some(out)
    }

    pub(crate) fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Evaluates at `inputs`, mapping integer coefficients through `template`.
    pub(crate) fn eval<R: CommRing>(&self, inputs: &[R], template: &R) -> R {
        let nvars = inputs.len();
        let zero_vars: Vec<bool> = inputs.iter().map(CommRing::is_zero).collect();
        let mut powers: Vec<HashMap<u32, R>> = vec![HashMap::new(); nvars];
        let mut acc = template.zero_like();
        let mut keys: Vec<&u128> = self.terms.keys().collect();
        keys.sort_unstable();
        'terms: for k in keys {
            let c = &self.terms[k];
            let mut t: Option<R> = None;
            for (v, pw) in powers.iter_mut().enumerate() {
                let e = exponent(*k, v);
                if e == 0 {
                    continue;
                }
                if zero_vars[v] {
                    continue 'terms;
                }
                let x = pw.entry(e).or_insert_with(|| inputs[v].pow(e as u64));
                t = Some(match t {
                    None => x.clone(),
                    Some(t) => t.mul(x),
                });
            }
            let term = match t {
                None => template.int_like(c),
                Some(t) => t.scale_int(c),
            };
            acc = acc.add(&term);
        }
        acc
    }

    /// Coefficient list as `(exponents, coefficient)` in a deterministic order.
    pub(crate) fn sorted_terms(&self, nvars: usize) -> Vec<(Vec<u32>, BigInt)> {
        let mut out: Vec<(Vec<u32>, BigInt)> = self
            .terms
            .iter()
            .map(|(k, c)| ((0..nvars).map(|v| exponent(*k, v)).collect(), c.clone()))
            .collect();
        out.sort();
        out
    }
}

/// Sum, product and Frobenius polynomials for one (p, n).
///
/// Sum and product polynomials use variables a_0..a_{n-1} (indices 0..n)
/// and b_0..b_{n-1} (indices n..2n). Frobenius polynomials use
/// a_0..a_n and produce n coordinates.
#[derive(Debug)]
pub struct UniversalPolys {
    pub(crate) p: u64,
    pub(crate) n: usize,
    pub(crate) sum: Vec<IntPoly>,
    pub(crate) prod: Vec<IntPoly>,
    pub(crate) frob: Vec<IntPoly>,
}

impl UniversalPolys {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Term counts of (sum, product, Frobenius) coordinate polynomials.
    pub fn term_counts(&self) -> Vec<(usize, usize, usize)> {
        (0..self.n)
            .map(|k| (self.sum[k].num_terms(), self.prod[k].num_terms(), self.frob[k].num_terms()))
            .collect()
    }

    /// Integer coefficients of the k-th sum polynomial, sorted by exponent.
    pub fn sum_terms(&self, k: usize) -> Vec<(Vec<u32>, BigInt)> {
        self.sum[k].sorted_terms(2 * self.n)
    }

    pub fn product_terms(&self, k: usize) -> Vec<(Vec<u32>, BigInt)> {
        self.prod[k].sorted_terms(2 * self.n)
    }
}

/// Whether universal polynomials for (p, n) fit the packed representation.
pub fn supported(p: u64, n: usize) -> bool {
    n >= 1 && 2 * n <= MAX_VARS && n < MAX_VARS && p.checked_pow(n as u32).is_some_and(|q| q <= MAX_EXP)
}

fn ghost_poly(p: u64, k: usize, offset: usize) -> IntPoly {
    let mut w = IntPoly::zero();
    for i in 0..=k {
        let e = p.pow((k - i) as u32);
        w.add_scaled(&IntPoly::var(offset + i).pow(e), &BigInt::from(p).pow(i as u32));
    }
    w
}

/// Inverts ghost components `targets[k]` into Witt coordinates.
fn invert(p: u64, targets: Vec<IntPoly>, what: &str) -> Result<Vec<IntPoly>> {
    let pb = BigInt::from(p);
    let mut coords: Vec<IntPoly> = Vec::with_capacity(targets.len());
    // pw[i] = coords[i]^{p^{k-i}} at step k
    let mut pw: Vec<IntPoly> = Vec::new();
    for (k, mut t) in targets.into_iter().enumerate() {
        for (i, q) in pw.iter_mut().enumerate() {
            *q = q.pow(p);
            t.add_scaled(q, &-pb.pow(i as u32));
        }
        let c = t.div_exact(&pb.pow(k as u32)).ok_or_else(|| {
            Error::InvalidInput(format!("{what} polynomial {k} has a non-integral coefficient"))
        })?;
        pw.push(c.clone());
        coords.push(c);
    }
    Ok(coords)
}

fn generate(p: u64, n: usize) -> Result<UniversalPolys> {
    if !supported(p, n) {
        return Err(Error::BudgetExceeded(format!(
            "universal Witt polynomials for p = {p}, n = {n} exceed the packed representation"
        )));
    }
    let sum_t: Vec<IntPoly> = (0..n)
        .map(|k| {
            let mut s = ghost_poly(p, k, 0);
            s.add_scaled(&ghost_poly(p, k, n), &BigInt::one());
            s
        })
        .collect();
    let prod_t: Vec<IntPoly> = (0..n).map(|k| ghost_poly(p, k, 0).mul(&ghost_poly(p, k, n))).collect();
    let frob_t: Vec<IntPoly> = (0..n).map(|k| ghost_poly(p, k + 1, 0)).collect();
    Ok(UniversalPolys {
        p,
        n,
        sum: invert(p, sum_t, "sum")?,
        prod: invert(p, prod_t, "product")?,
        frob: invert(p, frob_t, "Frobenius")?,
    })
}

type Cache = Mutex<HashMap<(u64, usize), Arc<UniversalPolys>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Universal polynomials for (p, n), generated on first use and cached.
pub fn universal(p: u64, n: usize) -> Result<Arc<UniversalPolys>> {
    // Generation runs under the lock so each (p, n) is built exactly once.
    let mut guard = cache().lock().unwrap_or_else(|e| e.into_inner());
    if let Some(u) = guard.get(&(p, n)) {
        return Ok(u.clone());
    }
    let u = Arc::new(generate(p, n)?);
    guard.insert((p, n), u.clone());
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_sum_polynomial_p2() {
        // S_1 = a_1 + b_1 - a_0 b_0 for p = 2
        let u = universal(2, 2).unwrap();
        let want = vec![
            (vec![0, 0, 0, 1], BigInt::one()),
            (vec![0, 1, 0, 0], BigInt::one()),
            (vec![1, 0, 1, 0], BigInt::from(-1)),
        ];
        assert_eq!(u.sum_terms(1), want);
    }

    #[test]
    fn first_frobenius_polynomial() {
        // F_0 = a_0^p + p a_1
        let u = universal(3, 1).unwrap();
        let f = u.frob[0].sorted_terms(2);
        assert_eq!(f, vec![(vec![0, 1], BigInt::from(3)), (vec![3, 0], BigInt::one())]);
    }

    #[test]
    fn unsupported_sizes_are_reported() {
        assert!(matches!(universal(5, 5), Err(Error::BudgetExceeded(_))));
        assert!(supported(5, 4));
        assert!(supported(2, 6));
    }
}
