//! W_sΩ as the quotient of the saturation of Ω_{Z_(p)[x]}.
//!
//! Ω_{Z_(p)[x]} splits by weight, and the weight-μ piece is the Koszul
//! complex on the basis x^μ dlog x_I (I ⊂ supp μ) with differential
//! Σ_j μ_j dlog x_j ∧ −. The Frobenius x ↦ x^p sends weight μ to pμ and is the
//! identity in these coordinates, so η_p acts weight by weight: the weight-τ
//! piece of the saturation, for τ with denominator p^u, is η_p^u of the
//! weight-p^uτ piece rescaled to the differential of weight τ. The tower is
//! iterated until two consecutive stages give the same lattice N_τ.
//!
//! In these coordinates F is the identity, V = pF^{-1} is multiplication by
//! p, d is the Koszul differential, products are wedge products, and
//! W_sΩ in weight τ is N_τ / (p^s N_{p^sτ} + d(p^s N_{p^sτ})).

use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{lattice_basis, HowellBasis, IntMatrix};
use crate::derham::{index_tuples, merge_sign};
use crate::dieudonne::{eta_p, DieudonneComplex, Precision};
use crate::{Error, Result};

use super::direct::ring;
use super::weight::{Weight, WeightScale};
use super::Key;

#[derive(Clone, Debug)]
pub(crate) struct SaturatedModel {
    pub scale: WeightScale,
    pub vars: Vec<String>,
    pub bounds: Vec<u64>,
    pub iter_cap: usize,
    /// Per weight, per degree: a basis of N_τ in dlog coordinates.
    lattices: RefCell<HashMap<Weight, Vec<IntMatrix>>>,
    /// Number of η_p stages needed per weight, for the report.
    stages: RefCell<HashMap<Weight, usize>>,
}

fn big(x: u64) -> BigInt {
    BigInt::from(x)
}

/// Subsets of the support of size i, as sorted variable indices.
fn subsets(supp: &[usize], i: usize) -> Vec<Vec<usize>> {
    index_tuples(supp.len(), i).into_iter().map(|t| t.into_iter().map(|k| supp[k]).collect()).collect()
}

impl SaturatedModel {
    pub fn new(scale: WeightScale, vars: &[String], bounds: Vec<u64>, iter_cap: usize) -> Self {
        SaturatedModel {
            scale,
            vars: vars.to_vec(),
            bounds,
            iter_cap,
            lattices: RefCell::new(HashMap::new()),
            stages: RefCell::new(HashMap::new()),
        }
    }

    fn p(&self) -> u64 {
        self.scale.p
    }

    pub fn in_range(&self, key: &Key) -> bool {
        let (s, _, w) = key;
        *s >= 1 && *s < self.bounds.len() && self.scale.denominator_exp(w) < *s as u32
    }

    pub fn rank(&self, key: &Key) -> usize {
        if !self.in_range(key) {
            return 0;
        }
        num_integer::binomial(key.2.support().len(), key.1)
    }

    pub fn max_degree(&self, w: &Weight) -> usize {
        w.support().len()
    }

    /// Koszul differential of an integral weight μ, degree i → i + 1, over Z.
    fn koszul(&self, mu: &Weight, i: usize) -> IntMatrix {
        let supp = mu.support();
        let unit = big(self.p()).pow(self.scale.scale);
        let src = subsets(&supp, i);
        let dst = subsets(&supp, i + 1);
        let mut m = IntMatrix::zeros(dst.len(), src.len());
        for (c, set) in src.iter().enumerate() {
            for &j in &supp {
                if let Some((sign, out)) = merge_sign(&[j], set) {
                    let r = dst.iter().position(|t| *t == out).expect("subset of the support");
                    let (q, rem) = big(mu.numerators()[j]).div_rem(&unit);
                    debug_assert!(rem.is_zero(), "Koszul needs an integral weight");
                    m.set(r, c, q * sign);
                }
            }
        }
        m
    }

    /// Rescaled η_p^r of the weight-p^rτ piece: the lattice in degree i is
    /// the product of the successive η_p bases.
    fn stage(&self, tau: &Weight, r: u32) -> Result<Vec<IntMatrix>> {
        let mut mu = tau.clone();
        for _ in 0..r {
            mu = self.scale.times_p(&mu);
        }
        let k = tau.support().len();
        let ranks: Vec<usize> = (0..=k).map(|i| num_integer::binomial(k, i)).collect();
        let d: Vec<IntMatrix> = (0..k).map(|i| self.koszul(&mu, i)).collect();
        // any F with dF = pFd works for η_p; p^{k−i} is the simplest
        let f: Vec<IntMatrix> =
            (0..=k).map(|i| IntMatrix::scalar(ranks[i], big(self.p()).pow((k - i) as u32))).collect();
        let mut m = DieudonneComplex::new(self.p(), 0, ranks.clone(), d, f, Precision::Exact)?;
        let mut acc: Vec<IntMatrix> = ranks.iter().map(|&n| IntMatrix::identity(n)).collect();
        for _ in 0..r {
            let e = eta_p(&m)?;
            acc = acc.iter().zip(&e.basis).map(|(a, b)| a.mul(b)).collect();
            m = e.complex;
        }
        Ok(acc)
    }

    /// N_τ per degree, computed by iterating the tower until it stabilizes.
    pub fn lattice(&self, tau: &Weight) -> Result<Vec<IntMatrix>> {
        if let Some(l) = self.lattices.borrow().get(tau) {
            return Ok(l.clone());
        }
        let r0 = self.scale.denominator_exp(tau);
        let mut cur = self.stage(tau, r0)?;
        let mut iterations = 0;
        loop {
            if iterations >= self.iter_cap {
                return Err(Error::IterationLimit { iterations });
            }
            iterations += 1;
            let next = self.stage(tau, r0 + iterations as u32)?;
            let same = cur.iter().zip(&next).all(|(a, b)| lattice_basis(a) == lattice_basis(b));
            if same {
                break;
            }
            cur = next;
        }
        self.stages.borrow_mut().insert(tau.clone(), r0 as usize + iterations);
        self.lattices.borrow_mut().insert(tau.clone(), cur.clone());
        Ok(cur)
    }

    pub fn stages(&self) -> HashMap<Weight, usize> {
        self.stages.borrow().clone()
    }

    fn basis(&self, w: &Weight, i: usize) -> IntMatrix {
        self.lattice(w).expect("lattices are computed before use")[i].clone()
    }

    /// Coordinates of a dlog vector (divided by `den`) in the basis of N_w.
    fn coords(&self, key: &Key, v: &[BigInt], den: &BigInt) -> Vec<u64> {
        let (s, i, w) = key;
        let r = ring(self.p(), *s);
        let x = self.basis(w, *i).solve(v).expect("image lies in the saturated lattice");
        x.iter()
            .map(|c| {
                let (q, rem) = c.div_rem(den);
                assert!(rem.is_zero(), "image lies in the saturated lattice");
                r.from_big(&q)
            })
            .collect()
    }

    fn dlog(&self, key: &Key, v: &[u64]) -> Vec<BigInt> {
        let (s, i, w) = key;
        let r = ring(self.p(), *s);
        let x: Vec<BigInt> = v.iter().map(|&c| BigInt::from(r.signed(c))).collect();
        self.basis(w, *i).mul_vec(&x)
    }

    pub fn names(&self, key: &Key) -> Vec<String> {
        let (_, i, w) = key;
        let supp = w.support();
        let sets = subsets(&supp, *i);
        let b = self.basis(w, *i);
        let mono: Vec<String> = supp
            .iter()
            .map(|&j| {
                format!(
                    "{}^{}",
                    self.vars[j],
                    self.scale.display(&self.scale.from_numerators(
                        (0..self.scale.vars).map(|k| if k == j { w.numerators()[j] } else { 0 }).collect()
                    ))
                )
            })
            .collect();
        let prefix = if mono.is_empty() { String::new() } else { mono.join(" ") };
        (0..b.cols())
            .map(|c| {
                let terms: Vec<String> = sets
                    .iter()
                    .enumerate()
                    .filter(|(r, _)| !b.get(*r, c).is_zero())
                    .map(|(r, set)| {
                        let dl: Vec<String> = set.iter().map(|&j| format!("dlog {}", self.vars[j])).collect();
                        let coef = b.get(r, c);
                        let body = if dl.is_empty() { String::new() } else { dl.join("∧") };
                        match (coef.is_one(), body.is_empty()) {
                            (true, true) => "1".to_string(),
                            (true, false) => body,
                            (false, true) => coef.to_string(),
                            (false, false) => format!("{coef}·{body}"),
                        }
                    })
                    .collect();
                let inner = terms.join(" + ");
                if prefix.is_empty() {
                    inner
                } else {
                    format!("{prefix}·({inner})")
                }
            })
            .collect()
    }

    pub fn d(&self, key: &Key, v: &[u64]) -> Vec<u64> {
        let (s, i, w) = key.clone();
        let dst = (s, i + 1, w.clone());
        if self.rank(&dst) == 0 {
            return vec![0; self.rank(&dst)];
        }
        let u = self.scale.denominator_exp(&w);
        let mut mu = w.clone();
        for _ in 0..u {
            mu = self.scale.times_p(&mu);
        }
        let img = self.koszul(&mu, i).mul_vec(&self.dlog(key, v));
        self.coords(&dst, &img, &big(self.p()).pow(u))
    }

    pub fn f(&self, key: &Key, v: &[u64]) -> Vec<u64> {
        let (s, i, w) = key.clone();
        if s == 1 {
            return Vec::new();
        }
        let dst = (s - 1, i, self.scale.times_p(&w));
        self.coords(&dst, &self.dlog(key, v), &BigInt::one())
    }

    pub fn v(&self, key: &Key, v: &[u64]) -> Vec<u64> {
        let (s, i, w) = key.clone();
        let dst = (s + 1, i, self.scale.div_p(&w).expect("weight resolution covers V"));
        let img: Vec<BigInt> = self.dlog(key, v).into_iter().map(|c| c * self.p()).collect();
        // lift to level s + 1: the coordinates are only defined mod p^s, and p·lift is defined mod p^{s+1}
        self.coords(&dst, &img, &BigInt::one())
    }

    pub fn mul(&self, a: (&Key, &[u64]), b: (&Key, &[u64])) -> Vec<u64> {
        let (s, i, wa) = a.0.clone();
        let (_, j, wb) = b.0.clone();
        let w = wa.add(&wb);
        let dst = (s, i + j, w.clone());
        if self.rank(&dst) == 0 {
            return vec![0; self.rank(&dst)];
        }
        let (xa, xb) = (self.dlog(a.0, a.1), self.dlog(b.0, b.1));
        let sa = subsets(&wa.support(), i);
        let sb = subsets(&wb.support(), j);
        let sd = subsets(&w.support(), i + j);
        let mut out = vec![BigInt::zero(); sd.len()];
        for (ka, ia) in sa.iter().enumerate() {
            for (kb, ib) in sb.iter().enumerate() {
                if xa[ka].is_zero() || xb[kb].is_zero() {
                    continue;
                }
                if let Some((sign, set)) = merge_sign(ia, ib) {
                    let r = sd.iter().position(|t| *t == set).expect("supports add up");
                    out[r] += &xa[ka] * &xb[kb] * sign;
                }
            }
        }
        self.coords(&dst, &out, &BigInt::one())
    }

    pub fn teichmuller(&self, s: usize, m: &Weight) -> Vec<u64> {
        let key = (s, 0, m.clone());
        self.coords(&key, &[BigInt::one()], &BigInt::one())
    }

    /// Coordinates of a dlog vector at (s, i, w), for the route comparison.
    pub fn coords_of(&self, key: &Key, v: &[BigInt]) -> Vec<u64> {
        self.coords(key, v, &BigInt::one())
    }

    /// p^s N_{p^sτ} + d(p^s N^{i−1}_{p^sτ}) in the coordinates of N_τ.
    pub fn relations(&self) -> Result<HashMap<Key, HowellBasis>> {
        let mut rel = HashMap::new();
        for s in 1..self.bounds.len() {
            let r = ring(self.p(), s);
            for tau in self.scale.enumerate(s as u32 - 1, self.bounds[s]) {
                let mut top = tau.clone();
                for _ in 0..s {
                    top = self.scale.times_p(&top);
                }
                let nt = self.lattice(&tau)?;
                let nb = self.lattice(&top)?;
                let ps = big(self.p()).pow(s as u32);
                for i in 0..=self.max_degree(&tau) {
                    let key = (s, i, tau.clone());
                    let mut h = HowellBasis::new(r, nt[i].cols());
                    let mut gens: Vec<Vec<BigInt>> = nb[i]
                        .columns()
                        .into_iter()
                        .map(|c| c.into_iter().map(|x| x * &ps).collect())
                        .collect();
                    if i > 0 {
                        // d_τ(p^s y) = d_{p^sτ}(y) in dlog coordinates
                        gens.extend(self.koszul(&top, i - 1).mul(&nb[i - 1]).columns());
                    }
                    for g in gens {
                        let x = nt[i].solve(&g).expect("relations lie in N_τ");
                        let v: Vec<u64> = x.iter().map(|c| r.from_big(c)).collect();
                        if v.iter().any(|&c| c != 0) {
                            h.insert(v);
                        }
                    }
                    rel.insert(key, h);
                }
            }
        }
        Ok(rel)
    }
}
