//! W_sΩ as a quotient of Ω_{W_s(R)}.
//!
//! In weight κ the ring W_s(F_p[x]) is cyclic of order p^{s−u(κ)}, generated
//! by g_κ = V^u[x^{p^u κ}] where u = u(κ) is the p-exponent of the
//! denominator of κ. Products are g_κ g_λ = p^{u(κ)+u(λ)−u(κ+λ)} g_{κ+λ}.
//! Forms are Z-combinations of symbols g_κ dg_λ1 ∧ … ∧ dg_λi with the λ's
//! nonzero and strictly increasing.

use std::collections::HashMap;

use crate::arith::{HowellBasis, PrimePower};
use crate::{Error, Result};

use super::weight::{Weight, WeightScale};
use super::Key;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub(crate) struct Sym {
    pub k: Weight,
    pub l: Vec<Weight>,
}

/// A linear combination of symbols with coefficients in Z/p^s.
type Lin = Vec<(u64, Sym)>;

#[derive(Clone, Debug, Default)]
struct Comp {
    syms: Vec<Sym>,
    index: HashMap<Sym, usize>,
}

#[derive(Clone, Debug)]
pub(crate) struct DirectModel {
    pub scale: WeightScale,
    pub vars: Vec<String>,
    /// Bound on total weight numerators, indexed by level.
    pub bounds: Vec<u64>,
    comps: HashMap<Key, Comp>,
}

pub(crate) fn ring(p: u64, s: usize) -> PrimePower {
    PrimePower::new(p, s.max(1) as u32)
}

/// Sorts `l` and returns the sign of the permutation, or None on a repeat.
fn sort_sign(mut l: Vec<Weight>) -> Option<(bool, Vec<Weight>)> {
    let mut neg = false;
    for i in 1..l.len() {
        let mut j = i;
        while j > 0 && l[j - 1] > l[j] {
            l.swap(j - 1, j);
            neg = !neg;
            j -= 1;
        }
    }
    if l.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((neg, l))
}

impl DirectModel {
    pub fn p(&self) -> u64 {
        self.scale.p
    }

    fn u(&self, w: &Weight) -> u32 {
        self.scale.denominator_exp(w)
    }

    /// Symbols of every component up to the level bounds.
    pub fn build(scale: WeightScale, vars: &[String], bounds: Vec<u64>, budget: usize) -> Result<Self> {
        let mut comps: HashMap<Key, Comp> = HashMap::new();
        let mut total = 0usize;
        for (s, &bound) in bounds.iter().enumerate().skip(1) {
            let u = s as u32 - 1;
            for tau in scale.enumerate(u, bound) {
                let cands: Vec<Weight> = scale.below(&tau, u).into_iter().filter(|w| !w.is_zero()).collect();
                let mut out: Vec<Sym> = Vec::new();
                fn rec(c: &[Weight], start: usize, left: &Weight, cur: &mut Vec<Weight>, out: &mut Vec<Sym>) {
                    out.push(Sym { k: left.clone(), l: cur.clone() });
                    for i in start..c.len() {
                        if let Some(rest) = left.sub(&c[i]) {
                            cur.push(c[i].clone());
                            rec(c, i + 1, &rest, cur, out);
                            cur.pop();
                        }
                    }
                }
                rec(&cands, 0, &tau, &mut Vec::new(), &mut out);
                total += out.len();
                if total > budget {
                    return Err(Error::SpanOverflow { size: total, budget });
                }
                for sym in out {
                    let c = comps.entry((s, sym.l.len(), tau.clone())).or_default();
                    c.index.insert(sym.clone(), c.syms.len());
                    c.syms.push(sym);
                }
            }
        }
        Ok(DirectModel { scale, vars: vars.to_vec(), bounds, comps })
    }

    pub fn rank(&self, key: &Key) -> usize {
        self.comps.get(key).map_or(0, |c| c.syms.len())
    }

    pub fn max_degree(&self, s: usize, w: &Weight) -> usize {
        (0..).take_while(|&i| self.rank(&(s, i, w.clone())) > 0).last().unwrap_or(0)
    }

    fn witt_name(&self, w: &Weight) -> String {
        let u = self.u(w);
        let m = self.scale.monomial(w);
        let mono: Vec<String> = m
            .iter()
            .zip(&self.vars)
            .filter(|(&e, _)| e > 0)
            .map(|(&e, v)| if e == 1 { v.clone() } else { format!("{v}^{e}") })
            .collect();
        let t = if mono.is_empty() { "[1]".to_string() } else { format!("[{}]", mono.join(" ")) };
        match u {
            0 => t,
            1 => format!("V{t}"),
            _ => format!("V^{u}{t}"),
        }
    }

    pub fn symbols(&self, key: &Key) -> &[Sym] {
        self.comps.get(key).map_or(&[], |c| c.syms.as_slice())
    }

    pub fn names(&self, key: &Key) -> Vec<String> {
        let Some(c) = self.comps.get(key) else { return Vec::new() };
        c.syms
            .iter()
            .map(|s| {
                let mut parts = Vec::new();
                if !s.k.is_zero() || s.l.is_empty() {
                    parts.push(self.witt_name(&s.k));
                }
                let ds: Vec<String> = s.l.iter().map(|w| format!("d{}", self.witt_name(w))).collect();
                if !ds.is_empty() {
                    parts.push(ds.join("∧"));
                }
                parts.join("·")
            })
            .collect()
    }

    /// The symbol with this data at level s, with its sign, or None when it
    /// vanishes (a repeated or zero slot, or a weight with u ≥ s).
    fn canon(&self, s: usize, k: Weight, l: Vec<Weight>) -> Option<(bool, Sym)> {
        let lim = s as u32;
        if self.u(&k) >= lim || l.iter().any(|w| w.is_zero() || self.u(w) >= lim) {
            return None;
        }
        let (neg, l) = sort_sign(l)?;
        Some((neg, Sym { k, l }))
    }

    fn push(&self, s: usize, out: &mut Lin, c: u64, k: Weight, l: Vec<Weight>) {
        let r = ring(self.p(), s);
        if c.is_multiple_of(r.modulus()) {
            return;
        }
        if let Some((neg, sym)) = self.canon(s, k, l) {
            out.push((if neg { r.neg(c % r.modulus()) } else { c % r.modulus() }, sym));
        }
    }

    /// p^{u(a)+u(b)−u(a+b)}, reduced at level s.
    fn structure(&self, s: usize, a: &Weight, b: &Weight) -> u64 {
        let e = self.u(a) + self.u(b) - self.u(&a.add(b));
        ring(self.p(), s).p_pow(e)
    }

    fn mul_sym(&self, s: usize, a: &Sym, b: &Sym) -> Lin {
        let mut out = Vec::new();
        let c = self.structure(s, &a.k, &b.k);
        let l = a.l.iter().chain(&b.l).cloned().collect();
        self.push(s, &mut out, c, a.k.add(&b.k), l);
        out
    }

    fn d_sym(&self, s: usize, a: &Sym) -> Lin {
        let mut out = Vec::new();
        if !a.k.is_zero() {
            let l = std::iter::once(a.k.clone()).chain(a.l.iter().cloned()).collect();
            self.push(s, &mut out, 1, self.scale.zero(), l);
        }
        out
    }

    /// V(g_κ dg_λ1 …) = V(g_κ) dV(g_λ1) …, level s → s + 1.
    fn v_sym(&self, s: usize, a: &Sym) -> Lin {
        let sc = &self.scale;
        let e = |w: &Weight| {
            let q = sc.div_p(w).expect("weight resolution covers V");
            (self.u(w) + 1 - self.u(&q), q)
        };
        let (mut total, k) = e(&a.k);
        let mut l = Vec::new();
        for w in &a.l {
            let (x, q) = e(w);
            total += x;
            l.push(q);
        }
        let mut out = Vec::new();
        self.push(s + 1, &mut out, ring(self.p(), s + 1).p_pow(total), k, l);
        out
    }

    /// F: level s + 1 → s, multiplicative with F(g_κ) = p^{[u>0]} g_{pκ},
    /// F(d[x^m]) = [x^m]^{p−1} d[x^m] and F(dV y) = dy.
    fn f_sym(&self, s: usize, a: &Sym) -> Lin {
        let sc = &self.scale;
        let r = ring(self.p(), s);
        let mut acc: Lin = Vec::new();
        let c = if self.u(&a.k) > 0 { r.p_pow(1) } else { 1 };
        self.push(s, &mut acc, c, sc.times_p(&a.k), Vec::new());
        for w in &a.l {
            let factor = if self.u(w) == 0 {
                Sym {
                    k: sc.from_numerators(w.numerators().iter().map(|x| x * (sc.p - 1)).collect()),
                    l: vec![w.clone()],
                }
            } else {
                Sym { k: sc.zero(), l: vec![sc.times_p(w)] }
            };
            let mut next = Vec::new();
            for (c, sym) in &acc {
                for (c2, t) in self.mul_sym(s, sym, &factor) {
                    next.push((r.mul(*c, c2), t));
                }
            }
            acc = next;
        }
        acc
    }

    pub fn lin_of(&self, key: &Key, v: &[u64]) -> Lin {
        let c = &self.comps[key];
        v.iter().enumerate().filter(|(_, &x)| x != 0).map(|(i, &x)| (x, c.syms[i].clone())).collect()
    }

    pub fn vec_of(&self, key: &Key, lin: &Lin) -> Vec<u64> {
        let r = ring(self.p(), key.0);
        let mut v = vec![0u64; self.rank(key)];
        if v.is_empty() {
            return v;
        }
        let c = &self.comps[key];
        for (x, sym) in lin {
            let i = *c.index.get(sym).unwrap_or_else(|| panic!("symbol {sym:?} outside component {key:?}"));
            v[i] = r.add(v[i], *x);
        }
        v
    }

    fn apply<F: Fn(&Sym) -> Lin>(&self, src: &Key, dst: &Key, v: &[u64], f: F) -> Vec<u64> {
        if self.rank(src) == 0 {
            return vec![0; self.rank(dst)];
        }
        let r = ring(self.p(), dst.0);
        let mut lin = Vec::new();
        for (x, sym) in self.lin_of(src, v) {
            for (y, t) in f(&sym) {
                lin.push((r.mul(x % r.modulus(), y), t));
            }
        }
        self.vec_of(dst, &lin)
    }

    pub fn d(&self, key: &Key, v: &[u64]) -> Vec<u64> {
        let (s, i, w) = key.clone();
        self.apply(key, &(s, i + 1, w), v, |a| self.d_sym(s, a))
    }

    pub fn v(&self, key: &Key, v: &[u64]) -> Vec<u64> {
        let (s, i, w) = key.clone();
        let dst = (s + 1, i, self.scale.div_p(&w).expect("weight resolution covers V"));
        self.apply(key, &dst, v, |a| self.v_sym(s, a))
    }

    pub fn f(&self, key: &Key, v: &[u64]) -> Vec<u64> {
        let (s, i, w) = key.clone();
        let dst = (s - 1, i, self.scale.times_p(&w));
        if s == 1 {
            return Vec::new();
        }
        self.apply(key, &dst, v, |a| self.f_sym(s - 1, a))
    }

    pub fn mul(&self, a: (&Key, &[u64]), b: (&Key, &[u64])) -> Vec<u64> {
        let (s, i, w) = a.0.clone();
        let dst = (s, i + b.0 .1, w.add(&b.0 .2));
        let r = ring(self.p(), s);
        let mut lin = Vec::new();
        if self.rank(a.0) > 0 && self.rank(b.0) > 0 {
            for (x, sa) in self.lin_of(a.0, a.1) {
                for (y, sb) in self.lin_of(b.0, b.1) {
                    for (z, t) in self.mul_sym(s, &sa, &sb) {
                        lin.push((r.mul(r.mul(x, y), z), t));
                    }
                }
            }
        }
        self.vec_of(&dst, &lin)
    }

    pub fn teichmuller(&self, s: usize, m: &Weight) -> Vec<u64> {
        let key = (s, 0, m.clone());
        let mut lin = Vec::new();
        self.push(s, &mut lin, 1, m.clone(), Vec::new());
        self.vec_of(&key, &lin)
    }

    /// The relation module of every component: Ω_{W_s(R)} (orders of the
    /// g's and the Leibniz rule), V of the level s − 1 relations, and
    /// d[x]·V(y) = V([x]^{p−1}d[x]·y), closed under d and under products with
    /// g_ν and dg_ν.
    pub fn relations(&self) -> HashMap<Key, HowellBasis> {
        let p = self.p();
        let sc = &self.scale;
        let mut rel: HashMap<Key, HowellBasis> = HashMap::new();
        for s in 1..self.bounds.len() {
            let r = ring(p, s);
            let u = s as u32 - 1;
            let weights = sc.enumerate(u, self.bounds[s]);
            for tau in &weights {
                for i in 0..=self.max_degree(s, tau) {
                    let key = (s, i, tau.clone());
                    let dim = self.rank(&key);
                    let mut h = HowellBasis::new(r, dim);
                    let add = |lin: Lin, h: &mut HowellBasis| {
                        let v = self.vec_of(&key, &lin);
                        if v.iter().any(|&x| x != 0) {
                            h.insert(v);
                        }
                    };
                    for sym in self.comps.get(&key).map(|c| c.syms.clone()).unwrap_or_default() {
                        // orders of g_κ and dg_λ
                        for w in std::iter::once(&sym.k).chain(&sym.l) {
                            add(vec![(r.p_pow(s as u32 - self.u(w)), sym.clone())], &mut h);
                        }
                        // Leibniz in each slot
                        for (t, lam) in sym.l.iter().enumerate() {
                            for a in sc.below(lam, u) {
                                let Some(b) = lam.sub(&a) else { continue };
                                if a.is_zero() || b.is_zero() || a > b {
                                    continue;
                                }
                                let mut lin = vec![(self.structure(s, &a, &b), sym.clone())];
                                for (x, y) in [(&a, &b), (&b, &a)] {
                                    let mut l = sym.l.clone();
                                    l[t] = y.clone();
                                    let mut part = Vec::new();
                                    self.push(s, &mut part, self.structure(s, &sym.k, x), sym.k.add(x), l);
                                    lin.extend(part.into_iter().map(|(c, t)| (r.neg(c), t)));
                                }
                                add(lin, &mut h);
                            }
                        }
                    }
                    if s > 1 {
                        let below = (s - 1, i, sc.times_p(tau));
                        if let Some(prev) = rel.get(&below) {
                            let rows: Vec<Vec<u64>> = prev.rows().map(|x| x.to_vec()).collect();
                            for row in rows {
                                let lin: Lin = self
                                    .lin_of(&below, &row)
                                    .into_iter()
                                    .flat_map(|(x, a)| {
                                        self.v_sym(s - 1, &a).into_iter().map(move |(y, t)| (x * y, t))
                                    })
                                    .map(|(c, t)| (c % r.modulus(), t))
                                    .collect();
                                add(lin, &mut h);
                            }
                        }
                        // d[x^m]·V(y) = V([x^m]^{p−1} d[x^m] y) for y of degree i − 1
                        if i >= 1 {
                            for m in sc.below(tau, 0) {
                                if m.is_zero() {
                                    continue;
                                }
                                let rest = tau.sub(&m).expect("m ≤ τ");
                                let ykey = (s - 1, i - 1, sc.times_p(&rest));
                                let Some(yc) = self.comps.get(&ykey) else { continue };
                                let dx = Sym { k: sc.zero(), l: vec![m.clone()] };
                                let pm =
                                    sc.from_numerators(m.numerators().iter().map(|x| x * (p - 1)).collect());
                                let fdx = Sym { k: pm, l: vec![m.clone()] };
                                for y in &yc.syms {
                                    let mut lin = Vec::new();
                                    for (c, vy) in self.v_sym(s - 1, y) {
                                        lin.extend(
                                            self.mul_sym(s, &dx, &vy)
                                                .into_iter()
                                                .map(|(x, t)| (r.mul(c, x), t)),
                                        );
                                    }
                                    for (c, z) in self.mul_sym(s - 1, &fdx, y) {
                                        for (x, t) in self.v_sym(s - 1, &z) {
                                            lin.push((r.neg(r.mul(c % r.modulus(), x)), t));
                                        }
                                    }
                                    add(lin, &mut h);
                                }
                            }
                        }
                    }
                    // ideal closure from lower weights
                    for nu in sc.below(tau, u) {
                        if nu.is_zero() {
                            continue;
                        }
                        let kappa = tau.sub(&nu).expect("ν ≤ τ");
                        let g = Sym { k: nu.clone(), l: Vec::new() };
                        let dg = Sym { k: sc.zero(), l: vec![nu.clone()] };
                        for (deg, factor) in [(i, &g), (i.wrapping_sub(1), &dg)] {
                            let src = (s, deg, kappa.clone());
                            if let Some(prev) = rel.get(&src) {
                                let rows: Vec<Vec<u64>> = prev.rows().map(|x| x.to_vec()).collect();
                                for row in rows {
                                    let v = self.apply(&src, &key, &row, |a| self.mul_sym(s, a, factor));
                                    if v.iter().any(|&x| x != 0) {
                                        h.insert(v);
                                    }
                                }
                            }
                        }
                    }
                    // d of the relations one degree down
                    if i >= 1 {
                        let src = (s, i - 1, tau.clone());
                        if let Some(prev) = rel.get(&src) {
                            let rows: Vec<Vec<u64>> = prev.rows().map(|x| x.to_vec()).collect();
                            for row in rows {
                                let v = self.d(&src, &row);
                                if v.iter().any(|&x| x != 0) {
                                    h.insert(v);
                                }
                            }
                        }
                    }
                    rel.insert(key, h);
                }
            }
        }
        rel
    }

    /// A second closure pass: d and products with g_ν, dg_ν of every
    /// relation stay inside the relation module wherever the target lies
    /// within the bounds. Returns the first offending component.
    pub fn closure_defect(&self, rel: &HashMap<Key, HowellBasis>) -> Option<Key> {
        let sc = &self.scale;
        for (key, h) in rel {
            let (s, i, tau) = key.clone();
            let rows: Vec<Vec<u64>> = h.rows().map(|x| x.to_vec()).collect();
            let dkey = (s, i + 1, tau.clone());
            for row in &rows {
                let v = self.d(key, row);
                if !v.is_empty() && !rel.get(&dkey).map_or(v.iter().all(|&x| x == 0), |h| h.contains(&v)) {
                    return Some(key.clone());
                }
            }
            for nu in sc.below(&sc.from_numerators(vec![self.bounds[s]; sc.vars]), s as u32 - 1) {
                if nu.is_zero() {
                    continue;
                }
                let target = tau.add(&nu);
                if sc.total(&target) > self.bounds[s] {
                    continue;
                }
                let g = Sym { k: nu.clone(), l: Vec::new() };
                let dg = Sym { k: sc.zero(), l: vec![nu.clone()] };
                for (deg, factor) in [(i, &g), (i + 1, &dg)] {
                    let dst = (s, deg, target.clone());
                    for row in &rows {
                        let v = self.apply(key, &dst, row, |a| self.mul_sym(s, a, factor));
                        if !v.is_empty()
                            && !rel.get(&dst).map_or(v.iter().all(|&x| x == 0), |h| h.contains(&v))
                        {
                            return Some(key.clone());
                        }
                    }
                }
            }
        }
        None
    }
}
