use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::matrix::IntMatrix;

/// The ring Z/p^n. Elements are `u64` in `[0, p^n)`; p^n must fit in 62 bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimePower {
    p: u64,
    n: u32,
    q: u64,
}

impl PrimePower {
    pub fn new(p: u64, n: u32) -> Self {
        assert!(p >= 2, "p must be at least 2");
        let q = p.checked_pow(n).filter(|&q| q < (1 << 62)).expect("p^n too large");
        PrimePower { p, n, q }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Exponent n of the modulus p^n.
    pub fn exponent(&self) -> u32 {
        self.n
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn from_i64(&self, x: i64) -> u64 {
        x.rem_euclid(self.q as i64) as u64
    }

    pub fn from_big(&self, x: &BigInt) -> u64 {
        x.mod_floor(&BigInt::from(self.q)).to_u64().expect("residue fits")
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.q as u128) as u64
    }

    /// p^k reduced mod p^n (zero once k ≥ n).
    pub fn p_pow(&self, k: u32) -> u64 {
        if k >= self.n {
            0
        } else {
            self.p.pow(k)
        }
    }

    /// p-adic valuation, `n` for zero.
    pub fn val(&self, mut a: u64) -> u32 {
        if a == 0 {
            return self.n;
        }
        let mut v = 0;
        while a.is_multiple_of(self.p) {
            a /= self.p;
            v += 1;
        }
        v
    }

    /// Inverse of a unit.
    pub fn inv(&self, u: u64) -> u64 {
        let e = (u as i128).extended_gcd(&(self.q as i128));
        assert_eq!(e.gcd, 1, "{u} is not a unit mod {}", self.q);
        e.x.rem_euclid(self.q as i128) as u64
    }

    /// Writes `a = p^v · u` with u a unit; `a` must be nonzero.
    pub fn split(&self, a: u64) -> (u32, u64) {
        let v = self.val(a);
        (v, a / self.p.pow(v))
    }

    /// Symmetric representative in `(-q/2, q/2]`.
    pub fn signed(&self, a: u64) -> i64 {
        if a > self.q / 2 {
            a as i64 - self.q as i64
        } else {
            a as i64
        }
    }
}

/// Dense matrix over Z/p^n.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ModMatrix {
    ring: PrimePower,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl ModMatrix {
    pub fn zeros(ring: PrimePower, rows: usize, cols: usize) -> Self {
        ModMatrix { ring, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(ring: PrimePower, n: usize) -> Self {
        let mut m = ModMatrix::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_int(ring: PrimePower, a: &IntMatrix) -> Self {
        let mut m = ModMatrix::zeros(ring, a.rows(), a.cols());
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                m.set(i, j, ring.from_big(a.get(i, j)));
            }
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> u64>(
        ring: PrimePower,
        rows: usize,
        cols: usize,
        mut f: F,
    ) -> Self {
        let mut m = ModMatrix::zeros(ring, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                let x = f(i, j) % ring.q;
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn ring(&self) -> PrimePower {
        self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: u64) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> ModMatrix {
        ModMatrix::from_fn(self.ring, self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn mul(&self, o: &ModMatrix) -> ModMatrix {
        assert_eq!(self.cols, o.rows, "matrix product shape");
        let r = self.ring;
        let mut out = ModMatrix::zeros(r, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b != 0 {
                        let idx = i * o.cols + j;
                        out.data[idx] = r.add(out.data[idx], r.mul(a, b));
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        let r = self.ring;
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(0, |acc, (&a, &b)| r.add(acc, r.mul(a, b))))
            .collect()
    }

    pub fn add(&self, o: &ModMatrix) -> ModMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "matrix sum shape");
        let r = self.ring;
        ModMatrix {
            ring: r,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(&a, &b)| r.add(a, b)).collect(),
        }
    }

    pub fn sub(&self, o: &ModMatrix) -> ModMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "matrix difference shape");
        let r = self.ring;
        ModMatrix {
            ring: r,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(&a, &b)| r.sub(a, b)).collect(),
        }
    }

    pub fn scale(&self, c: u64) -> ModMatrix {
        let r = self.ring;
        ModMatrix {
            ring: r,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| r.mul(a, c)).collect(),
        }
    }

    /// Smith form data: valuations `v_i < n` of the nonzero diagonal entries
    /// (ascending) and a unimodular column transform `V` such that the
    /// columns `r..` of `A·V` vanish and column `i < r` of `A·V` is
    /// `p^{v_i}` times a column that is part of a basis.
    pub fn smith(&self) -> ModSmith {
        let r = self.ring;
        let (m, n) = (self.rows, self.cols);
        let mut a = self.clone();
        let mut v = ModMatrix::identity(r, n);
        let mut vals = Vec::new();
        for t in 0..m.min(n) {
            let mut best: Option<(usize, usize, u32)> = None;
            for i in t..m {
                for j in t..n {
                    let x = a.get(i, j);
                    if x != 0 {
                        let w = r.val(x);
                        if best.is_none_or(|b| w < b.2) {
                            best = Some((i, j, w));
                        }
                    }
                }
            }
            let Some((bi, bj, w)) = best else { break };
            a.swap_rows(t, bi);
            a.swap_cols(t, bj);
            v.swap_cols(t, bj);
            let (_, unit) = r.split(a.get(t, t));
            let ui = r.inv(unit);
            a.scale_row(t, ui);
            let piv = r.p_pow(w);
            for i in t + 1..m {
                let x = a.get(i, t);
                if x != 0 {
                    let f = r.neg(x / piv);
                    a.add_row(i, t, f);
                }
            }
            for j in t + 1..n {
                let x = a.get(t, j);
                if x != 0 {
                    let f = r.neg(x / piv);
                    a.add_col(j, t, f);
                    v.add_col(j, t, f);
                }
            }
            vals.push(w);
        }
        ModSmith { vals, v }
    }

    /// Number of solutions of `A x = 0`, as a power of p.
    pub fn kernel_log_size(&self) -> u64 {
        let s = self.smith();
        let n = self.ring.n as u64;
        s.vals.iter().map(|&v| v as u64).sum::<u64>() + n * (self.cols - s.vals.len()) as u64
    }

    /// Generators (as columns) of the solution module of `A x = 0`.
    pub fn kernel(&self) -> ModMatrix {
        let r = self.ring;
        let s = self.smith();
        let rank = s.vals.len();
        let mut gens = Vec::new();
        for (i, &w) in s.vals.iter().enumerate() {
            if w > 0 {
                let f = r.p_pow(r.n - w);
                gens.push(s.v.col(i).iter().map(|&x| r.mul(x, f)).collect::<Vec<_>>());
            }
        }
        for i in rank..self.cols {
            gens.push(s.v.col(i));
        }
        ModMatrix::from_fn(r, self.cols, gens.len(), |i, j| gens[j][i])
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    fn scale_row(&mut self, i: usize, c: u64) {
        for j in 0..self.cols {
            let x = self.ring.mul(self.get(i, j), c);
            self.set(i, j, x);
        }
    }

    fn add_row(&mut self, dst: usize, src: usize, c: u64) {
        for j in 0..self.cols {
            let x = self.ring.add(self.get(dst, j), self.ring.mul(self.get(src, j), c));
            self.set(dst, j, x);
        }
    }

    fn add_col(&mut self, dst: usize, src: usize, c: u64) {
        for i in 0..self.rows {
            let x = self.ring.add(self.get(i, dst), self.ring.mul(self.get(i, src), c));
            self.set(i, dst, x);
        }
    }
}

impl fmt::Debug for ModMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "mod {} [", self.ring.q)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

#[derive(Clone, Debug)]
pub struct ModSmith {
    pub vals: Vec<u32>,
    pub v: ModMatrix,
}

/// A submodule of (Z/p^n)^dim kept in Howell form.
///
/// Rows are in echelon form with pivot entries p^v, and for every column j
/// the rows with pivot column ≥ j span the vectors of the submodule that
/// vanish before j. This makes [`HowellBasis::reduce`] a canonical normal
/// form for the quotient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HowellBasis {
    ring: PrimePower,
    dim: usize,
    rows: Vec<HowellRow>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct HowellRow {
    col: usize,
    val: u32,
    vec: Vec<u64>,
}

impl HowellBasis {
    pub fn new(ring: PrimePower, dim: usize) -> Self {
        HowellBasis { ring, dim, rows: Vec::new() }
    }

    pub fn from_generators<'a, I: IntoIterator<Item = &'a [u64]>>(
        ring: PrimePower,
        dim: usize,
        gens: I,
    ) -> Self {
        let mut h = HowellBasis::new(ring, dim);
        for g in gens {
            h.insert(g.to_vec());
        }
        h
    }

    pub fn ring(&self) -> PrimePower {
        self.ring
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u64]> {
        self.rows.iter().map(|r| r.vec.as_slice())
    }

    /// Adds a generator; returns whether the submodule grew.
    pub fn insert(&mut self, x: Vec<u64>) -> bool {
        assert_eq!(x.len(), self.dim, "vector length");
        let r = self.ring;
        let mut changed = false;
        let mut pending = vec![x];
        while let Some(mut x) = pending.pop() {
            while let Some(j) = x.iter().position(|&c| c != 0) {
                let (w, unit) = r.split(x[j]);
                match self.rows.binary_search_by_key(&j, |row| row.col) {
                    Ok(idx) => {
                        let row = &self.rows[idx];
                        if w >= row.val {
                            let f = r.neg(x[j] / r.p_pow(row.val));
                            axpy(r, &mut x, f, &row.vec);
                        } else {
                            let ui = r.inv(unit);
                            for c in x.iter_mut() {
                                *c = r.mul(*c, ui);
                            }
                            pending.push(scaled(r, &x, r.p_pow(r.n - w)));
                            let old =
                                std::mem::replace(&mut self.rows[idx], HowellRow { col: j, val: w, vec: x });
                            changed = true;
                            x = old.vec;
                        }
                    }
                    Err(pos) => {
                        let ui = r.inv(unit);
                        for c in x.iter_mut() {
                            *c = r.mul(*c, ui);
                        }
                        pending.push(scaled(r, &x, r.p_pow(r.n - w)));
                        self.rows.insert(pos, HowellRow { col: j, val: w, vec: x });
                        changed = true;
                        break;
                    }
                }
            }
        }
        changed
    }

    /// Canonical representative of the class of `x` modulo the submodule.
    pub fn reduce(&self, x: &[u64]) -> Vec<u64> {
        let r = self.ring;
        let mut x = x.iter().map(|&c| c % r.q).collect::<Vec<_>>();
        for row in &self.rows {
            let piv = r.p_pow(row.val);
            let f = x[row.col] / piv;
            if f != 0 {
                // entries before the pivot are zero
                axpy(r, &mut x[row.col..], r.neg(f), &row.vec[row.col..]);
            }
        }
        x
    }

    /// Back-reduces every row against the rows below it, so that entries in
    /// pivot columns are smaller than the pivot. Keeps the submodule, the
    /// pivots and the Howell property; makes reduction of sparse vectors cheap.
    pub fn normalize(&mut self) {
        let r = self.ring;
        for i in (0..self.rows.len()).rev() {
            let (head, tail) = self.rows.split_at_mut(i + 1);
            let x = &mut head[i].vec;
            for row in tail.iter() {
                let f = x[row.col] / r.p_pow(row.val);
                if f != 0 {
                    axpy(r, &mut x[row.col..], r.neg(f), &row.vec[row.col..]);
                }
            }
        }
    }

    pub fn contains(&self, x: &[u64]) -> bool {
        self.reduce(x).iter().all(|&c| c == 0)
    }

    /// log_p of the number of elements of the submodule.
    pub fn log_size(&self) -> u64 {
        self.rows.iter().map(|row| (self.ring.n - row.val) as u64).sum()
    }

    /// Exponents e (ascending, all ≥ 1) with quotient ≅ ⊕ Z/p^e.
    pub fn quotient_invariants(&self) -> Vec<u32> {
        let r = self.ring;
        let m = ModMatrix::from_fn(r, self.rows.len(), self.dim, |i, j| self.rows[i].vec[j]);
        let vals = if self.rows.is_empty() { Vec::new() } else { m.smith().vals };
        let mut out: Vec<u32> = vals.iter().filter(|&&v| v > 0).copied().collect();
        out.extend(std::iter::repeat_n(r.n, self.dim - vals.len()));
        out.retain(|&e| e > 0);
        out.sort_unstable();
        out
    }

    /// log_p of the order of the quotient.
    pub fn quotient_log_size(&self) -> u64 {
        self.ring.n as u64 * self.dim as u64 - self.log_size()
    }
}

fn axpy(r: PrimePower, x: &mut [u64], f: u64, y: &[u64]) {
    for (a, &b) in x.iter_mut().zip(y) {
        if b != 0 {
            *a = r.add(*a, r.mul(f, b));
        }
    }
}

fn scaled(r: PrimePower, x: &[u64], f: u64) -> Vec<u64> {
    x.iter().map(|&c| r.mul(c, f)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_span(r: PrimePower, dim: usize, gens: &[Vec<u64>]) -> std::collections::BTreeSet<Vec<u64>> {
        let mut span = std::collections::BTreeSet::new();
        span.insert(vec![0; dim]);
        loop {
            let mut next = span.clone();
            for s in &span {
                for g in gens {
                    let mut t = s.clone();
                    axpy(r, &mut t, 1, g);
                    next.insert(t);
                }
            }
            if next.len() == span.len() {
                return span;
            }
            span = next;
        }
    }

    #[test]
    fn ring_basics() {
        let r = PrimePower::new(3, 2);
        assert_eq!(r.modulus(), 9);
        assert_eq!(r.val(0), 2);
        assert_eq!(r.val(6), 1);
        assert_eq!(r.mul(r.inv(2), 2), 1);
        assert_eq!(r.signed(8), -1);
    }

    #[test]
    fn kernel_of_scalar() {
        let r = PrimePower::new(2, 2);
        let a = ModMatrix::from_fn(r, 1, 1, |_, _| 2);
        assert_eq!(a.kernel_log_size(), 1);
        let k = a.kernel();
        assert!(a.mul(&k).is_zero());
    }

    proptest! {
        #[test]
        fn howell_matches_brute_force(
            p in prop::sample::select(vec![2u64, 3]),
            gens in prop::collection::vec(prop::collection::vec(0u64..9, 3), 0..4),
        ) {
            let r = PrimePower::new(p, 2);
            let gens: Vec<Vec<u64>> = gens.into_iter().map(|g| g.into_iter().map(|c| c % r.modulus()).collect()).collect();
            let h = HowellBasis::from_generators(r, 3, gens.iter().map(Vec::as_slice));
            let span = brute_span(r, 3, &gens);
            prop_assert_eq!(span.len() as u64, r.p().pow(h.log_size() as u32));
            for s in &span {
                prop_assert!(h.contains(s));
            }
            // canonical reduction: translates by span elements reduce identically
            let probe = vec![1, 2 % r.modulus(), 0];
            let base = h.reduce(&probe);
            for s in &span {
                let mut t = probe.clone();
                axpy(r, &mut t, 1, s);
                prop_assert_eq!(h.reduce(&t), base.clone());
            }
            let q: u64 = h.quotient_invariants().iter().map(|&e| e as u64).sum();
            prop_assert_eq!(q, h.quotient_log_size());
            // back-reduction keeps the normal form
            let mut hn = h.clone();
            hn.normalize();
            prop_assert_eq!(hn.log_size(), h.log_size());
            for x0 in 0..r.modulus() { for x1 in 0..r.modulus() {
                let x = [x0, x1, 1];
                prop_assert_eq!(hn.reduce(&x), h.reduce(&x));
            }}
        }

        #[test]
        fn kernel_count_matches_brute_force(
            entries in prop::collection::vec(0u64..4, 6),
        ) {
            let r = PrimePower::new(2, 2);
            let a = ModMatrix::from_fn(r, 2, 3, |i, j| entries[i * 3 + j]);
            let mut count = 0u64;
            for x0 in 0..4 { for x1 in 0..4 { for x2 in 0..4 {
                if a.mul_vec(&[x0, x1, x2]).iter().all(|&c| c == 0) { count += 1; }
            }}}
            prop_assert_eq!(count, 2u64.pow(a.kernel_log_size() as u32));
            let k = a.kernel();
            prop_assert!(a.mul(&k).is_zero());
            let kb = HowellBasis::from_generators(r, 3, (0..k.cols()).map(|j| k.col(j)).collect::<Vec<_>>().iter().map(Vec::as_slice));
            prop_assert_eq!(kb.log_size(), a.kernel_log_size());
        }
    }
}
