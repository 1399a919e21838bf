use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// Dense integer matrix with arbitrary-precision entries, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

/// `u · a · v = d` with `u`, `v` unimodular and `d` diagonal, `d_i | d_{i+1}`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl Smith {
    /// Nonzero diagonal entries, in order.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols))
            .map(|i| self.d.get(i, i).clone())
            .take_while(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn scalar(n: usize, c: BigInt) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, c.clone());
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> BigInt>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        IntMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        IntMatrix::from_fn(r, c, |i, j| BigInt::from(rows[i][j]))
    }

    pub fn from_big_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Result<Self> {
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch("ragged matrix".into()));
        }
        let r = rows.len();
        Ok(IntMatrix { rows: r, cols, data: rows.into_iter().flatten().collect() })
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Self {
        IntMatrix::from_fn(rows, columns.len(), |i, j| columns[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigInt) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> IntMatrix {
        IntMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, o: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, o.rows, "matrix product shape");
        let mut out = IntMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        out.data[i * o.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        (0..self.rows)
            .map(|i| {
                let mut s = BigInt::zero();
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !x.is_zero() {
                        s += a * x;
                    }
                }
                s
            })
            .collect()
    }

    pub fn add(&self, o: &IntMatrix) -> IntMatrix {
        assert_eq!(self.shape(), o.shape(), "matrix sum shape");
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &IntMatrix) -> IntMatrix {
        assert_eq!(self.shape(), o.shape(), "matrix difference shape");
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> IntMatrix {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn pow(&self, e: u32) -> IntMatrix {
        assert!(self.is_square());
        let mut acc = IntMatrix::identity(self.rows);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn hstack(&self, o: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, o.rows, "hstack rows");
        IntMatrix::from_fn(self.rows, self.cols + o.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                o.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn vstack(&self, o: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, o.cols, "vstack cols");
        let mut data = self.data.clone();
        data.extend(o.data.iter().cloned());
        IntMatrix { rows: self.rows + o.rows, cols: self.cols, data }
    }

    pub fn block_diag(&self, o: &IntMatrix) -> IntMatrix {
        IntMatrix::from_fn(self.rows + o.rows, self.cols + o.cols, |i, j| {
            if i < self.rows && j < self.cols {
                self.get(i, j).clone()
            } else if i >= self.rows && j >= self.cols {
                o.get(i - self.rows, j - self.cols).clone()
            } else {
                BigInt::zero()
            }
        })
    }

    pub fn select_rows(&self, range: std::ops::Range<usize>) -> IntMatrix {
        IntMatrix::from_fn(range.len(), self.cols, |i, j| self.get(range.start + i, j).clone())
    }

    pub fn select_cols(&self, range: std::ops::Range<usize>) -> IntMatrix {
        IntMatrix::from_fn(self.rows, range.len(), |i, j| self.get(i, range.start + j).clone())
    }

    /// Determinant by fraction-free elimination.
    pub fn det(&self) -> BigInt {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                    a[i][j] = v;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_square() && self.det().abs().is_one()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += c * row[src]
    fn add_row(&mut self, dst: usize, src: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let s = self.get(src, j) * c;
            if !s.is_zero() {
                self.data[dst * self.cols + j] += s;
            }
        }
    }

    /// col[dst] += c * col[src]
    fn add_col(&mut self, dst: usize, src: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let s = self.get(i, src) * c;
            if !s.is_zero() {
                self.data[i * self.cols + dst] += s;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }

    /// Smith normal form with unimodular transforms.
    pub fn smith(&self) -> Smith {
        let (m, n) = self.shape();
        let mut a = self.clone();
        let mut u = IntMatrix::identity(m);
        let mut v = IntMatrix::identity(n);
        for t in 0..m.min(n) {
            loop {
                let mut best: Option<(usize, usize)> = None;
                for i in t..m {
                    for j in t..n {
                        let x = a.get(i, j);
                        if x.is_zero() {
                            continue;
                        }
                        if best.is_none_or(|(bi, bj)| x.abs() < a.get(bi, bj).abs()) {
                            best = Some((i, j));
                        }
                    }
                }
                let Some((bi, bj)) = best else {
                    return finish_smith(u, a, v);
                };
                a.swap_rows(t, bi);
                u.swap_rows(t, bi);
                a.swap_cols(t, bj);
                v.swap_cols(t, bj);

                let mut clean = true;
                for i in t + 1..m {
                    if a.get(i, t).is_zero() {
                        continue;
                    }
                    let q = -(a.get(i, t) / a.get(t, t));
                    a.add_row(i, t, &q);
                    u.add_row(i, t, &q);
                    if !a.get(i, t).is_zero() {
                        clean = false;
                    }
                }
                for j in t + 1..n {
                    if a.get(t, j).is_zero() {
                        continue;
                    }
                    let q = -(a.get(t, j) / a.get(t, t));
                    a.add_col(j, t, &q);
                    v.add_col(j, t, &q);
                    if !a.get(t, j).is_zero() {
                        clean = false;
                    }
                }
                if !clean {
                    continue;
                }
                let pivot = a.get(t, t).clone();
                let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| !a.get(i, j).is_multiple_of(&pivot)));
                match offender {
                    Some(i) => {
                        let one = BigInt::one();
                        a.add_row(t, i, &one);
                        u.add_row(t, i, &one);
                    }
                    None => break,
                }
            }
            if a.get(t, t).is_negative() {
                a.negate_row(t);
                u.negate_row(t);
            }
        }
        finish_smith(u, a, v)
    }

    pub fn rank(&self) -> usize {
        self.smith().rank()
    }

    /// Basis (as columns) of the integer kernel.
    pub fn kernel(&self) -> IntMatrix {
        let s = self.smith();
        let r = s.rank();
        s.v.select_cols(r..self.cols)
    }

    /// Exact integer solution of `self · c = b`, if one exists.
    pub fn solve(&self, b: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(b.len(), self.rows, "right-hand side length");
        let s = self.smith();
        let w = s.u.mul_vec(b);
        let r = s.rank();
        let mut y = vec![BigInt::zero(); self.cols];
        for i in 0..self.rows {
            if i < r {
                let d = s.d.get(i, i);
                if !w[i].is_multiple_of(d) {
                    return None;
                }
                y[i] = &w[i] / d;
            } else if !w[i].is_zero() {
                return None;
            }
        }
        Some(s.v.mul_vec(&y))
    }
}

fn finish_smith(u: IntMatrix, d: IntMatrix, v: IntMatrix) -> Smith {
    Smith { u, d, v }
}

/// Canonical Hermite basis of the lattice spanned by the columns of `gens`.
///
/// The result has one column per basis vector; its transpose is in row
/// Hermite normal form (positive pivots, entries above pivots reduced).
pub fn lattice_basis(gens: &IntMatrix) -> IntMatrix {
    let dim = gens.rows();
    let mut rows = gens.transpose().to_rows();
    let mut cur = 0;
    for j in 0..dim {
        loop {
            let mut piv: Option<usize> = None;
            for (i, r) in rows.iter().enumerate().skip(cur) {
                if !r[j].is_zero() && piv.is_none_or(|p| r[j].abs() < rows[p][j].abs()) {
                    piv = Some(i);
                }
            }
            let Some(pi) = piv else { break };
            rows.swap(cur, pi);
            let mut done = true;
            for i in cur + 1..rows.len() {
                if rows[i][j].is_zero() {
                    continue;
                }
                let q = rows[i][j].div_floor(&rows[cur][j]);
                let (head, tail) = rows.split_at_mut(i);
                for (x, y) in tail[0].iter_mut().zip(&head[cur]) {
                    *x -= &q * y;
                }
                if !rows[i][j].is_zero() {
                    done = false;
                }
            }
            if done {
                if rows[cur][j].is_negative() {
                    for x in rows[cur].iter_mut() {
                        *x = -&*x;
                    }
                }
                for i in 0..cur {
                    let q = rows[i][j].div_floor(&rows[cur][j]);
                    if q.is_zero() {
                        continue;
                    }
                    let (head, tail) = rows.split_at_mut(cur);
                    for (x, y) in head[i].iter_mut().zip(&tail[0]) {
                        *x -= &q * y;
                    }
                }
                cur += 1;
                break;
            }
        }
        if cur == rows.len() {
            break;
        }
    }
    rows.truncate(cur);
    IntMatrix::from_columns(dim, &rows)
}

/// Whether `v` lies in the lattice whose Hermite basis is `basis`
/// (as returned by [`lattice_basis`]).
pub fn lattice_contains(basis: &IntMatrix, v: &[BigInt]) -> bool {
    let mut v = v.to_vec();
    for b in basis.columns() {
        let Some(j) = b.iter().position(|x| !x.is_zero()) else { continue };
        if v[..j].iter().any(|x| !x.is_zero()) {
            return false;
        }
        if !v[j].is_multiple_of(&b[j]) {
            return false;
        }
        let q = &v[j] / &b[j];
        for (x, y) in v.iter_mut().zip(&b) {
            *x -= &q * y;
        }
    }
    v.iter().all(Zero::is_zero)
}

/// Whether every column of `sub` lies in the lattice spanned by `sup`.
pub fn lattice_includes(sup: &IntMatrix, sub: &IntMatrix) -> bool {
    let basis = lattice_basis(sup);
    sub.columns().iter().all(|c| lattice_contains(&basis, c))
}

/// Hermite basis of the intersection of two column lattices in Z^n.
pub fn lattice_intersect(gens1: &IntMatrix, gens2: &IntMatrix) -> Result<IntMatrix> {
    if gens1.rows() != gens2.rows() {
        return Err(Error::ShapeMismatch(format!("lattices in Z^{} and Z^{}", gens1.rows(), gens2.rows())));
    }
    let k = gens1.cols();
    let stacked = gens1.hstack(&gens2.scale(&BigInt::from(-1)));
    let ker = stacked.kernel();
    let coeffs = ker.select_rows(0..k);
    Ok(lattice_basis(&gens1.mul(&coeffs)))
}

/// Hermite basis of `{x : a·x ∈ L}` where `L` is spanned by the columns of `target`.
pub fn lattice_preimage(a: &IntMatrix, target: &IntMatrix) -> Result<IntMatrix> {
    if a.rows() != target.rows() {
        return Err(Error::ShapeMismatch("preimage target dimension".into()));
    }
    let n = a.cols();
    if a.rows() == 0 {
        return Ok(IntMatrix::identity(n));
    }
    let stacked = a.hstack(&target.scale(&BigInt::from(-1)));
    let ker = stacked.kernel();
    Ok(lattice_basis(&ker.select_rows(0..n)))
}

/// Order of the finite group Z^n / L as a product of invariant factors,
/// or `None` when L has rank below n.
pub fn lattice_index(basis: &IntMatrix) -> Option<BigInt> {
    let s = basis.smith();
    (s.rank() == basis.rows()).then(|| s.invariant_factors().iter().product())
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Serializes an integer as a JSON number when it fits in 64 bits and as a
/// decimal string otherwise.
pub(crate) fn int_to_json(x: &BigInt) -> serde_json::Value {
    match x.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::String(x.to_string()),
    }
}

pub(crate) fn int_from_json(v: &serde_json::Value) -> std::result::Result<BigInt, String> {
    match v {
        serde_json::Value::Number(n) => n.to_string().parse().map_err(|_| format!("bad integer {n}")),
        serde_json::Value::String(s) => s.parse().map_err(|_| format!("bad integer {s}")),
        other => Err(format!("expected integer, got {other}")),
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<serde_json::Value>> =
            (0..self.rows).map(|i| self.row(i).iter().map(int_to_json).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<serde_json::Value>> = Vec::deserialize(d)?;
        let cols = rows.first().map_or(0, Vec::len);
        let big = rows
            .iter()
            .map(|r| r.iter().map(int_from_json).collect::<std::result::Result<Vec<_>, _>>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        IntMatrix::from_big_rows(big, cols).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn check_smith(a: &IntMatrix) -> Smith {
        let s = a.smith();
        assert_eq!(s.u.mul(a).mul(&s.v), s.d);
        assert!(s.u.is_unimodular() && s.v.is_unimodular());
        let f = s.invariant_factors();
        for w in f.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
        s
    }

    #[test]
    fn smith_examples() {
        let s = check_smith(&IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(s.invariant_factors(), ints(&[1, 6]));
        let s = check_smith(&IntMatrix::identity(3));
        assert_eq!(s.d, IntMatrix::identity(3));
        let s = check_smith(&IntMatrix::from_rows(&[vec![5]]));
        assert_eq!(s.invariant_factors(), ints(&[5]));
        let s = check_smith(&IntMatrix::from_rows(&[vec![0, 0, 0], vec![0, 0, 0]]));
        assert!(s.invariant_factors().is_empty());
    }

    #[test]
    fn determinant_matches_cofactor() {
        let a = IntMatrix::from_rows(&[vec![2, -1, 3], vec![0, 4, 5], vec![1, 1, 1]]);
        // 2(4-5) - (-1)(0-5) + 3(0-4)
        assert_eq!(a.det(), BigInt::from(-19));
        let z = IntMatrix::from_rows(&[vec![0, 1], vec![0, 2]]);
        assert_eq!(z.det(), BigInt::zero());
    }

    #[test]
    fn intersection_examples() {
        let l1 = IntMatrix::from_rows(&[vec![2]]);
        let l2 = IntMatrix::from_rows(&[vec![3]]);
        assert_eq!(lattice_intersect(&l1, &l2).unwrap(), IntMatrix::from_rows(&[vec![6]]));
        assert_eq!(lattice_intersect(&l1, &l1).unwrap(), l1);
        let z2 = IntMatrix::identity(2);
        let pz2 = IntMatrix::scalar(2, BigInt::from(5));
        assert_eq!(lattice_intersect(&z2, &pz2).unwrap(), pz2);
        assert!(lattice_intersect(&z2, &l1).is_err());
    }

    #[test]
    fn hermite_membership() {
        let gens = IntMatrix::from_rows(&[vec![4, 6], vec![0, 2]]);
        let b = lattice_basis(&gens);
        assert!(lattice_contains(&b, &ints(&[2, 2])));
        assert!(lattice_contains(&b, &ints(&[4, 0])));
        assert!(!lattice_contains(&b, &ints(&[2, 0])));
        assert!(!lattice_contains(&b, &ints(&[1, 1])));
    }

    #[test]
    fn solve_and_kernel() {
        let a = IntMatrix::from_rows(&[vec![1, 2, 3], vec![4, 5, 6]]);
        let k = a.kernel();
        assert_eq!(k.cols(), 1);
        assert!(a.mul(&k).is_zero());
        let b = IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(b.solve(&ints(&[4, 9])).unwrap(), ints(&[2, 3]));
        assert!(b.solve(&ints(&[1, 0])).is_none());
    }

    #[test]
    fn preimage_of_sublattice() {
        // {x : 3x ∈ 6Z} = 2Z
        let a = IntMatrix::from_rows(&[vec![3]]);
        let t = IntMatrix::from_rows(&[vec![6]]);
        assert_eq!(lattice_preimage(&a, &t).unwrap(), IntMatrix::from_rows(&[vec![2]]));
    }

    #[test]
    fn json_is_row_major() {
        let a = IntMatrix::from_rows(&[vec![1, 2], vec![3, 4]]);
        assert_eq!(serde_json::to_string(&a).unwrap(), "[[1,2],[3,4]]");
        let back: IntMatrix = serde_json::from_str("[[1,2],[3,\"4\"]]").unwrap();
        assert_eq!(back, a);
    }
}
