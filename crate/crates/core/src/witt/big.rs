use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, CommRing, IntMatrix};
use crate::{Error, Result};

/// Truncated big Witt vector 1 + c_1 t + … + c_K t^K.
///
/// The group law is multiplication of series modulo t^{K+1}.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct BigWittVector<R> {
    /// Full coefficient list including the constant term 1.
    series: Vec<R>,
}

fn series_mul<R: CommRing>(a: &[R], b: &[R], len: usize) -> Vec<R> {
    let mut out = vec![a[0].zero_like(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            if !y.is_zero() {
                out[i + j] = out[i + j].add(&x.mul(y));
            }
        }
    }
    out
}

/// Inverse of a series with constant term 1, modulo t^len.
fn series_inv_unit<R: CommRing>(a: &[R], len: usize) -> Vec<R> {
    let mut inv = vec![a[0].zero_like(); len];
    inv[0] = a[0].one_like();
    for n in 1..len {
        let mut s = a[0].zero_like();
        for k in 1..=n.min(a.len() - 1) {
            s = s.add(&a[k].mul(&inv[n - k]));
        }
        inv[n] = s.neg();
    }
    inv
}

impl<R: CommRing> BigWittVector<R> {
    pub fn new(series: Vec<R>) -> Result<Self> {
        if series.len() < 2 {
            return Err(Error::InvalidInput("truncation must be at least 1".into()));
        }
        if series[0] != series[0].one_like() {
            return Err(Error::InvalidInput(format!(
                "big Witt vectors have constant term 1, got {}",
                series[0]
            )));
        }
        Ok(BigWittVector { series })
    }

    /// 1 + c_1 t + … with the given higher coefficients.
    pub fn from_coeffs(coeffs: Vec<R>) -> Result<Self> {
        let first =
            coeffs.first().ok_or_else(|| Error::InvalidInput("truncation must be at least 1".into()))?;
        let mut series = vec![first.one_like()];
        series.extend(coeffs);
        BigWittVector::new(series)
    }

    pub fn one(k: usize, template: &R) -> Self {
        let mut series = vec![template.zero_like(); k + 1];
        series[0] = template.one_like();
        BigWittVector { series }
    }

    pub fn truncation(&self) -> usize {
        self.series.len() - 1
    }

    pub fn series(&self) -> &[R] {
        &self.series
    }

    pub fn is_one(&self) -> bool {
        self.series[1..].iter().all(CommRing::is_zero)
    }

    pub fn truncate(&self, k: usize) -> Self {
        assert!(k >= 1 && k <= self.truncation(), "truncation");
        BigWittVector { series: self.series[..=k].to_vec() }
    }

    /// Big Witt sum: product of series.
    pub fn add(&self, o: &Self) -> Result<Self> {
        if self.truncation() != o.truncation() {
            return Err(Error::ShapeMismatch(format!(
                "truncations {} and {}",
                self.truncation(),
                o.truncation()
            )));
        }
        Ok(BigWittVector { series: series_mul(&self.series, &o.series, self.series.len()) })
    }

    /// Ghost components g_1..g_K defined by −t w'/w = Σ g_n t^n.
    pub fn ghost(&self) -> Vec<R> {
        let len = self.series.len();
        let inv = series_inv_unit(&self.series, len);
        // t w' has coefficient n c_n at t^n
        let tw: Vec<R> = self.series.iter().enumerate().map(|(n, c)| c.scale_int(&BigInt::from(n))).collect();
        series_mul(&tw, &inv, len)[1..].iter().map(CommRing::neg).collect()
    }

    /// Inverse of [`BigWittVector::ghost`]: n c_n = −Σ_{k=1}^n g_k c_{n−k}.
    pub fn from_ghost(g: &[R]) -> Result<Self> {
        let first = g.first().ok_or_else(|| Error::InvalidInput("empty ghost vector".into()))?;
        let mut c = vec![first.one_like()];
        for n in 1..=g.len() {
            let mut s = first.zero_like();
            for k in 1..=n {
                s = s.add(&g[k - 1].mul(&c[n - k]));
            }
            let cn = s.neg().try_div_int(&BigInt::from(n)).ok_or(Error::NotInImage { index: n })?;
            c.push(cn);
        }
        Ok(BigWittVector { series: c })
    }

    /// F_m, acting on ghost components by g_n ↦ g_{mn}; truncation ⌊K/m⌋.
    pub fn frobenius(&self, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("F_m needs m ≥ 1".into()));
        }
        if m == 1 {
            return Ok(self.clone());
        }
        let k = self.truncation() / m;
        if k == 0 {
            return Err(Error::InvalidInput(format!(
                "truncation {} is too short for F_{m}",
                self.truncation()
            )));
        }
        let g = self.ghost();
        let shifted: Vec<R> = (1..=k).map(|n| g[m * n - 1].clone()).collect();
        BigWittVector::from_ghost(&shifted)
    }

    /// V_m(w)(t) = w(t^m), kept at the input truncation.
    pub fn verschiebung(&self, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("V_m needs m ≥ 1".into()));
        }
        let len = self.series.len();
        let mut series = vec![self.series[0].zero_like(); len];
        for (i, c) in self.series.iter().enumerate() {
            if i * m < len {
                series[i * m] = c.clone();
            }
        }
        Ok(BigWittVector { series })
    }

    pub fn map<S, F: Fn(&R) -> S>(&self, f: F) -> BigWittVector<S> {
        BigWittVector { series: self.series.iter().map(f).collect() }
    }
}

impl<R: fmt::Display> fmt::Display for BigWittVector<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "1")?;
        for (i, c) in self.series.iter().enumerate().skip(1) {
            let s = c.to_string();
            if s == "0" {
                continue;
            }
            match s.strip_prefix('-') {
                Some(rest) => write!(f, " - ({rest})*t^{i}")?,
                None => write!(f, " + ({s})*t^{i}")?,
            }
        }
        write!(f, " + O(t^{})", self.series.len())
    }
}

impl<R: fmt::Display> fmt::Debug for BigWittVector<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// det(1 − t·f) modulo t^{K+1} for a square matrix over any commutative ring.
///
/// Gaussian elimination over R[t]/t^{K+1}: every pivot has constant term 1,
/// so no division in R is needed.
pub fn char_poly<R: CommRing>(m: &[Vec<R>], k: usize, template: &R) -> BigWittVector<R> {
    let r = m.len();
    let len = k + 1;
    let zero = template.zero_like();
    let one = template.one_like();
    let mut a: Vec<Vec<Vec<R>>> = (0..r)
        .map(|i| {
            assert_eq!(m[i].len(), r, "characteristic polynomial of a non-square matrix");
            (0..r)
                .map(|j| {
                    let mut s = vec![zero.clone(); len];
                    if i == j {
                        s[0] = one.clone();
                    }
                    if len > 1 {
                        s[1] = m[i][j].neg();
                    }
                    s
                })
                .collect()
        })
        .collect();
    let mut det = vec![zero.clone(); len];
    det[0] = one.clone();
    for piv in 0..r {
        let p = a[piv][piv].clone();
        det = series_mul(&det, &p, len);
        let pinv = series_inv_unit(&p, len);
        let pivot_row = a[piv].clone();
        for row in a.iter_mut().skip(piv + 1) {
            if row[piv].iter().all(CommRing::is_zero) {
                continue;
            }
            let factor = series_mul(&row[piv], &pinv, len);
            for (entry, pj) in row.iter_mut().zip(&pivot_row).skip(piv + 1) {
                let t = series_mul(&factor, pj, len);
                for (x, y) in entry.iter_mut().zip(t) {
                    *x = x.sub(&y);
                }
            }
        }
    }
    if len == 1 {
        det.push(zero);
    }
    BigWittVector { series: det }
}

/// An endomorphism of a free Z-module, through its matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndoClass {
    matrix: IntMatrix,
}

impl EndoClass {
    pub fn new(matrix: IntMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::ShapeMismatch("endomorphisms need a square matrix".into()));
        }
        Ok(EndoClass { matrix })
    }

    pub fn rank(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn direct_sum(&self, o: &EndoClass) -> EndoClass {
        EndoClass { matrix: self.matrix.block_diag(&o.matrix) }
    }

    pub fn power(&self, m: u32) -> EndoClass {
        EndoClass { matrix: self.matrix.pow(m) }
    }
}

/// det(1 − t·f) truncated at t^K, as a big Witt vector over Z.
pub fn char_poly_witt(e: &EndoClass, k: usize) -> BigWittVector<BigInt> {
    char_poly(&e.matrix.to_rows(), k, &BigInt::from(0))
}

pub fn bigwitt_frobenius<R: CommRing>(w: &BigWittVector<R>, m: usize) -> Result<BigWittVector<R>> {
    w.frobenius(m)
}

pub fn bigwitt_verschiebung<R: CommRing>(w: &BigWittVector<R>, m: usize) -> Result<BigWittVector<R>> {
    w.verschiebung(m)
}

/// Whether F_p(w) = 1 for every prime p ≤ bound, at the available truncation.
/// Primes with p > K impose no condition.
pub fn ker_membership<R: CommRing>(w: &BigWittVector<R>, prime_bound: u64) -> Result<bool> {
    for p in (2..=prime_bound).filter(|&p| is_prime(p)) {
        if p as usize > w.truncation() {
            continue;
        }
        if !w.frobenius(p as usize)?.is_one() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{var_names, Coefficient, MPoly};

    fn ints(c: &[i64]) -> Vec<BigInt> {
        c.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn endo(rows: &[Vec<i64>]) -> EndoClass {
        EndoClass::new(IntMatrix::from_rows(rows)).unwrap()
    }

    #[test]
    fn char_poly_examples() {
        let z = char_poly_witt(&endo(&[vec![0, 0], vec![0, 0]]), 4);
        assert!(z.is_one());
        let one = char_poly_witt(&endo(&[vec![1]]), 3);
        assert_eq!(one.series(), ints(&[1, -1, 0, 0]).as_slice());
        let v = var_names(&["a", "b"]);
        let (a, b) = (MPoly::var(&v, 0), MPoly::var(&v, 1));
        let zero = MPoly::zero(&v);
        let diag = vec![vec![a.clone(), zero.clone()], vec![zero.clone(), b.clone()]];
        let cp = char_poly(&diag, 3, &zero);
        let want = MPoly::parse(&v, "a*b").unwrap();
        assert_eq!(cp.series()[1], MPoly::parse(&v, "-a - b").unwrap());
        assert_eq!(cp.series()[2], want);
        assert!(cp.series()[3].is_zero());
    }

    #[test]
    fn char_poly_matches_leibniz_determinant() {
        // det(1 - tA) for a 3x3 integer matrix, expanded by permutations.
        let m = [[2i64, -1, 0], [3, 1, 4], [-2, 5, 1]];
        let perms = [
            ([0, 1, 2], 1i64),
            ([0, 2, 1], -1),
            ([1, 0, 2], -1),
            ([1, 2, 0], 1),
            ([2, 0, 1], 1),
            ([2, 1, 0], -1),
        ];
        let mut want = vec![0i64; 4];
        for (perm, sign) in perms {
            // each factor is (δ_ij − m_ij t): a degree ≤ 1 polynomial
            let mut acc = vec![sign, 0, 0, 0];
            for (i, &j) in perm.iter().enumerate() {
                let f = [(i == j) as i64, -m[i][j]];
                let mut next = vec![0i64; 4];
                for (d, &c) in acc.iter().enumerate() {
                    for (e, &g) in f.iter().enumerate() {
                        if d + e < 4 {
                            next[d + e] += c * g;
                        }
                    }
                }
                acc = next;
            }
            for d in 0..4 {
                want[d] += acc[d];
            }
        }
        let rows: Vec<Vec<i64>> = m.iter().map(|r| r.to_vec()).collect();
        assert_eq!(char_poly_witt(&endo(&rows), 3).series(), ints(&want).as_slice());
    }

    #[test]
    fn frobenius_and_verschiebung() {
        let w = BigWittVector::new(ints(&[1, -1, 0, 0, 0])).unwrap();
        assert_eq!(w.verschiebung(2).unwrap().series(), ints(&[1, 0, -1, 0, 0]).as_slice());
        assert_eq!(w.frobenius(1).unwrap(), w);
        assert_eq!(w.frobenius(2).unwrap().series(), ints(&[1, -1, 0]).as_slice());
        let a = endo(&[vec![3]]);
        let f2 = char_poly_witt(&a, 6).frobenius(2).unwrap();
        assert_eq!(f2, char_poly_witt(&a.power(2), 3));
    }

    #[test]
    fn ghost_is_power_traces() {
        let a = endo(&[vec![1, 2], vec![3, 4]]);
        let g = char_poly_witt(&a, 4).ghost();
        let mut traces = Vec::new();
        for n in 1..=4 {
            let m = a.matrix().pow(n);
            traces.push(m.get(0, 0) + m.get(1, 1));
        }
        assert_eq!(g, traces);
        assert_eq!(BigWittVector::from_ghost(&g).unwrap(), char_poly_witt(&a, 4));
    }

    #[test]
    fn kernel_membership() {
        let one = BigWittVector::one(4, &BigInt::from(0));
        assert!(ker_membership(&one, 3).unwrap());
        let w = BigWittVector::new(ints(&[1, -1, 0, 0, 0])).unwrap();
        assert!(!ker_membership(&w, 3).unwrap());
        // exp(-t): ghost (1, 0, 0, 0)
        let e: Vec<Coefficient> =
            ["1", "-1", "1/2", "-1/6", "1/24"].iter().map(|s| s.parse().unwrap()).collect();
        let e = BigWittVector::new(e).unwrap();
        assert_eq!(e.ghost()[0], Coefficient::one());
        assert!(e.ghost()[1..].iter().all(Coefficient::is_zero));
        assert!(ker_membership(&e, 3).unwrap());
    }
}
