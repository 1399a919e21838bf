use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, IntMatrix};
use crate::report::CheckReport;
use crate::{Error, Result, SCHEMA_VERSION};

/// Whether matrix entries are exact integers or residues modulo p^N.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    Exact,
    Mod(u32),
}

/// A bounded cochain complex of free modules with an endomorphism F.
///
/// Degree n lives at index n − lo. `d[k]` maps degree lo+k to lo+k+1 and
/// `f[k]` is F on degree lo+k; matrices act on column vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DieudonneComplex {
    p: u64,
    lo: i64,
    ranks: Vec<usize>,
    d: Vec<IntMatrix>,
    f: Vec<IntMatrix>,
    precision: Precision,
}

#[derive(Serialize, Deserialize)]
struct ComplexJson {
    schema_version: u32,
    p: u64,
    degrees: [i64; 2],
    ranks: Vec<usize>,
    d: Vec<IntMatrix>,
    #[serde(rename = "F")]
    f: Vec<IntMatrix>,
    precision: Precision,
}

/// Entrywise equality, modulo p^N when the precision is finite.
pub(crate) fn matrices_agree(a: &IntMatrix, b: &IntMatrix, prec: Precision, p: u64) -> bool {
    let diff = a.sub(b);
    match prec {
        Precision::Exact => diff.is_zero(),
        Precision::Mod(n) => {
            let m = BigInt::from(p).pow(n);
            diff.to_rows().iter().flatten().all(|x| x.is_multiple_of(&m))
        }
    }
}

fn first_difference(a: &IntMatrix, b: &IntMatrix, prec: Precision, p: u64) -> Option<(usize, usize)> {
    let m = match prec {
        Precision::Exact => None,
        Precision::Mod(n) => Some(BigInt::from(p).pow(n)),
    };
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let x = a.get(i, j) - b.get(i, j);
            let zero = match &m {
                None => x.is_zero(),
                Some(m) => x.is_multiple_of(m),
            };
            if !zero {
                return Some((i, j));
            }
        }
    }
    None
}

impl DieudonneComplex {
    /// Validates shapes; does not check dF = pFd (see [`check_dieudonne`]).
    pub fn new(
        p: u64,
        lo: i64,
        ranks: Vec<usize>,
        d: Vec<IntMatrix>,
        f: Vec<IntMatrix>,
        precision: Precision,
    ) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if let Precision::Mod(0) = precision {
            return Err(Error::InvalidInput("precision mod p^0".into()));
        }
        let len = ranks.len();
        if f.len() != len || d.len() != len.saturating_sub(1) {
            return Err(Error::ShapeMismatch(format!(
                "{len} degrees need {len} F matrices and {} differentials",
                len.saturating_sub(1)
            )));
        }
        let mut d = d;
        for (k, m) in d.iter_mut().enumerate() {
            // an empty JSON matrix loses its shape
            if m.rows() * m.cols() == 0 && ranks[k + 1] * ranks[k] == 0 {
                *m = IntMatrix::zeros(ranks[k + 1], ranks[k]);
            }
            if m.shape() != (ranks[k + 1], ranks[k]) {
                return Err(Error::ShapeMismatch(format!(
                    "d in degree {} has shape {:?}, expected {:?}",
                    lo + k as i64,
                    m.shape(),
                    (ranks[k + 1], ranks[k])
                )));
            }
        }
        let mut f = f;
        for (k, m) in f.iter_mut().enumerate() {
            if m.rows() * m.cols() == 0 && ranks[k] == 0 {
                *m = IntMatrix::zeros(0, 0);
            }
            if m.shape() != (ranks[k], ranks[k]) {
                return Err(Error::ShapeMismatch(format!(
                    "F in degree {} has shape {:?}",
                    lo + k as i64,
                    m.shape()
                )));
            }
        }
        Ok(DieudonneComplex { p, lo, ranks, d, f, precision })
    }

    pub fn zero(p: u64) -> Self {
        DieudonneComplex { p, lo: 0, ranks: vec![], d: vec![], f: vec![], precision: Precision::Exact }
    }

    /// Shorthand for small exact examples with i64 entries.
    pub fn from_i64(
        p: u64,
        lo: i64,
        ranks: &[usize],
        d: &[Vec<Vec<i64>>],
        f: &[Vec<Vec<i64>>],
    ) -> Result<Self> {
        let d = d.iter().map(|m| IntMatrix::from_rows(m)).collect();
        let f = f.iter().map(|m| IntMatrix::from_rows(m)).collect();
        DieudonneComplex::new(p, lo, ranks.to_vec(), d, f, Precision::Exact)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    pub fn with_precision(&self, precision: Precision) -> Self {
        DieudonneComplex { precision, ..self.clone() }
    }

    /// Lowest degree of the support interval.
    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Highest degree of the support interval (lo − 1 when empty).
    pub fn hi(&self) -> i64 {
        self.lo + self.ranks.len() as i64 - 1
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi()
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.iter().sum()
    }

    fn index(&self, n: i64) -> Option<usize> {
        (n >= self.lo && n <= self.hi()).then(|| (n - self.lo) as usize)
    }

    pub fn rank(&self, n: i64) -> usize {
        self.index(n).map_or(0, |k| self.ranks[k])
    }

    /// The differential out of degree n, zero outside the support.
    pub fn d(&self, n: i64) -> IntMatrix {
        match self.index(n) {
            Some(k) if k < self.d.len() => self.d[k].clone(),
            _ => IntMatrix::zeros(self.rank(n + 1), self.rank(n)),
        }
    }

    pub fn f(&self, n: i64) -> IntMatrix {
        match self.index(n) {
            Some(k) => self.f[k].clone(),
            None => IntMatrix::zeros(0, 0),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let doc = ComplexJson {
            schema_version: SCHEMA_VERSION,
            p: self.p,
            degrees: [self.lo, self.hi()],
            ranks: self.ranks.clone(),
            d: self.d.clone(),
            f: self.f.clone(),
            precision: self.precision,
        };
        serde_json::to_value(doc).expect("complex serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let doc: ComplexJson = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        if doc.degrees[1] - doc.degrees[0] + 1 != doc.ranks.len() as i64 {
            return Err(Error::ShapeMismatch("degree range and ranks disagree".into()));
        }
        DieudonneComplex::new(doc.p, doc.degrees[0], doc.ranks, doc.d, doc.f, doc.precision)
    }
}

/// Checks d∘d = 0 and d∘F = p·F∘d in every degree, exactly or mod p^N.
pub fn check_dieudonne(m: &DieudonneComplex) -> CheckReport {
    let mut rep = CheckReport::new("Dieudonné complex");
    let p = BigInt::from(m.p);
    for n in m.degrees() {
        let dd = m.d(n + 1).mul(&m.d(n));
        let zero = IntMatrix::zeros(dd.rows(), dd.cols());
        let bad = first_difference(&dd, &zero, m.precision, m.p);
        rep.check(
            "d^2 = 0",
            bad.is_none(),
            || format!("degree {n} entry {:?}", bad.unwrap()),
            || format!("d∘d = {dd}"),
        );
        let lhs = m.d(n).mul(&m.f(n));
        let rhs = m.f(n + 1).mul(&m.d(n)).scale(&p);
        let bad = first_difference(&lhs, &rhs, m.precision, m.p);
        rep.check(
            "dF = pFd",
            bad.is_none(),
            || format!("degree {n} entry {:?}", bad.unwrap()),
            || format!("dF = {lhs}, pFd = {rhs}"),
        );
    }
    rep
}

/// The finitely presented module Z^g / (column span of `relations`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PresentedModule {
    pub generators: usize,
    pub relations: IntMatrix,
    /// Invariant factors other than 1, ascending; 0 marks a free summand.
    pub invariant_factors: Vec<BigInt>,
}

impl PresentedModule {
    pub fn new(generators: usize, relations: IntMatrix) -> Self {
        assert_eq!(relations.rows(), generators, "relations live in Z^g");
        let s = relations.smith();
        let mut inv: Vec<BigInt> = s.invariant_factors().into_iter().filter(|x| !x.is_one()).collect();
        inv.extend(std::iter::repeat_n(BigInt::zero(), generators - s.rank()));
        PresentedModule { generators, relations, invariant_factors: inv }
    }

    pub fn is_zero(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.invariant_factors.iter().all(|x| !x.is_zero())
    }

    /// log_p of the order, when the module is a finite p-group.
    pub fn log_size(&self, p: u64) -> Option<u64> {
        let p = BigInt::from(p);
        let mut total = 0;
        for x in &self.invariant_factors {
            if x.is_zero() {
                return None;
            }
            let mut y = x.clone();
            while y.is_multiple_of(&p) {
                y /= &p;
                total += 1;
            }
            if !y.is_one() {
                return None;
            }
        }
        Some(total)
    }

    pub fn contains_relation(&self, v: &[BigInt]) -> bool {
        crate::arith::lattice_contains(&crate::arith::lattice_basis(&self.relations), v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_examples() {
        let ok = DieudonneComplex::from_i64(3, 0, &[1, 1], &[vec![vec![3]]], &[vec![vec![3]], vec![vec![1]]]);
        assert!(check_dieudonne(&ok.unwrap()).passed);
        let bad =
            DieudonneComplex::from_i64(3, 0, &[1, 1], &[vec![vec![3]]], &[vec![vec![3]], vec![vec![2]]])
                .unwrap();
        let rep = check_dieudonne(&bad);
        assert!(!rep.passed);
        assert_eq!(rep.first_witness().unwrap().input, "degree 0 entry (0, 0)");
        // d = 0 passes whatever F is
        let free =
            DieudonneComplex::from_i64(5, 0, &[1, 1], &[vec![vec![0]]], &[vec![vec![7]], vec![vec![-2]]]);
        assert!(check_dieudonne(&free.unwrap()).passed);
    }

    #[test]
    fn json_round_trip() {
        let m = DieudonneComplex::from_i64(
            2,
            -1,
            &[1, 0, 1],
            &[vec![], vec![]],
            &[vec![vec![1]], vec![], vec![vec![2]]],
        )
        .unwrap();
        let back = DieudonneComplex::from_json(&m.to_json()).unwrap();
        assert_eq!(m, back);
        let modp = m.with_precision(Precision::Mod(3));
        assert_eq!(modp.to_json()["precision"], serde_json::json!({"mod": 3}));
        assert_eq!(DieudonneComplex::from_json(&modp.to_json()).unwrap(), modp);
    }

    #[test]
    fn presented_modules() {
        let m = PresentedModule::new(2, IntMatrix::from_rows(&[vec![1, 0], vec![0, 4]]));
        assert_eq!(m.invariant_factors, vec![BigInt::from(4)]);
        assert_eq!(m.log_size(2), Some(2));
        let free = PresentedModule::new(1, IntMatrix::zeros(1, 0));
        assert_eq!(free.log_size(2), None);
        assert!(!free.is_finite());
    }
}
