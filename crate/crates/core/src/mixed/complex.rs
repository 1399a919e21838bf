use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, IntMatrix};
use crate::dieudonne::{matrices_agree, DieudonneComplex, Precision};
use crate::report::CheckReport;
use crate::{Error, Result, SCHEMA_VERSION};

/// A (weight, degree) pair.
pub type Bidegree = (i64, i64);

/// Target bidegree of d.
pub fn d_target((w, i): Bidegree) -> Bidegree {
    (w, i + 1)
}

/// Target bidegree of ε: weight +1, degree −1.
pub fn eps_target((w, i): Bidegree) -> Bidegree {
    (w + 1, i - 1)
}

/// A graded mixed complex of finite free modules over Z or Z/p^N.
///
/// Maps are keyed by their source bidegree; a missing map is zero. The laws
/// are d² = 0, ε² = 0, dε + εd = 0 and, when F is present, Fd = dF and
/// εF = pFε.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMixedComplex {
    p: u64,
    precision: Precision,
    ranks: BTreeMap<Bidegree, usize>,
    d: BTreeMap<Bidegree, IntMatrix>,
    eps: BTreeMap<Bidegree, IntMatrix>,
    f: Option<BTreeMap<Bidegree, IntMatrix>>,
}

#[derive(Serialize, Deserialize)]
struct PieceJson {
    weight: i64,
    degree: i64,
    rank: usize,
}

#[derive(Serialize, Deserialize)]
struct MapJson {
    weight: i64,
    degree: i64,
    matrix: IntMatrix,
}

#[derive(Serialize, Deserialize)]
struct MixedJson {
    schema_version: u32,
    p: u64,
    precision: Precision,
    pieces: Vec<PieceJson>,
    d: Vec<MapJson>,
    eps: Vec<MapJson>,
    #[serde(rename = "F", default, skip_serializing_if = "Option::is_none")]
    f: Option<Vec<MapJson>>,
}

fn maps_to_json(m: &BTreeMap<Bidegree, IntMatrix>) -> Vec<MapJson> {
    m.iter()
        .filter(|(_, x)| !x.is_zero())
        .map(|(&(weight, degree), x)| MapJson { weight, degree, matrix: x.clone() })
        .collect()
}

fn maps_from_json(v: Vec<MapJson>) -> BTreeMap<Bidegree, IntMatrix> {
    v.into_iter().map(|m| ((m.weight, m.degree), m.matrix)).collect()
}

impl GradedMixedComplex {
    /// Validates shapes against the ranks; zero-rank pieces are dropped.
    pub fn new(
        p: u64,
        precision: Precision,
        ranks: BTreeMap<Bidegree, usize>,
        d: BTreeMap<Bidegree, IntMatrix>,
        eps: BTreeMap<Bidegree, IntMatrix>,
        f: Option<BTreeMap<Bidegree, IntMatrix>>,
    ) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        let ranks: BTreeMap<Bidegree, usize> = ranks.into_iter().filter(|&(_, r)| r > 0).collect();
        let rank = |b: Bidegree| ranks.get(&b).copied().unwrap_or(0);
        let fix = |maps: BTreeMap<Bidegree, IntMatrix>, target: fn(Bidegree) -> Bidegree, what: &str| {
            let mut out = BTreeMap::new();
            for (b, m) in maps {
                let shape = (rank(target(b)), rank(b));
                if m.rows() * m.cols() == 0 && shape.0 * shape.1 == 0 {
                    continue;
                }
                if m.shape() != shape {
                    return Err(Error::ShapeMismatch(format!(
                        "{what} at {b:?} has shape {:?}, expected {shape:?}",
                        m.shape()
                    )));
                }
                // zero maps are implicit, which keeps equality structural
                if !m.is_zero() {
                    out.insert(b, m);
                }
            }
            Ok(out)
        };
        let d = fix(d, d_target, "d")?;
        let eps = fix(eps, eps_target, "ε")?;
        let f = match f {
            Some(f) => Some(fix(f, |b| b, "F")?),
            None => None,
        };
        Ok(GradedMixedComplex { p, precision, ranks, d, eps, f })
    }

    pub fn zero(p: u64, precision: Precision) -> Self {
        GradedMixedComplex {
            p,
            precision,
            ranks: BTreeMap::new(),
            d: BTreeMap::new(),
            eps: BTreeMap::new(),
            f: None,
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    pub fn ranks(&self) -> &BTreeMap<Bidegree, usize> {
        &self.ranks
    }

    pub fn support(&self) -> impl Iterator<Item = Bidegree> + '_ {
        self.ranks.keys().copied()
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.values().sum()
    }

    pub fn rank(&self, b: Bidegree) -> usize {
        self.ranks.get(&b).copied().unwrap_or(0)
    }

    pub fn weights(&self) -> Vec<i64> {
        let mut w: Vec<i64> = self.ranks.keys().map(|b| b.0).collect();
        w.dedup();
        w
    }

    fn get(&self, maps: &BTreeMap<Bidegree, IntMatrix>, b: Bidegree, target: Bidegree) -> IntMatrix {
        maps.get(&b).cloned().unwrap_or_else(|| IntMatrix::zeros(self.rank(target), self.rank(b)))
    }

    pub fn d(&self, b: Bidegree) -> IntMatrix {
        self.get(&self.d, b, d_target(b))
    }

    pub fn eps(&self, b: Bidegree) -> IntMatrix {
        self.get(&self.eps, b, eps_target(b))
    }

    pub fn f(&self, b: Bidegree) -> Option<IntMatrix> {
        self.f.as_ref().map(|f| self.get(f, b, b))
    }

    pub fn has_frobenius(&self) -> bool {
        self.f.is_some()
    }

    pub fn d_maps(&self) -> &BTreeMap<Bidegree, IntMatrix> {
        &self.d
    }

    pub fn eps_maps(&self) -> &BTreeMap<Bidegree, IntMatrix> {
        &self.eps
    }

    pub fn f_maps(&self) -> Option<&BTreeMap<Bidegree, IntMatrix>> {
        self.f.as_ref()
    }

    pub fn without_frobenius(&self) -> Self {
        GradedMixedComplex { f: None, ..self.clone() }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let doc = MixedJson {
            schema_version: SCHEMA_VERSION,
            p: self.p,
            precision: self.precision,
            pieces: self
                .ranks
                .iter()
                .map(|(&(weight, degree), &rank)| PieceJson { weight, degree, rank })
                .collect(),
            d: maps_to_json(&self.d),
            eps: maps_to_json(&self.eps),
            f: self.f.as_ref().map(maps_to_json),
        };
        serde_json::to_value(doc).expect("mixed complex serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let doc: MixedJson = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let ranks = doc.pieces.iter().map(|x| ((x.weight, x.degree), x.rank)).collect();
        GradedMixedComplex::new(
            doc.p,
            doc.precision,
            ranks,
            maps_from_json(doc.d),
            maps_from_json(doc.eps),
            doc.f.map(maps_from_json),
        )
    }
}

/// Checks the mixed laws, and the Frobenius laws when F is present.
pub fn check_mixed(c: &GradedMixedComplex) -> CheckReport {
    let mut rep = CheckReport::new("graded mixed complex");
    let (p, prec) = (c.p, c.precision);
    let agree = |a: &IntMatrix, b: &IntMatrix| matrices_agree(a, b, prec, p);
    let zero = |r: usize, s: usize| IntMatrix::zeros(r, s);
    for b in c.support() {
        let at = || format!("{b:?}");
        let dd = c.d(d_target(b)).mul(&c.d(b));
        rep.check("d^2 = 0", agree(&dd, &zero(dd.rows(), dd.cols())), at, || dd.to_string());
        let ee = c.eps(eps_target(b)).mul(&c.eps(b));
        rep.check("ε^2 = 0", agree(&ee, &zero(ee.rows(), ee.cols())), at, || ee.to_string());
        let de = c.d(eps_target(b)).mul(&c.eps(b)).add(&c.eps(d_target(b)).mul(&c.d(b)));
        rep.check("dε + εd = 0", agree(&de, &zero(de.rows(), de.cols())), at, || de.to_string());
        if c.f.is_some() {
            let f = |x| c.f(x).expect("F present");
            let lhs = f(d_target(b)).mul(&c.d(b));
            let rhs = c.d(b).mul(&f(b));
            rep.check("Fd = dF", agree(&lhs, &rhs), at, || format!("{lhs} vs {rhs}"));
            let lhs = c.eps(b).mul(&f(b));
            let rhs = f(eps_target(b)).mul(&c.eps(b)).scale(&BigInt::from(p));
            rep.check("εF = pFε", agree(&lhs, &rhs), at, || format!("{lhs} vs {rhs}"));
        }
    }
    rep
}

/// [p]*C: the same complex with ε replaced by p·ε.
pub fn p_twist(c: &GradedMixedComplex) -> GradedMixedComplex {
    let p = BigInt::from(c.p);
    let eps = c.eps.iter().map(|(&b, m)| (b, m.scale(&p))).collect();
    GradedMixedComplex { eps, ..c.clone() }
}

/// A bounded cochain complex of free modules, optionally with F.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CochainComplex {
    pub p: u64,
    pub lo: i64,
    pub ranks: Vec<usize>,
    /// `d[k]` maps degree lo+k to lo+k+1.
    pub d: Vec<IntMatrix>,
    pub f: Option<Vec<IntMatrix>>,
    pub precision: Precision,
}

impl CochainComplex {
    pub fn new(p: u64, lo: i64, ranks: Vec<usize>, d: Vec<IntMatrix>, precision: Precision) -> Self {
        CochainComplex { p, lo, ranks, d, f: None, precision }
    }

    pub fn from_dieudonne(m: &DieudonneComplex) -> Self {
        CochainComplex {
            p: m.p(),
            lo: m.lo(),
            ranks: m.ranks().to_vec(),
            d: m.degrees().take(m.ranks().len().saturating_sub(1)).map(|n| m.d(n)).collect(),
            f: Some(m.degrees().map(|n| m.f(n)).collect()),
            precision: m.precision(),
        }
    }

    pub fn degree(&self, k: usize) -> i64 {
        self.lo + k as i64
    }
}

/// The heart embedding: M^n sits in weight n and degree −n with zero
/// internal differential, and ε is the differential of M.
pub fn heart_embed(m: &CochainComplex) -> GradedMixedComplex {
    let place = |k: usize| {
        let n = m.degree(k);
        (n, -n)
    };
    let ranks = (0..m.ranks.len()).map(|k| (place(k), m.ranks[k])).collect();
    let eps = m.d.iter().enumerate().map(|(k, x)| (place(k), x.clone())).collect();
    let f = m.f.as_ref().map(|f| f.iter().enumerate().map(|(k, x)| (place(k), x.clone())).collect());
    GradedMixedComplex::new(m.p, m.precision, ranks, BTreeMap::new(), eps, f)
        .expect("heart embedding preserves shapes")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_chain(p: u64, d: i64, prec: Precision) -> CochainComplex {
        CochainComplex::new(p, 0, vec![1, 1], vec![IntMatrix::from_rows(&[vec![d]])], prec)
    }

    #[test]
    fn heart_and_twist() {
        let z = CochainComplex::new(3, 0, vec![1], vec![], Precision::Exact);
        let h = heart_embed(&z);
        assert_eq!(h.total_rank(), 1);
        assert!(h.eps_maps().is_empty());

        let h = heart_embed(&scalar_chain(3, 3, Precision::Exact));
        assert_eq!(h.eps((0, 0)), IntMatrix::from_rows(&[vec![3]]));
        assert_eq!(h.rank((1, -1)), 1);
        assert!(check_mixed(&h).passed);

        let t = p_twist(&heart_embed(&scalar_chain(3, 1, Precision::Exact)));
        assert_eq!(t.eps((0, 0)), IntMatrix::from_rows(&[vec![3]]));
        assert_eq!(p_twist(&t).eps((0, 0)), IntMatrix::from_rows(&[vec![9]]));
        let zero_eps = CochainComplex::new(3, 0, vec![2], vec![], Precision::Exact);
        assert_eq!(p_twist(&heart_embed(&zero_eps)), heart_embed(&zero_eps));
    }

    #[test]
    fn frobenius_relation_transfers() {
        let good =
            DieudonneComplex::from_i64(3, 0, &[1, 1], &[vec![vec![3]]], &[vec![vec![3]], vec![vec![1]]])
                .unwrap();
        assert!(check_mixed(&heart_embed(&CochainComplex::from_dieudonne(&good))).passed);
        let bad =
            DieudonneComplex::from_i64(3, 0, &[1, 1], &[vec![vec![3]]], &[vec![vec![3]], vec![vec![2]]])
                .unwrap();
        let rep = check_mixed(&heart_embed(&CochainComplex::from_dieudonne(&bad)));
        assert_eq!(rep.failed_laws(), vec!["εF = pFε"]);

        // εF = Fε instead of pFε
        let mut f = BTreeMap::new();
        f.insert((0, 0), IntMatrix::from_rows(&[vec![1]]));
        f.insert((1, -1), IntMatrix::from_rows(&[vec![1]]));
        let h = heart_embed(&scalar_chain(3, 1, Precision::Exact));
        let c = GradedMixedComplex::new(
            3,
            Precision::Exact,
            h.ranks().clone(),
            BTreeMap::new(),
            h.eps_maps().clone(),
            Some(f),
        )
        .unwrap();
        assert!(!check_mixed(&c).passed);
    }

    #[test]
    fn json_round_trip() {
        let h = heart_embed(&scalar_chain(2, 2, Precision::Mod(2)));
        let back = GradedMixedComplex::from_json(&h.to_json()).unwrap();
        assert_eq!(h, back);
    }
}
