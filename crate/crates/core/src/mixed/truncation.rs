use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::arith::{lattice_basis, IntMatrix, ModMatrix, PrimePower};
use crate::dieudonne::Precision;

use super::complex::{Bidegree, GradedMixedComplex};

/// One cohomology group H^i(C(w)) of a weight column.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Cohomology {
    /// Over Z_(p): Z^free_rank ⊕ ⊕ Z/t, torsion factors all > 1.
    Exact { free_rank: usize, torsion: Vec<BigInt> },
    /// Over Z/p^N: a finite group of order p^log_size.
    Finite { log_size: u64 },
}

impl Cohomology {
    pub fn is_zero(&self) -> bool {
        match self {
            Cohomology::Exact { free_rank, torsion } => *free_rank == 0 && torsion.is_empty(),
            Cohomology::Finite { log_size } => *log_size == 0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WeightCohomology {
    pub weight: i64,
    /// Nonzero groups only, keyed by degree.
    pub groups: BTreeMap<i64, Cohomology>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TruncationReport {
    pub weights: Vec<WeightCohomology>,
    /// H^i(C(w)) = 0 for i > −w in every weight.
    pub t_connective: bool,
    /// H^i(C(w)) = 0 for i < −w in every weight.
    pub t_coconnective: bool,
    /// (weight, degree) of the first group violating each bound.
    pub connective_witness: Option<Bidegree>,
    pub coconnective_witness: Option<Bidegree>,
}

fn column_degrees(c: &GradedMixedComplex, w: i64) -> Vec<i64> {
    c.support().filter(|b| b.0 == w).map(|b| b.1).collect()
}

fn exact_cohomology(c: &GradedMixedComplex, b: Bidegree) -> Cohomology {
    let (w, i) = b;
    let ker = c.d(b).kernel();
    let incoming = c.d((w, i - 1));
    if ker.cols() == 0 {
        return Cohomology::Exact { free_rank: 0, torsion: Vec::new() };
    }
    // coordinates of the incoming image in the kernel basis
    let cols: Vec<Vec<BigInt>> = incoming
        .columns()
        .iter()
        .map(|v| ker.solve(v).expect("d^2 = 0 puts the image inside the kernel"))
        .collect();
    let coords = IntMatrix::from_columns(ker.cols(), &cols);
    let factors = coords.smith().invariant_factors();
    let free_rank = ker.cols() - factors.len();
    let torsion =
        factors.into_iter().map(|x| x.magnitude().clone().into()).filter(|x: &BigInt| !x.is_one()).collect();
    Cohomology::Exact { free_rank, torsion }
}

fn finite_cohomology(c: &GradedMixedComplex, b: Bidegree, ring: PrimePower) -> Cohomology {
    let (w, i) = b;
    let n = ring.exponent() as u64;
    let ker = ModMatrix::from_int(ring, &c.d(b)).kernel_log_size();
    let incoming = ModMatrix::from_int(ring, &c.d((w, i - 1)));
    let image = n * incoming.cols() as u64 - incoming.kernel_log_size();
    Cohomology::Finite { log_size: ker - image }
}

/// Per-weight cohomology and the Beilinson connectivity classes.
pub fn beilinson_report(c: &GradedMixedComplex) -> TruncationReport {
    let ring = match c.precision() {
        Precision::Exact => None,
        Precision::Mod(e) => Some(PrimePower::new(c.p(), e)),
    };
    let mut weights = Vec::new();
    let (mut conn, mut coconn) = (None, None);
    for w in c.weights() {
        let mut groups = BTreeMap::new();
        for i in column_degrees(c, w) {
            let h = match ring {
                None => exact_cohomology(c, (w, i)),
                Some(r) => finite_cohomology(c, (w, i), r),
            };
            if h.is_zero() {
                continue;
            }
            if i > -w && conn.is_none() {
                conn = Some((w, i));
            }
            if i < -w && coconn.is_none() {
                coconn = Some((w, i));
            }
            groups.insert(i, h);
        }
        weights.push(WeightCohomology { weight: w, groups });
    }
    TruncationReport {
        weights,
        t_connective: conn.is_none(),
        t_coconnective: coconn.is_none(),
        connective_witness: conn,
        coconnective_witness: coconn,
    }
}

/// The truncation t_{≥0}: in weight w keep degrees below −w, the cocycles in
/// degree −w, and nothing above. ε preserves these subcomplexes because
/// dε = −εd. The truncation has a strict model only over Z_(p), where
/// cocycles form a free summand; modulo p^N it is `None`.
pub fn beilinson_truncate(c: &GradedMixedComplex) -> (TruncationReport, Option<GradedMixedComplex>) {
    let report = beilinson_report(c);
    if c.precision() != Precision::Exact {
        return (report, None);
    }
    // inclusion of the kept sublattice into each piece
    let mut incl: BTreeMap<Bidegree, IntMatrix> = BTreeMap::new();
    for b @ (w, i) in c.support() {
        let k = if i < -w {
            IntMatrix::identity(c.rank(b))
        } else if i == -w {
            lattice_basis(&c.d(b).kernel())
        } else {
            continue;
        };
        if k.cols() > 0 {
            incl.insert(b, k);
        }
    }
    let restrict = |m: &IntMatrix, src: &IntMatrix, tgt: Option<&IntMatrix>| -> Option<IntMatrix> {
        let tgt = tgt?;
        let cols: Vec<Vec<BigInt>> = m
            .mul(src)
            .columns()
            .iter()
            .map(|v| tgt.solve(v).expect("kept pieces are closed under d and ε"))
            .collect();
        Some(IntMatrix::from_columns(tgt.cols(), &cols))
    };
    let ranks = incl.iter().map(|(&b, k)| (b, k.cols())).collect();
    let (mut d, mut eps) = (BTreeMap::new(), BTreeMap::new());
    let mut f = c.has_frobenius().then(BTreeMap::new);
    for (&b @ (w, i), k) in &incl {
        if let Some(m) = restrict(&c.d(b), k, incl.get(&(w, i + 1))) {
            d.insert(b, m);
        }
        if let Some(m) = restrict(&c.eps(b), k, incl.get(&(w + 1, i - 1))) {
            eps.insert(b, m);
        }
        if let Some(f) = f.as_mut() {
            let fb = c.f(b).expect("F present");
            f.insert(b, restrict(&fb, k, Some(k)).expect("F preserves cocycles"));
        }
    }
    let t = GradedMixedComplex::new(c.p(), Precision::Exact, ranks, d, eps, f)
        .expect("restriction of a valid complex");
    (report, Some(t))
}

#[cfg(test)]
mod tests {
    use super::super::complex::{check_mixed, heart_embed, CochainComplex};
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }

    #[test]
    fn hearts_are_in_the_heart() {
        let z = GradedMixedComplex::zero(2, Precision::Exact);
        let r = beilinson_report(&z);
        assert!(r.t_connective && r.t_coconnective);
        for prec in [Precision::Exact, Precision::Mod(2)] {
            let h = heart_embed(&CochainComplex::new(3, 0, vec![1, 2], vec![m(&[vec![3], vec![1]])], prec));
            let r = beilinson_report(&h);
            assert!(r.t_connective && r.t_coconnective);
        }
    }

    #[test]
    fn weight_one_class_in_degree_zero_is_not_connective() {
        let c = GradedMixedComplex::new(
            2,
            Precision::Exact,
            [((1, 0), 1)].into_iter().collect(),
            BTreeMap::new(),
            BTreeMap::new(),
            None,
        )
        .unwrap();
        let (r, t) = beilinson_truncate(&c);
        assert!(!r.t_connective);
        assert!(r.t_coconnective);
        assert_eq!(r.connective_witness, Some((1, 0)));
        assert_eq!(t.unwrap().total_rank(), 0);
    }

    #[test]
    fn truncation_keeps_cocycles_in_the_boundary_degree() {
        // weight 0: Z -2-> Z in degrees (-1, 0), plus Z in degree 1 killed by d
        let ranks = [((0, -1), 1), ((0, 0), 1), ((0, 1), 1)].into_iter().collect();
        let d = [((0, -1), m(&[vec![2]])), ((0, 0), m(&[vec![0]]))].into_iter().collect();
        let c = GradedMixedComplex::new(2, Precision::Exact, ranks, d, BTreeMap::new(), None).unwrap();
        let (r, t) = beilinson_truncate(&c);
        let g = &r.weights[0].groups;
        assert_eq!(g[&0], Cohomology::Exact { free_rank: 0, torsion: vec![BigInt::from(2)] });
        assert!(!r.t_connective);
        let t = t.unwrap();
        assert!(check_mixed(&t).passed);
        assert_eq!(t.rank((0, 1)), 0);
        assert!(beilinson_report(&t).t_connective);
        let kept: BTreeMap<i64, Cohomology> = g.range(..=0).map(|(k, v)| (*k, v.clone())).collect();
        assert_eq!(beilinson_report(&t).weights[0].groups, kept);
    }

    #[test]
    fn mod_cohomology_counts() {
        let h = CochainComplex::new(2, 0, vec![1, 1], vec![m(&[vec![2]])], Precision::Mod(2));
        let c = super::super::complex::heart_embed(&h).without_frobenius();
        // no d inside a weight column: each piece is its own cohomology
        let r = beilinson_report(&c);
        assert_eq!(r.weights.iter().map(|w| w.groups.len()).sum::<usize>(), 2);
        // a weight column Z/4 -2-> Z/4 has H = Z/2 at both ends
        let ranks = [((0, 0), 1), ((0, 1), 1)].into_iter().collect();
        let d = [((0, 0), m(&[vec![2]]))].into_iter().collect();
        let c = GradedMixedComplex::new(2, Precision::Mod(2), ranks, d, BTreeMap::new(), None).unwrap();
        let r = beilinson_report(&c);
        assert_eq!(r.weights[0].groups[&0], Cohomology::Finite { log_size: 1 });
        assert_eq!(r.weights[0].groups[&1], Cohomology::Finite { log_size: 1 });
        assert!(!r.t_connective);
    }
}
