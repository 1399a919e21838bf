use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{IntMatrix, ModMatrix, PrimePower};
use crate::dieudonne::{matrices_agree, Precision};
use crate::report::CheckReport;
use crate::{Error, Result};

use super::complex::{
    d_target, eps_target, heart_embed, p_twist, Bidegree, CochainComplex, GradedMixedComplex,
};

/// Default bound on the total rank of M plus N in Hom enumeration.
pub const DEFAULT_HOM_BUDGET: usize = 16;

#[derive(Clone, Copy, Debug)]
struct Block {
    offset: usize,
    rows: usize,
    cols: usize,
}

/// Homogeneous linear equations over Z/p^N in matrix-valued unknowns.
struct LinearSystem {
    ring: PrimePower,
    blocks: Vec<Block>,
    unknowns: usize,
    equations: Vec<Vec<u64>>,
}

/// One summand coef·L·X·R of a matrix equation; `None` stands for a block
/// that is identically zero.
struct Term<'a> {
    coef: i64,
    left: &'a IntMatrix,
    block: Option<usize>,
    right: &'a IntMatrix,
}

impl LinearSystem {
    fn new(ring: PrimePower) -> Self {
        LinearSystem { ring, blocks: Vec::new(), unknowns: 0, equations: Vec::new() }
    }

    fn block(&mut self, rows: usize, cols: usize) -> Option<usize> {
        if rows * cols == 0 {
            return None;
        }
        self.blocks.push(Block { offset: self.unknowns, rows, cols });
        self.unknowns += rows * cols;
        Some(self.blocks.len() - 1)
    }

    /// Adds the entries of Σ terms = 0, an `out.0 × out.1` matrix identity.
    fn equation(&mut self, out: (usize, usize), terms: &[Term]) {
        let r = self.ring;
        for i in 0..out.0 {
            for j in 0..out.1 {
                let mut row = vec![0u64; self.unknowns];
                let mut nonzero = false;
                for t in terms {
                    let Some(bi) = t.block else { continue };
                    let b = self.blocks[bi];
                    for s in 0..b.rows {
                        let l = r.mul(r.from_i64(t.coef), r.from_big(t.left.get(i, s)));
                        if l == 0 {
                            continue;
                        }
                        for u in 0..b.cols {
                            let c = r.mul(l, r.from_big(t.right.get(u, j)));
                            if c != 0 {
                                let k = b.offset + s * b.cols + u;
                                row[k] = r.add(row[k], c);
                                nonzero = true;
                            }
                        }
                    }
                }
                if nonzero {
                    self.equations.push(row);
                }
            }
        }
    }

    fn matrix(&self) -> ModMatrix {
        let rows = &self.equations;
        ModMatrix::from_fn(self.ring, rows.len(), self.unknowns, |i, j| rows[i][j])
    }

    fn log_count(&self) -> u64 {
        self.matrix().kernel_log_size()
    }

    fn generators(&self) -> Vec<Vec<u64>> {
        let k = self.matrix().kernel();
        (0..k.cols()).map(|j| k.col(j)).collect()
    }

    fn satisfied_by(&self, x: &[u64]) -> bool {
        let r = self.ring;
        self.equations
            .iter()
            .all(|row| row.iter().zip(x).fold(0, |acc, (&a, &b)| r.add(acc, r.mul(a, b))) == 0)
    }

    fn extract(&self, x: &[u64], block: Option<usize>, shape: (usize, usize)) -> IntMatrix {
        match block {
            None => IntMatrix::zeros(shape.0, shape.1),
            Some(bi) => {
                let b = self.blocks[bi];
                IntMatrix::from_fn(b.rows, b.cols, |i, j| BigInt::from(x[b.offset + i * b.cols + j]))
            }
        }
    }

    fn store(&self, x: &mut [u64], block: Option<usize>, m: &IntMatrix) {
        if let Some(bi) = block {
            let b = self.blocks[bi];
            for i in 0..b.rows {
                for j in 0..b.cols {
                    x[b.offset + i * b.cols + j] = self.ring.from_big(m.get(i, j));
                }
            }
        }
    }

    fn random_solution<R: Rng>(&self, gens: &[Vec<u64>], rng: &mut R) -> Vec<u64> {
        let r = self.ring;
        let mut x = vec![0u64; self.unknowns];
        for g in gens {
            let c = rng.gen_range(0..r.modulus());
            for (xi, gi) in x.iter_mut().zip(g) {
                *xi = r.add(*xi, r.mul(c, *gi));
            }
        }
        x
    }
}

fn ring_of(m: &GradedMixedComplex, n: &GradedMixedComplex) -> Result<PrimePower> {
    if m.p() != n.p() || m.precision() != n.precision() {
        return Err(Error::InvalidInput("complexes over different rings".into()));
    }
    match m.precision() {
        Precision::Mod(e) => Ok(PrimePower::new(m.p(), e)),
        Precision::Exact => Err(Error::InvalidInput("Hom sets are finite only modulo p^N".into())),
    }
}

/// Unknowns f_b: M(b) → N(b) of a strict map of graded mixed complexes.
struct HomSystem {
    sys: LinearSystem,
    f: BTreeMap<Bidegree, Option<usize>>,
}

fn hom_system(m: &GradedMixedComplex, n: &GradedMixedComplex) -> Result<HomSystem> {
    let mut sys = LinearSystem::new(ring_of(m, n)?);
    let mut f = BTreeMap::new();
    let spots: Vec<Bidegree> = m.support().collect();
    for &b in &spots {
        f.insert(b, sys.block(n.rank(b), m.rank(b)));
    }
    let at = |f: &BTreeMap<Bidegree, Option<usize>>, b| f.get(&b).copied().flatten();
    for &b in &spots {
        let (t, e) = (d_target(b), eps_target(b));
        let (dm, dn, em, en) = (m.d(b), n.d(b), m.eps(b), n.eps(b));
        let (it, ib) = (IntMatrix::identity(n.rank(t)), IntMatrix::identity(m.rank(b)));
        let ie = IntMatrix::identity(n.rank(e));
        sys.equation(
            (n.rank(t), m.rank(b)),
            &[
                Term { coef: 1, left: &it, block: at(&f, t), right: &dm },
                Term { coef: -1, left: &dn, block: at(&f, b), right: &ib },
            ],
        );
        sys.equation(
            (n.rank(e), m.rank(b)),
            &[
                Term { coef: 1, left: &ie, block: at(&f, e), right: &em },
                Term { coef: -1, left: &en, block: at(&f, b), right: &ib },
            ],
        );
    }
    Ok(HomSystem { sys, f })
}

/// log_p |Hom(M, N)| for strict maps of graded mixed complexes.
pub fn hom_log_count(m: &GradedMixedComplex, n: &GradedMixedComplex) -> Result<u64> {
    Ok(hom_system(m, n)?.sys.log_count())
}

/// Unknowns (g1, g2) of a strict map M → η_pN, where g1: M(b) → N(b) and
/// g2: M(b) → N(b + ε) are the two components of the pair.
struct UnitSystem {
    sys: LinearSystem,
    g1: BTreeMap<Bidegree, Option<usize>>,
    g2: BTreeMap<Bidegree, Option<usize>>,
}

fn unit_system(m: &GradedMixedComplex, n: &GradedMixedComplex) -> Result<UnitSystem> {
    let mut sys = LinearSystem::new(ring_of(m, n)?);
    let p = m.p() as i64;
    let spots: Vec<Bidegree> = m.support().collect();
    let mut g1 = BTreeMap::new();
    let mut g2 = BTreeMap::new();
    for &b in &spots {
        g1.insert(b, sys.block(n.rank(b), m.rank(b)));
        g2.insert(b, sys.block(n.rank(eps_target(b)), m.rank(b)));
    }
    let at = |g: &BTreeMap<Bidegree, Option<usize>>, b| g.get(&b).copied().flatten();
    for &b in &spots {
        let (t, e) = (d_target(b), eps_target(b));
        let (dm, em) = (m.d(b), m.eps(b));
        let id = |r: usize| IntMatrix::identity(r);
        let (ib, it, ie) = (id(m.rank(b)), id(n.rank(t)), id(n.rank(e)));
        let ite = id(n.rank(eps_target(t)));
        let iee = id(n.rank(eps_target(e)));
        let nd_e = n.d(e);
        let ne_e = n.eps(e);
        let (nd_b, ne_b) = (n.d(b), n.eps(b));
        // g1 d = d g1
        sys.equation(
            (n.rank(t), m.rank(b)),
            &[
                Term { coef: 1, left: &it, block: at(&g1, t), right: &dm },
                Term { coef: -1, left: &nd_b, block: at(&g1, b), right: &ib },
            ],
        );
        // g2 d = −d g2, from d(x, y) = (dx, −dy)
        sys.equation(
            (n.rank(eps_target(t)), m.rank(b)),
            &[
                Term { coef: 1, left: &ite, block: at(&g2, t), right: &dm },
                Term { coef: 1, left: &nd_e, block: at(&g2, b), right: &ib },
            ],
        );
        // the pair condition εx = py
        sys.equation(
            (n.rank(e), m.rank(b)),
            &[
                Term { coef: 1, left: &ne_b, block: at(&g1, b), right: &ib },
                Term { coef: -p, left: &ie, block: at(&g2, b), right: &ib },
            ],
        );
        // the pair condition εy = 0
        sys.equation(
            (n.rank(eps_target(e)), m.rank(b)),
            &[Term { coef: 1, left: &ne_e, block: at(&g2, b), right: &ib }],
        );
        // g ε = ε g with ε(x, y) = (y, 0)
        sys.equation(
            (n.rank(e), m.rank(b)),
            &[
                Term { coef: 1, left: &ie, block: at(&g1, e), right: &em },
                Term { coef: -1, left: &ie, block: at(&g2, b), right: &ib },
            ],
        );
        sys.equation(
            (n.rank(eps_target(e)), m.rank(b)),
            &[Term { coef: 1, left: &iee, block: at(&g2, e), right: &em }],
        );
    }
    Ok(UnitSystem { sys, g1, g2 })
}

/// log_p |Hom(M, η_pN)|.
pub fn unit_log_count(m: &GradedMixedComplex, n: &GradedMixedComplex) -> Result<u64> {
    Ok(unit_system(m, n)?.sys.log_count())
}

#[derive(Clone, Debug, Serialize)]
pub struct AdjunctionReport {
    /// log_p |Hom([p]*M, N)|.
    pub left_log_count: u64,
    /// log_p |Hom(M, η_pN)|.
    pub right_log_count: u64,
    pub report: CheckReport,
}

fn block_of(map: &BTreeMap<Bidegree, Option<usize>>, b: Bidegree) -> Option<usize> {
    map.get(&b).copied().flatten()
}

/// The unit of the adjunction: f ↦ (f, f∘ε).
fn unit_of(
    hom: &HomSystem,
    unit: &UnitSystem,
    m: &GradedMixedComplex,
    n: &GradedMixedComplex,
    f: &[u64],
) -> Vec<u64> {
    let mut g = vec![0u64; unit.sys.unknowns];
    for b in m.support() {
        let e = eps_target(b);
        let fb = hom.sys.extract(f, block_of(&hom.f, b), (n.rank(b), m.rank(b)));
        let fe = hom.sys.extract(f, block_of(&hom.f, e), (n.rank(e), m.rank(e)));
        unit.sys.store(&mut g, block_of(&unit.g1, b), &fb);
        unit.sys.store(&mut g, block_of(&unit.g2, b), &fe.mul(&m.eps(b)));
    }
    g
}

fn project(
    hom: &HomSystem,
    unit: &UnitSystem,
    m: &GradedMixedComplex,
    n: &GradedMixedComplex,
    g: &[u64],
) -> Vec<u64> {
    let mut f = vec![0u64; hom.sys.unknowns];
    for b in m.support() {
        let g1 = unit.sys.extract(g, block_of(&unit.g1, b), (n.rank(b), m.rank(b)));
        hom.sys.store(&mut f, block_of(&hom.f, b), &g1);
    }
    f
}

/// Counts both sides of [p]* ⊣ η_p by solving the commutation systems,
/// checks that f ↦ (f, fε) and its inverse (g1, g2) ↦ g1 map solutions to
/// solutions, and samples naturality in M along strict endomorphisms.
pub fn adjunction_check(
    m: &GradedMixedComplex,
    n: &GradedMixedComplex,
    budget: usize,
    samples: usize,
    seed: u64,
) -> Result<AdjunctionReport> {
    let size = m.total_rank() + n.total_rank();
    if size > budget {
        return Err(Error::BudgetExceeded(format!("total rank {size} exceeds {budget}")));
    }
    let hom = hom_system(&p_twist(m), n)?;
    let unit = unit_system(m, n)?;
    let left = hom.sys.log_count();
    let right = unit.sys.log_count();
    let mut rep = CheckReport::new("[p]* ⊣ η_p");
    rep.check("|Hom([p]*M, N)| = |Hom(M, η_pN)|", left == right, String::new, || {
        format!("p^{left} vs p^{right}")
    });
    let hom_gens = hom.sys.generators();
    for (k, f) in hom_gens.iter().enumerate() {
        let g = unit_of(&hom, &unit, m, n, f);
        rep.check(
            "f ↦ (f, fε) lands in Hom(M, η_pN)",
            unit.sys.satisfied_by(&g),
            || format!("generator {k}"),
            String::new,
        );
    }
    for (k, g) in unit.sys.generators().iter().enumerate() {
        let f = project(&hom, &unit, m, n, g);
        rep.check(
            "(g1, g2) ↦ g1 lands in Hom([p]*M, N)",
            hom.sys.satisfied_by(&f),
            || format!("generator {k}"),
            String::new,
        );
        let back = unit_of(&hom, &unit, m, n, &f);
        rep.check("g2 = g1ε", back == *g, || format!("generator {k}"), String::new);
    }

    let endo = hom_system(m, m)?;
    let endo_gens = endo.sys.generators();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let prec = m.precision();
    for s in 0..samples {
        let f = hom.sys.random_solution(&hom_gens, &mut rng);
        let u = endo.sys.random_solution(&endo_gens, &mut rng);
        let mut fu = vec![0u64; hom.sys.unknowns];
        for b in m.support() {
            let shape = (n.rank(b), m.rank(b));
            let fb = hom.sys.extract(&f, block_of(&hom.f, b), shape);
            let ub = endo.sys.extract(&u, block_of(&endo.f, b), (m.rank(b), m.rank(b)));
            hom.sys.store(&mut fu, block_of(&hom.f, b), &fb.mul(&ub));
        }
        let lhs = unit_of(&hom, &unit, m, n, &fu);
        let g = unit_of(&hom, &unit, m, n, &f);
        let mut ok = hom.sys.satisfied_by(&fu);
        for b in m.support() {
            let e = eps_target(b);
            let ub = endo.sys.extract(&u, block_of(&endo.f, b), (m.rank(b), m.rank(b)));
            let g1 = unit.sys.extract(&g, block_of(&unit.g1, b), (n.rank(b), m.rank(b)));
            let g2 = unit.sys.extract(&g, block_of(&unit.g2, b), (n.rank(e), m.rank(b)));
            let l1 = unit.sys.extract(&lhs, block_of(&unit.g1, b), (n.rank(b), m.rank(b)));
            let l2 = unit.sys.extract(&lhs, block_of(&unit.g2, b), (n.rank(e), m.rank(b)));
            ok &= matrices_agree(&l1, &g1.mul(&ub), prec, m.p());
            ok &= matrices_agree(&l2, &g2.mul(&ub), prec, m.p());
        }
        rep.check("naturality in M", ok, || format!("sample {s}"), String::new);
    }
    Ok(AdjunctionReport { left_log_count: left, right_log_count: right, report: rep })
}

/// log_p of the number of chain maps C → D (ignoring F).
pub fn chain_map_log_count(c: &CochainComplex, d: &CochainComplex) -> Result<u64> {
    let (hc, hd) = (heart_embed(&strip(c)), heart_embed(&strip(d)));
    let ring = ring_of(&hc, &hd)?;
    let mut sys = LinearSystem::new(ring);
    let rank = |x: &CochainComplex, n: i64| {
        let k = n - x.lo;
        if k >= 0 && (k as usize) < x.ranks.len() {
            x.ranks[k as usize]
        } else {
            0
        }
    };
    let diff = |x: &CochainComplex, n: i64| {
        let k = n - x.lo;
        if k >= 0 && (k as usize) < x.d.len() {
            x.d[k as usize].clone()
        } else {
            IntMatrix::zeros(rank(x, n + 1), rank(x, n))
        }
    };
    let lo = c.lo.min(d.lo);
    let hi = (c.lo + c.ranks.len() as i64).max(d.lo + d.ranks.len() as i64);
    let mut f = BTreeMap::new();
    for n in lo..=hi {
        f.insert(n, sys.block(rank(d, n), rank(c, n)));
    }
    for n in lo..hi {
        let (dc, dd) = (diff(c, n), diff(d, n));
        let (i1, i0) = (IntMatrix::identity(rank(d, n + 1)), IntMatrix::identity(rank(c, n)));
        sys.equation(
            (rank(d, n + 1), rank(c, n)),
            &[
                Term { coef: 1, left: &i1, block: f[&(n + 1)], right: &dc },
                Term { coef: -1, left: &dd, block: f[&n], right: &i0 },
            ],
        );
    }
    Ok(sys.log_count())
}

fn strip(c: &CochainComplex) -> CochainComplex {
    CochainComplex { f: None, ..c.clone() }
}

fn mat(rows: &[Vec<i64>]) -> IntMatrix {
    IntMatrix::from_rows(rows)
}

fn build(
    p: u64,
    ranks: &[(Bidegree, usize)],
    d: &[(Bidegree, IntMatrix)],
    eps: &[(Bidegree, IntMatrix)],
) -> GradedMixedComplex {
    GradedMixedComplex::new(
        p,
        Precision::Mod(2),
        ranks.iter().cloned().collect(),
        d.iter().cloned().collect(),
        eps.iter().cloned().collect(),
        None,
    )
    .expect("catalog shapes")
}

/// Ten graded mixed complexes over Z/p² of total rank at most 6.
pub fn mixed_catalog(p: u64) -> Vec<(&'static str, GradedMixedComplex)> {
    let q = p as i64;
    let chain = |x: i64| {
        heart_embed(&CochainComplex::new(p, 0, vec![1, 1], vec![mat(&[vec![x]])], Precision::Mod(2)))
    };
    vec![
        ("zero", GradedMixedComplex::zero(p, Precision::Mod(2))),
        ("Z/p^2", build(p, &[((0, 0), 1)], &[], &[])),
        ("heart(Z/p^2 -p-> Z/p^2)", chain(q)),
        ("heart(Z/p^2 -1-> Z/p^2)", chain(1)),
        ("d = 1 in weight 0", build(p, &[((0, 0), 1), ((0, 1), 1)], &[((0, 0), mat(&[vec![1]]))], &[])),
        ("d = p in weight 0", build(p, &[((0, 0), 1), ((0, 1), 1)], &[((0, 0), mat(&[vec![q]]))], &[])),
        (
            "square with d = 1, ε = ±1",
            build(
                p,
                &[((0, 0), 1), ((0, 1), 1), ((1, -1), 1), ((1, 0), 1)],
                &[((0, 0), mat(&[vec![1]])), ((1, -1), mat(&[vec![1]]))],
                &[((0, 0), mat(&[vec![1]])), ((0, 1), mat(&[vec![-1]]))],
            ),
        ),
        (
            "ε = (1 p) from rank 2",
            build(p, &[((0, 0), 2), ((1, -1), 1)], &[], &[((0, 0), mat(&[vec![1, q]]))]),
        ),
        (
            "ε = p, p along a chain",
            build(
                p,
                &[((0, 0), 1), ((1, -1), 1), ((2, -2), 1)],
                &[],
                &[((0, 0), mat(&[vec![q]])), ((1, -1), mat(&[vec![q]]))],
            ),
        ),
        (
            "ε then d = (p 0)",
            build(
                p,
                &[((0, 0), 1), ((1, -1), 2), ((1, 0), 1)],
                &[((1, -1), mat(&[vec![q, 0]]))],
                &[((0, 0), mat(&[vec![0], vec![1]]))],
            ),
        ),
    ]
}

fn random_matrix<R: Rng>(rng: &mut R, ring: PrimePower, rows: usize, cols: usize) -> IntMatrix {
    IntMatrix::from_fn(rows, cols, |_, _| BigInt::from(rng.gen_range(0..ring.modulus())))
}

/// A random matrix D over Z/p^N with D·E = 0.
fn random_annihilator<R: Rng>(rng: &mut R, ring: PrimePower, rows: usize, e: &IntMatrix) -> IntMatrix {
    let k = ModMatrix::from_int(ring, &e.transpose()).kernel();
    let mut out = IntMatrix::zeros(rows, e.rows());
    for i in 0..rows {
        for g in 0..k.cols() {
            let c = rng.gen_range(0..ring.modulus());
            for j in 0..e.rows() {
                let x = out.get(i, j) + BigInt::from(ring.mul(c, k.get(j, g)));
                out.set(i, j, BigInt::from(ring.from_big(&x)));
            }
        }
    }
    out
}

/// A random three-piece graded mixed complex over Z/p², with ranks 1 or 2.
pub fn random_mixed<R: Rng>(rng: &mut R, p: u64) -> GradedMixedComplex {
    let ring = PrimePower::new(p, 2);
    let r: Vec<usize> = (0..3).map(|_| rng.gen_range(1..=2)).collect();
    let first = random_matrix(rng, ring, r[1], r[0]);
    let second = random_annihilator(rng, ring, r[2], &first);
    match rng.gen_range(0..3) {
        // (0,0) -ε-> (1,-1) -d-> (1,0)
        0 => build(
            p,
            &[((0, 0), r[0]), ((1, -1), r[1]), ((1, 0), r[2])],
            &[((1, -1), second)],
            &[((0, 0), first)],
        ),
        // (0,0) -d-> (0,1) -ε-> (1,0)
        1 => build(
            p,
            &[((0, 0), r[0]), ((0, 1), r[1]), ((1, 0), r[2])],
            &[((0, 0), first)],
            &[((0, 1), second)],
        ),
        // (0,0) -ε-> (1,-1) -ε-> (2,-2)
        _ => build(
            p,
            &[((0, 0), r[0]), ((1, -1), r[1]), ((2, -2), r[2])],
            &[],
            &[((0, 0), first), ((1, -1), second)],
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::super::complex::check_mixed;
    use super::*;

    #[test]
    fn adjunction_examples() {
        let zero = GradedMixedComplex::zero(2, Precision::Mod(2));
        let h = mixed_catalog(2)[2].1.clone();
        let r = adjunction_check(&zero, &h, 16, 2, 0).unwrap();
        assert_eq!((r.left_log_count, r.right_log_count), (0, 0));
        assert!(r.report.passed);

        let r = adjunction_check(&h, &h, 16, 4, 1).unwrap();
        assert_eq!(r.left_log_count, r.right_log_count);
        assert!(r.report.passed, "{}", r.report);

        let big = mixed_catalog(3)[6].1.clone();
        assert!(matches!(adjunction_check(&big, &big, 6, 0, 0), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn catalogs_are_valid() {
        for p in [2, 3] {
            for (name, c) in mixed_catalog(p) {
                assert!(check_mixed(&c).passed, "{name}");
                assert!(c.total_rank() <= 6);
            }
        }
    }

    #[test]
    fn random_complexes_satisfy_adjunction() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [2, 3] {
            for _ in 0..20 {
                let m = random_mixed(&mut rng, p);
                let n = random_mixed(&mut rng, p);
                assert!(check_mixed(&m).passed);
                let r = adjunction_check(&m, &n, 16, 2, 3).unwrap();
                assert!(r.report.passed, "{}", r.report);
            }
        }
    }

    #[test]
    fn heart_is_fully_faithful_on_counts() {
        let chains: Vec<CochainComplex> = [1, 2, 4]
            .iter()
            .map(|&x| CochainComplex::new(2, 0, vec![1, 1], vec![mat(&[vec![x]])], Precision::Mod(2)))
            .chain([CochainComplex::new(2, 0, vec![2], vec![], Precision::Mod(2))])
            .collect();
        for c in &chains {
            for d in &chains {
                let direct = chain_map_log_count(c, d).unwrap();
                let via = hom_log_count(&heart_embed(c), &heart_embed(d)).unwrap();
                assert_eq!(direct, via);
            }
        }
        // Z/4 -1-> Z/4 to itself: f0 = f1 arbitrary
        assert_eq!(chain_map_log_count(&chains[0], &chains[0]).unwrap(), 2);
    }
}
