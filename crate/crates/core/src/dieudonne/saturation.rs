use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{lattice_basis, lattice_contains, lattice_preimage, IntMatrix};
use crate::report::CheckReport;
use crate::{Error, Result};

use super::complex::{DieudonneComplex, Precision, PresentedModule};

/// Solves B·Y = X column by column over Z.
fn solve_cols(b: &IntMatrix, x: &IntMatrix) -> Option<IntMatrix> {
    let cols: Option<Vec<Vec<BigInt>>> = x.columns().iter().map(|c| b.solve(c)).collect();
    Some(IntMatrix::from_columns(b.cols(), &cols?))
}

fn divide_exact(m: &IntMatrix, p: &BigInt) -> Option<IntMatrix> {
    let mut out = m.clone();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let (q, r) = m.get(i, j).div_rem(p);
            if !r.is_zero() {
                return None;
            }
            out.set(i, j, q);
        }
    }
    Some(out)
}

fn require_exact(m: &DieudonneComplex, what: &str) -> Result<()> {
    match m.precision() {
        Precision::Exact => Ok(()),
        Precision::Mod(_) => Err(Error::InvalidInput(format!("{what} needs an exact complex"))),
    }
}

/// η_pM together with the comparison map α: M → η_pM.
///
/// (η_pM)^n = p^n·L_n with L_n = {y ∈ M^n : dy ∈ pM^{n+1}}. `basis[n]` holds
/// a basis of L_n in the coordinates of M^n; the complex and α are written in
/// the basis p^n·basis[n], so α_n = basis[n]^{-1}·F_n.
#[derive(Clone, Debug)]
pub struct Decalage {
    pub complex: DieudonneComplex,
    pub basis: Vec<IntMatrix>,
    pub alpha: Vec<IntMatrix>,
}

pub fn eta_p(m: &DieudonneComplex) -> Result<Decalage> {
    require_exact(m, "η_p")?;
    let p = BigInt::from(m.p());
    let basis: Vec<IntMatrix> = m
        .degrees()
        .map(|n| {
            let target = IntMatrix::scalar(m.rank(n + 1), p.clone());
            lattice_preimage(&m.d(n), &target)
        })
        .collect::<Result<_>>()?;
    let closure = |what: &str, n: i64| {
        Error::InvalidInput(format!("η_p is not closed under {what} in degree {n}; dF = pFd fails"))
    };
    let mut d = Vec::new();
    let mut f = Vec::new();
    let mut alpha = Vec::new();
    for (k, n) in m.degrees().enumerate() {
        let b = &basis[k];
        if k + 1 < basis.len() {
            let img = divide_exact(&m.d(n).mul(b), &p).ok_or_else(|| closure("d", n))?;
            d.push(solve_cols(&basis[k + 1], &img).ok_or_else(|| closure("d", n))?);
        }
        f.push(solve_cols(b, &m.f(n).mul(b)).ok_or_else(|| closure("F", n))?);
        alpha.push(solve_cols(b, &m.f(n)).ok_or_else(|| closure("F", n))?);
    }
    let complex = DieudonneComplex::new(m.p(), m.lo(), m.ranks().to_vec(), d, f, Precision::Exact)?;
    Ok(Decalage { complex, basis, alpha })
}

/// For exact complexes: every α_n is unimodular. A complex given modulo p^N
/// counts as saturated when F is invertible in every degree, the finite
/// shadow of a saturated complex on which V = pF^{-1}.
pub fn is_saturated(m: &DieudonneComplex) -> bool {
    match m.precision() {
        Precision::Exact => {
            eta_p(m).is_ok_and(|e| e.alpha.iter().all(|a| a.rows() == 0 || a.is_unimodular()))
        }
        Precision::Mod(_) => {
            let p = BigInt::from(m.p());
            m.degrees().all(|n| m.rank(n) == 0 || !m.f(n).det().is_multiple_of(&p))
        }
    }
}

/// The tower M → η_pM → η_p²M → … with its connecting maps α.
#[derive(Clone, Debug)]
pub struct SaturationTower {
    pub stages: Vec<DieudonneComplex>,
    /// `maps[i]` is α from stage i to stage i + 1, per degree.
    pub maps: Vec<Vec<IntMatrix>>,
    /// First stage whose α is an isomorphism, hence saturated.
    pub stabilized_at: Option<usize>,
}

impl SaturationTower {
    pub fn result(&self) -> Option<&DieudonneComplex> {
        self.stabilized_at.map(|i| &self.stages[i])
    }

    /// α commutes with d and F between consecutive stages.
    pub fn check_functoriality(&self) -> CheckReport {
        let mut rep = CheckReport::new("α functoriality");
        for (i, alpha) in self.maps.iter().enumerate() {
            let (a, b) = (&self.stages[i], &self.stages[i + 1]);
            for (k, n) in a.degrees().enumerate() {
                if k + 1 < alpha.len() {
                    let lhs = b.d(n).mul(&alpha[k]);
                    let rhs = alpha[k + 1].mul(&a.d(n));
                    rep.check(
                        "αd = dα",
                        lhs == rhs,
                        || format!("stage {i} degree {n}"),
                        || format!("{lhs} vs {rhs}"),
                    );
                }
                let lhs = b.f(n).mul(&alpha[k]);
                let rhs = alpha[k].mul(&a.f(n));
                rep.check(
                    "αF = Fα",
                    lhs == rhs,
                    || format!("stage {i} degree {n}"),
                    || format!("{lhs} vs {rhs}"),
                );
            }
        }
        rep
    }
}

/// Iterates η_p at most `max_iter` times, stopping at the first saturated
/// stage. Never fails on non-stabilization; see [`saturate`].
pub fn saturation_tower(m: &DieudonneComplex, max_iter: usize) -> Result<SaturationTower> {
    let mut tower = SaturationTower { stages: vec![m.clone()], maps: Vec::new(), stabilized_at: None };
    for i in 0..max_iter {
        let eta = eta_p(&tower.stages[i])?;
        if eta.alpha.iter().all(|a| a.rows() == 0 || a.is_unimodular()) {
            tower.stabilized_at = Some(i);
            break;
        }
        tower.maps.push(eta.alpha);
        tower.stages.push(eta.complex);
    }
    Ok(tower)
}

/// The saturation tower, or `IterationLimit` when it does not stabilize
/// within `max_iter` steps.
pub fn saturate(m: &DieudonneComplex, max_iter: usize) -> Result<SaturationTower> {
    let tower = saturation_tower(m, max_iter)?;
    match tower.stabilized_at {
        Some(_) => Ok(tower),
        None => Err(Error::IterationLimit { iterations: max_iter }),
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    e.gcd.is_one().then(|| e.x.mod_floor(m))
}

/// The unique V with FV = VF = p in every degree.
pub fn solve_verschiebung(m: &DieudonneComplex) -> Result<Vec<IntMatrix>> {
    if !is_saturated(m) {
        return Err(Error::NotSaturated);
    }
    let p = BigInt::from(m.p());
    let mut out = Vec::new();
    for n in m.degrees() {
        let f = m.f(n);
        let r = m.rank(n);
        let v = match m.precision() {
            Precision::Exact => {
                solve_cols(&f, &IntMatrix::scalar(r, p.clone())).ok_or(Error::NotSaturated)?
            }
            Precision::Mod(e) => {
                let modulus = p.pow(e);
                let det = f.det();
                let adj = solve_cols(&f, &IntMatrix::scalar(r, det.clone())).ok_or(Error::NotSaturated)?;
                let u = mod_inverse(&det, &modulus).ok_or(Error::NotSaturated)?;
                let v = adj.scale(&(&u * &p));
                IntMatrix::from_fn(r, r, |i, j| v.get(i, j).mod_floor(&modulus))
            }
        };
        out.push(v);
    }
    Ok(out)
}

/// W_r(M) = M / (Im V^r + Im dV^r), presented degreewise.
///
/// The structure maps are recorded as matrices on M: d acts on W_r, F maps
/// W_r to W_{r-1}, V maps W_r to W_{r+1}.
#[derive(Clone, Debug, Serialize)]
pub struct WrQuotient {
    pub r: u32,
    pub lo: i64,
    pub modules: Vec<PresentedModule>,
    pub d: Vec<IntMatrix>,
    #[serde(rename = "F")]
    pub f: Vec<IntMatrix>,
    #[serde(rename = "V")]
    pub v: Vec<IntMatrix>,
}

pub fn wr_quotient(m: &DieudonneComplex, r: u32) -> Result<WrQuotient> {
    if r == 0 {
        return Err(Error::InvalidInput("W_r needs r ≥ 1".into()));
    }
    let v = solve_verschiebung(m)?;
    let vr: Vec<IntMatrix> = v.iter().map(|x| x.pow(r)).collect();
    let mut modules = Vec::new();
    for (k, n) in m.degrees().enumerate() {
        let rank = m.rank(n);
        let mut rel = vr[k].clone();
        if k > 0 {
            rel = rel.hstack(&m.d(n - 1).mul(&vr[k - 1]));
        }
        if let Precision::Mod(e) = m.precision() {
            rel = rel.hstack(&IntMatrix::scalar(rank, BigInt::from(m.p()).pow(e)));
        }
        modules.push(PresentedModule::new(rank, rel));
    }
    let d = m.degrees().map(|n| m.d(n)).collect();
    let f = m.degrees().map(|n| m.f(n)).collect();
    Ok(WrQuotient { r, lo: m.lo(), modules, d, f, v })
}

impl WrQuotient {
    pub fn log_sizes(&self, p: u64) -> Vec<Option<u64>> {
        self.modules.iter().map(|x| x.log_size(p)).collect()
    }
}

fn columns_in(map: &IntMatrix, rel: &IntMatrix, target: &IntMatrix) -> bool {
    let basis = lattice_basis(target);
    map.mul(rel).columns().iter().all(|c| lattice_contains(&basis, c))
}

/// d, F, V and the restriction R: W_{r+1} → W_r respect the relation
/// subcomplexes, so they descend to the quotients.
pub fn check_wr_structure(m: &DieudonneComplex, r: u32) -> Result<CheckReport> {
    let mut rep = CheckReport::new(format!("W_{r} structure maps"));
    let cur = wr_quotient(m, r)?;
    let next = wr_quotient(m, r + 1)?;
    let prev = if r > 1 { Some(wr_quotient(m, r - 1)?) } else { None };
    let id = |k: usize| IntMatrix::identity(cur.modules[k].generators);
    for (k, n) in m.degrees().enumerate() {
        let rel = &cur.modules[k].relations;
        if k + 1 < cur.modules.len() {
            let ok = columns_in(&cur.d[k], rel, &cur.modules[k + 1].relations);
            rep.check("d descends", ok, || format!("degree {n}"), String::new);
        }
        if let Some(prev) = &prev {
            let ok = columns_in(&cur.f[k], rel, &prev.modules[k].relations);
            rep.check("F: W_r → W_{r-1}", ok, || format!("degree {n}"), String::new);
        }
        let ok = columns_in(&cur.v[k], rel, &next.modules[k].relations);
        rep.check("V: W_r → W_{r+1}", ok, || format!("degree {n}"), String::new);
        let ok = columns_in(&id(k), &next.modules[k].relations, rel);
        rep.check("R: W_{r+1} → W_r", ok, || format!("degree {n}"), String::new);
    }
    Ok(rep)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrictnessStage {
    pub r: u32,
    /// log_p |W_r^n| per degree; `None` for an infinite group.
    pub log_sizes: Vec<Option<u64>>,
    /// log_p of the kernel of M^n → W_r^n; `None` when it is infinite.
    pub kernel_log_sizes: Vec<Option<u64>>,
    /// M → W_r(M) is a quotient map, so its cokernel is always trivial.
    pub cokernel_log_sizes: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum StrictnessVerdict {
    StrictUpToPrecision { r_max: u32 },
    NotStrict { degree: i64, witness: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrictnessReport {
    pub stages: Vec<StrictnessStage>,
    /// Whether |W_r| stopped growing between the last two stages.
    pub stabilized: bool,
    pub verdict: StrictnessVerdict,
}

/// Compares M with its tower of quotients W_r(M) for r ≤ r_max.
///
/// The limit lim W_r(M) is approximated by W_{r_max}(M): M is reported
/// strict when M → W_{r_max}(M) is injective.
pub fn strictness_probe(m: &DieudonneComplex, r_max: u32) -> Result<StrictnessReport> {
    let p = m.p();
    let mut stages = Vec::new();
    let mut last = None;
    for r in 1..=r_max.max(1) {
        let w = wr_quotient(m, r)?;
        let log_sizes = w.log_sizes(p);
        let kernel_log_sizes = m
            .degrees()
            .enumerate()
            .map(|(k, n)| match m.precision() {
                Precision::Mod(e) => log_sizes[k].map(|s| e as u64 * m.rank(n) as u64 - s),
                Precision::Exact => (m.rank(n) == 0).then_some(0),
            })
            .collect();
        let cokernel_log_sizes = vec![0; log_sizes.len()];
        stages.push(StrictnessStage { r, log_sizes, kernel_log_sizes, cokernel_log_sizes });
        last = Some(w);
    }
    let stabilized =
        stages.len() >= 2 && stages[stages.len() - 1].log_sizes == stages[stages.len() - 2].log_sizes;
    let w = last.expect("at least one stage");
    let top = stages.last().expect("at least one stage");
    let mut verdict = StrictnessVerdict::StrictUpToPrecision { r_max };
    for (k, n) in m.degrees().enumerate() {
        if top.kernel_log_sizes[k] != Some(0) {
            let basis = lattice_basis(&w.modules[k].relations);
            let modulus = match m.precision() {
                Precision::Mod(e) => Some(BigInt::from(p).pow(e)),
                Precision::Exact => None,
            };
            let witness = basis
                .columns()
                .into_iter()
                .find(|c| match &modulus {
                    Some(q) => c.iter().any(|x| !x.is_multiple_of(q)),
                    None => c.iter().any(|x| !x.is_zero()),
                })
                .unwrap_or_default();
            let witness = witness.iter().map(|x| x.abs().to_string()).collect();
            verdict = StrictnessVerdict::NotStrict { degree: n, witness };
            break;
        }
    }
    Ok(StrictnessReport { stages, stabilized, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(p: u64, ranks: &[usize], d: &[i64], f: &[i64]) -> DieudonneComplex {
        let d: Vec<Vec<Vec<i64>>> = d.iter().map(|&x| vec![vec![x]]).collect();
        let f: Vec<Vec<Vec<i64>>> = f.iter().map(|&x| vec![vec![x]]).collect();
        DieudonneComplex::from_i64(p, 0, ranks, &d, &f).unwrap()
    }

    #[test]
    fn decalage_examples() {
        let z = eta_p(&DieudonneComplex::zero(3)).unwrap();
        assert_eq!(z.complex.total_rank(), 0);

        // (Z -p-> Z): L_0 = Z, η^1 = pZ, and d becomes 1 in the basis (1, p)
        let m = scalar(3, &[1, 1], &[3], &[3, 1]);
        let e = eta_p(&m).unwrap();
        assert_eq!(e.basis[0], IntMatrix::from_rows(&[vec![1]]));
        assert_eq!(e.basis[1], IntMatrix::from_rows(&[vec![1]]));
        assert_eq!(e.complex.d(0), IntMatrix::from_rows(&[vec![1]]));
        assert!(super::super::check_dieudonne(&e.complex).passed);

        // Z in degree 1 with d = 0: η^1 = pZ, spanned by p·1
        let m = DieudonneComplex::from_i64(5, 1, &[1], &[], &[vec![vec![1]]]).unwrap();
        let e = eta_p(&m).unwrap();
        assert_eq!(e.basis[0], IntMatrix::identity(1));
        assert_eq!(e.alpha[0], IntMatrix::identity(1));
    }

    #[test]
    fn saturation_examples() {
        assert!(is_saturated(&scalar(3, &[1], &[], &[1])));
        assert!(!is_saturated(&scalar(3, &[1], &[], &[3])));
        assert!(is_saturated(&DieudonneComplex::zero(2)));

        let t = saturate(&scalar(2, &[1], &[], &[1]), 8).unwrap();
        assert_eq!(t.stabilized_at, Some(0));

        let t = saturate(&scalar(3, &[1, 1], &[3], &[3, 1]), 8).unwrap();
        assert!(t.stabilized_at.unwrap() <= 1);
        assert!(is_saturated(t.result().unwrap()));
        assert!(t.check_functoriality().passed);

        let m = scalar(3, &[1], &[], &[9]);
        assert!(matches!(saturate(&m, 8), Err(Error::IterationLimit { iterations: 8 })));
        let t = saturation_tower(&m, 4).unwrap();
        assert_eq!(t.stages.len(), 5);
        assert!(t.check_functoriality().passed);
    }

    #[test]
    fn verschiebung_examples() {
        let v = solve_verschiebung(&scalar(5, &[1], &[], &[1])).unwrap();
        assert_eq!(v[0], IntMatrix::from_rows(&[vec![5]]));
        let m = DieudonneComplex::from_i64(3, 0, &[2], &[], &[vec![vec![1, 1], vec![0, 1]]]).unwrap();
        let v = solve_verschiebung(&m).unwrap();
        assert_eq!(v[0], IntMatrix::from_rows(&[vec![3, -3], vec![0, 3]]));
        assert!(matches!(solve_verschiebung(&scalar(3, &[1], &[], &[3])), Err(Error::NotSaturated)));
    }

    #[test]
    fn wr_examples() {
        let m = scalar(3, &[1], &[], &[1]);
        let w1 = wr_quotient(&m, 1).unwrap();
        assert_eq!(w1.modules[0].invariant_factors, vec![BigInt::from(3)]);
        let w3 = wr_quotient(&m, 3).unwrap();
        assert_eq!(w3.modules[0].invariant_factors, vec![BigInt::from(27)]);
        assert!(wr_quotient(&DieudonneComplex::zero(3), 2).unwrap().modules.is_empty());
        assert!(check_wr_structure(&m, 2).unwrap().passed);
        let sat = saturate(&scalar(3, &[1, 1], &[3], &[3, 1]), 8).unwrap();
        assert!(check_wr_structure(sat.result().unwrap(), 2).unwrap().passed);
    }

    #[test]
    fn strictness_examples() {
        let r = strictness_probe(&DieudonneComplex::zero(2), 6).unwrap();
        assert_eq!(r.verdict, StrictnessVerdict::StrictUpToPrecision { r_max: 6 });

        let r = strictness_probe(&scalar(2, &[1], &[], &[1]), 6).unwrap();
        assert!(matches!(r.verdict, StrictnessVerdict::NotStrict { degree: 0, .. }));
        let sizes: Vec<_> = r.stages.iter().map(|s| s.log_sizes[0]).collect();
        assert_eq!(sizes, (1..=6).map(Some).collect::<Vec<_>>());
        assert!(!r.stabilized);

        let m = scalar(2, &[1], &[], &[1]).with_precision(Precision::Mod(6));
        let r = strictness_probe(&m, 6).unwrap();
        assert_eq!(r.verdict, StrictnessVerdict::StrictUpToPrecision { r_max: 6 });
        assert_eq!(r.stages[5].kernel_log_sizes, vec![Some(0)]);
    }
}
