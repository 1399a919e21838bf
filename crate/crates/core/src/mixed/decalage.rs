use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::arith::{lattice_basis, IntMatrix};
use crate::dieudonne::Precision;
use crate::{Error, Result};

use super::complex::{d_target, eps_target, Bidegree, GradedMixedComplex};

/// η_pC with the inclusion into C × C recorded per bidegree.
#[derive(Clone, Debug)]
pub struct MixedDecalage {
    pub complex: GradedMixedComplex,
    /// Columns are the basis pairs (x, y), x stacked over y, with x in C(w, i)
    /// and y in C(w + 1, i − 1).
    pub basis: BTreeMap<Bidegree, IntMatrix>,
}

/// Block matrix [[a, b], [c, e]].
fn blocks(a: &IntMatrix, b: &IntMatrix, c: &IntMatrix, e: &IntMatrix) -> IntMatrix {
    a.hstack(b).vstack(&c.hstack(e))
}

fn solve_cols(b: &IntMatrix, x: &IntMatrix, what: &str, at: Bidegree) -> Result<IntMatrix> {
    let cols: Option<Vec<Vec<BigInt>>> = x.columns().iter().map(|c| b.solve(c)).collect();
    let cols = cols.ok_or_else(|| {
        Error::InvalidInput(format!("η_p is not closed under {what} at {at:?}; the mixed laws fail"))
    })?;
    Ok(IntMatrix::from_columns(b.cols(), &cols))
}

/// (η_pC)(w, i) = {(x, y) : εx = py, εy = 0} with d(x, y) = (dx, −dy),
/// ε(x, y) = (y, 0) and, when present, F(x, y) = (Fx, pFy).
pub fn eta_p_mixed(c: &GradedMixedComplex) -> Result<MixedDecalage> {
    if c.precision() != Precision::Exact {
        return Err(Error::InvalidInput("mixed η_p needs an exact complex".into()));
    }
    let p = BigInt::from(c.p());
    // bidegrees where a pair can be nonzero
    let mut spots: Vec<Bidegree> = c.support().collect();
    spots.extend(c.support().map(|(w, i)| (w - 1, i + 1)));
    spots.sort();
    spots.dedup();

    let mut basis = BTreeMap::new();
    for &b in &spots {
        let (a, y) = (c.rank(b), c.rank(eps_target(b)));
        let z = eps_target(eps_target(b));
        let cond = blocks(
            &c.eps(b),
            &IntMatrix::scalar(y, -p.clone()),
            &IntMatrix::zeros(c.rank(z), a),
            &c.eps(eps_target(b)),
        );
        let k = if cond.rows() == 0 { IntMatrix::identity(a + y) } else { cond.kernel() };
        let k = lattice_basis(&k);
        if k.cols() > 0 {
            basis.insert(b, k);
        }
    }

    let empty = |b: Bidegree| IntMatrix::zeros(c.rank(b) + c.rank(eps_target(b)), 0);
    let basis_at = |b: Bidegree| basis.get(&b).cloned().unwrap_or_else(|| empty(b));
    let ranks = basis.iter().map(|(&b, k)| (b, k.cols())).collect();
    let mut d = BTreeMap::new();
    let mut eps = BTreeMap::new();
    let mut f = c.has_frobenius().then(BTreeMap::new);
    for (&b, k) in &basis {
        let e = eps_target(b);
        let (a, y) = (c.rank(b), c.rank(e));
        // d(x, y) = (dx, −dy)
        let t = d_target(b);
        let dm = blocks(
            &c.d(b),
            &IntMatrix::zeros(c.rank(t), y),
            &IntMatrix::zeros(c.rank(eps_target(t)), a),
            &c.d(e).scale(&BigInt::from(-1)),
        );
        d.insert(b, solve_cols(&basis_at(t), &dm.mul(k), "d", b)?);
        // ε(x, y) = (y, 0)
        let em = blocks(
            &IntMatrix::zeros(y, a),
            &IntMatrix::identity(y),
            &IntMatrix::zeros(c.rank(eps_target(e)), a),
            &IntMatrix::zeros(c.rank(eps_target(e)), y),
        );
        eps.insert(b, solve_cols(&basis_at(e), &em.mul(k), "ε", b)?);
        if let Some(f) = f.as_mut() {
            let fm = c.f(b).expect("F present").block_diag(&c.f(e).expect("F present").scale(&p));
            f.insert(b, solve_cols(k, &fm.mul(k), "F", b)?);
        }
    }
    let complex = GradedMixedComplex::new(c.p(), Precision::Exact, ranks, d, eps, f)?;
    Ok(MixedDecalage { complex, basis })
}

#[cfg(test)]
mod tests {
    use super::super::complex::{check_mixed, heart_embed, CochainComplex};
    use super::*;

    fn chain(p: u64, d: i64) -> CochainComplex {
        CochainComplex::new(p, 0, vec![1, 1], vec![IntMatrix::from_rows(&[vec![d]])], Precision::Exact)
    }

    #[test]
    fn decalage_examples() {
        let z = eta_p_mixed(&GradedMixedComplex::zero(3, Precision::Exact)).unwrap();
        assert_eq!(z.complex.total_rank(), 0);

        // heart(Z -p-> Z): pairs (x, x) in weight 0 and (x, 0) in weight 1,
        // joined by ε = 1, the mirror of the unmixed décalage
        let e = eta_p_mixed(&heart_embed(&chain(3, 3))).unwrap();
        assert_eq!(e.complex.ranks().len(), 2);
        assert_eq!(e.basis[&(0, 0)], IntMatrix::from_rows(&[vec![1], vec![1]]));
        assert_eq!(e.complex.eps((0, 0)), IntMatrix::from_rows(&[vec![1]]));
        assert!(check_mixed(&e.complex).passed);

        // ε = 0: py = 0 forces y = 0, so η_pC ≅ C
        let flat = CochainComplex::new(2, 0, vec![2], vec![], Precision::Exact);
        let c = heart_embed(&flat);
        let e = eta_p_mixed(&c).unwrap();
        assert_eq!(e.complex.ranks(), c.ranks());
        assert!(e.complex.eps_maps().is_empty());
    }

    #[test]
    fn frobenius_passes_to_decalage() {
        let m = crate::dieudonne::DieudonneComplex::from_i64(
            3,
            0,
            &[1, 1],
            &[vec![vec![3]]],
            &[vec![vec![3]], vec![vec![1]]],
        )
        .unwrap();
        let h = heart_embed(&CochainComplex::from_dieudonne(&m));
        let e = eta_p_mixed(&h).unwrap();
        assert!(e.complex.has_frobenius());
        assert!(check_mixed(&e.complex).passed);
    }
}
