use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::Serialize;

use crate::arith::{monomials_up_to, Coefficient, IntMatrix, MPoly, Monomial, RingMap};
use crate::derham::{index_tuples, DeRhamComplex, DieudonneDeRham, Form};
use crate::dieudonne::Precision;
use crate::report::CheckReport;
use crate::witt::DeltaRing;
use crate::{Error, Result};

use super::complex::{Bidegree, GradedMixedComplex};
use super::truncation::{beilinson_truncate, TruncationReport};

/// Ω^•_A as a graded mixed complex: Ω^n sits in weight n and degree −n with
/// zero internal differential, ε is the de Rham differential and F acts by
/// φ on functions and by the recorded images on the dx_i.
#[derive(Clone, Debug)]
pub struct MixedDeRham {
    complex: DeRhamComplex,
    p: u64,
    phi: RingMap,
    fdx: Vec<Form>,
}

/// F(dx_i) = d(φ(x_i))/p, read off from the lift alone.
pub fn ddr_mixed(c: &DeRhamComplex, r: &DeltaRing) -> Result<MixedDeRham> {
    if r.vars() != c.vars() {
        return Err(Error::ShapeMismatch("lift and complex live on different rings".into()));
    }
    let p = r.p();
    let mut fdx = Vec::with_capacity(c.num_vars());
    for i in 0..c.num_vars() {
        let dphi = c.d(&c.function(r.phi(&MPoly::var(c.vars(), i))?));
        let mut out = c.zero();
        for (idx, a) in dphi.terms() {
            out.add_term(idx.clone(), a.exact_div_p(p)?);
        }
        fdx.push(out);
    }
    Ok(MixedDeRham { complex: c.clone(), p, phi: r.lift().clone(), fdx })
}

/// The classical Dieudonné complex (Ω^•, F) placed in the heart.
pub fn heart_embed_de_rham(d: &DieudonneDeRham) -> MixedDeRham {
    let c = d.complex();
    MixedDeRham {
        complex: c.clone(),
        p: d.p(),
        phi: d.phi().clone(),
        fdx: (0..c.num_vars()).map(|i| d.frobenius_dx(i).clone()).collect(),
    }
}

/// Weight n, the form degree, with its labeled generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LabeledPiece {
    pub weight: i64,
    pub degree: i64,
    pub generators: Vec<String>,
}

/// The data determining a MixedDeRham up to equality: pieces with their
/// A-module generators, ε on the ring generators, F on ring and module
/// generators, and both operators on every monomial form up to a bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LabeledPresentation {
    pub p: u64,
    pub vars: Vec<String>,
    pub pieces: Vec<LabeledPiece>,
    pub eps: BTreeMap<String, String>,
    pub frobenius: BTreeMap<String, String>,
}

impl MixedDeRham {
    pub fn complex(&self) -> &DeRhamComplex {
        &self.complex
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn phi(&self) -> &RingMap {
        &self.phi
    }

    pub fn bidegree(n: usize) -> Bidegree {
        (n as i64, -(n as i64))
    }

    pub fn frobenius_dx(&self, i: usize) -> &Form {
        &self.fdx[i]
    }

    pub fn eps(&self, w: &Form) -> Form {
        self.complex.d(w)
    }

    pub fn frob(&self, w: &Form) -> Form {
        let c = &self.complex;
        let mut out = c.zero();
        for (idx, a) in w.terms() {
            let mut t = c.function(self.phi.apply(a).expect("coefficients live in A"));
            for &j in idx {
                t = t.wedge(&self.fdx[j]);
            }
            out = out.add(&t);
        }
        out
    }

    fn label(&self, idx: &[usize]) -> String {
        if idx.is_empty() {
            return "1".into();
        }
        idx.iter().map(|&i| self.complex.gens()[i].as_str()).collect::<Vec<_>>().join("∧")
    }

    /// Forms x^m·dx_I of form degree n and polynomial degree ≤ bound.
    pub fn monomial_forms(&self, n: usize, bound: u32) -> Vec<(Vec<usize>, Monomial, Form)> {
        let c = &self.complex;
        let monos = monomials_up_to(c.num_vars(), bound);
        let mut out = Vec::new();
        for idx in index_tuples(c.num_vars(), n) {
            for m in &monos {
                let a = MPoly::monomial(c.vars(), m.clone(), Coefficient::one());
                out.push((idx.clone(), m.clone(), Form::term(c.gens(), a, idx.clone())));
            }
        }
        out
    }

    pub fn presentation(&self, bound: u32) -> LabeledPresentation {
        let c = &self.complex;
        let pieces = (0..=c.num_vars())
            .map(|n| {
                let (weight, degree) = Self::bidegree(n);
                let generators = index_tuples(c.num_vars(), n).iter().map(|i| self.label(i)).collect();
                LabeledPiece { weight, degree, generators }
            })
            .collect();
        let mut eps = BTreeMap::new();
        let mut frobenius = BTreeMap::new();
        for n in 0..=c.num_vars() {
            for (_, _, w) in self.monomial_forms(n, bound) {
                eps.insert(w.to_string(), self.eps(&w).to_string());
                frobenius.insert(w.to_string(), self.frob(&w).to_string());
            }
        }
        LabeledPresentation { p: self.p, vars: c.vars().to_vec(), pieces, eps, frobenius }
    }

    /// The polynomial-degree ≤ bound part over Z_(p), without F (which raises
    /// polynomial degree). ε lowers polynomial degree, so this is closed.
    pub fn finite_model(&self, bound: u32) -> GradedMixedComplex {
        let c = &self.complex;
        let forms: Vec<_> = (0..=c.num_vars()).map(|n| self.monomial_forms(n, bound)).collect();
        let position: Vec<BTreeMap<(Vec<usize>, Monomial), usize>> = forms
            .iter()
            .map(|fs| fs.iter().enumerate().map(|(k, (i, m, _))| ((i.clone(), m.clone()), k)).collect())
            .collect();
        let mut ranks = BTreeMap::new();
        let mut eps = BTreeMap::new();
        for n in 0..=c.num_vars() {
            ranks.insert(Self::bidegree(n), forms[n].len());
            if n == c.num_vars() {
                continue;
            }
            let mut m = IntMatrix::zeros(forms[n + 1].len(), forms[n].len());
            for (col, (_, _, w)) in forms[n].iter().enumerate() {
                for (idx, a) in self.eps(w).terms() {
                    for (mono, coef) in a.terms() {
                        let row = position[n + 1][&(idx.clone(), mono.clone())];
                        let v: BigInt = coef.to_integer().expect("d has integer coefficients");
                        m.set(row, col, v);
                    }
                }
            }
            eps.insert(Self::bidegree(n), m);
        }
        GradedMixedComplex::new(self.p, Precision::Exact, ranks, BTreeMap::new(), eps, None)
            .expect("monomial model is well formed")
    }

    /// The mixed laws on monomial forms up to `bound`. The internal
    /// differential is zero, so d² = 0, dε + εd = 0 and Fd = dF hold
    /// identically; ε² = 0, εF = pFε and F = φ on weight 0 are tested.
    pub fn check(&self, bound: u32) -> CheckReport {
        let mut rep = CheckReport::new("mixed de Rham laws");
        let p = self.p as i64;
        for n in 0..=self.complex.num_vars() {
            for (_, _, w) in self.monomial_forms(n, bound) {
                let ee = self.eps(&self.eps(&w));
                rep.check("ε^2 = 0", ee.is_zero(), || w.to_string(), || ee.to_string());
                let lhs = self.eps(&self.frob(&w));
                let rhs = self.frob(&self.eps(&w)).scale_int(p);
                rep.check("εF = pFε", lhs == rhs, || w.to_string(), || format!("εF = {lhs}, pFε = {rhs}"));
            }
        }
        for (i, x) in self.complex.vars().iter().enumerate() {
            let a = MPoly::var(self.complex.vars(), i);
            let fx = self.frob(&self.complex.function(a.clone()));
            let phi = self.complex.function(self.phi.apply(&a).expect("same ring"));
            rep.check("F = φ in weight 0", fx == phi, || x.clone(), || fx.to_string());
        }
        rep
    }

    /// The Beilinson truncation t_{≥0}. Every weight column is concentrated in
    /// degree −n, so the truncation is the identity; this is confirmed on the
    /// finite model up to `bound`, and a failure is reported as an error.
    pub fn beilinson_truncate(&self, bound: u32) -> Result<(TruncationReport, MixedDeRham)> {
        let model = self.finite_model(bound);
        let (report, t) = beilinson_truncate(&model);
        let t = t.expect("finite model is exact");
        if !report.t_connective || t.ranks() != model.ranks() || t.eps_maps() != model.eps_maps() {
            return Err(Error::InvalidInput(format!(
                "mixed de Rham complex is not t-connective at {:?}",
                report.connective_witness
            )));
        }
        Ok((report, self.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::super::complex::check_mixed;
    use super::*;
    use crate::arith::var_names;
    use crate::derham::{build_de_rham, frobenius_on_forms};

    fn setup(vars: &[&str], p: u64, images: &[&str]) -> (DeRhamComplex, DeltaRing) {
        let v = var_names(vars);
        (build_de_rham(&v), DeltaRing::parse(p, &v, images).unwrap())
    }

    #[test]
    fn weight_one_frobenius_of_the_standard_lift() {
        for p in [2u64, 3, 5] {
            let (c, r) = setup(&["x"], p, &[&format!("x^{p}")]);
            let m = ddr_mixed(&c, &r).unwrap();
            let expect = c.dx(0).scale(&MPoly::var(c.vars(), 0).pow(p as u32 - 1));
            assert_eq!(*m.frobenius_dx(0), expect);
            assert!(m.check(4).passed);
        }
    }

    #[test]
    fn two_variables_weight_two_is_the_wedge() {
        let (c, r) = setup(&["x", "y"], 3, &["x^3 + 3*y", "y^3"]);
        let m = ddr_mixed(&c, &r).unwrap();
        assert_eq!(m.presentation(0).pieces[2].generators, vec!["dx∧dy".to_string()]);
        let top = c.dx(0).wedge(&c.dx(1));
        assert_eq!(m.frob(&top), m.frobenius_dx(0).wedge(m.frobenius_dx(1)));
        assert!(m.check(3).passed);
        assert!(check_mixed(&m.finite_model(3)).passed);
    }

    #[test]
    fn truncation_recovers_the_classical_complex() {
        let (c, r) = setup(&["x", "y"], 2, &["x^2 + 2*y", "y^2 + 2*x*y"]);
        let m = ddr_mixed(&c, &r).unwrap();
        let (report, t) = m.beilinson_truncate(3).unwrap();
        assert!(report.t_connective && report.t_coconnective);
        let classical = heart_embed_de_rham(&frobenius_on_forms(&c, &r).unwrap());
        assert_eq!(t.presentation(3), classical.presentation(3));
    }

    #[test]
    fn mismatched_rings_are_rejected() {
        let (_, r) = setup(&["x"], 3, &["x^3"]);
        let c = build_de_rham(&var_names(&["y"]));
        assert!(matches!(ddr_mixed(&c, &r), Err(Error::ShapeMismatch(_))));
    }
}
