use crate::arith::{monomials_up_to, Coefficient, MPoly, RingMap};
use crate::report::CheckReport;
use crate::{Error, Result};

use super::forms::Form;

/// A commutative differential graded algebra Λ_A(M) with M free on
/// e_0..e_{r-1}, together with a graded endomorphism F.
///
/// The differential is the unique graded derivation with d(a) = δ(a) on A
/// (δ determined by δ(x_i)) and the given d(e_j). F is the ring map that is
/// φ on A and e_j ↦ F(e_j) on generators.
#[derive(Clone, Debug)]
pub struct ExteriorDga {
    p: u64,
    vars: Vec<String>,
    gens: Vec<String>,
    delta: Vec<Form>,
    d_gen: Vec<Form>,
    phi: RingMap,
    f_gen: Vec<Form>,
}

fn expect_degree(f: &Form, k: usize, what: &str) -> Result<()> {
    if f.is_zero() || f.degree() == Some(k) {
        Ok(())
    } else {
        Err(Error::ShapeMismatch(format!("{what} must be homogeneous of degree {k}, got {f}")))
    }
}

impl ExteriorDga {
    pub fn new(
        p: u64,
        gens: &[String],
        delta: Vec<Form>,
        d_gen: Vec<Form>,
        phi: RingMap,
        f_gen: Vec<Form>,
    ) -> Result<Self> {
        let vars = phi.source().to_vec();
        if phi.target() != vars.as_slice() {
            return Err(Error::ShapeMismatch("F on degree 0 must be an endomorphism".into()));
        }
        if delta.len() != vars.len() {
            return Err(Error::ArityMismatch { expected: vars.len(), found: delta.len() });
        }
        if d_gen.len() != gens.len() || f_gen.len() != gens.len() {
            return Err(Error::ArityMismatch { expected: gens.len(), found: d_gen.len().min(f_gen.len()) });
        }
        for f in delta.iter().chain(&f_gen) {
            expect_degree(f, 1, "derivation and Frobenius images")?;
        }
        for f in &d_gen {
            expect_degree(f, 2, "differentials of generators")?;
        }
        for f in delta.iter().chain(&f_gen).chain(&d_gen) {
            if f.vars() != vars.as_slice() || f.gens() != gens {
                return Err(Error::ShapeMismatch(format!("form {f} lives in another algebra")));
            }
        }
        Ok(ExteriorDga { p, vars, gens: gens.to_vec(), delta, d_gen, phi, f_gen })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn gens(&self) -> &[String] {
        &self.gens
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn phi(&self) -> &RingMap {
        &self.phi
    }

    pub fn frobenius_on_generator(&self, j: usize) -> &Form {
        &self.f_gen[j]
    }

    pub fn delta_of_generator(&self, i: usize) -> &Form {
        &self.delta[i]
    }

    pub fn d_of_generator(&self, j: usize) -> &Form {
        &self.d_gen[j]
    }

    pub fn zero(&self) -> Form {
        Form::zero(&self.vars, &self.gens)
    }

    pub fn function(&self, a: MPoly) -> Form {
        Form::function(&self.gens, a)
    }

    pub fn generator(&self, j: usize) -> Form {
        Form::generator(&self.vars, &self.gens, j)
    }

    fn basis_form(&self, idx: &[usize]) -> Form {
        Form::term(&self.gens, MPoly::one(&self.vars), idx.to_vec())
    }

    /// δ(a) = Σ_i ∂a/∂x_i · δ(x_i).
    pub fn derivation(&self, a: &MPoly) -> Form {
        let mut out = self.zero();
        for (i, dxi) in self.delta.iter().enumerate() {
            let da = a.partial(i);
            if !da.is_zero() {
                out = out.add(&dxi.scale(&da));
            }
        }
        out
    }

    /// d(e_I) by the graded Leibniz rule.
    fn d_basis(&self, idx: &[usize]) -> Form {
        let mut out = self.zero();
        for s in 0..idx.len() {
            let left = self.basis_form(&idx[..s]);
            let right = self.basis_form(&idx[s + 1..]);
            let t = left.wedge(&self.d_gen[idx[s]]).wedge(&right);
            out = out.add(&if s % 2 == 0 { t } else { t.neg() });
        }
        out
    }

    pub fn d(&self, w: &Form) -> Form {
        let mut out = self.zero();
        for (idx, a) in w.terms() {
            let e = self.basis_form(idx);
            out = out.add(&self.derivation(a).wedge(&e));
            out = out.add(&self.d_basis(idx).scale(a));
        }
        out
    }

    pub fn frob(&self, w: &Form) -> Form {
        let mut out = self.zero();
        for (idx, a) in w.terms() {
            let mut t = self.function(self.phi.apply(a).expect("coefficients live in the base ring"));
            for &j in idx {
                t = t.wedge(&self.f_gen[j]);
            }
            out = out.add(&t);
        }
        out
    }

    /// Forms x^m·e_I with |I| = k and total polynomial degree ≤ `bound`.
    pub fn monomial_basis(&self, k: usize, bound: u32) -> Vec<Form> {
        let monos = monomials_up_to(self.vars.len(), bound);
        let mut out = Vec::new();
        for idx in index_tuples(self.rank(), k) {
            for m in &monos {
                let a = MPoly::monomial(&self.vars, m.clone(), Coefficient::one());
                out.push(Form::term(&self.gens, a, idx.clone()));
            }
        }
        out
    }

    /// dF = pFd on every monomial form of polynomial degree ≤ `bound` in
    /// every form degree.
    pub fn check_dieudonne_relation(&self, bound: u32) -> CheckReport {
        let mut rep = CheckReport::new("dF = pFd");
        for k in 0..=self.rank() {
            for w in self.monomial_basis(k, bound) {
                let lhs = self.d(&self.frob(&w));
                let rhs = self.frob(&self.d(&w)).scale_int(self.p as i64);
                rep.check(
                    &format!("degree {k}"),
                    lhs == rhs,
                    || w.to_string(),
                    || format!("dF = {lhs}, pFd = {rhs}"),
                );
            }
        }
        rep
    }

    pub fn check_d_squared(&self, bound: u32) -> CheckReport {
        let mut rep = CheckReport::new("d^2 = 0");
        for k in 0..=self.rank() {
            for w in self.monomial_basis(k, bound) {
                let dd = self.d(&self.d(&w));
                rep.check(
                    &format!("degree {k}"),
                    dd.is_zero(),
                    || w.to_string(),
                    || format!("d(d(w)) = {dd}"),
                );
            }
        }
        rep
    }

    /// F(ω∧η) = F(ω)∧F(η) and the Leibniz rule for d on sample pairs.
    pub fn check_multiplicative(&self, samples: &[Form]) -> CheckReport {
        let mut rep = CheckReport::new("graded ring structure");
        for (i, a) in samples.iter().enumerate() {
            for b in &samples[i..] {
                let ab = a.wedge(b);
                let lhs = self.frob(&ab);
                let rhs = self.frob(a).wedge(&self.frob(b));
                rep.check(
                    "F multiplicative",
                    lhs == rhs,
                    || format!("{a} ; {b}"),
                    || format!("F(ab) = {lhs}, F(a)F(b) = {rhs}"),
                );
                let sign = if a.degree().unwrap_or(0) % 2 == 0 { 1 } else { -1 };
                let lhs = self.d(&ab);
                let rhs = self.d(a).wedge(b).add(&a.wedge(&self.d(b)).scale_int(sign));
                rep.check(
                    "Leibniz",
                    lhs == rhs,
                    || format!("{a} ; {b}"),
                    || format!("d(ab) = {lhs}, expected {rhs}"),
                );
            }
        }
        rep
    }

    /// F(a) ≡ a^p mod p for degree-0 samples.
    pub fn check_frobenius_mod_p(&self, samples: &[MPoly]) -> CheckReport {
        let mut rep = CheckReport::new("Fx = x^p mod p");
        for a in samples {
            let diff = &self.phi.apply(a).expect("same ring") - &a.pow(self.p as u32);
            let ok = diff.min_valuation(self.p).is_none_or(|v| v >= 1);
            rep.check("degree 0", ok, || a.to_string(), || format!("F(a) - a^p = {diff}"));
        }
        rep
    }
}

/// Strictly increasing k-tuples from 0..n, in lexicographic order.
pub fn index_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(n, k, 0, &mut Vec::new(), &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuples() {
        assert_eq!(index_tuples(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(index_tuples(2, 0), vec![Vec::<usize>::new()]);
        assert!(index_tuples(1, 2).is_empty());
    }
}
