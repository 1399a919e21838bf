//! De Rham complexes of polynomial rings, the Frobenius induced by a lift,
//! and maps out of Ω_R determined by their degree-0 part.

mod dga;
mod forms;

pub use dga::{index_tuples, ExteriorDga};
pub use forms::{merge_sign, Form};

use num_integer::binomial;

use crate::arith::{MPoly, RingMap};
use crate::report::CheckReport;
use crate::witt::DeltaRing;
use crate::{Error, Result};

/// Ω^•_A for A = Z_(p)[x_1..x_v]: Ω^i is free on dx_I, |I| = i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeRhamComplex {
    vars: Vec<String>,
    gens: Vec<String>,
}

pub fn build_de_rham(vars: &[String]) -> DeRhamComplex {
    DeRhamComplex { vars: vars.to_vec(), gens: vars.iter().map(|v| format!("d{v}")).collect() }
}

impl DeRhamComplex {
    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn gens(&self) -> &[String] {
        &self.gens
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    /// Rank of Ω^i over A.
    pub fn rank(&self, i: usize) -> usize {
        if i > self.vars.len() {
            0
        } else {
            binomial(self.vars.len(), i)
        }
    }

    pub fn basis(&self, i: usize) -> Vec<Vec<usize>> {
        index_tuples(self.vars.len(), i)
    }

    pub fn function(&self, a: MPoly) -> Form {
        Form::function(&self.gens, a)
    }

    pub fn dx(&self, i: usize) -> Form {
        Form::generator(&self.vars, &self.gens, i)
    }

    pub fn zero(&self) -> Form {
        Form::zero(&self.vars, &self.gens)
    }

    /// The DGA with differential d and a given graded endomorphism.
    fn dga_with(&self, p: u64, phi: RingMap, f_gen: Vec<Form>) -> Result<ExteriorDga> {
        let delta = (0..self.num_vars()).map(|i| self.dx(i)).collect();
        let d_gen = vec![self.zero(); self.num_vars()];
        ExteriorDga::new(p, &self.gens, delta, d_gen, phi, f_gen)
    }

    fn plain_dga(&self) -> ExteriorDga {
        let id = RingMap::identity(&self.vars);
        let f_gen = (0..self.num_vars()).map(|i| self.dx(i)).collect();
        self.dga_with(2, id, f_gen).expect("identity data is well formed")
    }

    pub fn d(&self, w: &Form) -> Form {
        self.plain_dga().d(w)
    }

    /// d² = 0 on monomial forms up to `bound` and Leibniz on `samples`.
    pub fn check_laws(&self, bound: u32, samples: &[Form]) -> CheckReport {
        let dga = self.plain_dga();
        let mut rep = CheckReport::new("de Rham laws");
        rep.absorb(dga.check_d_squared(bound));
        let mut leib = dga.check_multiplicative(samples);
        leib.witnesses.retain(|w| w.law == "Leibniz");
        rep.absorb(leib);
        rep
    }
}

/// Ω^•_A with the Frobenius induced by a lift φ:
/// F(a·dx_I) = φ(a)·F(dx_{i_1})∧…, F(dx) = x^{p-1}dx + d(δx).
#[derive(Clone, Debug)]
pub struct DieudonneDeRham {
    complex: DeRhamComplex,
    lift: Option<DeltaRing>,
    dga: ExteriorDga,
}

pub fn frobenius_on_forms(c: &DeRhamComplex, r: &DeltaRing) -> Result<DieudonneDeRham> {
    if r.vars() != c.vars() {
        return Err(Error::ShapeMismatch("lift and complex live on different rings".into()));
    }
    let p = r.p();
    let mut f_gen = Vec::with_capacity(c.num_vars());
    for i in 0..c.num_vars() {
        let x = MPoly::var(c.vars(), i);
        let dlt = r.delta(&x)?;
        let fdx = c.dx(i).scale(&x.pow(p as u32 - 1)).add(&c.d(&c.function(dlt)));
        f_gen.push(fdx);
    }
    let dga = c.dga_with(p, r.lift().clone(), f_gen)?;
    Ok(DieudonneDeRham { complex: c.clone(), lift: Some(r.clone()), dga })
}

impl DieudonneDeRham {
    /// Builds the structure from arbitrary degree-0 and dx images without
    /// validation; used to exercise the checkers on broken data.
    pub fn from_parts_unchecked(c: &DeRhamComplex, p: u64, phi: RingMap, fdx: Vec<Form>) -> Result<Self> {
        let dga = c.dga_with(p, phi, fdx)?;
        Ok(DieudonneDeRham { complex: c.clone(), lift: None, dga })
    }

    pub fn complex(&self) -> &DeRhamComplex {
        &self.complex
    }

    pub fn lift(&self) -> Option<&DeltaRing> {
        self.lift.as_ref()
    }

    pub fn dga(&self) -> &ExteriorDga {
        &self.dga
    }

    pub fn p(&self) -> u64 {
        self.dga.p()
    }

    pub fn phi(&self) -> &RingMap {
        self.dga.phi()
    }

    /// F(dx_i).
    pub fn frobenius_dx(&self, i: usize) -> &Form {
        self.dga.frobenius_on_generator(i)
    }

    pub fn frob(&self, w: &Form) -> Form {
        self.dga.frob(w)
    }

    pub fn d(&self, w: &Form) -> Form {
        self.dga.d(w)
    }

    /// The matrix of F on Ω^1 in the basis dx_i: column i is F(dx_i).
    pub fn frobenius_matrix(&self) -> Vec<Vec<MPoly>> {
        let v = self.complex.num_vars();
        (0..v).map(|row| (0..v).map(|col| self.frobenius_dx(col).coeff(&[row])).collect()).collect()
    }
}

/// The morphism Ω_R → target determined by a Frobenius-compatible ring map.
#[derive(Clone, Debug)]
pub struct DieudonneAlgebraMap {
    source: DieudonneDeRham,
    target: DieudonneDeRham,
    on_functions: RingMap,
    on_dx: Vec<Form>,
}

impl DieudonneAlgebraMap {
    pub fn ring_map(&self) -> &RingMap {
        &self.on_functions
    }

    /// Image of dx_i.
    pub fn image_dx(&self, i: usize) -> &Form {
        &self.on_dx[i]
    }

    pub fn apply(&self, w: &Form) -> Form {
        let mut out = self.target.complex.zero();
        for (idx, a) in w.terms() {
            let fa = self.on_functions.apply(a).expect("coefficients live in the source ring");
            let mut t = self.target.complex.function(fa);
            for &j in idx {
                t = t.wedge(&self.on_dx[j]);
            }
            out = out.add(&t);
        }
        out
    }

    /// Commutation with d and F on the generators x_i and dx_i, and
    /// uniqueness: the value on dx_i is forced to be d(f(x_i)).
    pub fn check(&self) -> CheckReport {
        let mut rep = CheckReport::new("Dieudonné algebra map");
        let src = &self.source.complex;
        for i in 0..src.num_vars() {
            let x = src.function(MPoly::var(src.vars(), i));
            let dx = src.dx(i);
            let fx = self.apply(&x);
            let name = &src.vars()[i];
            let forced = self.target.d(&fx);
            rep.check(
                "determined by f",
                self.apply(&dx) == forced,
                || name.clone(),
                || format!("image of d{name} is {}, d(f({name})) = {forced}", self.apply(&dx)),
            );
            for (law, w) in [("commutes with d", &x), ("commutes with d", &dx)] {
                let lhs = self.apply(&self.source.d(w));
                let rhs = self.target.d(&self.apply(w));
                rep.check(law, lhs == rhs, || w.to_string(), || format!("{lhs} vs {rhs}"));
            }
            for w in [&x, &dx] {
                let lhs = self.apply(&self.source.frob(w));
                let rhs = self.target.frob(&self.apply(w));
                rep.check("commutes with F", lhs == rhs, || w.to_string(), || format!("{lhs} vs {rhs}"));
            }
        }
        rep
    }
}

/// The unique map of Dieudonné algebras Ω_R → target extending `f`.
///
/// Fails with `FrobeniusMismatch` unless f∘φ_R = F_target∘f on generators.
pub fn universal_da_map(r: &DeltaRing, target: &DieudonneDeRham, f: &RingMap) -> Result<DieudonneAlgebraMap> {
    if f.source() != r.vars() || f.target() != target.complex.vars() {
        return Err(Error::ShapeMismatch("ring map does not match source and target".into()));
    }
    for (i, name) in r.vars().iter().enumerate() {
        let x = MPoly::var(r.vars(), i);
        let lhs = f.apply(&r.phi(&x)?)?;
        let rhs = target.phi().apply(&f.apply(&x)?)?;
        if lhs != rhs {
            return Err(Error::FrobeniusMismatch { generator: name.clone() });
        }
    }
    let source = frobenius_on_forms(&build_de_rham(r.vars()), r)?;
    let on_dx = f.images().iter().map(|im| target.d(&target.complex.function(im.clone()))).collect();
    Ok(DieudonneAlgebraMap { source, target: target.clone(), on_functions: f.clone(), on_dx })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::var_names;

    fn poly(v: &[String], s: &str) -> MPoly {
        MPoly::parse(v, s).unwrap()
    }

    #[test]
    fn ranks_and_differentials() {
        let v = var_names(&["x"]);
        let c = build_de_rham(&v);
        assert_eq!((c.rank(0), c.rank(1), c.rank(2)), (1, 1, 0));
        let d = c.d(&c.function(poly(&v, "x^2")));
        assert_eq!(d, c.dx(0).scale(&poly(&v, "2*x")));

        let v = var_names(&["x", "y"]);
        let c = build_de_rham(&v);
        let x_dy = c.dx(1).scale(&poly(&v, "x"));
        let y_dx = c.dx(0).scale(&poly(&v, "y"));
        let dxdy = c.dx(0).wedge(&c.dx(1));
        assert_eq!(c.d(&x_dy), dxdy);
        assert_eq!(c.d(&y_dx), dxdy.neg());
        let samples = vec![x_dy, y_dx, c.function(poly(&v, "x*y + 3"))];
        let rep = c.check_laws(4, &samples);
        assert!(rep.passed, "{rep}");
    }

    #[test]
    fn frobenius_examples() {
        let v = var_names(&["x"]);
        let c = build_de_rham(&v);
        let r = DeltaRing::frobenius_lift(&v, 3).unwrap();
        let f = frobenius_on_forms(&c, &r).unwrap();
        assert_eq!(f.frobenius_dx(0), &c.dx(0).scale(&poly(&v, "x^2")));

        let r = DeltaRing::parse(3, &v, &["x^3 + 3*x"]).unwrap();
        let f = frobenius_on_forms(&c, &r).unwrap();
        assert_eq!(f.frobenius_dx(0), &c.dx(0).scale(&poly(&v, "x^2 + 1")));
        assert!(f.dga().check_dieudonne_relation(6).passed);

        let v = var_names(&["x", "y"]);
        let c = build_de_rham(&v);
        let r = DeltaRing::frobenius_lift(&v, 2).unwrap();
        let f = frobenius_on_forms(&c, &r).unwrap();
        let top = c.dx(0).wedge(&c.dx(1));
        assert_eq!(f.frob(&top), top.scale(&poly(&v, "x*y")));
    }

    #[test]
    fn universal_map_examples() {
        let x = var_names(&["x"]);
        let y = var_names(&["y"]);
        let p = 3;
        let rx = DeltaRing::frobenius_lift(&x, p).unwrap();
        let ry = DeltaRing::frobenius_lift(&y, p).unwrap();
        let tx = frobenius_on_forms(&build_de_rham(&x), &rx).unwrap();
        let ty = frobenius_on_forms(&build_de_rham(&y), &ry).unwrap();

        let id = universal_da_map(&rx, &tx, &RingMap::identity(&x)).unwrap();
        assert_eq!(id.image_dx(0), &build_de_rham(&x).dx(0));
        assert!(id.check().passed);

        let zero = universal_da_map(&rx, &tx, &RingMap::parse(&x, &x, &["0"]).unwrap()).unwrap();
        assert!(zero.image_dx(0).is_zero());
        assert!(zero.check().passed);

        let g = universal_da_map(&rx, &ty, &RingMap::parse(&x, &y, &["y^3"]).unwrap()).unwrap();
        let cy = build_de_rham(&y);
        assert_eq!(g.image_dx(0), &cy.dx(0).scale(&poly(&y, "3*y^2")));
        assert!(g.check().passed);

        let bad = RingMap::parse(&x, &y, &["y + 1"]).unwrap();
        assert!(matches!(universal_da_map(&rx, &ty, &bad), Err(Error::FrobeniusMismatch { .. })));
    }
}
