use crate::arith::{monomials_up_to, Coefficient, MPoly, RingMap};
use crate::derham::{DieudonneDeRham, ExteriorDga, Form};
use crate::report::CheckReport;
use crate::Result;

/// A commutative differential graded algebra with Frobenius, seen through
/// the checks a Dieudonné algebra must pass.
pub trait DieudonneAlgebraView {
    fn p(&self) -> u64;
    /// Lowest degree carrying a nonzero piece.
    fn lowest_degree(&self) -> i64;
    /// dF = pFd on a spanning set of polynomial degree ≤ `bound`.
    fn check_relation(&self, bound: u32) -> CheckReport;
    /// d² = 0, F multiplicative and the graded Leibniz rule.
    fn check_ring_structure(&self, bound: u32) -> CheckReport;
    /// F(x) ≡ x^p mod p in degree 0.
    fn check_degree_zero(&self, bound: u32) -> CheckReport;
}

impl DieudonneAlgebraView for ExteriorDga {
    fn p(&self) -> u64 {
        ExteriorDga::p(self)
    }

    fn lowest_degree(&self) -> i64 {
        0
    }

    fn check_relation(&self, bound: u32) -> CheckReport {
        self.check_dieudonne_relation(bound)
    }

    fn check_ring_structure(&self, bound: u32) -> CheckReport {
        let mut rep = self.check_d_squared(bound);
        let samples: Vec<Form> =
            (0..=self.rank()).flat_map(|k| self.monomial_basis(k, bound.min(2))).collect();
        rep.absorb(self.check_multiplicative(&samples));
        rep
    }

    fn check_degree_zero(&self, bound: u32) -> CheckReport {
        let samples: Vec<MPoly> = monomials_up_to(self.vars().len(), bound)
            .into_iter()
            .map(|m| MPoly::monomial(self.vars(), m, Coefficient::one()))
            .collect();
        self.check_frobenius_mod_p(&samples)
    }
}

impl DieudonneAlgebraView for DieudonneDeRham {
    fn p(&self) -> u64 {
        DieudonneDeRham::p(self)
    }

    fn lowest_degree(&self) -> i64 {
        0
    }

    fn check_relation(&self, bound: u32) -> CheckReport {
        self.dga().check_relation(bound)
    }

    fn check_ring_structure(&self, bound: u32) -> CheckReport {
        self.dga().check_ring_structure(bound)
    }

    fn check_degree_zero(&self, bound: u32) -> CheckReport {
        self.dga().check_degree_zero(bound)
    }
}

/// Coconnectivity, the graded ring structure, dF = pFd and the mod-p
/// Frobenius condition in degree 0.
pub fn check_dieudonne_algebra(a: &dyn DieudonneAlgebraView, bound: u32) -> CheckReport {
    let mut rep = CheckReport::new("Dieudonné algebra");
    let low = a.lowest_degree();
    rep.check(
        "coconnective",
        low >= 0,
        || format!("degree {low}"),
        || "nonzero piece in negative degree".into(),
    );
    rep.absorb(a.check_ring_structure(bound));
    rep.absorb(a.check_relation(bound));
    rep.absorb(a.check_degree_zero(bound));
    rep
}

/// Data (A, M, φ_A, φ_M, δ, d) for a Dieudonné algebra structure on ⊕ΛⁱM:
/// A = Z_(p)[vars], M free on `gens`, δ: A → M given on generators, d: M → Λ²M
/// and φ_M: M → M given on the basis.
#[derive(Clone, Debug)]
pub struct ClassificationDatum {
    dga: ExteriorDga,
}

/// Which way round the p sits in the two relations on generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    /// δ∘φ_A = p·φ_M∘δ and d∘φ_M = p·(φ_M∧φ_M)∘d, equivalent to dF = pFd.
    Standard,
    /// φ_M∘δ = p·δ∘φ_A and (φ_M∧φ_M)∘d = p·d∘φ_M.
    Reversed,
}

impl ClassificationDatum {
    pub fn new(
        p: u64,
        gens: &[String],
        phi_a: RingMap,
        phi_m: Vec<Form>,
        delta: Vec<Form>,
        d: Vec<Form>,
    ) -> Result<Self> {
        Ok(ClassificationDatum { dga: ExteriorDga::new(p, gens, delta, d, phi_a, phi_m)? })
    }

    /// M = Ω^1, δ = d and φ_M = F on Ω^1.
    pub fn from_de_rham(f: &DieudonneDeRham) -> Self {
        ClassificationDatum { dga: f.dga().clone() }
    }

    /// The assembled structure on ⊕ΛⁱM.
    pub fn assemble(&self) -> &ExteriorDga {
        &self.dga
    }

    /// Invariants assumed by the classification: φ_A is a Frobenius lift,
    /// d² = 0 and the Leibniz rules on sample forms.
    pub fn check_invariants(&self, bound: u32) -> CheckReport {
        let mut rep = CheckReport::new("classification datum");
        rep.absorb(self.dga.check_degree_zero(bound));
        rep.absorb(self.dga.check_ring_structure(bound));
        rep
    }
}

#[derive(Clone, Debug)]
pub struct ClassificationCheck {
    pub relations: CheckReport,
    /// The full Dieudonné algebra check, run only when the relations hold.
    pub assembled: Option<CheckReport>,
}

impl ClassificationCheck {
    pub fn passed(&self) -> bool {
        self.relations.passed && self.assembled.as_ref().is_some_and(|r| r.passed)
    }
}

/// Checks the two p-twisted relations on the generators x_i of A and e_j of M.
pub fn classify_relations_check(
    datum: &ClassificationDatum,
    orientation: Orientation,
    bound: u32,
) -> ClassificationCheck {
    let dga = &datum.dga;
    let p = dga.p() as i64;
    let mut rep = CheckReport::new("classification relations");
    for (i, name) in dga.vars().iter().enumerate() {
        let x = MPoly::var(dga.vars(), i);
        let delta_phi = dga.derivation(&dga.phi().apply(&x).expect("endomorphism"));
        let phi_delta = dga.frob(dga.delta_of_generator(i));
        let (lhs, rhs) = match orientation {
            Orientation::Standard => (delta_phi, phi_delta.scale_int(p)),
            Orientation::Reversed => (phi_delta, delta_phi.scale_int(p)),
        };
        rep.check("on A", lhs == rhs, || name.clone(), || format!("{lhs} vs {rhs}"));
    }
    for (j, name) in dga.gens().iter().enumerate() {
        let d_phi = dga.d(dga.frobenius_on_generator(j));
        let phi_d = dga.frob(dga.d_of_generator(j));
        let (lhs, rhs) = match orientation {
            Orientation::Standard => (d_phi, phi_d.scale_int(p)),
            Orientation::Reversed => (phi_d, d_phi.scale_int(p)),
        };
        rep.check("on M", lhs == rhs, || name.clone(), || format!("{lhs} vs {rhs}"));
    }
    let assembled = rep.passed.then(|| check_dieudonne_algebra(dga, bound));
    ClassificationCheck { relations: rep, assembled }
}

#[derive(Clone, Debug)]
pub struct CatalogDatum {
    pub name: &'static str,
    pub datum: ClassificationDatum,
}

/// Ten classification data over Z_(p)[x], Z_(p)[x, y] or Z_(p), some of
/// which violate the relations.
pub fn classification_catalog() -> Vec<CatalogDatum> {
    use crate::arith::var_names;
    use crate::derham::{build_de_rham, frobenius_on_forms};
    use crate::witt::DeltaRing;

    let de_rham = |p: u64, vars: &[&str], lift: &[&str]| {
        let v = var_names(vars);
        let r = DeltaRing::parse(p, &v, lift).expect("catalog lift");
        frobenius_on_forms(&build_de_rham(&v), &r).expect("catalog lift")
    };
    let tweak = |f: &DieudonneDeRham, fdx: Form| {
        let dga = f.dga();
        let delta = (0..dga.vars().len()).map(|i| dga.delta_of_generator(i).clone()).collect();
        let d = (0..dga.rank()).map(|j| dga.d_of_generator(j).clone()).collect();
        ClassificationDatum::new(dga.p(), dga.gens(), dga.phi().clone(), vec![fdx], delta, d)
            .expect("same shapes")
    };
    let mut out = Vec::new();
    let mut push = |name, datum| out.push(CatalogDatum { name, datum });

    let omega3 = de_rham(3, &["x"], &["x^3"]);
    push("Ω of Z(3)[x], φ(x) = x^3", ClassificationDatum::from_de_rham(&omega3));
    push(
        "Ω of Z(3)[x], φ(x) = x^3 + 3x",
        ClassificationDatum::from_de_rham(&de_rham(3, &["x"], &["x^3 + 3*x"])),
    );
    push(
        "Ω of Z(2)[x, y], Frobenius",
        ClassificationDatum::from_de_rham(&de_rham(2, &["x", "y"], &["x^2", "y^2"])),
    );
    push(
        "Ω of Z(2)[x, y], φ(x) = x^2 + 2y",
        ClassificationDatum::from_de_rham(&de_rham(2, &["x", "y"], &["x^2 + 2*y", "y^2"])),
    );
    push("Ω of Z(3)[x], φ_M doubled", tweak(&omega3, omega3.frobenius_dx(0).scale_int(2)));
    push("Ω of Z(3)[x], φ_M = id", tweak(&omega3, omega3.complex().dx(0)));

    let x = var_names(&["x"]);
    let g = var_names(&["e"]);
    let e = Form::generator(&x, &g, 0);
    let zero = Form::zero(&x, &g);
    push(
        "δ = 0, d = 0",
        ClassificationDatum::new(
            3,
            &g,
            RingMap::parse(&x, &x, &["x^3"]).unwrap(),
            vec![e.scale_int(5)],
            vec![zero.clone()],
            vec![zero.clone()],
        )
        .unwrap(),
    );

    let g2 = var_names(&["dx", "e"]);
    let dx = Form::generator(&x, &g2, 0);
    let e2 = Form::generator(&x, &g2, 1);
    let zero2 = Form::zero(&x, &g2);
    push(
        "Ω of Z(3)[x] plus a closed generator",
        ClassificationDatum::new(
            3,
            &g2,
            RingMap::parse(&x, &x, &["x^3"]).unwrap(),
            vec![dx.scale(&MPoly::parse(&x, "x^2").unwrap()), e2.scale_int(7)],
            vec![dx.clone()],
            vec![zero2.clone(), zero2],
        )
        .unwrap(),
    );

    let none: Vec<String> = Vec::new();
    let ge = var_names(&["e0", "e1"]);
    let e0 = Form::generator(&none, &ge, 0);
    let e1 = Form::generator(&none, &ge, 1);
    let zero0 = Form::zero(&none, &ge);
    let pair = |f0: Form| {
        ClassificationDatum::new(
            2,
            &ge,
            RingMap::identity(&none),
            vec![f0, e1.clone()],
            vec![],
            vec![e0.wedge(&e1), zero0.clone()],
        )
        .unwrap()
    };
    push("Λ(e0, e1), de0 = e0e1, F(e0) = 0", pair(zero0.clone()));
    push("Λ(e0, e1), de0 = e0e1, F = id", pair(e0.clone()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::var_names;
    use crate::derham::{build_de_rham, frobenius_on_forms};
    use crate::witt::DeltaRing;

    struct NegativeDegree;

    impl DieudonneAlgebraView for NegativeDegree {
        fn p(&self) -> u64 {
            2
        }
        fn lowest_degree(&self) -> i64 {
            -1
        }
        fn check_relation(&self, _: u32) -> CheckReport {
            CheckReport::new("dF = pFd")
        }
        fn check_ring_structure(&self, _: u32) -> CheckReport {
            CheckReport::new("ring")
        }
        fn check_degree_zero(&self, _: u32) -> CheckReport {
            CheckReport::new("degree 0")
        }
    }

    #[test]
    fn algebra_examples() {
        let v = var_names(&["x"]);
        let c = build_de_rham(&v);
        let f = frobenius_on_forms(&c, &DeltaRing::parse(2, &v, &["x^2 + 2*x^3"]).unwrap()).unwrap();
        assert!(check_dieudonne_algebra(&f, 4).passed);

        // F_0 = id is not a Frobenius lift mod 2
        let fdx = f.frobenius_dx(0).clone();
        let broken = DieudonneDeRham::from_parts_unchecked(&c, 2, RingMap::identity(&v), vec![fdx]).unwrap();
        let rep = broken.check_degree_zero(4);
        assert!(!rep.passed);
        assert_eq!(rep.first_witness().unwrap().input, "x");
        assert!(!check_dieudonne_algebra(&broken, 4).passed);

        let rep = check_dieudonne_algebra(&NegativeDegree, 4);
        assert_eq!(rep.failed_laws(), vec!["coconnective"]);
    }

    #[test]
    fn classification_examples() {
        let cat = classification_catalog();
        let by_name = |n: &str| &cat.iter().find(|c| c.name == n).unwrap().datum;
        let ok = classify_relations_check(by_name("Ω of Z(3)[x], φ(x) = x^3"), Orientation::Standard, 3);
        assert!(ok.passed());
        let zero = classify_relations_check(by_name("δ = 0, d = 0"), Orientation::Standard, 3);
        assert!(zero.passed());
        let doubled =
            classify_relations_check(by_name("Ω of Z(3)[x], φ_M doubled"), Orientation::Standard, 3);
        assert!(!doubled.passed());
        assert_eq!(doubled.relations.first_witness().unwrap().input, "x");
        assert!(doubled.assembled.is_none());
    }

    #[test]
    fn relations_match_full_check() {
        for c in classification_catalog() {
            assert!(c.datum.check_invariants(3).passed, "{}", c.name);
            let rel = classify_relations_check(&c.datum, Orientation::Standard, 3);
            let full = check_dieudonne_algebra(c.datum.assemble(), 3);
            assert_eq!(rel.relations.passed, full.passed, "{}", c.name);
            assert_eq!(rel.passed(), full.passed, "{}", c.name);
        }
        // the reversed orientation rejects the de Rham complex itself
        let cat = classification_catalog();
        let rev = classify_relations_check(&cat[0].datum, Orientation::Reversed, 3);
        assert!(!rev.relations.passed);
        assert!(check_dieudonne_algebra(cat[0].datum.assemble(), 3).passed);
    }
}
