use num_bigint::BigInt;
use num_integer::binomial;
use serde::{Deserialize, Serialize};

use super::vector::WittVector;
use crate::arith::{is_prime, Coefficient, MPoly, RingMap};
use crate::report::CheckReport;
use crate::{Error, Result};

/// A polynomial ring over Z_(p) with a Frobenius lift φ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaRing {
    p: u64,
    lift: RingMap,
}

impl DeltaRing {
    /// Validates that φ is an endomorphism with p-integral coefficients and
    /// φ(x_i) ≡ x_i^p mod p for every generator.
    pub fn new(p: u64, lift: RingMap) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if lift.source() != lift.target() {
            return Err(Error::InvalidLift("a Frobenius lift must be an endomorphism".into()));
        }
        let vars = lift.source().to_vec();
        for (i, im) in lift.images().iter().enumerate() {
            if !im.is_p_integral(p) {
                return Err(Error::InvalidLift(format!(
                    "image of {} has a denominator divisible by {p}",
                    vars[i]
                )));
            }
            let diff = im - &MPoly::var(&vars, i).pow(p as u32);
            if diff.exact_div_p(p).map_or(true, |q| !q.is_p_integral(p)) {
                return Err(Error::InvalidLift(format!(
                    "{} ↦ {im} is not congruent to {}^{p} mod {p}",
                    vars[i], vars[i]
                )));
            }
        }
        Ok(DeltaRing { p, lift })
    }

    /// The lift x_i ↦ x_i^p.
    pub fn frobenius_lift(vars: &[String], p: u64) -> Result<Self> {
        let images = (0..vars.len()).map(|i| MPoly::var(vars, i).pow(p as u32)).collect();
        DeltaRing::new(p, RingMap::new(vars, vars, images)?)
    }

    pub fn parse(p: u64, vars: &[String], images: &[&str]) -> Result<Self> {
        DeltaRing::new(p, RingMap::parse(vars, vars, images)?)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn vars(&self) -> &[String] {
        self.lift.source()
    }

    pub fn lift(&self) -> &RingMap {
        &self.lift
    }

    pub fn phi(&self, a: &MPoly) -> Result<MPoly> {
        self.lift.apply(a)
    }

    /// δ(a) = (φ(a) − a^p)/p.
    pub fn delta(&self, a: &MPoly) -> Result<MPoly> {
        let diff = &self.phi(a)? - &a.pow(self.p as u32);
        diff.exact_div_p(self.p)
    }

    /// δ on each generator.
    pub fn delta_generators(&self) -> Result<Vec<MPoly>> {
        let vars = self.vars();
        (0..vars.len()).map(|i| self.delta(&MPoly::var(vars, i))).collect()
    }
}

pub fn delta_of(r: &DeltaRing, a: &MPoly) -> Result<MPoly> {
    r.delta(a)
}

/// Σ_{i=1}^{p-1} (1/p)·C(p,i)·a^i·b^{p-i}
fn binomial_correction(p: u64, a: &MPoly, b: &MPoly) -> MPoly {
    let mut out = MPoly::zero(a.vars());
    for i in 1..p {
        let c = binomial(BigInt::from(p), BigInt::from(i)) / BigInt::from(p);
        let t = &a.pow(i as u32) * &b.pow((p - i) as u32);
        out = &out + &t.scale(&Coefficient::from_int(c));
    }
    out
}

/// Checks δ(0) = δ(1) = 0 and the sum and product laws on all pairs of
/// samples, for an arbitrary operator `delta`.
pub fn delta_laws_check_with<D>(p: u64, vars: &[String], delta: D, samples: &[MPoly]) -> CheckReport
where
    D: Fn(&MPoly) -> Result<MPoly>,
{
    let mut rep = CheckReport::new("delta laws");
    let zero = MPoly::zero(vars);
    let one = MPoly::one(vars);
    for (name, c) in [("delta(0) = 0", &zero), ("delta(1) = 0", &one)] {
        match delta(c) {
            Ok(d) => rep.check(name, d.is_zero(), || c.to_string(), || format!("got {d}")),
            Err(e) => rep.fail(name, c.to_string(), e.to_string()),
        }
    }
    let pc = Coefficient::from_int(p);
    for (i, a) in samples.iter().enumerate() {
        for b in &samples[i..] {
            let input = || format!("a = {a}, b = {b}");
            let (da, db, dsum, dprod) = match (delta(a), delta(b), delta(&(a + b)), delta(&(a * b))) {
                (Ok(x), Ok(y), Ok(z), Ok(w)) => (x, y, z, w),
                (Err(e), ..) | (_, Err(e), ..) | (_, _, Err(e), _) | (.., Err(e)) => {
                    rep.fail("delta defined", input(), e.to_string());
                    continue;
                }
            };
            let want_sum = &(&da + &db) - &binomial_correction(p, a, b);
            rep.check("sum law", dsum == want_sum, input, || {
                format!("delta(a+b) = {dsum}, expected {want_sum}")
            });
            let want_prod =
                &(&(&a.pow(p as u32) * &db) + &(&b.pow(p as u32) * &da)) + &(&da * &db).scale(&pc);
            rep.check("product law", dprod == want_prod, input, || {
                format!("delta(ab) = {dprod}, expected {want_prod}")
            });
        }
    }
    rep
}

pub fn delta_laws_check(r: &DeltaRing, samples: &[MPoly]) -> CheckReport {
    delta_laws_check_with(r.p, r.vars(), |a| r.delta(a), samples)
}

/// Checks that s(a) = (a, δ(a)) is a ring map into W_2 splitting w_0, and
/// that w_1(s(a)) = φ(a).
pub fn w2_section_check_with<D, P>(
    p: u64,
    vars: &[String],
    delta: D,
    phi: P,
    samples: &[MPoly],
) -> CheckReport
where
    D: Fn(&MPoly) -> Result<MPoly>,
    P: Fn(&MPoly) -> Result<MPoly>,
{
    let mut rep = CheckReport::new("W2 section");
    let section = |a: &MPoly| -> Result<WittVector<MPoly>> { WittVector::new(p, vec![a.clone(), delta(a)?]) };
    let zero = MPoly::zero(vars);
    let one = MPoly::one(vars);
    let w_zero = WittVector::zero(p, 2, &zero);
    let w_one = WittVector::one(p, 2, &zero);
    match (section(&zero), section(&one)) {
        (Ok(s0), Ok(s1)) => {
            rep.check("s(0) = 0", s0 == w_zero, || "0".into(), || format!("got {s0}"));
            rep.check("s(1) = 1", s1 == w_one, || "1".into(), || format!("got {s1}"));
        }
        (Err(e), _) | (_, Err(e)) => rep.fail("section defined", "0, 1".into(), e.to_string()),
    }
    for a in samples {
        match (section(a), phi(a)) {
            (Ok(s), Ok(f)) => {
                let g = s.ghost();
                rep.check("w0 . s = id", g[0] == *a, || a.to_string(), || format!("w0 = {}", g[0]));
                rep.check(
                    "w1 . s = phi",
                    g[1] == f,
                    || a.to_string(),
                    || format!("w1 = {}, phi = {f}", g[1]),
                );
            }
            (Err(e), _) | (_, Err(e)) => rep.fail("section defined", a.to_string(), e.to_string()),
        }
    }
    for (i, a) in samples.iter().enumerate() {
        for b in &samples[i..] {
            let input = || format!("a = {a}, b = {b}");
            let parts = (|| -> Result<_> {
                let (sa, sb) = (section(a)?, section(b)?);
                Ok((sa.add(&sb)?, section(&(a + b))?, sa.mul(&sb)?, section(&(a * b))?))
            })();
            match parts {
                Ok((sum, s_sum, prod, s_prod)) => {
                    rep.check("additive", sum == s_sum, input, || {
                        format!("s(a) + s(b) = {sum}, s(a+b) = {s_sum}")
                    });
                    rep.check("multiplicative", prod == s_prod, input, || {
                        format!("s(a) s(b) = {prod}, s(ab) = {s_prod}")
                    });
                }
                Err(e) => rep.fail("section defined", input(), e.to_string()),
            }
        }
    }
    rep
}

pub fn w2_section_check(r: &DeltaRing, samples: &[MPoly]) -> CheckReport {
    w2_section_check_with(r.p, r.vars(), |a| r.delta(a), |a| r.phi(a), samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::var_names;

    fn x() -> Vec<String> {
        var_names(&["x"])
    }

    #[test]
    fn delta_examples() {
        let v = x();
        let xx = MPoly::var(&v, 0);
        let frob = DeltaRing::frobenius_lift(&v, 3).unwrap();
        assert!(frob.delta(&xx).unwrap().is_zero());
        let r = DeltaRing::parse(3, &v, &["x^3 + 3*x"]).unwrap();
        assert_eq!(r.delta(&xx).unwrap(), xx);
        let z = DeltaRing::parse(2, &[], &[]).unwrap();
        let two = MPoly::from_int(&[], 2);
        assert_eq!(z.delta(&two).unwrap(), MPoly::from_int(&[], -1));
    }

    #[test]
    fn invalid_lifts_rejected() {
        let v = x();
        assert!(matches!(DeltaRing::parse(2, &v, &["x"]), Err(Error::InvalidLift(_))));
        assert!(matches!(DeltaRing::parse(3, &v, &["x^3 + x/3"]), Err(Error::InvalidLift(_))));
        assert!(DeltaRing::parse(3, &v, &["x^3 + 3*x/2"]).is_ok());
    }

    #[test]
    fn sum_law_correction_p2() {
        let v = var_names(&["a", "b"]);
        let r = DeltaRing::frobenius_lift(&v, 2).unwrap();
        let (a, b) = (MPoly::var(&v, 0), MPoly::var(&v, 1));
        let lhs = &(&r.delta(&(&a + &b)).unwrap() - &r.delta(&a).unwrap()) - &r.delta(&b).unwrap();
        assert_eq!(lhs, MPoly::parse(&v, "-a*b").unwrap());
        let rep = delta_laws_check(&r, &[a.clone(), b.clone(), &a * &b]);
        assert!(rep.passed, "{rep}");
    }

    #[test]
    fn corrupted_delta_fails() {
        let v = x();
        let r = DeltaRing::frobenius_lift(&v, 2).unwrap();
        let xx = MPoly::var(&v, 0);
        let bad = |a: &MPoly| {
            if *a == xx {
                Ok(MPoly::one(&v))
            } else {
                r.delta(a)
            }
        };
        let samples = [xx.clone(), MPoly::parse(&v, "x + 1").unwrap()];
        let rep = delta_laws_check_with(2, &v, bad, &samples);
        assert!(!rep.passed);
        assert!(rep.first_witness().is_some());
        let rep = w2_section_check_with(2, &v, bad, |a| r.phi(a), &samples);
        assert!(!rep.passed);
        assert!(rep.failed_laws().contains(&"additive"));
    }

    #[test]
    fn section_over_integers() {
        let z = DeltaRing::parse(2, &[], &[]).unwrap();
        let two = MPoly::from_int(&[], 2);
        let s = WittVector::new(2, vec![two.clone(), z.delta(&two).unwrap()]).unwrap();
        let one = WittVector::one(2, 2, &two);
        assert_eq!(one.add(&one).unwrap(), s);
        let rep = w2_section_check(&z, &[two, MPoly::from_int(&[], -3)]);
        assert!(rep.passed, "{rep}");
    }

    #[test]
    fn section_for_frobenius_lift() {
        let v = x();
        let r = DeltaRing::frobenius_lift(&v, 3).unwrap();
        let samples: Vec<MPoly> =
            ["x", "x^2 - 1", "2*x + 5"].iter().map(|s| MPoly::parse(&v, s).unwrap()).collect();
        let rep = w2_section_check(&r, &samples);
        assert!(rep.passed, "{rep}");
    }
}
