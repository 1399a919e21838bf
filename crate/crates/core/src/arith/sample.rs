use rand::Rng;

use super::coeff::Coefficient;
use super::poly::{MPoly, Monomial};

/// All exponent vectors of the given arity with total degree ≤ `degree`,
/// in graded-lexicographic order.
pub fn monomials_up_to(arity: usize, degree: u32) -> Vec<Monomial> {
    fn rec(arity: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if prefix.len() == arity {
            out.push(Monomial(prefix.clone()));
            return;
        }
        for e in 0..=left {
            prefix.push(e);
            rec(arity, left - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(arity, degree, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Random polynomial with up to `max_terms` terms of degree ≤ `max_degree`
/// and integer coefficients in `[-bound, bound]`.
pub fn random_poly<R: Rng>(
    rng: &mut R,
    vars: &[String],
    max_degree: u32,
    bound: i64,
    max_terms: usize,
) -> MPoly {
    let monos = monomials_up_to(vars.len(), max_degree);
    let mut q = MPoly::zero(vars);
    let n = rng.gen_range(1..=max_terms.max(1));
    for _ in 0..n {
        let m = monos[rng.gen_range(0..monos.len())].clone();
        let c = rng.gen_range(-bound..=bound);
        q.add_term(m, &Coefficient::from_int(c));
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_count() {
        // C(2 + 6, 2) monomials of degree ≤ 6 in two variables
        assert_eq!(monomials_up_to(2, 6).len(), 28);
        assert_eq!(monomials_up_to(0, 3).len(), 1);
    }
}
