use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::arith::{Coefficient, MPoly};

/// Element of the exterior algebra Λ_A(e_0, …, e_{r-1}) over a polynomial
/// ring A, stored as a map from strictly increasing index tuples to nonzero
/// coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct Form {
    vars: Vec<String>,
    gens: Vec<String>,
    terms: BTreeMap<Vec<usize>, MPoly>,
}

/// Sign of the permutation sorting the concatenation of two increasing
/// tuples, or `None` when they share an index.
pub fn merge_sign(a: &[usize], b: &[usize]) -> Option<(i64, Vec<usize>)> {
    let mut inversions = 0usize;
    let mut j = 0;
    let mut out = Vec::with_capacity(a.len() + b.len());
    for (i, &x) in a.iter().enumerate() {
        while j < b.len() && b[j] < x {
            // b[j] jumps over the a-entries i..
            inversions += a.len() - i;
            out.push(b[j]);
            j += 1;
        }
        if j < b.len() && b[j] == x {
            return None;
        }
        out.push(x);
    }
    out.extend_from_slice(&b[j..]);
    let sign = if inversions.is_multiple_of(2) { 1 } else { -1 };
    Some((sign, out))
}

impl Form {
    pub fn zero(vars: &[String], gens: &[String]) -> Self {
        Form { vars: vars.to_vec(), gens: gens.to_vec(), terms: BTreeMap::new() }
    }

    /// The degree-0 form a.
    pub fn function(gens: &[String], a: MPoly) -> Self {
        let mut f = Form::zero(a.vars(), gens);
        f.add_term(Vec::new(), a);
        f
    }

    /// a · e_I for an increasing tuple I.
    pub fn term(gens: &[String], a: MPoly, idx: Vec<usize>) -> Self {
        debug_assert!(idx.windows(2).all(|w| w[0] < w[1]), "index tuple must increase");
        let mut f = Form::zero(a.vars(), gens);
        f.add_term(idx, a);
        f
    }

    /// The generator e_i with coefficient 1.
    pub fn generator(vars: &[String], gens: &[String], i: usize) -> Self {
        Form::term(gens, MPoly::one(vars), vec![i])
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

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &MPoly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, idx: &[usize]) -> MPoly {
        self.terms.get(idx).cloned().unwrap_or_else(|| MPoly::zero(&self.vars))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The common degree of all terms, if homogeneous and nonzero.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(Vec::len);
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn add_term(&mut self, idx: Vec<usize>, a: MPoly) {
        if a.is_zero() {
            return;
        }
        match self.terms.get_mut(&idx) {
            Some(c) => {
                let s = &*c + &a;
                if s.is_zero() {
                    self.terms.remove(&idx);
                } else {
                    *c = s;
                }
            }
            None => {
                self.terms.insert(idx, a);
            }
        }
    }

    pub fn add(&self, o: &Form) -> Form {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Form) -> Form {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Form {
        self.scale_int(-1)
    }

    pub fn scale(&self, a: &MPoly) -> Form {
        let mut out = Form::zero(&self.vars, &self.gens);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c * a);
        }
        out
    }

    pub fn scale_int(&self, n: i64) -> Form {
        let c = Coefficient::from_int(n);
        let mut out = Form::zero(&self.vars, &self.gens);
        for (k, a) in &self.terms {
            out.add_term(k.clone(), a.scale(&c));
        }
        out
    }

    pub fn wedge(&self, o: &Form) -> Form {
        let mut out = Form::zero(&self.vars, &self.gens);
        for (i, a) in &self.terms {
            for (j, b) in &o.terms {
                if let Some((sign, k)) = merge_sign(i, j) {
                    out.add_term(k, (a * b).scale_int(sign));
                }
            }
        }
        out
    }

    /// Applies `f` to every coefficient.
    pub fn map_coeffs<F: Fn(&MPoly) -> MPoly>(&self, vars: &[String], f: F) -> Form {
        let mut out = Form::zero(vars, &self.gens);
        for (k, a) in &self.terms {
            out.add_term(k.clone(), f(a));
        }
        out
    }

    /// The part of degree `k`.
    pub fn component(&self, k: usize) -> Form {
        let mut out = Form::zero(&self.vars, &self.gens);
        for (idx, a) in &self.terms {
            if idx.len() == k {
                out.add_term(idx.clone(), a.clone());
            }
        }
        out
    }

    pub fn is_p_integral(&self, p: u64) -> bool {
        self.terms.values().all(|a| a.is_p_integral(p))
    }

    /// Whether every coefficient is divisible by p in Z_(p)[x].
    pub fn divisible_by_p(&self, p: u64) -> bool {
        self.terms.values().all(|a| a.min_valuation(p).is_none_or(|v| v >= 1))
    }

    fn wedge_name(&self, idx: &[usize]) -> String {
        idx.iter().map(|&i| self.gens[i].as_str()).collect::<Vec<_>>().join("^")
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (idx, a) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let c = a.to_string();
            if idx.is_empty() {
                write!(f, "{c}")?;
            } else if c == "1" {
                write!(f, "{}", self.wedge_name(idx))?;
            } else {
                write!(f, "({c})*{}", self.wedge_name(idx))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Serialized as a list of `[coefficient, [indices…]]` pairs.
impl Serialize for Form {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (idx, a) in &self.terms {
            seq.serialize_element(&(a.to_string(), idx))?;
        }
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::var_names;

    #[test]
    fn merge_signs() {
        assert_eq!(merge_sign(&[0], &[1]), Some((1, vec![0, 1])));
        assert_eq!(merge_sign(&[1], &[0]), Some((-1, vec![0, 1])));
        assert_eq!(merge_sign(&[0, 2], &[1]), Some((-1, vec![0, 1, 2])));
        assert_eq!(merge_sign(&[1, 2], &[0]), Some((1, vec![0, 1, 2])));
        assert_eq!(merge_sign(&[0], &[0]), None);
    }

    #[test]
    fn wedge_anticommutes() {
        let v = var_names(&["x", "y"]);
        let g = var_names(&["dx", "dy"]);
        let dx = Form::generator(&v, &g, 0);
        let dy = Form::generator(&v, &g, 1);
        assert_eq!(dx.wedge(&dy), dy.wedge(&dx).neg());
        assert!(dx.wedge(&dx).is_zero());
        assert_eq!(dx.wedge(&dy).to_string(), "dx^dy");
        assert_eq!(
            serde_json::to_string(&dy.wedge(&dx).scale(&MPoly::var(&v, 0))).unwrap(),
            "[[\"-x\",[0,1]]]"
        );
    }
}
