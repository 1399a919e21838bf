use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::coeff::Coefficient;
use crate::{Error, Result};

/// Exponent vector ordered graded-lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(arity: usize) -> Self {
        Monomial(vec![0; arity])
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial with p-local rational coefficients.
///
/// Arithmetic between polynomials requires identical variable lists and
/// panics otherwise; parse or construct both operands in the same ring.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MPoly {
    vars: Vec<String>,
    terms: BTreeMap<Monomial, Coefficient>,
}

impl MPoly {
    pub fn zero(vars: &[String]) -> Self {
        MPoly { vars: vars.to_vec(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &[String], c: Coefficient) -> Self {
        let mut p = MPoly::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(vars.len()), c);
        }
        p
    }

    pub fn one(vars: &[String]) -> Self {
        MPoly::constant(vars, Coefficient::one())
    }

    pub fn from_int(vars: &[String], n: i64) -> Self {
        MPoly::constant(vars, Coefficient::from_int(n))
    }

    pub fn var(vars: &[String], i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        MPoly::monomial(vars, Monomial(e), Coefficient::one())
    }

    pub fn monomial(vars: &[String], m: Monomial, c: Coefficient) -> Self {
        assert_eq!(m.0.len(), vars.len(), "monomial arity");
        let mut p = MPoly::zero(vars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms<I>(vars: &[String], terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Coefficient)>,
    {
        let mut p = MPoly::zero(vars);
        for (m, c) in terms {
            p.add_term(m, &c);
        }
        p
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Coefficient)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn coeff(&self, m: &Monomial) -> Coefficient {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> Coefficient {
        self.coeff(&Monomial::one(self.arity()))
    }

    pub fn total_degree(&self) -> Option<u64> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn add_term(&mut self, m: Monomial, c: &Coefficient) {
        assert_eq!(m.0.len(), self.vars.len(), "monomial arity");
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Coefficient) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(&self.vars);
        }
        MPoly { vars: self.vars.clone(), terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect() }
    }

    pub fn scale_int(&self, n: i64) -> MPoly {
        self.scale(&Coefficient::from_int(n))
    }

    pub fn pow(&self, mut e: u32) -> MPoly {
        let mut base = self.clone();
        let mut acc = MPoly::one(&self.vars);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Exact division by p; fails if any coefficient has valuation below one.
    pub fn exact_div_p(&self, p: u64) -> Result<MPoly> {
        let pb = BigInt::from(p);
        let mut out = MPoly::zero(&self.vars);
        for (m, c) in &self.terms {
            if c.valuation(p).unwrap_or(0) < 1 {
                return Err(Error::NotDivisible { p, coefficient: c.to_string() });
            }
            out.terms.insert(m.clone(), c.div_int(&pb));
        }
        Ok(out)
    }

    /// Exact division by an integer over Q; always succeeds for nonzero n.
    pub fn div_int(&self, n: &BigInt) -> MPoly {
        MPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.div_int(n))).collect(),
        }
    }

    /// Smallest p-adic valuation among the coefficients (`None` for zero).
    pub fn min_valuation(&self, p: u64) -> Option<i64> {
        self.terms.values().filter_map(|c| c.valuation(p)).min()
    }

    pub fn is_p_integral(&self, p: u64) -> bool {
        self.terms.values().all(|c| c.is_p_integral(p))
    }

    pub fn partial(&self, i: usize) -> MPoly {
        let mut out = MPoly::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[i] -= 1;
            out.add_term(m2, &(c * &Coefficient::from_int(e as i64)));
        }
        out
    }

    pub fn map_coeffs<F: Fn(&Coefficient) -> Coefficient>(&self, f: F) -> MPoly {
        MPoly::from_terms(&self.vars, self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    /// Reinterprets the polynomial in a larger ring whose variable list
    /// contains all of ours.
    pub fn embed(&self, vars: &[String]) -> Result<MPoly> {
        let idx: Vec<usize> = self
            .vars
            .iter()
            .map(|v| {
                vars.iter()
                    .position(|w| w == v)
                    .ok_or_else(|| Error::InvalidInput(format!("variable {v} missing from target ring")))
            })
            .collect::<Result<_>>()?;
        let mut out = MPoly::zero(vars);
        for (m, c) in &self.terms {
            let mut e = vec![0; vars.len()];
            for (k, &j) in idx.iter().enumerate() {
                e[j] = m.0[k];
            }
            out.add_term(Monomial(e), c);
        }
        Ok(out)
    }

    pub fn parse(vars: &[String], s: &str) -> Result<MPoly> {
        Parser::new(vars, s)?.parse_all()
    }

    fn check_ring(&self, other: &MPoly) {
        assert_eq!(self.vars, other.vars, "polynomials live in different rings");
    }
}

/// Convenience for building variable lists.
pub fn var_names(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

impl Add for &MPoly {
    type Output = MPoly;
    fn add(self, o: &MPoly) -> MPoly {
        self.check_ring(o);
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c);
        }
        out
    }
}

impl Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, o: &MPoly) -> MPoly {
        self.check_ring(o);
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), &-c);
        }
        out
    }
}

impl Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, o: &MPoly) -> MPoly {
        self.check_ring(o);
        let mut out = MPoly::zero(&self.vars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(m1.mul(m2), &(c1 * c2));
            }
        }
        out
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        self.scale(&Coefficient::from_int(-1))
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let mut factors = Vec::new();
            if m.degree() == 0 || !a.is_one() {
                factors.push(a.to_string());
            }
            for (v, &e) in self.vars.iter().zip(&m.0) {
                match e {
                    0 => {}
                    1 => factors.push(v.clone()),
                    _ => factors.push(format!("{v}^{e}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Serialize, Deserialize)]
struct PolyTermJson {
    coeff: Coefficient,
    exponents: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    variables: Vec<String>,
    terms: Vec<PolyTermJson>,
}

impl Serialize for MPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyJson {
            variables: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .rev()
                .map(|(m, c)| PolyTermJson { coeff: c.clone(), exponents: m.0.clone() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PolyJson::deserialize(d)?;
        let n = j.variables.len();
        if let Some(t) = j.terms.iter().find(|t| t.exponents.len() != n) {
            return Err(serde::de::Error::custom(format!(
                "exponent vector {:?} does not match {} variables",
                t.exponents, n
            )));
        }
        Ok(MPoly::from_terms(&j.variables, j.terms.into_iter().map(|t| (Monomial(t.exponents), t.coeff))))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(BigInt),
    Ident(String),
    Op(char),
}

struct Parser<'a> {
    vars: &'a [String],
    tokens: Vec<Token>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(vars: &'a [String], s: &str) -> Result<Self> {
        let mut tokens = Vec::new();
        let chars: Vec<char> = s.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                tokens.push(Token::Num(text.parse().expect("digits")));
            } else if c.is_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                tokens.push(Token::Ident(chars[start..i].iter().collect()));
            } else if "+-*/^()".contains(c) {
                tokens.push(Token::Op(c));
                i += 1;
            } else {
                return Err(Error::Parse(format!("unexpected character '{c}'")));
            }
        }
        Ok(Parser { vars, tokens, pos: 0 })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn parse_all(mut self) -> Result<MPoly> {
        if self.tokens.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let p = self.expr()?;
        if self.pos != self.tokens.len() {
            return Err(Error::Parse(format!("trailing input at token {}", self.pos)));
        }
        Ok(p)
    }

    fn expr(&mut self) -> Result<MPoly> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<MPoly> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.eat('/') {
                let d = self.unary()?;
                if !d.is_constant() || d.is_zero() {
                    return Err(Error::Parse("division only by nonzero constants".into()));
                }
                let c = d.constant_term();
                acc = acc.scale(&Coefficient::one().checked_div(&c).expect("nonzero"));
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<MPoly> {
        if self.eat('-') {
            return Ok(-&self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        let base = self.atom()?;
        if self.eat('^') {
            match self.peek().cloned() {
                Some(Token::Num(n)) => {
                    self.pos += 1;
                    let e: u32 = n.try_into().map_err(|_| Error::Parse("exponent too large".into()))?;
                    Ok(base.pow(e))
                }
                _ => Err(Error::Parse("expected integer exponent".into())),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<MPoly> {
        match self.peek().cloned() {
            Some(Token::Num(n)) => {
                self.pos += 1;
                Ok(MPoly::constant(self.vars, Coefficient::from_int(n)))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                let i = self
                    .vars
                    .iter()
                    .position(|v| *v == name)
                    .ok_or_else(|| Error::Parse(format!("unknown variable '{name}'")))?;
                Ok(MPoly::var(self.vars, i))
            }
            Some(Token::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing ')'".into()));
                }
                Ok(e)
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> Vec<String> {
        var_names(&["x", "y"])
    }

    #[test]
    fn canonical_text_form() {
        let p = MPoly::parse(&xy(), "-1/5 + y*x^2*3").unwrap();
        assert_eq!(p.to_string(), "3*x^2*y - 1/5");
        let q = MPoly::parse(&xy(), "x - x").unwrap();
        assert_eq!(q.to_string(), "0");
        assert_eq!(MPoly::parse(&xy(), "-(x+1)^2").unwrap().to_string(), "-x^2 - 2*x - 1");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(MPoly::parse(&xy(), "z + 1").is_err());
        assert!(MPoly::parse(&xy(), "x / y").is_err());
        assert!(MPoly::parse(&xy(), "x +").is_err());
        assert!(MPoly::parse(&xy(), "").is_err());
    }

    #[test]
    fn exact_div_p_examples() {
        let v = var_names(&["x"]);
        let q = MPoly::parse(&v, "2*x + 4").unwrap();
        assert_eq!(q.exact_div_p(2).unwrap(), MPoly::parse(&v, "x + 2").unwrap());
        assert!(MPoly::zero(&v).exact_div_p(3).unwrap().is_zero());
        let bad = MPoly::parse(&v, "3*x^2 + x").unwrap();
        assert!(matches!(bad.exact_div_p(3), Err(Error::NotDivisible { p: 3, .. })));
    }

    #[test]
    fn json_round_trip() {
        let p = MPoly::parse(&xy(), "3*x^2*y - 1/5").unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(
            s,
            r#"{"variables":["x","y"],"terms":[{"coeff":"3","exponents":[2,1]},{"coeff":"-1/5","exponents":[0,0]}]}"#
        );
        let back: MPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn grlex_order() {
        let a = Monomial(vec![2, 0]);
        let b = Monomial(vec![0, 3]);
        let c = Monomial(vec![1, 1]);
        assert!(a < b);
        assert!(c < a);
    }
}
