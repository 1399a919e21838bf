use std::fmt;

use serde::{Serialize, Serializer};

/// A multi-weight in Z[1/p]^d, stored as numerators over the fixed
/// denominator p^scale. The x ↦ λx grading on W_s(F_p[x_1..x_d]) gives
/// V^j[x^m] the weight m/p^j; d preserves weight, F multiplies it by p and V
/// divides it by p.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Weight {
    num: Vec<u64>,
}

/// Shared parameters for weights: the prime, the number of variables and the
/// exponent of the common denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WeightScale {
    pub p: u64,
    pub vars: usize,
    pub scale: u32,
}

fn val(p: u64, mut x: u64) -> u32 {
    let mut v = 0;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

impl WeightScale {
    pub fn new(p: u64, vars: usize, scale: u32) -> Self {
        WeightScale { p, vars, scale }
    }

    fn unit(&self) -> u64 {
        self.p.pow(self.scale)
    }

    pub fn zero(&self) -> Weight {
        Weight { num: vec![0; self.vars] }
    }

    /// The integral weight of the monomial x^m.
    pub fn integral(&self, m: &[u64]) -> Weight {
        Weight { num: m.iter().map(|&e| e * self.unit()).collect() }
    }

    pub fn from_numerators(&self, num: Vec<u64>) -> Weight {
        assert_eq!(num.len(), self.vars, "weight arity");
        Weight { num }
    }

    /// The least u with p^u·w integral.
    pub fn denominator_exp(&self, w: &Weight) -> u32 {
        w.num
            .iter()
            .filter(|&&x| x != 0)
            .map(|&x| self.scale.saturating_sub(val(self.p, x)))
            .max()
            .unwrap_or(0)
    }

    pub fn is_integral(&self, w: &Weight) -> bool {
        self.denominator_exp(w) == 0
    }

    /// The monomial exponent p^u·w for u = denominator_exp(w).
    pub fn monomial(&self, w: &Weight) -> Vec<u64> {
        let u = self.denominator_exp(w);
        let div = self.p.pow(self.scale - u);
        w.num.iter().map(|&x| x / div).collect()
    }

    pub fn times_p(&self, w: &Weight) -> Weight {
        Weight { num: w.num.iter().map(|&x| x * self.p).collect() }
    }

    /// w/p, if it is representable at this scale.
    pub fn div_p(&self, w: &Weight) -> Option<Weight> {
        w.num
            .iter()
            .all(|&x| x % self.p == 0)
            .then(|| Weight { num: w.num.iter().map(|&x| x / self.p).collect() })
    }

    /// Total weight in units of p^-scale.
    pub fn total(&self, w: &Weight) -> u64 {
        w.num.iter().sum()
    }

    /// Numerator of the bound D·p^k at this scale (k may be negative).
    pub fn bound(&self, d: u64, k: i32) -> u64 {
        let e = self.scale as i32 + k;
        assert!(e >= 0, "bound below the weight resolution");
        d * self.p.pow(e as u32)
    }

    /// All weights w with denominator_exp(w) ≤ u and total(w) ≤ bound, in
    /// increasing order of total weight.
    pub fn enumerate(&self, u: u32, bound: u64) -> Vec<Weight> {
        let step = self.p.pow(self.scale.saturating_sub(u));
        let mut out = Vec::new();
        let mut cur = vec![0u64; self.vars];
        fn rec(i: usize, left: u64, step: u64, cur: &mut Vec<u64>, out: &mut Vec<Weight>) {
            if i == cur.len() {
                out.push(Weight { num: cur.clone() });
                return;
            }
            let mut x = 0;
            while x <= left {
                cur[i] = x;
                rec(i + 1, left - x, step, cur, out);
                x += step;
            }
            cur[i] = 0;
        }
        rec(0, bound, step, &mut cur, &mut out);
        out.sort_by_key(|w| (self.total(w), w.clone()));
        out
    }

    /// All weights λ ≤ w componentwise with denominator_exp(λ) ≤ u.
    pub fn below(&self, w: &Weight, u: u32) -> Vec<Weight> {
        let step = self.p.pow(self.scale.saturating_sub(u));
        let mut out = vec![Vec::new()];
        for &x in &w.num {
            let mut next = Vec::new();
            for prefix in &out {
                let mut y = 0;
                while y <= x {
                    let mut v: Vec<u64> = prefix.clone();
                    v.push(y);
                    next.push(v);
                    y += step;
                }
            }
            out = next;
        }
        out.into_iter().map(|num| Weight { num }).collect()
    }

    pub fn display(&self, w: &Weight) -> String {
        let unit = self.unit();
        let parts: Vec<String> = w
            .num
            .iter()
            .map(|&x| {
                let g = num_integer::gcd(x, unit);
                let (a, b) = (x / g, unit / g);
                if b == 1 {
                    a.to_string()
                } else {
                    format!("{a}/{b}")
                }
            })
            .collect();
        match parts.len() {
            0 => "0".into(),
            1 => parts[0].clone(),
            _ => format!("({})", parts.join(", ")),
        }
    }
}

impl Weight {
    pub fn numerators(&self) -> &[u64] {
        &self.num
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|&x| x == 0)
    }

    pub fn add(&self, o: &Weight) -> Weight {
        Weight { num: self.num.iter().zip(&o.num).map(|(a, b)| a + b).collect() }
    }

    /// self − o, if nonnegative.
    pub fn sub(&self, o: &Weight) -> Option<Weight> {
        let num: Option<Vec<u64>> = self.num.iter().zip(&o.num).map(|(a, b)| a.checked_sub(*b)).collect();
        num.map(|num| Weight { num })
    }

    /// Variables with positive weight.
    pub fn support(&self) -> Vec<usize> {
        (0..self.num.len()).filter(|&i| self.num[i] != 0).collect()
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.num)
    }
}

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.num.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn denominators_and_monomials() {
        let s = WeightScale::new(3, 2, 2);
        let w = s.from_numerators(vec![3, 9]); // (1/3, 1)
        assert_eq!(s.denominator_exp(&w), 1);
        assert_eq!(s.monomial(&w), vec![1, 3]);
        assert_eq!(s.display(&w), "(1/3, 1)");
        assert!(s.is_integral(&s.times_p(&w)));
        assert_eq!(s.denominator_exp(&s.div_p(&w).unwrap()), 2);
        assert_eq!(s.denominator_exp(&s.zero()), 0);
    }

    #[test]
    fn enumeration_counts() {
        let s = WeightScale::new(2, 1, 1);
        // integral weights 0..=4 and halves up to 4
        assert_eq!(s.enumerate(0, s.bound(4, 0)).len(), 5);
        assert_eq!(s.enumerate(1, s.bound(4, 0)).len(), 9);
        let s2 = WeightScale::new(2, 2, 0);
        assert_eq!(s2.enumerate(0, 2).len(), 6);
        assert_eq!(s2.below(&s2.integral(&[1, 2]), 0).len(), 6);
    }
}
