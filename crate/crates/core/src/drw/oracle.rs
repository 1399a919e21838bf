use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::Serialize;

use crate::arith::{Coefficient, IntMatrix, MPoly, Monomial};
use crate::witt::WittVector;
use crate::Result;

use super::weight::{Weight, WeightScale};
use super::BaseRing;

/// V^j[x^m], of weight m/p^j.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WittGenerator {
    pub name: String,
    pub j: usize,
    pub monomial: Vec<u64>,
    pub weight: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightInvariants {
    pub weight: String,
    /// Exponents e with the weight piece ≅ ⊕ Z/p^e.
    pub invariants: Vec<u32>,
}

/// W_n(F_p[x]) in weights ≤ D by generators V^j[x^m] and additive relations
/// over Z/p^n.
#[derive(Clone, Debug, Serialize)]
pub struct WittPolyPresentation {
    pub ring: BaseRing,
    pub n: usize,
    pub weight_bound: u64,
    pub generators: Vec<WittGenerator>,
    /// One relation per row, in the generator columns.
    pub relations: IntMatrix,
    pub components: Vec<WeightInvariants>,
    #[serde(skip)]
    weights: Vec<Weight>,
    #[serde(skip)]
    scale: WeightScale,
}

fn mono_name(vars: &[String], m: &[u64]) -> String {
    let parts: Vec<String> = m
        .iter()
        .zip(vars)
        .filter(|(&e, _)| e > 0)
        .map(|(&e, v)| if e == 1 { v.clone() } else { format!("{v}^{e}") })
        .collect();
    if parts.is_empty() {
        "[1]".into()
    } else {
        format!("[{}]", parts.join(" "))
    }
}

fn gen_name(vars: &[String], j: usize, m: &[u64]) -> String {
    match j {
        0 => mono_name(vars, m),
        1 => format!("V{}", mono_name(vars, m)),
        _ => format!("V^{j}{}", mono_name(vars, m)),
    }
}

/// Generators V^j[x^m] with |m| ≤ p^j·D; relations p·V^j[x^m] =
/// V^{j+1}[x^{pm}] (since p = VF and F[x^m] = [x^{pm}]) and V^n = 0.
pub fn witt_ring_presentation(r: &BaseRing, n: usize, d: u64) -> Result<WittPolyPresentation> {
    let p = r.p;
    let scale = WeightScale::new(p, r.vars.len(), n as u32);
    let mut generators = Vec::new();
    let mut weights = Vec::new();
    let mut index: BTreeMap<(usize, Vec<u64>), usize> = BTreeMap::new();
    for j in 0..n {
        let bound = d * p.pow(j as u32);
        for m in crate::arith::monomials_up_to(r.vars.len(), bound as u32) {
            let m: Vec<u64> = m.0.iter().map(|&e| e as u64).collect();
            let w = scale.from_numerators(m.iter().map(|&e| e * p.pow(n as u32 - j as u32)).collect());
            index.insert((j, m.clone()), generators.len());
            generators.push(WittGenerator {
                name: gen_name(&r.vars, j, &m),
                j,
                monomial: m,
                weight: scale.display(&w),
            });
            weights.push(w);
        }
    }
    let mut rows: Vec<Vec<i64>> = Vec::new();
    for (k, g) in generators.iter().enumerate() {
        let mut row = vec![0i64; generators.len()];
        row[k] = p as i64;
        if g.j + 1 < n {
            let pm: Vec<u64> = g.monomial.iter().map(|&e| e * p).collect();
            row[index[&(g.j + 1, pm)]] = -1;
        }
        rows.push(row);
    }
    let relations = if rows.is_empty() { IntMatrix::zeros(0, 0) } else { IntMatrix::from_rows(&rows) };
    let mut out = WittPolyPresentation {
        ring: r.clone(),
        n,
        weight_bound: d,
        generators,
        relations,
        components: Vec::new(),
        weights,
        scale,
    };
    out.components = out.weight_invariants();
    Ok(out)
}

impl WittPolyPresentation {
    /// Invariants of each weight piece, read off from the relation block of
    /// that weight together with p^n = 0.
    fn weight_invariants(&self) -> Vec<WeightInvariants> {
        let mut by_weight: BTreeMap<(u64, Weight), Vec<usize>> = BTreeMap::new();
        for (k, w) in self.weights.iter().enumerate() {
            by_weight.entry((self.scale.total(w), w.clone())).or_default().push(k);
        }
        let pn = BigInt::from(self.ring.p).pow(self.n as u32);
        by_weight
            .into_iter()
            .map(|((_, w), cols)| {
                let k = cols.len();
                let mut m = IntMatrix::zeros(2 * k, k);
                for (a, &r) in cols.iter().enumerate() {
                    for (b, &c) in cols.iter().enumerate() {
                        m.set(a, b, self.relations.get(r, c).clone());
                    }
                    m.set(k + a, a, pn.clone());
                }
                let invariants = m
                    .smith()
                    .invariant_factors()
                    .iter()
                    .map(|f| crate::arith::int_valuation(f, self.ring.p))
                    .filter(|&e| e > 0)
                    .collect::<Vec<u32>>();
                let mut invariants = invariants;
                invariants.sort_unstable();
                WeightInvariants { weight: self.scale.display(&w), invariants }
            })
            .collect()
    }

    /// V^i[a]·V^j[b] = p^i V^j[a^{p^{j−i}} b] for i ≤ j, as (coefficient,
    /// generator), or None when the product leaves the weight bound.
    pub fn mul(&self, a: usize, b: usize) -> Option<(BigInt, usize)> {
        let (ga, gb) = (&self.generators[a], &self.generators[b]);
        let (lo, hi) = if ga.j <= gb.j { (ga, gb) } else { (gb, ga) };
        let e = self.ring.p.pow((hi.j - lo.j) as u32);
        let m: Vec<u64> = lo.monomial.iter().zip(&hi.monomial).map(|(x, y)| x * e + y).collect();
        let k = self.generators.iter().position(|g| g.j == hi.j && g.monomial == m)?;
        Some((BigInt::from(self.ring.p).pow(lo.j as u32), k))
    }
}

fn reduce_mod(a: &MPoly, p: u64) -> MPoly {
    let p = BigInt::from(p);
    a.map_coeffs(|c| Coefficient::from_int(c.to_integer().expect("integral Witt coordinates").mod_floor(&p)))
}

/// Independent count from Witt-coordinate arithmetic: a weight-κ element of
/// W_n(F_p[x]) has coordinates a_i = c_i x^{p^iκ} (zero when p^iκ is not
/// integral). The group is enumerated, multiplied by p^k with Witt addition
/// over Z[x] reduced mod p, and the invariants are read off from |G[p^k]|.
pub fn witt_coordinate_oracle(r: &BaseRing, n: usize, d: u64) -> Result<Vec<WeightInvariants>> {
    let p = r.p;
    let scale = WeightScale::new(p, r.vars.len(), n as u32);
    let mut out = Vec::new();
    for w in scale.enumerate(n as u32 - 1, scale.bound(d, 0)) {
        let u = scale.denominator_exp(&w) as usize;
        let mono = scale.monomial(&w);
        let slots: Vec<(usize, Monomial)> = (u..n)
            .map(|i| {
                let e = p.pow((i - u) as u32);
                (i, Monomial(mono.iter().map(|&x| (x * e) as u32).collect()))
            })
            .collect();
        let zero = MPoly::zero(&r.vars);
        let mut elems = Vec::new();
        for code in 0..p.pow(slots.len() as u32) {
            let mut coords = vec![zero.clone(); n];
            let mut c = code;
            for (i, m) in &slots {
                coords[*i] = MPoly::monomial(&r.vars, m.clone(), Coefficient::from_int(c % p));
                c /= p;
            }
            elems.push(WittVector::new(p, coords)?);
        }
        // log_p |G[p^k]| for k = 0..=n
        let mut torsion = vec![0u32; n + 1];
        for x in &elems {
            let mut y = x.clone();
            for k in 0..=n {
                if y.is_zero() {
                    for t in torsion.iter_mut().skip(k) {
                        *t += 1;
                    }
                    break;
                }
                let mut z = WittVector::zero(p, n, &zero);
                for _ in 0..p {
                    z = z.add(&y)?.map(|a| reduce_mod(a, p));
                }
                y = z;
            }
        }
        let logs: Vec<u32> = torsion.iter().map(|&c| (c as u64).ilog(p)).collect();
        // #{e_j ≥ k} = log|G[p^k]| − log|G[p^{k−1}]|
        let at_least: Vec<u32> = (1..=n).map(|k| logs[k] - logs[k - 1]).collect();
        let mut invariants = Vec::new();
        for k in 1..=n {
            let next = if k < n { at_least[k] } else { 0 };
            for _ in 0..at_least[k - 1] - next {
                invariants.push(k as u32);
            }
        }
        out.push(WeightInvariants { weight: scale.display(&w), invariants });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::var_names;

    fn ring(p: u64, vars: &[&str]) -> BaseRing {
        BaseRing::new(p, &var_names(vars)).unwrap()
    }

    #[test]
    fn constants_are_the_witt_vectors_of_the_prime_field() {
        for p in [2u64, 3, 5] {
            let pres = witt_ring_presentation(&ring(p, &[]), 2, 0).unwrap();
            assert_eq!(pres.components, vec![WeightInvariants { weight: "0".into(), invariants: vec![2] }]);
            assert_eq!(witt_coordinate_oracle(&ring(p, &[]), 2, 0).unwrap(), pres.components);
        }
    }

    #[test]
    fn presentation_matches_the_coordinate_oracle() {
        for (p, vars, n, d) in
            [(2u64, &["x"][..], 2usize, 4u64), (3, &["x"][..], 2, 3), (2, &["x", "y"][..], 2, 2)]
        {
            let r = ring(p, vars);
            let pres = witt_ring_presentation(&r, n, d).unwrap();
            assert_eq!(
                pres.components,
                witt_coordinate_oracle(&r, n, d).unwrap(),
                "p = {p}, vars = {vars:?}"
            );
        }
    }

    #[test]
    fn first_witt_level_is_the_polynomial_ring() {
        let pres = witt_ring_presentation(&ring(3, &["x"]), 1, 5).unwrap();
        assert_eq!(pres.components.len(), 6);
        assert!(pres.components.iter().all(|c| c.invariants == vec![1]));
    }

    #[test]
    fn weight_two_of_w2_over_f2() {
        // [x]^2 generates; V[x^4] = V F[x^2] = 2[x]^2
        let pres = witt_ring_presentation(&ring(2, &["x"]), 2, 4).unwrap();
        let c = pres.components.iter().find(|c| c.weight == "2").unwrap();
        assert_eq!(c.invariants, vec![2]);
        let half = pres.components.iter().find(|c| c.weight == "1/2").unwrap();
        assert_eq!(half.invariants, vec![1]);
        let x = pres.generators.iter().position(|g| g.name == "[x]").unwrap();
        let vx = pres.generators.iter().position(|g| g.name == "V[x]").unwrap();
        // [x]·V[x] = V(F[x]·[x]) = V[x^3]
        let (c, k) = pres.mul(x, vx).unwrap();
        assert_eq!((c, pres.generators[k].name.as_str()), (BigInt::from(1), "V[x^3]"));
    }
}
