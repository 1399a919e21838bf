//! Weight-bounded truncated de Rham–Witt complexes of F_p[x_1..x_d].
//!
//! Every object here is graded by Z[1/p]^d-valued weights (x ↦ λx), and each
//! weight piece of W_sΩ^i is a finite Z/p^s-module. Two constructions are
//! provided and cross-checked: the initial V-pro-complex presented by
//! generators and relations, and the quotient of the saturation of the de
//! Rham complex of the lift Z_(p)[x].

mod compare;
mod direct;
mod identities;
mod oracle;
mod saturated;
mod weight;

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::arith::{is_prime, HowellBasis};
use crate::{Error, Result};

use direct::DirectModel;
use saturated::SaturatedModel;

pub use compare::{compare_routes, de_rham_comparison};
pub use identities::{drw_identity_suite, drw_identity_suite_with, DEFAULT_PAIR_CAP, IDENTITY_LAWS};
pub use oracle::{
    witt_coordinate_oracle, witt_ring_presentation, WeightInvariants, WittGenerator, WittPolyPresentation,
};
pub use weight::{Weight, WeightScale};

/// (level s, form degree i, weight).
pub type Key = (usize, usize, Weight);

/// Default cap on the number of symbols spanning Ω_{W_s(R)} in the bounds.
pub const DEFAULT_SPAN_BUDGET: usize = 200_000;
/// Default cap on the number of η_p stages past the first per weight.
pub const DEFAULT_ITER_CAP: usize = 5;

/// The base ring F_p[x_1..x_d].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BaseRing {
    pub p: u64,
    pub vars: Vec<String>,
}

impl BaseRing {
    pub fn new(p: u64, vars: &[String]) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        Ok(BaseRing { p, vars: vars.to_vec() })
    }

    /// Parses `F2[x]`, `F3[x,y]` or `F5`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("expected a ring like F2[x,y], found {s:?}"));
        let rest = s.strip_prefix('F').ok_or_else(bad)?;
        let (num, vars) = match rest.find('[') {
            None => (rest, Vec::new()),
            Some(k) => {
                let inner = rest[k + 1..].strip_suffix(']').ok_or_else(bad)?;
                let vars: Vec<String> =
                    inner.split(',').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect();
                if vars.iter().any(|v| !v.chars().all(|c| c.is_alphanumeric() || c == '_')) {
                    return Err(bad());
                }
                (&rest[..k], vars)
            }
        };
        let p: u64 = num.parse().map_err(|_| bad())?;
        BaseRing::new(p, &vars)
    }
}

impl fmt::Display for BaseRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.vars.is_empty() {
            write!(f, "F{}", self.p)
        } else {
            write!(f, "F{}[{}]", self.p, self.vars.join(","))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Direct,
    Saturation,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Direct => "direct",
            Route::Saturation => "saturation",
        })
    }
}

#[derive(Clone, Debug)]
enum Model {
    Direct(DirectModel),
    Saturated(SaturatedModel),
}

/// W_sΩ^i for levels s = 1..=n+1, each in weights up to p^{n−s}·D, with d,
/// F (level s → s − 1, weight ×p), V (level s → s + 1, weight /p) and
/// products. Level n is W_nΩ in weights ≤ D; levels n ± 1 carry the targets
/// of F and V and are bounded so that F and V stay in range.
#[derive(Clone, Debug)]
pub struct DRWTruncation {
    ring: BaseRing,
    n: usize,
    weight_bound: u64,
    scale: WeightScale,
    bounds: Vec<u64>,
    route: Route,
    model: Model,
    relations: HashMap<Key, HowellBasis>,
}

fn level_bounds(scale: &WeightScale, n: usize, d: u64) -> Vec<u64> {
    (0..=n + 1).map(|s| if s == 0 { 0 } else { scale.bound(d, n as i32 - s as i32) }).collect()
}

fn check_args(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInput("Witt length must be at least 1".into()));
    }
    Ok(())
}

/// The direct route with the default spanning-set budget.
pub fn drw_truncated(r: &BaseRing, n: usize, d: u64) -> Result<DRWTruncation> {
    drw_truncated_with_budget(r, n, d, DEFAULT_SPAN_BUDGET)
}

/// Presents W_sΩ as Ω_{W_s(R)} modulo the V-pro-complex relations, closed
/// under d and the ideal structure, in every weight within the bounds.
pub fn drw_truncated_with_budget(r: &BaseRing, n: usize, d: u64, budget: usize) -> Result<DRWTruncation> {
    check_args(n)?;
    let scale = WeightScale::new(r.p, r.vars.len(), n as u32);
    let bounds = level_bounds(&scale, n, d);
    let model = DirectModel::build(scale, &r.vars, bounds.clone(), budget)?;
    let mut relations = model.relations();
    if let Some(key) = model.closure_defect(&relations) {
        return Err(Error::InvalidInput(format!(
            "relation module is not closed at level {}, degree {}, weight {}",
            key.0,
            key.1,
            scale.display(&key.2)
        )));
    }
    relations.values_mut().for_each(HowellBasis::normalize);
    Ok(DRWTruncation {
        ring: r.clone(),
        n,
        weight_bound: d,
        scale,
        bounds,
        route: Route::Direct,
        model: Model::Direct(model),
        relations,
    })
}

/// Presents W_sΩ as N/(V^sN + dV^sN) for N the saturation of the de Rham
/// complex of Z_(p)[x], computed weight by weight with η_p.
pub fn drw_via_saturation(r: &BaseRing, n: usize, d: u64, iter_cap: usize) -> Result<DRWTruncation> {
    check_args(n)?;
    let scale = WeightScale::new(r.p, r.vars.len(), n as u32);
    let bounds = level_bounds(&scale, n, d);
    let model = SaturatedModel::new(scale, &r.vars, bounds.clone(), iter_cap);
    let mut relations = model.relations()?;
    relations.values_mut().for_each(HowellBasis::normalize);
    Ok(DRWTruncation {
        ring: r.clone(),
        n,
        weight_bound: d,
        scale,
        bounds,
        route: Route::Saturation,
        model: Model::Saturated(model),
        relations,
    })
}

fn zeros(k: usize) -> Vec<u64> {
    vec![0; k]
}

impl DRWTruncation {
    pub fn ring(&self) -> &BaseRing {
        &self.ring
    }

    pub fn p(&self) -> u64 {
        self.ring.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight_bound(&self) -> u64 {
        self.weight_bound
    }

    pub fn route(&self) -> Route {
        self.route
    }

    pub fn scale(&self) -> &WeightScale {
        &self.scale
    }

    /// Highest level held (n + 1).
    pub fn top_level(&self) -> usize {
        self.bounds.len() - 1
    }

    /// Whether values at this level and weight are known (possibly zero).
    pub fn covers(&self, s: usize, w: &Weight) -> bool {
        s == 0 || (s < self.bounds.len() && self.scale.total(w) <= self.bounds[s])
    }

    /// Weights of level s that can be nonzero, by increasing total weight.
    pub fn weights(&self, s: usize) -> Vec<Weight> {
        if s == 0 || s >= self.bounds.len() {
            return Vec::new();
        }
        self.scale.enumerate(s as u32 - 1, self.bounds[s])
    }

    /// Number of ambient generators of the piece.
    pub fn rank(&self, key: &Key) -> usize {
        let (s, _, w) = key;
        if *s == 0 || *s >= self.bounds.len() || self.scale.denominator_exp(w) >= *s as u32 {
            return 0;
        }
        match &self.model {
            Model::Direct(m) => m.rank(key),
            Model::Saturated(m) => m.rank(key),
        }
    }

    pub fn max_degree(&self, s: usize, w: &Weight) -> usize {
        match &self.model {
            Model::Direct(m) => m.max_degree(s, w),
            Model::Saturated(m) => m.max_degree(w),
        }
    }

    /// Keys of all possibly nonzero pieces of level s.
    pub fn keys(&self, s: usize) -> Vec<Key> {
        let mut out = Vec::new();
        for w in self.weights(s) {
            for i in 0..=self.max_degree(s, &w) {
                let key = (s, i, w.clone());
                if self.rank(&key) > 0 {
                    out.push(key);
                }
            }
        }
        out
    }

    pub fn generator_names(&self, key: &Key) -> Vec<String> {
        if self.rank(key) == 0 {
            return Vec::new();
        }
        match &self.model {
            Model::Direct(m) => m.names(key),
            Model::Saturated(m) => m.names(key),
        }
    }

    pub fn relations(&self, key: &Key) -> Option<&HowellBasis> {
        self.relations.get(key)
    }

    /// Exponents e with the piece ≅ ⊕ Z/p^e.
    pub fn invariants(&self, key: &Key) -> Vec<u32> {
        match self.relations.get(key) {
            Some(h) if self.rank(key) > 0 => h.quotient_invariants(),
            _ => Vec::new(),
        }
    }

    /// log_p of the order of the piece.
    pub fn log_size(&self, key: &Key) -> u64 {
        self.invariants(key).iter().map(|&e| e as u64).sum()
    }

    /// Canonical representative modulo the relations.
    pub fn reduce(&self, key: &Key, v: &[u64]) -> Vec<u64> {
        match self.relations.get(key) {
            Some(h) => h.reduce(v),
            None => v.to_vec(),
        }
    }

    pub fn is_zero(&self, key: &Key, v: &[u64]) -> bool {
        self.reduce(key, v).iter().all(|&c| c == 0)
    }

    pub fn basis_vector(&self, key: &Key, k: usize) -> Vec<u64> {
        let mut v = zeros(self.rank(key));
        v[k] = 1;
        v
    }

    fn guard(&self, src: &Key, dst: &Key) -> Option<Vec<u64>> {
        assert!(self.covers(dst.0, &dst.2), "target {:?} outside the weight bounds", dst);
        (self.rank(src) == 0 || self.rank(dst) == 0).then(|| zeros(self.rank(dst)))
    }

    pub fn d_key(key: &Key) -> Key {
        (key.0, key.1 + 1, key.2.clone())
    }

    pub fn f_key(&self, key: &Key) -> Key {
        (key.0.saturating_sub(1), key.1, self.scale.times_p(&key.2))
    }

    pub fn v_key(&self, key: &Key) -> Key {
        (key.0 + 1, key.1, self.scale.div_p(&key.2).expect("weight resolution covers V"))
    }

    pub fn d(&self, key: &Key, v: &[u64]) -> Vec<u64> {
        let dst = Self::d_key(key);
        if let Some(z) = self.guard(key, &dst) {
            return z;
        }
        match &self.model {
            Model::Direct(m) => m.d(key, v),
            Model::Saturated(m) => m.d(key, v),
        }
    }

    pub fn f(&self, key: &Key, v: &[u64]) -> Vec<u64> {
        let dst = self.f_key(key);
        if let Some(z) = self.guard(key, &dst) {
            return z;
        }
        match &self.model {
            Model::Direct(m) => m.f(key, v),
            Model::Saturated(m) => m.f(key, v),
        }
    }

    pub fn v(&self, key: &Key, v: &[u64]) -> Vec<u64> {
        let dst = self.v_key(key);
        if let Some(z) = self.guard(key, &dst) {
            return z;
        }
        match &self.model {
            Model::Direct(m) => m.v(key, v),
            Model::Saturated(m) => m.v(key, v),
        }
    }

    pub fn mul(&self, a: (&Key, &[u64]), b: (&Key, &[u64])) -> Vec<u64> {
        assert_eq!(a.0 .0, b.0 .0, "factors live on the same level");
        let dst = (a.0 .0, a.0 .1 + b.0 .1, a.0 .2.add(&b.0 .2));
        if let Some(z) = self.guard(a.0, &dst) {
            return z;
        }
        if self.rank(b.0) == 0 {
            return zeros(self.rank(&dst));
        }
        match &self.model {
            Model::Direct(m) => m.mul(a, b),
            Model::Saturated(m) => m.mul(a, b),
        }
    }

    /// The Teichmüller representative [x^m] at level s, weight m integral.
    pub fn teichmuller(&self, s: usize, m: &Weight) -> Vec<u64> {
        let key = (s, 0, m.clone());
        assert!(self.covers(s, m), "[x^m] outside the weight bounds");
        if self.rank(&key) == 0 {
            return Vec::new();
        }
        match &self.model {
            Model::Direct(d) => d.teichmuller(s, m),
            Model::Saturated(d) => d.teichmuller(s, m),
        }
    }

    pub fn scalar(&self, key: &Key, c: u64, v: &[u64]) -> Vec<u64> {
        let r = direct::ring(self.p(), key.0);
        v.iter().map(|&x| r.mul(x, c % r.modulus())).collect()
    }

    pub fn sub(&self, key: &Key, a: &[u64], b: &[u64]) -> Vec<u64> {
        let r = direct::ring(self.p(), key.0);
        a.iter().zip(b).map(|(&x, &y)| r.sub(x, y)).collect()
    }

    /// A copy with one relation generator removed, for falsification tests.
    /// The remaining rows are kept as they are.
    pub fn without_relation(&self, key: &Key, row: usize) -> Result<DRWTruncation> {
        let h = self
            .relations
            .get(key)
            .filter(|h| row < h.num_rows())
            .ok_or_else(|| Error::InvalidInput(format!("no relation {row} at {key:?}")))?;
        let rows: Vec<&[u64]> = h.rows().enumerate().filter(|(k, _)| *k != row).map(|(_, r)| r).collect();
        let mut smaller = HowellBasis::from_generators(h.ring(), h.dim(), rows);
        smaller.normalize();
        let mut out = self.clone();
        out.relations.insert(key.clone(), smaller);
        Ok(out)
    }

    /// Sum of c·name over the reduced coordinates of v.
    pub fn format_element(&self, key: &Key, v: &[u64]) -> String {
        let red = self.reduce(key, v);
        let names = self.generator_names(key);
        let r = direct::ring(self.p(), key.0);
        let terms: Vec<String> = red
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(k, &c)| {
                let c = r.signed(c);
                match c {
                    1 => names[k].clone(),
                    -1 => format!("-{}", names[k]),
                    _ => format!("{c}·{}", names[k]),
                }
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    /// Number of η_p stages used per weight (saturation route only).
    pub fn saturation_stages(&self) -> Option<Vec<(String, usize)>> {
        match &self.model {
            Model::Saturated(m) => {
                let mut v: Vec<(Weight, usize)> = m.stages().into_iter().collect();
                v.sort();
                Some(v.into_iter().map(|(w, k)| (self.scale.display(&w), k)).collect())
            }
            Model::Direct(_) => None,
        }
    }

    pub(crate) fn direct_model(&self) -> Option<&DirectModel> {
        match &self.model {
            Model::Direct(m) => Some(m),
            Model::Saturated(_) => None,
        }
    }

    pub(crate) fn saturated_model(&self) -> Option<&SaturatedModel> {
        match &self.model {
            Model::Saturated(m) => Some(m),
            Model::Direct(_) => None,
        }
    }

    /// The JSON report of the nonzero pieces of W_nΩ: per (degree, weight)
    /// invariant factors, generator names and the images of every generator
    /// under d, F and V.
    pub fn report(&self) -> DrwReport {
        let n = self.n;
        let mut components = Vec::new();
        let mut keys = self.keys(n);
        keys.sort_by_key(|k| (k.1, self.scale.total(&k.2), k.2.clone()));
        for key in keys {
            if self.invariants(&key).is_empty() {
                continue;
            }
            let names = self.generator_names(&key);
            let mut d = Vec::new();
            let mut f = Vec::new();
            let mut v = Vec::new();
            for k in 0..names.len() {
                let e = self.basis_vector(&key, k);
                d.push(self.format_element(&Self::d_key(&key), &self.d(&key, &e)));
                if n > 1 {
                    let fk = self.f_key(&key);
                    f.push(self.format_element(&fk, &self.f(&key, &e)));
                }
                let vk = self.v_key(&key);
                v.push(self.format_element(&vk, &self.v(&key, &e)));
            }
            let p = self.p();
            components.push(ComponentReport {
                degree: key.1,
                weight: self.scale.display(&key.2),
                invariant_factors: self.invariants(&key).iter().map(|&e| p.pow(e)).collect(),
                generators: names,
                d,
                frobenius: f,
                verschiebung: v,
            });
        }
        DrwReport {
            schema_version: crate::SCHEMA_VERSION,
            route: self.route,
            ring: self.ring.to_string(),
            p: self.p(),
            level: n,
            weight_bound: self.weight_bound,
            components,
            saturation_stages: self.saturation_stages(),
        }
    }
}

/// One piece W_nΩ^i in one weight.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentReport {
    pub degree: usize,
    pub weight: String,
    pub invariant_factors: Vec<u64>,
    pub generators: Vec<String>,
    /// Images of the generators, reduced, in the generators of the target.
    pub d: Vec<String>,
    #[serde(rename = "F")]
    pub frobenius: Vec<String>,
    #[serde(rename = "V")]
    pub verschiebung: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DrwReport {
    pub schema_version: u32,
    pub route: Route,
    pub ring: String,
    pub p: u64,
    pub level: usize,
    pub weight_bound: u64,
    pub components: Vec<ComponentReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub saturation_stages: Option<Vec<(String, usize)>>,
}

impl DrwReport {
    /// (degree, weight) ↦ invariant factors, for comparing routes.
    pub fn invariant_table(&self) -> Vec<(usize, String, Vec<u64>)> {
        self.components.iter().map(|c| (c.degree, c.weight.clone(), c.invariant_factors.clone())).collect()
    }
}
