use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arith::{Coefficient, HowellBasis, MPoly, ModMatrix, Monomial, PrimePower};
use crate::derham::{build_de_rham, index_tuples, merge_sign, Form};
use crate::report::CheckReport;

use super::direct::{ring, Sym};
use super::identities::sample_pairs;
use super::{DRWTruncation, Key, Weight, WeightScale};

/// Pairs of generators per level used to test that ι respects products.
const PRODUCT_SAMPLES: usize = 300;

/// ι(g_κ dg_λ1 … dg_λi) in dlog coordinates: g_κ = V^u[x^{p^uκ}] goes to
/// p^u x^κ and dg_λ to p^{u(λ)} x^λ Σ_j λ_j dlog x_j.
fn realize(sc: &WeightScale, tau: &Weight, sym: &Sym) -> Vec<BigInt> {
    let supp = tau.support();
    let unit = BigInt::from(sc.p).pow(sc.scale);
    let mut acc: Vec<(Vec<usize>, BigInt)> =
        vec![(Vec::new(), BigInt::from(sc.p).pow(sc.denominator_exp(&sym.k)))];
    for lam in &sym.l {
        let scale = BigInt::from(sc.p).pow(sc.denominator_exp(lam));
        let mut next = Vec::new();
        for (set, c) in &acc {
            for &j in &supp {
                let num = BigInt::from(lam.numerators()[j]);
                if num.is_zero() {
                    continue;
                }
                if let Some((sign, out)) = merge_sign(set, &[j]) {
                    let coef = &scale * num;
                    debug_assert!((&coef % &unit).is_zero(), "p^u λ is integral");
                    next.push((out, c * (coef / &unit) * sign));
                }
            }
        }
        acc = next;
    }
    let sets: Vec<Vec<usize>> = index_tuples(supp.len(), sym.l.len())
        .into_iter()
        .map(|t| t.into_iter().map(|k| supp[k]).collect())
        .collect();
    let mut v = vec![BigInt::zero(); sets.len()];
    for (set, c) in acc {
        let r = sets.iter().position(|t| *t == set).expect("subset of the support");
        v[r] += c;
    }
    v
}

struct Realization<'a> {
    direct: &'a DRWTruncation,
    sat: &'a DRWTruncation,
    /// Images of all direct generators, per piece.
    cache: RefCell<HashMap<Key, Vec<Vec<u64>>>>,
}

impl Realization<'_> {
    fn gen(&self, key: &Key, k: usize) -> Vec<u64> {
        if self.sat.rank(key) == 0 {
            return Vec::new();
        }
        if let Some(cols) = self.cache.borrow().get(key) {
            return cols[k].clone();
        }
        let dm = self.direct.direct_model().expect("direct route");
        let sm = self.sat.saturated_model().expect("saturation route");
        let cols: Vec<Vec<u64>> =
            dm.symbols(key).iter().map(|sym| sm.coords_of(key, &realize(&dm.scale, &key.2, sym))).collect();
        let out = cols[k].clone();
        self.cache.borrow_mut().insert(key.clone(), cols);
        out
    }

    fn apply(&self, key: &Key, v: &[u64]) -> Vec<u64> {
        let r = ring(self.direct.p(), key.0);
        let mut out = vec![0u64; self.sat.rank(key)];
        if out.is_empty() {
            return out;
        }
        for (k, &c) in v.iter().enumerate() {
            if c != 0 {
                for (o, x) in out.iter_mut().zip(self.gen(key, k)) {
                    *o = r.add(*o, r.mul(c, x));
                }
            }
        }
        out
    }
}

/// Cross-check of the two routes: equal invariant factors in every piece,
/// and the realization ι of the direct generators in the saturated complex
/// kills the direct relations, is onto, and commutes with d, F, V and
/// products. With equal orders this makes ι an isomorphism.
pub fn compare_routes(direct: &DRWTruncation, sat: &DRWTruncation) -> CheckReport {
    let mut rep = CheckReport::new("direct and saturation routes agree");
    if direct.direct_model().is_none() || sat.saturated_model().is_none() {
        rep.fail("routes", "arguments".into(), "expects a direct and a saturation truncation".into());
        return rep;
    }
    if (direct.p(), direct.n(), direct.weight_bound(), &direct.ring().vars)
        != (sat.p(), sat.n(), sat.weight_bound(), &sat.ring().vars)
    {
        rep.fail("routes", "arguments".into(), "truncations of different rings or bounds".into());
        return rep;
    }
    let io = Realization { direct, sat, cache: RefCell::new(HashMap::new()) };
    let sc = *direct.scale();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for s in 1..=direct.top_level() {
        let keys: BTreeSet<(usize, u64, Weight)> =
            direct.keys(s).into_iter().chain(sat.keys(s)).map(|(_, i, w)| (i, sc.total(&w), w)).collect();
        for (i, _, w) in keys {
            let key = (s, i, w);
            let name = || format!("level {s}, degree {}, weight {}", key.1, sc.display(&key.2));
            let (a, b) = (direct.invariants(&key), sat.invariants(&key));
            rep.check("equal invariant factors", a == b, name, || format!("direct {a:?}, saturation {b:?}"));
            if sat.rank(&key) == 0 || direct.rank(&key) == 0 {
                continue;
            }
            if let Some(h) = direct.relations(&key) {
                for row in h.rows() {
                    let img = io.apply(&key, row);
                    rep.check("ι kills the relations", sat.is_zero(&key, &img), name, || {
                        sat.format_element(&key, &img)
                    });
                }
            }
            let mut span = sat
                .relations(&key)
                .cloned()
                .unwrap_or_else(|| HowellBasis::new(PrimePower::new(sat.p(), s as u32), sat.rank(&key)));
            for k in 0..direct.rank(&key) {
                span.insert(io.gen(&key, k));
            }
            rep.check("ι is onto", span.quotient_log_size() == 0, name, || {
                format!("cokernel of order p^{}", span.quotient_log_size())
            });
            for k in 0..direct.rank(&key) {
                let e = direct.basis_vector(&key, k);
                let x = io.gen(&key, k);
                let input = || format!("{} at {}", direct.generator_names(&key)[k], name());
                let dk = DRWTruncation::d_key(&key);
                let (l, r) = (io.apply(&dk, &direct.d(&key, &e)), sat.d(&key, &x));
                rep.check("ι commutes with d", sat.is_zero(&dk, &sat.sub(&dk, &l, &r)), input, || {
                    format!("{} vs {}", sat.format_element(&dk, &l), sat.format_element(&dk, &r))
                });
                if s > 1 {
                    let fk = direct.f_key(&key);
                    let (l, r) = (io.apply(&fk, &direct.f(&key, &e)), sat.f(&key, &x));
                    rep.check("ι commutes with F", sat.is_zero(&fk, &sat.sub(&fk, &l, &r)), input, || {
                        format!("{} vs {}", sat.format_element(&fk, &l), sat.format_element(&fk, &r))
                    });
                }
                if s < direct.top_level() {
                    let vk = direct.v_key(&key);
                    let (l, r) = (io.apply(&vk, &direct.v(&key, &e)), sat.v(&key, &x));
                    rep.check("ι commutes with V", sat.is_zero(&vk, &sat.sub(&vk, &l, &r)), input, || {
                        format!("{} vs {}", sat.format_element(&vk, &l), sat.format_element(&vk, &r))
                    });
                }
            }
        }
        // products on sampled generator pairs
        let pieces: Vec<(Key, usize)> =
            direct.keys(s).into_iter().map(|k| (k.clone(), direct.rank(&k))).collect();
        let ok = |a: &Key, b: &Key| direct.covers(s, &a.2.add(&b.2));
        for (a, b) in sample_pairs(&pieces, &pieces, ok, PRODUCT_SAMPLES, &mut rng) {
            let (a, b) = (&a, &b);
            let dst = (s, a.0 .1 + b.0 .1, a.0 .2.add(&b.0 .2));
            let (ea, eb) = (direct.basis_vector(&a.0, a.1), direct.basis_vector(&b.0, b.1));
            let l = io.apply(&dst, &direct.mul((&a.0, &ea), (&b.0, &eb)));
            let r = sat.mul((&a.0, &io.gen(&a.0, a.1)), (&b.0, &io.gen(&b.0, b.1)));
            rep.check(
                "ι commutes with products",
                sat.rank(&dst) == 0 || sat.is_zero(&dst, &sat.sub(&dst, &l, &r)),
                || format!("{} · {}", direct.generator_names(&a.0)[a.1], direct.generator_names(&b.0)[b.1]),
                || format!("{} vs {}", sat.format_element(&dst, &l), sat.format_element(&dst, &r)),
            );
        }
    }
    rep
}

/// W_1Ω of either route against Ω of F_p[x] built by the derham module: in
/// every integral weight m within the level-1 bound, each W_1Ω^i is an
/// F_p-vector space of the dimension of the span of x^{m−e_I}dx_I, and d has
/// the same rank as the de Rham differential reduced mod p.
pub fn de_rham_comparison(t: &DRWTruncation) -> CheckReport {
    let mut rep = CheckReport::new(format!("W_1Ω agrees with the de Rham complex ({} route)", t.route()));
    let vars = &t.ring().vars;
    let c = build_de_rham(vars);
    let sc = *t.scale();
    let fp = PrimePower::new(t.p(), 1);
    for w in t.weights(1) {
        let m = sc.monomial(&w);
        let forms = |i: usize| -> Vec<(Vec<usize>, Form)> {
            index_tuples(vars.len(), i)
                .into_iter()
                .filter(|set| set.iter().all(|&j| m[j] > 0))
                .map(|set| {
                    let mut e: Vec<u32> = m.iter().map(|&x| x as u32).collect();
                    for &j in &set {
                        e[j] -= 1;
                    }
                    let a = MPoly::monomial(vars, Monomial(e), Coefficient::one());
                    (set.clone(), Form::term(c.gens(), a, set))
                })
                .collect()
        };
        for i in 0..=vars.len() + 1 {
            let key = (1, i, w.clone());
            let name = || format!("degree {i}, weight {}", sc.display(&w));
            let src = forms(i);
            let inv = t.invariants(&key);
            rep.check("dimension", inv == vec![1; src.len()], name, || {
                format!("{inv:?} vs dimension {}", src.len())
            });
            let dst = forms(i + 1);
            let dm = ModMatrix::from_fn(fp, dst.len(), src.len(), |r, col| {
                let img = c.d(&src[col].1);
                let (set, _) = &dst[r];
                img.terms()
                    .filter(|(idx, _)| *idx == set)
                    .map(|(_, a)| {
                        fp.from_big(
                            &a.terms()
                                .next()
                                .map_or(BigInt::zero(), |(_, k)| k.to_integer().expect("integral")),
                        )
                    })
                    .sum::<u64>()
                    % t.p()
            });
            let expected = src.len() as u64 - dm.kernel_log_size();
            let dk = DRWTruncation::d_key(&key);
            let mut h = t.relations(&dk).cloned().unwrap_or_else(|| HowellBasis::new(fp, t.rank(&dk)));
            let base = h.log_size();
            for k in 0..t.rank(&key) {
                h.insert(t.d(&key, &t.basis_vector(&key, k)));
            }
            let rank = h.log_size() - base;
            rep.check("rank of d", rank == expected, name, || format!("{rank} vs {expected}"));
        }
    }
    rep
}
