use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::report::CheckReport;

use super::{DRWTruncation, Key, Weight};

pub const IDENTITY_LAWS: [&str; 8] = [
    "FV = p",
    "VF = p",
    "FdV = d",
    "dF = pFd",
    "Fd[x] = [x]^{p-1}d[x]",
    "xVy = V(F(x)y)",
    "V(x dy) = V(x)dV(y)",
    "d[x]Vy = V([x]^{p-1}d[x]y)",
];

/// Pairs of generators tested per binary identity before sampling kicks in.
pub const DEFAULT_PAIR_CAP: usize = 400;
/// Relation rows tested for compatibility, as a multiple of the pair cap.
const RELATION_FACTOR: usize = 5;

pub(crate) type Gen = (Key, usize);

fn generators(t: &DRWTruncation, s: usize) -> Vec<Gen> {
    t.keys(s).into_iter().flat_map(|k| (0..t.rank(&k)).map(move |i| (k.clone(), i))).collect()
}

fn pick<T: Clone>(items: Vec<T>, cap: usize, rng: &mut ChaCha8Rng) -> Vec<T> {
    if items.len() <= cap {
        return items;
    }
    let mut idx = sample(rng, items.len(), cap).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(|i| items[i].clone()).collect()
}

/// Pairs (a, b) of generators with admissible pieces: all of them when there
/// are at most `cap`, otherwise `cap` distinct pairs drawn uniformly. Pieces
/// are (key, number of generators); pairs are never materialized in bulk.
pub(crate) fn sample_pairs(
    a: &[(Key, usize)],
    b: &[(Key, usize)],
    ok: impl Fn(&Key, &Key) -> bool,
    cap: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<(Gen, Gen)> {
    // blocks of ka × kb pairs, with running offsets
    let mut blocks = Vec::new();
    let mut total = 0usize;
    for (i, (ka, ra)) in a.iter().enumerate() {
        for (j, (kb, rb)) in b.iter().enumerate() {
            if ra * rb > 0 && ok(ka, kb) {
                blocks.push((total, i, j));
                total += ra * rb;
            }
        }
    }
    let idx: Vec<usize> = if total <= cap {
        (0..total).collect()
    } else {
        let mut v = sample(rng, total, cap).into_vec();
        v.sort_unstable();
        v
    };
    idx.into_iter()
        .map(|x| {
            let (start, i, j) = blocks[blocks.partition_point(|blk| blk.0 <= x) - 1];
            let off = x - start;
            let rb = b[j].1;
            ((a[i].0.clone(), off / rb), (b[j].0.clone(), off % rb))
        })
        .collect()
}

fn pieces(t: &DRWTruncation, s: usize) -> Vec<(Key, usize)> {
    t.keys(s).into_iter().map(|k| (k.clone(), t.rank(&k))).collect()
}

struct Ctx<'a> {
    t: &'a DRWTruncation,
    rep: CheckReport,
}

impl Ctx<'_> {
    fn equal(&mut self, law: &str, key: &Key, a: &[u64], b: &[u64], input: impl FnOnce() -> String) {
        let diff = self.t.sub(key, a, b);
        let ok = self.t.is_zero(key, &diff);
        let t = self.t;
        self.rep.check(law, ok, input, || {
            format!("level {}: {} vs {}", key.0, t.format_element(key, a), t.format_element(key, b))
        });
    }

    fn vanishes(&mut self, law: &str, key: &Key, a: &[u64], input: impl FnOnce() -> String) {
        let ok = self.t.is_zero(key, a);
        let t = self.t;
        self.rep.check(law, ok, input, || format!("level {}: {} ≠ 0", key.0, t.format_element(key, a)));
    }
}

fn integral_weights(t: &DRWTruncation, s: usize) -> Vec<Weight> {
    t.weights(s).into_iter().filter(|w| !w.is_zero() && t.scale().is_integral(w)).collect()
}

/// The eight identities on every generator of W_nΩ and on sampled pairs,
/// plus compatibility of d, F, V and products with the relations.
pub fn drw_identity_suite(t: &DRWTruncation) -> CheckReport {
    drw_identity_suite_with(t, DEFAULT_PAIR_CAP, 0)
}

pub fn drw_identity_suite_with(t: &DRWTruncation, pair_cap: usize, seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Ctx { t, rep: CheckReport::new(format!("de Rham–Witt identities ({} route)", t.route())) };
    let n = t.n();
    let p = t.p();
    let sc = *t.scale();
    let top = generators(t, n);

    for g in &top {
        let (key, k) = g;
        let e = t.basis_vector(key, *k);
        // FV = p
        let vk = t.v_key(key);
        let fv = t.f(&vk, &t.v(key, &e));
        c.equal("FV = p", key, &fv, &t.scalar(key, p, &e), || c_name(t, g));
        // VF = p
        let fk = t.f_key(key);
        let vf = if n > 1 { t.v(&fk, &t.f(key, &e)) } else { vec![0; e.len()] };
        c.equal("VF = p", key, &vf, &t.scalar(key, p, &e), || c_name(t, g));
        // FdV = d
        let fdv = t.f(&DRWTruncation::d_key(&vk), &t.d(&vk, &t.v(key, &e)));
        c.equal("FdV = d", &DRWTruncation::d_key(key), &fdv, &t.d(key, &e), || c_name(t, g));
        // dF = pFd
        if n > 1 {
            let df = t.d(&fk, &t.f(key, &e));
            let fd = t.f(&DRWTruncation::d_key(key), &t.d(key, &e));
            c.equal("dF = pFd", &DRWTruncation::d_key(&fk), &df, &t.scalar(&fk, p, &fd), || c_name(t, g));
        }
    }

    if n > 1 {
        let s = n - 1;
        for m in integral_weights(t, n) {
            let pm = sc.from_numerators(m.numerators().iter().map(|x| x * (p - 1)).collect());
            let key = (n, 0, m.clone());
            let dx = t.d(&key, &t.teichmuller(n, &m));
            let lhs = t.f(&DRWTruncation::d_key(&key), &dx);
            let rhs = t.mul(
                (&(s, 0, pm.clone()), &t.teichmuller(s, &pm)),
                (&(s, 1, m.clone()), &t.d(&(s, 0, m.clone()), &t.teichmuller(s, &m))),
            );
            let dst = (s, 1, sc.times_p(&m));
            c.equal("Fd[x] = [x]^{p-1}d[x]", &dst, &lhs, &rhs, || {
                format!("x^m of weight {}", sc.display(&m))
            });
        }

        // xVy = V(F(x)y)
        let (top_p, below_p) = (pieces(t, n), pieces(t, s));
        let ok =
            |a: &Key, b: &Key| t.covers(n, &a.2.add(&sc.div_p(&b.2).expect("weight resolution covers V")));
        for (x, y) in sample_pairs(&top_p, &below_p, ok, pair_cap, &mut rng) {
            let ex = t.basis_vector(&x.0, x.1);
            let ey = t.basis_vector(&y.0, y.1);
            let vyk = t.v_key(&y.0);
            let lhs = t.mul((&x.0, &ex), (&vyk, &t.v(&y.0, &ey)));
            let fxk = t.f_key(&x.0);
            let prod = t.mul((&fxk, &t.f(&x.0, &ex)), (&y.0, &ey));
            let pk = (s, fxk.1 + y.0 .1, fxk.2.add(&y.0 .2));
            let rhs = t.v(&pk, &prod);
            let dst = (n, x.0 .1 + y.0 .1, x.0 .2.add(&vyk.2));
            c.equal("xVy = V(F(x)y)", &dst, &lhs, &rhs, || {
                format!("x = {}, y = {}", c_name(t, &x), c_name(t, &y))
            });
        }

        // V(x dy) = V(x)dV(y)
        let ok = |a: &Key, b: &Key| t.covers(s, &a.2.add(&b.2));
        for (x, y) in sample_pairs(&below_p, &below_p, ok, pair_cap, &mut rng) {
            let ex = t.basis_vector(&x.0, x.1);
            let ey = t.basis_vector(&y.0, y.1);
            let dyk = DRWTruncation::d_key(&y.0);
            let xdy = t.mul((&x.0, &ex), (&dyk, &t.d(&y.0, &ey)));
            let xdyk = (s, x.0 .1 + dyk.1, x.0 .2.add(&y.0 .2));
            let lhs = t.v(&xdyk, &xdy);
            let vyk = t.v_key(&y.0);
            let dvy = t.d(&vyk, &t.v(&y.0, &ey));
            let rhs = t.mul((&t.v_key(&x.0), &t.v(&x.0, &ex)), (&DRWTruncation::d_key(&vyk), &dvy));
            c.equal("V(x dy) = V(x)dV(y)", &t.v_key(&xdyk), &lhs, &rhs, || {
                format!("x = {}, y = {}", c_name(t, &x), c_name(t, &y))
            });
        }

        // d[x]Vy = V([x]^{p-1}d[x]y)
        let teich: Vec<(Key, usize)> = integral_weights(t, n).into_iter().map(|m| ((n, 0, m), 1)).collect();
        let ok =
            |a: &Key, b: &Key| t.covers(n, &a.2.add(&sc.div_p(&b.2).expect("weight resolution covers V")));
        for ((mk, _), y) in sample_pairs(&teich, &below_p, ok, pair_cap, &mut rng) {
            let m = mk.2;
            let ey = t.basis_vector(&y.0, y.1);
            let mk = (n, 0, m.clone());
            let dx = t.d(&mk, &t.teichmuller(n, &m));
            let vyk = t.v_key(&y.0);
            let lhs = t.mul((&DRWTruncation::d_key(&mk), &dx), (&vyk, &t.v(&y.0, &ey)));
            let pm = sc.from_numerators(m.numerators().iter().map(|x| x * (p - 1)).collect());
            let fdx = t.mul(
                (&(s, 0, pm.clone()), &t.teichmuller(s, &pm)),
                (&(s, 1, m.clone()), &t.d(&(s, 0, m.clone()), &t.teichmuller(s, &m))),
            );
            let fdxk = (s, 1, sc.times_p(&m));
            let prod = t.mul((&fdxk, &fdx), (&y.0, &ey));
            let pk = (s, 1 + y.0 .1, fdxk.2.add(&y.0 .2));
            let rhs = t.v(&pk, &prod);
            let dst = t.v_key(&pk);
            c.equal("d[x]Vy = V([x]^{p-1}d[x]y)", &dst, &lhs, &rhs, || {
                format!("x^m of weight {}, y = {}", sc.display(&m), c_name(t, &y))
            });
        }
    }

    // the structure maps are defined on the quotients (sampled relations)
    let mut rels = Vec::new();
    for s in 1..=n {
        for key in t.keys(s) {
            let rows = t.relations(&key).map_or(0, |h| h.num_rows());
            rels.extend((0..rows).map(|r| (key.clone(), r)));
        }
    }
    for (key, i) in pick(rels, RELATION_FACTOR * pair_cap, &mut rng) {
        let s = key.0;
        let row: Vec<u64> =
            t.relations(&key).expect("listed above").rows().nth(i).expect("row index").to_vec();
        let input = || format!("relation {i} at level {s}, degree {}, weight {}", key.1, sc.display(&key.2));
        c.vanishes("d respects relations", &DRWTruncation::d_key(&key), &t.d(&key, &row), input);
        if s > 1 {
            c.vanishes("F respects relations", &t.f_key(&key), &t.f(&key, &row), input);
        }
        c.vanishes("V respects relations", &t.v_key(&key), &t.v(&key, &row), input);
    }
    let rel_p: Vec<(Key, usize)> =
        t.keys(n).into_iter().map(|k| (k.clone(), t.relations(&k).map_or(0, |h| h.num_rows()))).collect();
    let ok = |a: &Key, b: &Key| t.covers(n, &a.2.add(&b.2));
    for ((key, r), g) in sample_pairs(&rel_p, &pieces(t, n), ok, pair_cap, &mut rng) {
        let row: Vec<u64> =
            t.relations(&key).expect("listed above").rows().nth(r).expect("row index").to_vec();
        let prod = t.mul((&key, &row), (&g.0, &t.basis_vector(&g.0, g.1)));
        let dst = (n, key.1 + g.0 .1, key.2.add(&g.0 .2));
        c.vanishes("products respect relations", &dst, &prod, || {
            format!("relation {r} at degree {}, weight {} times {}", key.1, sc.display(&key.2), c_name(t, &g))
        });
    }
    c.rep
}

fn c_name(t: &DRWTruncation, g: &Gen) -> String {
    format!("{} in degree {}, weight {}", t.generator_names(&g.0)[g.1], g.0 .1, t.scale().display(&g.0 .2))
}
