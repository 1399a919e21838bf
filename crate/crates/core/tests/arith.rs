use drwkit::arith::{
    apply_map, lattice_basis, lattice_contains, lattice_includes, lattice_index, lattice_intersect,
    random_poly, smith_decompose, var_names, IntMatrix, MPoly, RingMap,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn matrix(max: usize) -> impl Strategy<Value = IntMatrix> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(-6i64..=6, c), r)
            .prop_map(|rows| IntMatrix::from_rows(&rows))
    })
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    (k - 1..n)
        .flat_map(|last| {
            subsets(last, k - 1).into_iter().map(move |mut s| {
                s.push(last);
                s
            })
        })
        .collect()
}

/// gcd of all k×k minors.
fn determinantal_divisor(a: &IntMatrix, k: usize) -> BigInt {
    let mut g = BigInt::zero();
    for rs in subsets(a.rows(), k) {
        for cs in subsets(a.cols(), k) {
            let m = IntMatrix::from_fn(k, k, |i, j| a.get(rs[i], cs[j]).clone());
            g = g.gcd(&m.det());
        }
    }
    g
}

fn vars() -> Vec<String> {
    var_names(&["x", "y"])
}

fn poly(seed: u64) -> MPoly {
    random_poly(&mut ChaCha8Rng::seed_from_u64(seed), &vars(), 3, 5, 4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smith_form_matches_determinantal_divisors(a in matrix(4)) {
        let (u, d, v) = smith_decompose(&a);
        prop_assert!(u.is_unimodular() && v.is_unimodular());
        prop_assert_eq!(u.mul(&a).mul(&v), d.clone());
        let r = a.rows().min(a.cols());
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                prop_assert!(i == j || d.get(i, j).is_zero());
            }
        }
        let mut prefix = BigInt::one();
        for k in 1..=r {
            let dk = d.get(k - 1, k - 1).clone();
            prop_assert!(!dk.is_negative());
            if k > 1 {
                let prev = d.get(k - 2, k - 2);
                prop_assert!(dk.is_zero() || (!prev.is_zero() && (&dk % prev).is_zero()));
            }
            prefix *= &dk;
            prop_assert_eq!(&prefix, &determinantal_divisor(&a, k), "k = {}", k);
        }
    }

    #[test]
    fn exact_division_inverts_multiplication(seed in any::<u64>(), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let q = poly(seed);
        prop_assert_eq!((q.scale_int(p as i64)).exact_div_p(p).unwrap(), q.clone());
        let bumped = &q.scale_int(p as i64) + &MPoly::one(&vars());
        prop_assert!(bumped.exact_div_p(p).is_err());
    }

    #[test]
    fn substitution_is_a_ring_homomorphism(s in any::<[u64; 4]>()) {
        let f = RingMap::new(&vars(), &vars(), vec![poly(s[0]), poly(s[1])]).unwrap();
        let (a, b) = (poly(s[2]), poly(s[3]));
        let fa = apply_map(&f, &a).unwrap();
        let fb = apply_map(&f, &b).unwrap();
        prop_assert_eq!(apply_map(&f, &(&a + &b)).unwrap(), &fa + &fb);
        prop_assert_eq!(apply_map(&f, &(&a * &b)).unwrap(), &fa * &fb);
        prop_assert_eq!(apply_map(&f, &MPoly::one(&vars())).unwrap(), MPoly::one(&vars()));
        prop_assert_eq!(apply_map(&RingMap::identity(&vars()), &a).unwrap(), a);
    }

    #[test]
    fn intersection_is_the_largest_common_sublattice(
        a in prop::collection::vec(prop::collection::vec(-6i64..=6, 3), 1..=3),
        b in prop::collection::vec(prop::collection::vec(-6i64..=6, 3), 1..=3),
        xs in prop::collection::vec(prop::collection::vec(-4i64..=4, 3), 8),
    ) {
        // generators as columns of a 3-row matrix
        let a = IntMatrix::from_rows(&a).transpose();
        let b = IntMatrix::from_rows(&b).transpose();
        let meet = lattice_intersect(&a, &b).unwrap();
        let (ba, bb, bm) = (lattice_basis(&a), lattice_basis(&b), lattice_basis(&meet));
        for c in meet.columns() {
            prop_assert!(lattice_contains(&ba, &c) && lattice_contains(&bb, &c));
        }
        for x in xs {
            let x: Vec<BigInt> = x[..a.cols()].iter().map(|&t| BigInt::from(t)).collect();
            let v = a.mul_vec(&x);
            prop_assert_eq!(lattice_contains(&bb, &v), lattice_contains(&bm, &v));
        }
    }
}

#[test]
fn intersection_of_diagonal_lattices_takes_lcms() {
    let a = IntMatrix::from_rows(&[vec![4, 0], vec![0, 6]]);
    let b = IntMatrix::from_rows(&[vec![6, 0], vec![0, 10]]);
    let meet = lattice_basis(&lattice_intersect(&a, &b).unwrap());
    assert_eq!(lattice_index(&meet), Some(BigInt::from(12 * 30)));
    assert!(lattice_includes(&meet, &IntMatrix::from_rows(&[vec![12, 0], vec![0, 30]])));
}
