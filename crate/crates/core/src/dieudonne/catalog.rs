use super::complex::DieudonneComplex;

/// Expected behaviour of the saturation tower on a catalog complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SaturationExpectation {
    /// The stage with this index is the first saturated one.
    StabilizesAt(usize),
    /// Some cohomology carries F = p·unit, so no finite stage is saturated.
    IterationLimit,
}

#[derive(Clone, Debug)]
pub struct CatalogComplex {
    pub name: &'static str,
    pub complex: DieudonneComplex,
    pub expect: SaturationExpectation,
}

fn scalar(p: u64, lo: i64, ranks: &[usize], d: &[i64], f: &[i64]) -> DieudonneComplex {
    let d: Vec<Vec<Vec<i64>>> = d.iter().map(|&x| vec![vec![x]]).collect();
    let f: Vec<Vec<Vec<i64>>> = f.iter().map(|&x| vec![vec![x]]).collect();
    DieudonneComplex::from_i64(p, lo, ranks, &d, &f).expect("catalog entries are well formed")
}

/// Ten small exact Dieudonné complexes with annotated saturation behaviour.
pub fn complex_catalog() -> Vec<CatalogComplex> {
    use SaturationExpectation::*;
    let entry = |name, complex, expect| CatalogComplex { name, complex, expect };
    vec![
        entry("zero", DieudonneComplex::zero(2), StabilizesAt(0)),
        entry("Z, F = 1", scalar(2, 0, &[1], &[], &[1]), StabilizesAt(0)),
        entry("Z -3-> Z, F = (3, 1)", scalar(3, 0, &[1, 1], &[3], &[3, 1]), StabilizesAt(1)),
        entry("Z, F = 4", scalar(2, 0, &[1], &[], &[4]), IterationLimit),
        entry(
            "Z^2, F unipotent",
            DieudonneComplex::from_i64(3, 0, &[2], &[], &[vec![vec![1, 1], vec![0, 1]]]).unwrap(),
            StabilizesAt(0),
        ),
        entry("Z[-1], F = 1", scalar(5, 1, &[1], &[], &[1]), StabilizesAt(0)),
        entry("Z -1-> Z, F = (2, 1)", scalar(2, 0, &[1, 1], &[1], &[2, 1]), StabilizesAt(0)),
        entry("Z -9-> Z, F = (3, 1)", scalar(3, 0, &[1, 1], &[9], &[3, 1]), StabilizesAt(2)),
        entry(
            "Z -2-> Z -0-> Z, F = (4, 2, 1)",
            scalar(2, 0, &[1, 1, 1], &[2, 0], &[4, 2, 1]),
            IterationLimit,
        ),
        entry(
            "Z^2 -(1 3)-> Z, F = (3, 1)",
            DieudonneComplex::from_i64(
                3,
                0,
                &[2, 1],
                &[vec![vec![1, 3]]],
                &[vec![vec![3, 0], vec![0, 3]], vec![vec![1]]],
            )
            .unwrap(),
            IterationLimit,
        ),
    ]
}

#[cfg(test)]
mod tests {
    use num_bigint::BigInt;

    use super::super::{check_dieudonne, eta_p, saturation_tower, solve_verschiebung};
    use super::*;
    use crate::arith::IntMatrix;

    #[test]
    fn catalog_annotations_hold() {
        for c in complex_catalog() {
            assert!(check_dieudonne(&c.complex).passed, "{}", c.name);
            assert!(check_dieudonne(&eta_p(&c.complex).unwrap().complex).passed, "{}", c.name);
            let t = saturation_tower(&c.complex, 5).unwrap();
            assert!(t.check_functoriality().passed, "{}", c.name);
            match c.expect {
                SaturationExpectation::StabilizesAt(i) => {
                    assert_eq!(t.stabilized_at, Some(i), "{}", c.name);
                    let sat = t.result().unwrap();
                    let v = solve_verschiebung(sat).unwrap();
                    for (k, n) in sat.degrees().enumerate() {
                        let p = IntMatrix::scalar(sat.rank(n), BigInt::from(sat.p()));
                        assert_eq!(sat.f(n).mul(&v[k]), p);
                        assert_eq!(v[k].mul(&sat.f(n)), p);
                    }
                }
                SaturationExpectation::IterationLimit => {
                    assert_eq!(t.stabilized_at, None, "{}", c.name)
                }
            }
        }
    }
}
