//! Exact coefficients, sparse polynomials and integer linear algebra.

mod coeff;
mod matrix;
mod modular;
mod poly;
mod ring;
mod sample;

pub use coeff::{int_valuation, Coefficient};
pub use matrix::{
    lattice_basis, lattice_contains, lattice_includes, lattice_index, lattice_intersect, lattice_preimage,
    IntMatrix, Smith,
};
pub use modular::{HowellBasis, ModMatrix, ModSmith, PrimePower};
pub use poly::{var_names, MPoly, Monomial};
pub use ring::{apply_map, CommRing, RingMap, ZMod};
pub use sample::{monomials_up_to, random_poly};

/// `smith_decompose(A) = (U, D, V)` with `U·A·V = D`.
pub fn smith_decompose(a: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let s = a.smith();
    (s.u, s.d, s.v)
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}
