//! p-typical Witt vectors, δ-rings from Frobenius lifts, and truncated big
//! Witt vectors of endomorphisms.

mod big;
mod delta;
mod universal;
mod vector;

pub use big::{
    bigwitt_frobenius, bigwitt_verschiebung, char_poly, char_poly_witt, ker_membership, BigWittVector,
    EndoClass,
};
pub use delta::{
    delta_laws_check, delta_laws_check_with, delta_of, w2_section_check, w2_section_check_with, DeltaRing,
};
pub use universal::{supported as universal_supported, universal, UniversalPolys};
pub use vector::{frobenius, from_ghost, ghost, teichmuller, verschiebung, witt_add, witt_mul, WittVector};
