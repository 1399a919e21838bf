//! Dieudonné complexes of free modules: axioms, décalage and saturation,
//! Verschiebung, the quotients W_r and strictness, Dieudonné algebras and
//! their classification by generators.

mod algebra;
mod catalog;
mod complex;
mod saturation;

pub use algebra::{
    check_dieudonne_algebra, classification_catalog, classify_relations_check, CatalogDatum,
    ClassificationCheck, ClassificationDatum, DieudonneAlgebraView, Orientation,
};
pub use catalog::{complex_catalog, CatalogComplex, SaturationExpectation};
pub(crate) use complex::matrices_agree;
pub use complex::{check_dieudonne, DieudonneComplex, Precision, PresentedModule};
pub use saturation::{
    check_wr_structure, eta_p, is_saturated, saturate, saturation_tower, solve_verschiebung,
    strictness_probe, wr_quotient, Decalage, SaturationTower, StrictnessReport, StrictnessStage,
    StrictnessVerdict, WrQuotient,
};

/// Default cap on saturation iterations.
pub const DEFAULT_MAX_ITER: usize = 8;
/// Default number of W_r stages probed for strictness.
pub const DEFAULT_R_MAX: u32 = 6;
