//! Graded mixed complexes: a differential d of bidegree (0, 1), a mixed
//! differential ε of bidegree (1, −1) and an optional Frobenius.

mod complex;
mod de_rham;
mod decalage;
mod hom;
mod truncation;

pub use complex::{
    check_mixed, d_target, eps_target, heart_embed, p_twist, Bidegree, CochainComplex, GradedMixedComplex,
};
pub use de_rham::{ddr_mixed, heart_embed_de_rham, LabeledPiece, LabeledPresentation, MixedDeRham};
pub use decalage::{eta_p_mixed, MixedDecalage};
pub use hom::{
    adjunction_check, chain_map_log_count, hom_log_count, mixed_catalog, random_mixed, unit_log_count,
    AdjunctionReport, DEFAULT_HOM_BUDGET,
};
pub use truncation::{beilinson_report, beilinson_truncate, Cohomology, TruncationReport, WeightCohomology};
