//! Toric and abelianized I-functions, exactly.

pub mod abelianize;
pub mod toric;

pub use crate::chow::nonabelian::MonomialCatalog;
pub use abelianize::{
    abelianization_factor_check, abelianize, bigness_check, compare_series, formula_a, formula_b, grass_spec,
    Abelianized, BigPointReport, Formula,
};
pub use toric::{apply_partial_delta, degree_vectors, toric_coeff, toric_i_series, Loc, Trunc};
