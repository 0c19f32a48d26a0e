//! Subadditive potentials, growth-rate estimators and inequality checkers.

mod checks;
mod growth;
mod matrix;
mod potential;

pub use checks::{
    check_subadditivity, lemma_sub_check, LemmaSubReport, SubadditivityReport, LEMMA_SUB_TOL,
    SUBADDITIVITY_TOL, SUP_GRID_POINTS,
};
pub use growth::{growth_report, GrowthRateReport, MIN_GROWTH_HORIZON};
pub use matrix::operator_norm;
pub use potential::{
    evaluate, Accumulator, MatrixFamily, Observable, PotentialKind, SubadditivePotential,
    DEFAULT_RENORM_EVERY,
};
