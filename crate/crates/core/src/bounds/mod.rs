//! Numerical checkers for the inequalities the separation argument relies on.

mod bbbv;
mod cloning;
mod formula;
mod jls;
mod leakage;
mod rank;
mod report;

pub use bbbv::{
    bbbv_hybrid_check, bbbv_hybrid_check_doubled, bbbv_perturbation_check, differing_oracles, grover_circuit,
    hybrid_measurement, query_count, random_query_circuit, with_adjoint, HybridMeasurement, QUERY,
};
pub use cloning::{clone_attempt, cloning_frequency_check};
pub use formula::{w_formula, WFormula};
pub use jls::{jls_check, ReflectionAdversary, MAX_JLS_DIM};
pub use leakage::{leakage_check, majority_first_bit, MAX_LEAKAGE_OUTCOMES};
pub use rank::{mapped_weight, rank_bound_check, rank_saturation};
pub use report::{BoundReport, EXACT_TOL};
