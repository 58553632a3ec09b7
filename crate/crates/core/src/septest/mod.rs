//! The separation construction: the oracle, its low-space algorithm, the salted variant
//! and the chain of simulators that replace it.

mod adversary;
mod checks;
mod extract;
mod instance;
mod ledger;
mod oracle;
mod worlds;

pub use adversary::{Adversary, AdversaryStep};
pub use checks::{
    compressed_oracle_claim, exact_phase_average_gap, negative_count_check, phase_invariance_check,
    CompressedOracleReport, PhaseInvarianceReport,
};
pub use extract::{extract_psi_t, Extraction};
pub use instance::{control_width, OracleInstance, SaltedInstance};
pub use ledger::{dimension_ledger, CountLedger, CountTuple, DimensionLedger, SUPPORT_TOL};
pub use oracle::{
    algorithm_gate_set, build_measurement_algorithm, build_oracle, build_salted_measurement_algorithm,
    build_salted_oracle, increment, oracle_block, DEC, INC, MAX_ORACLE_QUBITS, ORACLE,
};
pub use worlds::{
    algorithm_density, joint_trace_distance, measure_qubits, reduced_density, run_adversary, total_weight, CopyKey,
    CopyMode, CopyWorld, CountKey, CountingWorld, QueryWorld, RealWorld, MAX_DENSITY_QUBITS,
};
