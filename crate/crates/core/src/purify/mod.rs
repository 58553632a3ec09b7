//! Circuit-to-circuit compilers and the checks of the purifier contract.

mod blowup;
mod contract;
mod passes;

pub use blowup::{blowup_table, least_squares_slope, to_csv, BlowupRow, FamilyMember, CSV_HEADER};
pub use contract::{all_inputs, sample_inputs, verify_compiler_contract, ContractReport, THRESHOLD};
pub use passes::{banked_untouched, CompilerPass, DelayedMeasurement, DropFinalOracleCall, IdentityPass, Purified};
