//! Exact desk-scale simulation of general quantum circuits, a delayed-measurement
//! purifier with contract checking, and the measurement-versus-unitary separation
//! construction together with numerical checkers for the bounds it relies on.
//!
//! Everything is dense linear algebra over `f64` complex numbers; dimensions are
//! kept small on purpose and every large allocation is guarded by a budget.

pub mod bounds;
pub mod circuit;
pub mod error;
pub mod harness;
pub mod purify;
pub mod qcore;
pub mod septest;
pub mod sim;

pub use error::{Error, Result};
pub use qcore::{CMat, CVec, DensityOp, Ket, UnitaryOp, C64};
