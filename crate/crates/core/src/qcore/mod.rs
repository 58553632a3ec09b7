//! Dense states, channels and the symmetric-subspace toolkit.

mod ops;
mod random;
mod sym;
mod types;

pub mod json;

pub use ops::*;
pub use random::*;
pub use sym::*;
pub use types::*;
