//! Circuit intermediate representation: gates, gate sets, properties and the
//! space/time metrics.

mod gate;
mod ir;
mod property;
mod schema;

pub use gate::{GateDef, GateKind, GateSet, INIT, TRASH};
pub use ir::{space_of, time_of, Circuit, CircuitBuilder, QubitId, Step, StepKind};
pub use property::{check_property, CircuitProperty};
pub use schema::{deserialize, serialize, SCHEMA_ID};
