//! JSON form of a [`Circuit`]. See `docs/circuit-schema.md`.

use serde::{Deserialize, Serialize};

use super::gate::{GateDef, GateKind, GateSet};
use super::ir::{Circuit, QubitId, Step};
use crate::error::{Error, Result};
use crate::qcore::json::{matrix_from_rows, matrix_to_rows};
use crate::qcore::UnitaryOp;

pub const SCHEMA_ID: &str = "qpurify.circuit/1";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCircuit {
    schema: String,
    gate_set: Vec<RawGate>,
    qubits: RawQubits,
    steps: Vec<RawStep>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQubits {
    #[serde(rename = "in")]
    inputs: Vec<QubitId>,
    out: Vec<QubitId>,
    work: Vec<QubitId>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RawGate {
    Unitary {
        name: String,
        #[serde(default)]
        core: bool,
        matrix: Vec<Vec<[f64; 2]>>,
    },
    Oracle {
        name: String,
        arity: usize,
    },
    Trash {
        name: String,
        #[serde(default)]
        core: bool,
    },
    Init {
        name: String,
        #[serde(default)]
        core: bool,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStep {
    gate: String,
    targets: Vec<QubitId>,
}

/// Canonical JSON text: gates in name order, fields in declaration order.
pub fn serialize(c: &Circuit) -> String {
    let gate_set = c
        .gate_set()
        .gates()
        .map(|g| match &g.kind {
            GateKind::Unitary { matrix, .. } => RawGate::Unitary {
                name: g.name.clone(),
                core: g.core,
                matrix: matrix_to_rows(matrix.matrix()),
            },
            GateKind::Oracle { arity } => RawGate::Oracle {
                name: g.name.clone(),
                arity: *arity,
            },
            GateKind::Trash => RawGate::Trash {
                name: g.name.clone(),
                core: g.core,
            },
            GateKind::Init => RawGate::Init {
                name: g.name.clone(),
                core: g.core,
            },
        })
        .collect();
    let raw = RawCircuit {
        schema: SCHEMA_ID.to_string(),
        gate_set,
        qubits: RawQubits {
            inputs: c.inputs().to_vec(),
            out: c.outputs().to_vec(),
            work: c.work().to_vec(),
        },
        steps: c
            .steps()
            .iter()
            .map(|s| RawStep {
                gate: s.gate.clone(),
                targets: s.targets.clone(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&raw).expect("circuit JSON is always serialisable")
}

pub fn deserialize(text: &str) -> Result<Circuit> {
    let raw: RawCircuit = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    if raw.schema != SCHEMA_ID {
        return Err(Error::Schema(format!(
            "schema: expected `{SCHEMA_ID}`, found `{}`",
            raw.schema
        )));
    }
    let mut defs = Vec::with_capacity(raw.gate_set.len());
    for (i, g) in raw.gate_set.into_iter().enumerate() {
        let def = match g {
            RawGate::Unitary { name, core, matrix } => {
                let m = matrix_from_rows(&matrix).map_err(|e| Error::Schema(format!("gate_set[{i}].matrix: {e}")))?;
                let u = UnitaryOp::new(m).map_err(|e| Error::Schema(format!("gate_set[{i}] `{name}`: {e}")))?;
                let mut d = GateDef::unitary(&name, u).map_err(|e| Error::Schema(format!("gate_set[{i}]: {e}")))?;
                d.core = core;
                d
            }
            RawGate::Oracle { name, arity } => GateDef::oracle(&name, arity),
            RawGate::Trash { name, core } => GateDef {
                name,
                kind: GateKind::Trash,
                core,
            },
            RawGate::Init { name, core } => GateDef {
                name,
                kind: GateKind::Init,
                core,
            },
        };
        defs.push(def);
    }
    let gate_set = GateSet::new(defs).map_err(|e| Error::Schema(format!("gate_set: {e}")))?;
    let steps = raw
        .steps
        .into_iter()
        .map(|s| Step {
            gate: s.gate,
            targets: s.targets,
        })
        .collect();
    Circuit::new(gate_set, raw.qubits.inputs, raw.qubits.out, raw.qubits.work, steps).map_err(|e| match e {
        Error::Reference(m) => Error::Reference(m),
        other => Error::Schema(other.to_string()),
    })
}
