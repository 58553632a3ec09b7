//! Execution semantics for circuits.
//!
//! Three independent engines share the same input conventions:
//! a low-rank density engine (`ρ = V V†`, the default for circuits with Trash/Init),
//! a dense density-matrix engine for cross-checks, and a statevector engine that
//! keeps trashed qubits in a hidden bank. Unitary circuits also have a plain
//! statevector path with query tracing.

mod dense;
mod distribution;
mod lowrank;
mod pure;

use std::collections::BTreeMap;

use crate::circuit::{Circuit, GateKind, Step};
use crate::error::{Error, Result};
use crate::qcore::{CMat, UnitaryOp};

pub use distribution::{statistical_distance, OutputDistribution};
pub use pure::{measure_outputs, qubit_order, PureTrace, QueryProfile, QueryRecord};

/// Oracle name → unitary, consulted for every `Oracle` gate.
pub type OracleRegistry = BTreeMap<String, UnitaryOp>;

/// Size limits for exact simulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Maximum amplitudes held at once (statevector length times rank).
    pub amplitudes: usize,
    /// Maximum dimension of a dense density matrix.
    pub density_dim: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            amplitudes: 1 << 22,
            density_dim: 1 << 8,
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Simulator {
    pub budget: Budget,
}

impl Simulator {
    pub fn new(budget: Budget) -> Self {
        Simulator { budget }
    }

    /// Exact output distribution, via the low-rank density engine.
    pub fn run_distribution(&self, c: &Circuit, x: &[bool], registry: &OracleRegistry) -> Result<OutputDistribution> {
        lowrank::run(c, x, registry, self.budget)
    }

    /// Exact output distribution, via full density matrices.
    pub fn run_distribution_dense(
        &self,
        c: &Circuit,
        x: &[bool],
        registry: &OracleRegistry,
    ) -> Result<OutputDistribution> {
        dense::run(c, x, registry, self.budget)
    }

    /// Exact output distribution, trashing into a never-touched bank instead of tracing out.
    pub fn run_distribution_banked(
        &self,
        c: &Circuit,
        x: &[bool],
        registry: &OracleRegistry,
    ) -> Result<OutputDistribution> {
        pure::run_banked(c, x, registry, self.budget)
    }

    pub fn run_pure(&self, c: &Circuit, x: &[bool], registry: &OracleRegistry) -> Result<crate::qcore::Ket> {
        Ok(pure::run_traced(c, x, registry, None, self.budget)?.final_state)
    }

    /// Statevector run recording the state right before every call of `oracle`.
    pub fn trace_queries(&self, c: &Circuit, x: &[bool], registry: &OracleRegistry, oracle: &str) -> Result<PureTrace> {
        pure::run_traced(c, x, registry, Some(oracle), self.budget)
    }

    pub fn query_profile(
        &self,
        c: &Circuit,
        x: &[bool],
        registry: &OracleRegistry,
        oracle: &str,
        address: &[crate::circuit::QubitId],
    ) -> Result<QueryProfile> {
        let trace = self.trace_queries(c, x, registry, oracle)?;
        QueryProfile::from_trace(&trace, address)
    }
}

pub fn run_distribution(c: &Circuit, x: &[bool], registry: &OracleRegistry) -> Result<OutputDistribution> {
    Simulator::default().run_distribution(c, x, registry)
}

pub fn run_pure(c: &Circuit, x: &[bool], registry: &OracleRegistry) -> Result<crate::qcore::Ket> {
    Simulator::default().run_pure(c, x, registry)
}

pub fn query_profile(
    c: &Circuit,
    x: &[bool],
    registry: &OracleRegistry,
    oracle: &str,
    address: &[crate::circuit::QubitId],
) -> Result<QueryProfile> {
    Simulator::default().query_profile(c, x, registry, oracle, address)
}

/// What a step does to the state.
pub(crate) enum Action<'a> {
    Apply(&'a CMat),
    Trash,
    Init,
}

pub(crate) fn resolve<'a>(c: &'a Circuit, step: &Step, registry: &'a OracleRegistry) -> Result<Action<'a>> {
    let def = c
        .gate_set()
        .get(&step.gate)
        .ok_or_else(|| Error::Reference(format!("unknown gate `{}`", step.gate)))?;
    match &def.kind {
        GateKind::Unitary { matrix, .. } => Ok(Action::Apply(matrix.matrix())),
        GateKind::Trash => Ok(Action::Trash),
        GateKind::Init => Ok(Action::Init),
        GateKind::Oracle { arity } => {
            let u = registry
                .get(&step.gate)
                .ok_or_else(|| Error::UnresolvedOracle(step.gate.clone()))?;
            if u.dim() != 1 << arity {
                return Err(Error::dims(format!(
                    "oracle `{}` has dimension {}, gate arity {arity} needs {}",
                    step.gate,
                    u.dim(),
                    1usize << arity
                )));
            }
            Ok(Action::Apply(u.matrix()))
        }
    }
}

pub(crate) fn check_input(c: &Circuit, x: &[bool]) -> Result<()> {
    if x.len() != c.inputs().len() {
        return Err(Error::dims(format!(
            "input has {} bits, circuit has {} input qubits",
            x.len(),
            c.inputs().len()
        )));
    }
    Ok(())
}

/// Position of every qubit in a live list.
pub(crate) fn positions(live: &[crate::circuit::QubitId], qs: &[crate::circuit::QubitId]) -> Vec<usize> {
    qs.iter()
        .map(|q| live.iter().position(|l| l == q).expect("qubit is live"))
        .collect()
}
