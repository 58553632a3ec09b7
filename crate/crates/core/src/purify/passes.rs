use std::collections::BTreeSet;

use crate::circuit::{check_property, Circuit, CircuitProperty, GateSet, QubitId, Step, StepKind};
use crate::error::{Error, Result};

/// A deterministic circuit-to-circuit compiler that keeps the gate set.
pub trait CompilerPass: Send + Sync {
    fn name(&self) -> &str;
    fn transform(&self, c: &Circuit) -> Result<Circuit>;
}

/// Returns its input unchanged.
#[derive(Clone, Copy, Debug, Default)]
pub struct IdentityPass;

impl CompilerPass for IdentityPass {
    fn name(&self) -> &str {
        "identity"
    }

    fn transform(&self, c: &Circuit) -> Result<Circuit> {
        Ok(c.clone())
    }
}

/// Removes the last oracle call. Deliberately breaks functionality.
#[derive(Clone, Copy, Debug, Default)]
pub struct DropFinalOracleCall;

impl CompilerPass for DropFinalOracleCall {
    fn name(&self) -> &str {
        "drop-final-oracle"
    }

    fn transform(&self, c: &Circuit) -> Result<Circuit> {
        let mut steps = c.steps().to_vec();
        if let Some(i) = steps.iter().rposition(|s| c.step_kind(s) == StepKind::Oracle) {
            steps.remove(i);
        }
        c.with_parts(c.outputs().to_vec(), c.work().to_vec(), steps)
    }
}

/// Principle of delayed measurement.
///
/// `Trash(q)` becomes a swap of `q` into a fresh bank ancilla (three CNOTs) that is never
/// touched again; each `Init` target becomes a work qubit that is present from the start
/// in `|0⟩`, and the `Init` step disappears.
#[derive(Clone, Debug)]
pub struct DelayedMeasurement {
    core: GateSet,
    cnot: String,
}

impl Default for DelayedMeasurement {
    fn default() -> Self {
        DelayedMeasurement {
            core: GateSet::g0(),
            cnot: "CNOT".into(),
        }
    }
}

/// Output of [`DelayedMeasurement::purify`].
#[derive(Clone, Debug)]
pub struct Purified {
    pub circuit: Circuit,
    /// Bank ancillas, in the order of the Trash steps they replace.
    pub bank: Vec<QubitId>,
}

impl DelayedMeasurement {
    pub fn purify(&self, c: &Circuit) -> Result<Purified> {
        if !check_property(c, &CircuitProperty::Normal(self.core.clone())) {
            return Err(Error::Precondition(
                "delayed measurement needs a normal-form circuit".into(),
            ));
        }
        let mut next: QubitId = c.inputs().iter().chain(c.work()).copied().max().map_or(0, |m| m + 1);
        let mut work = c.work().to_vec();
        let mut bank = Vec::new();
        let mut steps = Vec::with_capacity(c.steps().len());
        for s in c.steps() {
            match c.step_kind(s) {
                StepKind::Init => {}
                StepKind::Trash => {
                    let q = s.targets[0];
                    let b = next;
                    next += 1;
                    work.push(b);
                    bank.push(b);
                    steps.push(Step::new(&self.cnot, &[q, b]));
                    steps.push(Step::new(&self.cnot, &[b, q]));
                    steps.push(Step::new(&self.cnot, &[q, b]));
                }
                _ => steps.push(s.clone()),
            }
        }
        let circuit = c.with_parts(c.outputs().to_vec(), work, steps)?;
        Ok(Purified { circuit, bank })
    }
}

impl CompilerPass for DelayedMeasurement {
    fn name(&self) -> &str {
        "delayed-measurement"
    }

    fn transform(&self, c: &Circuit) -> Result<Circuit> {
        Ok(self.purify(c)?.circuit)
    }
}

/// After the swap that fills it, no step touches a bank qubit again.
pub fn banked_untouched(c: &Circuit, bank: &[QubitId]) -> bool {
    let bank: BTreeSet<QubitId> = bank.iter().copied().collect();
    let mut uses = std::collections::BTreeMap::<QubitId, usize>::new();
    for s in c.steps() {
        for q in &s.targets {
            if bank.contains(q) {
                let n = uses.entry(*q).or_insert(0);
                *n += 1;
                if *n > 3 {
                    return false;
                }
            }
        }
    }
    !bank.iter().any(|b| c.outputs().contains(b))
}
