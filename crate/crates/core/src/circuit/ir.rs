use std::collections::{BTreeMap, BTreeSet};

use super::gate::{GateKind, GateSet, INIT, TRASH};
use crate::error::{Error, Result};

/// Stable qubit identifier, never reused inside one circuit.
pub type QubitId = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub gate: String,
    pub targets: Vec<QubitId>,
}

impl Step {
    pub fn new(gate: &str, targets: &[QubitId]) -> Self {
        Step {
            gate: gate.to_string(),
            targets: targets.to_vec(),
        }
    }
}

/// A gate sequence over identified qubits.
///
/// The qubit universe is `inputs ∪ work`. Inputs are loaded with the classical input,
/// work qubits start in `|0⟩`; a work qubit whose first use is an `Init` does not exist
/// before that step. `outputs` names the qubits measured at the end; it may overlap
/// the inputs.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    gate_set: GateSet,
    inputs: Vec<QubitId>,
    outputs: Vec<QubitId>,
    work: Vec<QubitId>,
    steps: Vec<Step>,
    late: BTreeSet<QubitId>,
}

/// Live-set bookkeeping for one step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    Unitary,
    Oracle,
    Trash,
    Init,
}

impl Circuit {
    pub fn new(
        gate_set: GateSet,
        inputs: Vec<QubitId>,
        outputs: Vec<QubitId>,
        work: Vec<QubitId>,
        steps: Vec<Step>,
    ) -> Result<Self> {
        let mut universe = BTreeSet::new();
        for &q in inputs.iter().chain(work.iter()) {
            if !universe.insert(q) {
                return Err(Error::InvalidState(format!("qubit {q} declared twice")));
            }
        }
        let mut seen_out = BTreeSet::new();
        for &q in &outputs {
            if !universe.contains(&q) {
                return Err(Error::Reference(format!("output qubit {q} is not declared")));
            }
            if !seen_out.insert(q) {
                return Err(Error::InvalidState(format!("output qubit {q} listed twice")));
            }
        }
        // work qubits first touched by Init start out absent
        let mut first_use: BTreeMap<QubitId, &str> = BTreeMap::new();
        for s in &steps {
            for &q in &s.targets {
                first_use.entry(q).or_insert(s.gate.as_str());
            }
        }
        let late: BTreeSet<QubitId> = work
            .iter()
            .copied()
            .filter(|q| {
                first_use
                    .get(q)
                    .is_some_and(|g| gate_set.get(g).is_some_and(|d| d.kind == GateKind::Init))
            })
            .collect();

        let mut live: BTreeSet<QubitId> = universe.difference(&late).copied().collect();
        let mut dead: BTreeSet<QubitId> = BTreeSet::new();
        for (i, s) in steps.iter().enumerate() {
            let def = gate_set
                .get(&s.gate)
                .ok_or_else(|| Error::Reference(format!("step {i}: unknown gate `{}`", s.gate)))?;
            if s.targets.len() != def.kind.arity() {
                return Err(Error::InvalidState(format!(
                    "step {i}: gate `{}` expects {} targets, got {}",
                    s.gate,
                    def.kind.arity(),
                    s.targets.len()
                )));
            }
            let distinct: BTreeSet<_> = s.targets.iter().collect();
            if distinct.len() != s.targets.len() {
                return Err(Error::InvalidState(format!("step {i}: repeated target qubit")));
            }
            for &q in &s.targets {
                if !universe.contains(&q) {
                    return Err(Error::Reference(format!("step {i}: qubit {q} is not declared")));
                }
            }
            match def.kind {
                GateKind::Init => {
                    let q = s.targets[0];
                    if live.contains(&q) || dead.contains(&q) || !late.contains(&q) {
                        return Err(Error::InvalidState(format!(
                            "step {i}: Init target {q} is not a fresh qubit"
                        )));
                    }
                    live.insert(q);
                }
                GateKind::Trash => {
                    let q = s.targets[0];
                    if !live.remove(&q) {
                        return Err(Error::InvalidState(format!("step {i}: Trash of non-live qubit {q}")));
                    }
                    dead.insert(q);
                }
                _ => {
                    if let Some(q) = s.targets.iter().find(|q| !live.contains(q)) {
                        let why = if dead.contains(q) {
                            "used after Trash"
                        } else {
                            "not yet initialised"
                        };
                        return Err(Error::InvalidState(format!("step {i}: qubit {q} {why}")));
                    }
                }
            }
        }
        if let Some(q) = outputs.iter().find(|q| !live.contains(q)) {
            return Err(Error::InvalidState(format!("output qubit {q} is not live at the end")));
        }
        Ok(Circuit {
            gate_set,
            inputs,
            outputs,
            work,
            steps,
            late,
        })
    }

    pub fn gate_set(&self) -> &GateSet {
        &self.gate_set
    }

    pub fn inputs(&self) -> &[QubitId] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[QubitId] {
        &self.outputs
    }

    pub fn work(&self) -> &[QubitId] {
        &self.work
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// Work qubits that only come into existence through an `Init` step.
    pub fn late_qubits(&self) -> &BTreeSet<QubitId> {
        &self.late
    }

    /// Qubits present before the first step, inputs first.
    pub fn initial_qubits(&self) -> Vec<QubitId> {
        self.inputs
            .iter()
            .chain(self.work.iter().filter(|q| !self.late.contains(q)))
            .copied()
            .collect()
    }

    pub fn universe_size(&self) -> usize {
        self.inputs.len() + self.work.len()
    }

    pub fn step_kind(&self, s: &Step) -> StepKind {
        match self.gate_set.get(&s.gate).map(|d| &d.kind) {
            Some(GateKind::Trash) => StepKind::Trash,
            Some(GateKind::Init) => StepKind::Init,
            Some(GateKind::Oracle { .. }) => StepKind::Oracle,
            _ => StepKind::Unitary,
        }
    }

    pub fn count_kind(&self, kind: StepKind) -> usize {
        self.steps.iter().filter(|s| self.step_kind(s) == kind).count()
    }

    /// Same circuit with different steps and partition; revalidated.
    pub fn with_parts(&self, outputs: Vec<QubitId>, work: Vec<QubitId>, steps: Vec<Step>) -> Result<Circuit> {
        Circuit::new(self.gate_set.clone(), self.inputs.clone(), outputs, work, steps)
    }

    /// Appends the steps of `other` (same gate set and qubits).
    pub fn concat(&self, other: &Circuit) -> Result<Circuit> {
        if !self.gate_set.equivalent(&other.gate_set) {
            return Err(Error::InvalidState(
                "concatenating circuits over different gate sets".into(),
            ));
        }
        let mut steps = self.steps.clone();
        steps.extend(other.steps.iter().cloned());
        let mut work = self.work.clone();
        for q in &other.work {
            if !work.contains(q) && !self.inputs.contains(q) {
                work.push(*q);
            }
        }
        Circuit::new(
            self.gate_set.clone(),
            self.inputs.clone(),
            other.outputs.clone(),
            work,
            steps,
        )
    }
}

/// Number of steps; oracle calls count as one step each.
pub fn time_of(c: &Circuit) -> usize {
    c.steps.len()
}

/// Peak number of simultaneously live qubits.
pub fn space_of(c: &Circuit) -> usize {
    let mut live = c.initial_qubits().len();
    let mut peak = live;
    for s in &c.steps {
        match c.step_kind(s) {
            StepKind::Init => {
                live += 1;
                peak = peak.max(live);
            }
            StepKind::Trash => live -= 1,
            _ => {}
        }
    }
    peak
}

/// Incremental construction with fresh identifiers.
pub struct CircuitBuilder {
    gate_set: GateSet,
    next: QubitId,
    inputs: Vec<QubitId>,
    outputs: Vec<QubitId>,
    work: Vec<QubitId>,
    steps: Vec<Step>,
}

impl CircuitBuilder {
    pub fn new(gate_set: GateSet) -> Self {
        CircuitBuilder {
            gate_set,
            next: 0,
            inputs: Vec::new(),
            outputs: Vec::new(),
            work: Vec::new(),
            steps: Vec::new(),
        }
    }

    fn fresh_id(&mut self) -> QubitId {
        let q = self.next;
        self.next += 1;
        q
    }

    pub fn input(&mut self) -> QubitId {
        let q = self.fresh_id();
        self.inputs.push(q);
        q
    }

    pub fn inputs(&mut self, n: usize) -> Vec<QubitId> {
        (0..n).map(|_| self.input()).collect()
    }

    /// A work qubit present from the start in `|0⟩`.
    pub fn ancilla(&mut self) -> QubitId {
        let q = self.fresh_id();
        self.work.push(q);
        q
    }

    pub fn ancillas(&mut self, n: usize) -> Vec<QubitId> {
        (0..n).map(|_| self.ancilla()).collect()
    }

    /// Emits an `Init` on a brand-new qubit.
    pub fn init(&mut self) -> QubitId {
        let q = self.ancilla();
        self.steps.push(Step::new(INIT, &[q]));
        q
    }

    pub fn trash(&mut self, q: QubitId) -> &mut Self {
        self.steps.push(Step::new(TRASH, &[q]));
        self
    }

    pub fn gate(&mut self, name: &str, targets: &[QubitId]) -> &mut Self {
        self.steps.push(Step::new(name, targets));
        self
    }

    pub fn outputs(&mut self, qs: &[QubitId]) -> &mut Self {
        self.outputs = qs.to_vec();
        self
    }

    pub fn build(self) -> Result<Circuit> {
        Circuit::new(self.gate_set, self.inputs, self.outputs, self.work, self.steps)
    }
}
