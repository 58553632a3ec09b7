use rand::Rng;

use super::instance::control_width;
use super::oracle::{build_measurement_algorithm, ORACLE};
use crate::circuit::{check_property, Circuit, CircuitProperty, GateKind, StepKind};
use crate::error::{Error, Result};
use crate::purify::DelayedMeasurement;
use crate::qcore::{haar_unitary, swap_gate, CMat, CVec, C64};
use crate::sim::{qubit_order, OracleRegistry};

/// One step of a query algorithm against the separation oracle.
#[derive(Clone, Debug)]
pub enum AdversaryStep {
    /// A unitary on the listed algorithm qubits.
    Gate { targets: Vec<usize>, matrix: CMat },
    /// One oracle call on the leading `m + 2n` algorithm qubits.
    Query,
}

/// A unitary query algorithm in the layout every world expects.
///
/// Algorithm qubits are `[control m][A n][B n][work w]`, most significant first, so a
/// query acts on the leading block and each control value owns a contiguous slice.
#[derive(Clone, Debug)]
pub struct Adversary {
    pub n: usize,
    pub t: usize,
    pub alg_qubits: usize,
    pub initial: CVec,
    pub steps: Vec<AdversaryStep>,
    /// Positions of the designated output qubits after the last step.
    pub outputs: Vec<usize>,
}

impl Adversary {
    pub fn arity(&self) -> usize {
        control_width(self.t) + 2 * self.n
    }

    pub fn work_qubits(&self) -> usize {
        self.alg_qubits - self.arity()
    }

    pub fn queries(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, AdversaryStep::Query)).count()
    }

    /// Haar unitary, query, Haar unitary, ..., query, Haar unitary, from `|0…0⟩`.
    pub fn haar<R: Rng + ?Sized>(n: usize, t: usize, work: usize, queries: usize, rng: &mut R) -> Self {
        let alg_qubits = control_width(t) + 2 * n + work;
        let all: Vec<usize> = (0..alg_qubits).collect();
        let mut steps = Vec::with_capacity(2 * queries + 1);
        for _ in 0..queries {
            steps.push(AdversaryStep::Gate {
                targets: all.clone(),
                matrix: haar_unitary(1 << alg_qubits, rng).into_matrix(),
            });
            steps.push(AdversaryStep::Query);
        }
        steps.push(AdversaryStep::Gate {
            targets: all,
            matrix: haar_unitary(1 << alg_qubits, rng).into_matrix(),
        });
        Adversary {
            n,
            t,
            alg_qubits,
            initial: basis(1 << alg_qubits, 0),
            steps,
            outputs: Vec::new(),
        }
    }

    /// Re-lays a unitary circuit around its calls to `oracle`.
    ///
    /// The qubits of the first call become the leading block. Before a later call on other
    /// qubits, swaps bring its targets to the front. Inputs start in `x`.
    pub fn from_circuit(
        n: usize,
        t: usize,
        c: &Circuit,
        oracle: &str,
        x: &[bool],
        registry: &OracleRegistry,
    ) -> Result<Self> {
        if !check_property(c, &CircuitProperty::Unitary) {
            return Err(Error::NonUnitary("adversary circuits must be unitary".into()));
        }
        if x.len() != c.inputs().len() {
            return Err(Error::dims(format!(
                "{} input bits for {} inputs",
                x.len(),
                c.inputs().len()
            )));
        }
        let arity = control_width(t) + 2 * n;
        let lead = c
            .steps()
            .iter()
            .find(|s| s.gate == oracle)
            .map(|s| s.targets.clone())
            .ok_or_else(|| Error::Precondition(format!("circuit never calls `{oracle}`")))?;
        if lead.len() != arity {
            return Err(Error::dims(format!("oracle arity {}, expected {arity}", lead.len())));
        }
        let mut order = lead.clone();
        order.extend(qubit_order(c).into_iter().filter(|q| !lead.contains(q)));
        let nq = order.len();
        let mut idx = 0usize;
        for (q, &b) in c.inputs().iter().zip(x) {
            if b {
                idx |= 1 << (nq - 1 - position(&order, *q));
            }
        }
        // slot[p] is the circuit qubit currently stored at position p
        let mut slot = order;
        let swap = swap_gate().into_matrix();
        let mut steps = Vec::new();
        for s in c.steps() {
            if s.gate == oracle {
                for (k, q) in s.targets.iter().enumerate() {
                    let p = position(&slot, *q);
                    if p != k {
                        steps.push(AdversaryStep::Gate {
                            targets: vec![k, p],
                            matrix: swap.clone(),
                        });
                        slot.swap(k, p);
                    }
                }
                steps.push(AdversaryStep::Query);
                continue;
            }
            let matrix = match c.step_kind(s) {
                StepKind::Unitary => match &c.gate_set().get(&s.gate).expect("validated gate").kind {
                    GateKind::Unitary { matrix, .. } => matrix.matrix().clone(),
                    _ => unreachable!("unitary step kind"),
                },
                StepKind::Oracle => registry
                    .get(&s.gate)
                    .ok_or_else(|| Error::UnresolvedOracle(s.gate.clone()))?
                    .matrix()
                    .clone(),
                _ => unreachable!("unitary circuit"),
            };
            steps.push(AdversaryStep::Gate {
                targets: s.targets.iter().map(|q| position(&slot, *q)).collect(),
                matrix,
            });
        }
        let outputs = c.outputs().iter().map(|q| position(&slot, *q)).collect();
        Ok(Adversary {
            n,
            t,
            alg_qubits: nq,
            initial: basis(1 << nq, idx),
            steps,
            outputs,
        })
    }

    /// The measurement algorithm after delayed measurement.
    pub fn honest(n: usize, t: usize) -> Result<Self> {
        let c = DelayedMeasurement::default()
            .purify(&build_measurement_algorithm(n, t)?)?
            .circuit;
        Adversary::from_circuit(n, t, &c, ORACLE, &[], &OracleRegistry::new())
    }

    /// Everything up to, not including, query number `j` (0-based).
    pub fn truncated(&self, j: usize) -> Self {
        let mut seen = 0;
        let mut steps = Vec::new();
        for s in &self.steps {
            if matches!(s, AdversaryStep::Query) {
                if seen == j {
                    break;
                }
                seen += 1;
            }
            steps.push(s.clone());
        }
        Adversary { steps, ..self.clone() }
    }
}

fn basis(dim: usize, idx: usize) -> CVec {
    let mut v = CVec::zeros(dim);
    v[idx] = C64::new(1.0, 0.0);
    v
}

fn position(slot: &[u32], q: u32) -> usize {
    slot.iter().position(|&o| o == q).expect("qubit in layout")
}
