use std::collections::{BTreeMap, BTreeSet};

use super::{check_input, positions, resolve, Action, Budget, OracleRegistry, OutputDistribution};
use crate::circuit::{check_property, Circuit, CircuitProperty, QubitId};
use crate::error::{Error, Result};
use crate::qcore::{apply_to_qubits, marginal_probabilities, CVec, Ket, C64};

/// Qubit order of pure-state results: inputs, then work qubits as declared.
pub fn qubit_order(c: &Circuit) -> Vec<QubitId> {
    c.inputs().iter().chain(c.work().iter()).copied().collect()
}

fn basis_state(order: &[QubitId], c: &Circuit, x: &[bool], budget: &Budget) -> Result<Vec<C64>> {
    let n = order.len();
    let dim = 1usize
        .checked_shl(n as u32)
        .filter(|&d| d <= budget.amplitudes)
        .ok_or_else(|| Error::budget("statevector", 1usize << n.min(63), budget.amplitudes))?;
    let mut idx = 0usize;
    for (q, &b) in c.inputs().iter().zip(x) {
        if b {
            let p = order.iter().position(|o| o == q).expect("input in order");
            idx |= 1 << (n - 1 - p);
        }
    }
    let mut v = vec![C64::new(0.0, 0.0); dim];
    v[idx] = C64::new(1.0, 0.0);
    Ok(v)
}

/// State right before one oracle call.
#[derive(Clone, Debug)]
pub struct QueryRecord {
    pub step: usize,
    pub state: CVec,
}

#[derive(Clone, Debug)]
pub struct PureTrace {
    /// Qubit order of every recorded state.
    pub order: Vec<QubitId>,
    pub queries: Vec<QueryRecord>,
    pub final_state: Ket,
}

pub(super) fn run_traced(
    c: &Circuit,
    x: &[bool],
    registry: &OracleRegistry,
    oracle: Option<&str>,
    budget: Budget,
) -> Result<PureTrace> {
    check_input(c, x)?;
    if !check_property(c, &CircuitProperty::Unitary) {
        return Err(Error::NonUnitary("circuit applies Trash or Init".into()));
    }
    let order = qubit_order(c);
    let n = order.len();
    let mut v = basis_state(&order, c, x, &budget)?;
    let mut queries = Vec::new();
    for (i, s) in c.steps().iter().enumerate() {
        let Action::Apply(gate) = resolve(c, s, registry)? else {
            return Err(Error::NonUnitary(format!("step {i} is not unitary")));
        };
        if oracle == Some(s.gate.as_str()) {
            queries.push(QueryRecord {
                step: i,
                state: CVec::from_column_slice(&v),
            });
        }
        let pos = positions(&order, &s.targets);
        apply_to_qubits(&mut v, n, &pos, gate);
    }
    Ok(PureTrace {
        order,
        queries,
        final_state: Ket::new(CVec::from_vec(v))?,
    })
}

/// Out-register distribution of a pure state over `qubit_order(c)`.
pub fn measure_outputs(c: &Circuit, ket: &Ket) -> Result<OutputDistribution> {
    let order = qubit_order(c);
    if ket.dim() != 1 << order.len() {
        return Err(Error::dims(format!("ket dim {} for {} qubits", ket.dim(), order.len())));
    }
    let pos = positions(&order, c.outputs());
    let marg = marginal_probabilities(ket.amplitudes().as_slice(), order.len(), &pos);
    OutputDistribution::from_marginals(c.outputs().len(), marg)
}

/// Statevector semantics in which `Trash` only banks the qubit.
pub(super) fn run_banked(
    c: &Circuit,
    x: &[bool],
    registry: &OracleRegistry,
    budget: Budget,
) -> Result<OutputDistribution> {
    check_input(c, x)?;
    let mut live = c.initial_qubits();
    let mut v = basis_state(&live, c, x, &budget)?;
    let mut banked: BTreeSet<QubitId> = BTreeSet::new();
    for (i, s) in c.steps().iter().enumerate() {
        match resolve(c, s, registry)? {
            Action::Apply(gate) => {
                if s.targets.iter().any(|q| banked.contains(q)) {
                    return Err(Error::Invariant(format!("step {i} touches a banked qubit")));
                }
                let pos = positions(&live, &s.targets);
                apply_to_qubits(&mut v, live.len(), &pos, gate);
            }
            Action::Trash => {
                banked.insert(s.targets[0]);
            }
            Action::Init => {
                if v.len() * 2 > budget.amplitudes {
                    return Err(Error::budget("statevector", v.len() * 2, budget.amplitudes));
                }
                let mut w = vec![C64::new(0.0, 0.0); v.len() * 2];
                for (k, a) in v.iter().enumerate() {
                    w[2 * k] = *a;
                }
                v = w;
                live.push(s.targets[0]);
            }
        }
    }
    let pos = positions(&live, c.outputs());
    let marg = marginal_probabilities(&v, live.len(), &pos);
    OutputDistribution::from_marginals(c.outputs().len(), marg)
}

/// Query magnitudes on an address register, one vector per oracle call.
#[derive(Clone, Debug, PartialEq)]
pub struct QueryProfile {
    pub address_bits: usize,
    /// `per_query[j][x]` is the mass on address `x` right before call `j`.
    pub per_query: Vec<Vec<f64>>,
}

impl QueryProfile {
    pub fn from_trace(trace: &PureTrace, address: &[QubitId]) -> Result<Self> {
        for q in address {
            if !trace.order.contains(q) {
                return Err(Error::Reference(format!("address qubit {q} is not declared")));
            }
        }
        let pos = positions(&trace.order, address);
        let n = trace.order.len();
        let per_query = trace
            .queries
            .iter()
            .map(|r| {
                let m: BTreeMap<usize, f64> = marginal_probabilities(r.state.as_slice(), n, &pos);
                let mut row = vec![0.0; 1 << address.len()];
                for (k, p) in m {
                    row[k] = p;
                }
                row
            })
            .collect();
        Ok(QueryProfile {
            address_bits: address.len(),
            per_query,
        })
    }

    pub fn queries(&self) -> usize {
        self.per_query.len()
    }

    /// `q_x`, summed over all queries.
    pub fn magnitude(&self, x: usize) -> f64 {
        self.per_query.iter().map(|row| row[x]).sum()
    }

    pub fn totals(&self) -> Vec<f64> {
        (0..1usize << self.address_bits).map(|x| self.magnitude(x)).collect()
    }

    /// `q_S = Σ_{x∈S} q_x`.
    pub fn set_magnitude(&self, set: &[usize]) -> f64 {
        set.iter().map(|&x| self.magnitude(x)).sum()
    }
}
