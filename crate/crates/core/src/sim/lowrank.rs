use std::collections::{BTreeMap, BTreeSet};

use nalgebra::SymmetricEigen;

use super::{check_input, positions, resolve, Action, Budget, OracleRegistry, OutputDistribution};
use crate::circuit::{Circuit, QubitId};
use crate::error::{Error, Result};
use crate::qcore::{apply_to_qubits, marginal_probabilities, CMat, C64};

/// `ρ = V V†` over the live qubits.
struct LowRank {
    live: Vec<QubitId>,
    v: CMat,
}

impl LowRank {
    fn nqubits(&self) -> usize {
        self.live.len()
    }

    fn append(&mut self, q: QubitId, bit: bool, budget: &Budget) -> Result<()> {
        let rows = self.v.nrows() * 2;
        if rows * self.v.ncols() > budget.amplitudes {
            return Err(Error::budget(
                "low-rank density",
                rows * self.v.ncols(),
                budget.amplitudes,
            ));
        }
        let mut w = CMat::zeros(rows, self.v.ncols());
        for j in 0..self.v.ncols() {
            for i in 0..self.v.nrows() {
                w[(2 * i + bit as usize, j)] = self.v[(i, j)];
            }
        }
        self.v = w;
        self.live.push(q);
        Ok(())
    }

    fn apply(&mut self, targets: &[QubitId], gate: &CMat) {
        let pos = positions(&self.live, targets);
        let n = self.nqubits();
        for mut col in self.v.column_iter_mut() {
            apply_to_qubits(col.as_mut_slice(), n, &pos, gate);
        }
    }

    fn trace_out(&mut self, q: QubitId) {
        let p = self.live.iter().position(|l| *l == q).expect("qubit is live");
        let n = self.nqubits();
        let shift = n - 1 - p;
        let half = self.v.nrows() / 2;
        let r = self.v.ncols();
        let mut w = CMat::zeros(half, 2 * r);
        for j in 0..r {
            for i in 0..self.v.nrows() {
                let b = (i >> shift) & 1;
                let hi = i >> (shift + 1);
                let lo = i & ((1 << shift) - 1);
                w[((hi << shift) | lo, j + b * r)] = self.v[(i, j)];
            }
        }
        self.live.remove(p);
        self.v = compress(w);
    }
}

/// Re-expresses `V V†` with orthogonal columns, dropping null directions.
fn compress(v: CMat) -> CMat {
    if v.ncols() <= 1 {
        return v;
    }
    let gram = v.adjoint() * &v;
    let eig = SymmetricEigen::new(gram);
    let max = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&k| eig.eigenvalues[k] > 1e-15 * max.max(1e-300))
        .collect();
    if keep.is_empty() {
        return CMat::zeros(v.nrows(), 1);
    }
    let basis = CMat::from_fn(eig.eigenvectors.nrows(), keep.len(), |i, j| {
        eig.eigenvectors[(i, keep[j])]
    });
    v * basis
}

pub(super) fn run(c: &Circuit, x: &[bool], registry: &OracleRegistry, budget: Budget) -> Result<OutputDistribution> {
    check_input(c, x)?;
    let steps = c.steps();
    let outputs: BTreeSet<QubitId> = c.outputs().iter().copied().collect();
    let mut last_use: BTreeMap<QubitId, usize> = BTreeMap::new();
    for (i, s) in steps.iter().enumerate() {
        for &q in &s.targets {
            last_use.insert(q, i);
        }
    }
    let input_bit: BTreeMap<QubitId, bool> = c.inputs().iter().copied().zip(x.iter().copied()).collect();
    // qubits not yet materialised sit in a known basis state
    let mut pending: BTreeMap<QubitId, bool> = c
        .initial_qubits()
        .into_iter()
        .map(|q| (q, input_bit.get(&q).copied().unwrap_or(false)))
        .collect();

    let mut st = LowRank {
        live: Vec::new(),
        v: CMat::from_element(1, 1, C64::new(1.0, 0.0)),
    };
    for (i, s) in steps.iter().enumerate() {
        match resolve(c, s, registry)? {
            Action::Init => {
                pending.insert(s.targets[0], false);
            }
            Action::Trash => {
                let q = s.targets[0];
                if pending.remove(&q).is_none() {
                    st.trace_out(q);
                }
            }
            Action::Apply(gate) => {
                for &q in &s.targets {
                    if let Some(bit) = pending.remove(&q) {
                        st.append(q, bit, &budget)?;
                    }
                }
                st.apply(&s.targets, gate);
                for &q in &s.targets {
                    if last_use.get(&q) == Some(&i) && !outputs.contains(&q) {
                        st.trace_out(q);
                    }
                }
            }
        }
    }
    for &q in c.outputs() {
        if let Some(bit) = pending.remove(&q) {
            st.append(q, bit, &budget)?;
        }
    }
    let extra: Vec<QubitId> = st.live.iter().copied().filter(|q| !outputs.contains(q)).collect();
    for q in extra {
        st.trace_out(q);
    }
    let trace: f64 = st.v.iter().map(|z| z.norm_sqr()).sum();
    if (trace - 1.0).abs() > 1e-9 {
        return Err(Error::Invariant(format!("final trace {trace} differs from 1")));
    }
    let n = st.nqubits();
    let pos = positions(&st.live, c.outputs());
    let mut marg: BTreeMap<usize, f64> = BTreeMap::new();
    for col in st.v.column_iter() {
        for (k, p) in marginal_probabilities(col.as_slice(), n, &pos) {
            *marg.entry(k).or_insert(0.0) += p;
        }
    }
    OutputDistribution::from_marginals(c.outputs().len(), marg)
}
