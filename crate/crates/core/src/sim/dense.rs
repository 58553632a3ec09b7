use std::collections::BTreeMap;

use super::{check_input, positions, resolve, Action, Budget, OracleRegistry, OutputDistribution};
use crate::circuit::{Circuit, QubitId};
use crate::error::{Error, Result};
use crate::qcore::{apply_to_qubits, partial_trace_matrix, CMat, C64};

fn conjugate(rho: &CMat, n: usize, pos: &[usize], gate: &CMat) -> CMat {
    let mut m = rho.clone();
    for mut col in m.column_iter_mut() {
        apply_to_qubits(col.as_mut_slice(), n, pos, gate);
    }
    // (U (U ρ)†)† = U ρ U†
    let mut m = m.adjoint();
    for mut col in m.column_iter_mut() {
        apply_to_qubits(col.as_mut_slice(), n, pos, gate);
    }
    m.adjoint()
}

fn check_trace(rho: &CMat, step: usize) -> Result<()> {
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
        return Err(Error::Invariant(format!("trace {tr} after step {step}")));
    }
    Ok(())
}

pub(super) fn run(c: &Circuit, x: &[bool], registry: &OracleRegistry, budget: Budget) -> Result<OutputDistribution> {
    check_input(c, x)?;
    let mut live: Vec<QubitId> = c.initial_qubits();
    let dim = 1usize
        .checked_shl(live.len() as u32)
        .filter(|&d| d <= budget.density_dim)
        .ok_or_else(|| Error::budget("density matrix", 1usize << live.len().min(63), budget.density_dim))?;
    let mut index = 0usize;
    for (k, _) in live.iter().enumerate() {
        if k < x.len() && x[k] {
            index |= 1 << (live.len() - 1 - k);
        }
    }
    let mut rho = CMat::zeros(dim, dim);
    rho[(index, index)] = C64::new(1.0, 0.0);

    for (i, s) in c.steps().iter().enumerate() {
        match resolve(c, s, registry)? {
            Action::Apply(gate) => {
                let pos = positions(&live, &s.targets);
                rho = conjugate(&rho, live.len(), &pos, gate);
            }
            Action::Init => {
                if rho.nrows() * 2 > budget.density_dim {
                    return Err(Error::budget("density matrix", rho.nrows() * 2, budget.density_dim));
                }
                let mut ket0 = CMat::zeros(2, 2);
                ket0[(0, 0)] = C64::new(1.0, 0.0);
                rho = rho.kronecker(&ket0);
                live.push(s.targets[0]);
            }
            Action::Trash => {
                let p = positions(&live, &s.targets)[0];
                let keep: Vec<usize> = (0..live.len()).filter(|&k| k != p).collect();
                rho = partial_trace_matrix(&rho, &vec![2; live.len()], &keep)?;
                live.remove(p);
            }
        }
        check_trace(&rho, i)?;
    }
    let pos = positions(&live, c.outputs());
    let n = live.len();
    let mut marg: BTreeMap<usize, f64> = BTreeMap::new();
    for idx in 0..rho.nrows() {
        let key = pos
            .iter()
            .fold(0usize, |acc, &q| (acc << 1) | ((idx >> (n - 1 - q)) & 1));
        *marg.entry(key).or_insert(0.0) += rho[(idx, idx)].re;
    }
    let cleaned = marg
        .into_iter()
        .map(|(k, p)| (k, if p.abs() < 1e-15 { 0.0 } else { p }))
        .collect();
    OutputDistribution::from_marginals(c.outputs().len(), cleaned)
}
