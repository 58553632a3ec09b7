use serde::Serialize;

use super::instance::OracleInstance;
use super::oracle::ORACLE;
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::qcore::{apply_to_qubits, CMat, CVec, C64};
use crate::sim::{OracleRegistry, Simulator};

/// Where an algorithm that learns `out` must hold `|ψ_t⟩`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Extraction {
    /// Query index (0-based) with the largest weight on `|t⟩|ψ_t⟩`.
    pub j: usize,
    /// `⟨ψ_t|ρ|ψ_t⟩` for the middle register right before query `j`, conditioned on the
    /// control holding `t`; 0 when that branch is empty.
    pub overlap: f64,
    /// Per query: `‖(|t⟩⟨t| ⊗ |ψ_t⟩⟨ψ_t|) s_j‖²`.
    pub weights: Vec<f64>,
    /// Per query: probability that the control holds `t`.
    pub control_probability: Vec<f64>,
    /// `(48T)^{-2}`, the overlap an algorithm that computes `out` is guaranteed to reach.
    pub threshold: f64,
}

impl Extraction {
    pub fn meets_threshold(&self) -> bool {
        self.overlap >= self.threshold
    }
}

fn projected_norm(state: &CVec, nq: usize, parts: &[(&[usize], &CMat)]) -> f64 {
    let mut v = state.clone();
    for (targets, p) in parts {
        apply_to_qubits(v.as_mut_slice(), nq, targets, p);
    }
    v.norm_squared()
}

/// Runs a unitary adversary and profiles its weight on `|t⟩|ψ_t⟩` at every call of `O`.
pub fn extract_psi_t(
    adversary: &Circuit,
    x: &[bool],
    inst: &OracleInstance,
    registry: &OracleRegistry,
    sim: &Simulator,
) -> Result<Extraction> {
    let trace = sim.trace_queries(adversary, x, registry, ORACLE)?;
    let (t, m, n) = (inst.t, inst.m, inst.n);
    let nq = trace.order.len();
    let mut ctrl = CMat::zeros(1 << m, 1 << m);
    ctrl[(t, t)] = C64::new(1.0, 0.0);
    let psi = inst.psi(t).amplitudes();
    let proj = psi * psi.adjoint();
    let mut weights = Vec::new();
    let mut control_probability = Vec::new();
    for rec in &trace.queries {
        let targets = &adversary.steps()[rec.step].targets;
        if targets.len() != inst.arity() {
            return Err(Error::dims(format!(
                "oracle call on {} qubits, expected {}",
                targets.len(),
                inst.arity()
            )));
        }
        let pos: Vec<usize> = targets
            .iter()
            .map(|q| trace.order.iter().position(|o| o == q).expect("target in order"))
            .collect();
        let (c_pos, a_pos) = (&pos[..m], &pos[m..m + n]);
        control_probability.push(projected_norm(&rec.state, nq, &[(c_pos, &ctrl)]));
        weights.push(projected_norm(&rec.state, nq, &[(c_pos, &ctrl), (a_pos, &proj)]));
    }
    if weights.is_empty() {
        return Err(Error::Precondition("adversary never queries O".into()));
    }
    let j = weights
        .iter()
        .enumerate()
        .fold(0, |best, (i, &w)| if w > weights[best] { i } else { best });
    let p = control_probability[j];
    let overlap = if p > 1e-15 { (weights[j] / p).min(1.0) } else { 0.0 };
    let queries = weights.len() as f64;
    Ok(Extraction {
        j,
        overlap,
        weights,
        control_probability,
        threshold: (48.0 * queries).powi(-2),
    })
}
