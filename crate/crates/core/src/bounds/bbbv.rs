use rand::seq::index::sample;
use rand::Rng;
use serde_json::json;

use super::report::BoundReport;
use crate::circuit::{Circuit, CircuitBuilder, GateDef, GateSet, StepKind};
use crate::error::{Error, Result};
use crate::harness::rng_for;
use crate::qcore::{classical_oracle, haar_unitary, json as qjson, pure_trace_distance, CMat, Ket, UnitaryOp};
use crate::sim::{OracleRegistry, Simulator};

/// Oracle name used by the circuits built here.
pub const QUERY: &str = "Q";

fn distribution(basis: &CMat, v: &Ket) -> Vec<f64> {
    (0..basis.ncols())
        .map(|k| basis.column(k).dotc(v.amplitudes()).norm_sqr())
        .collect()
}

fn statistical(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Eigenbasis of `|φ⟩⟨φ| − |ψ⟩⟨ψ|`, the measurement that attains the trace distance.
fn helstrom_basis(phi: &Ket, psi: &Ket) -> CMat {
    let a = phi.amplitudes();
    let b = psi.amplitudes();
    let diff = a * a.adjoint() - b * b.adjoint();
    diff.symmetric_eigen().eigenvectors
}

/// Output statistical distance over a seeded family of projective measurements against
/// `4‖φ − ψ‖`.
///
/// The family is the computational basis, the optimal (Helstrom) basis and `measurements`
/// Haar-random bases.
pub fn bbbv_perturbation_check(phi: &Ket, psi: &Ket, measurements: usize, seed: u64) -> Result<BoundReport> {
    let d = phi.dim();
    if psi.dim() != d {
        return Err(Error::dims(format!("states of dimension {d} and {}", psi.dim())));
    }
    let eps = (phi.amplitudes() - psi.amplitudes()).norm();
    let mut bases = vec![CMat::identity(d, d), helstrom_basis(phi, psi)];
    let mut rng = rng_for(seed, 0);
    bases.extend((0..measurements).map(|_| haar_unitary(d, &mut rng).into_matrix()));
    let measured = bases
        .iter()
        .map(|b| statistical(&distribution(b, phi), &distribution(b, psi)))
        .fold(0.0, f64::max);
    let td = pure_trace_distance(phi.amplitudes(), psi.amplitudes());
    Ok(BoundReport::new("bbbv-perturbation", measured, 4.0 * eps)
        .clamped(1.0)
        .param("dim", d)
        .param("norm_distance", eps)
        .param("trace_distance", td)
        .param("measurements", bases.len())
        .param("seed", seed))
}

/// The parts of a hybrid comparison shared by both constants.
#[derive(Clone, Debug, PartialEq)]
pub struct HybridMeasurement {
    pub distance: f64,
    pub queries: usize,
    pub q_s: f64,
    pub phi: Ket,
    pub psi: Ket,
}

/// Runs `adversary` against `O` and `O'` and profiles its query mass on `set`.
///
/// The address is the first `in_bits` qubits of the first call to [`QUERY`]; `O` and
/// `O'` must agree on every column whose address lies outside `set`.
pub fn hybrid_measurement(
    adversary: &Circuit,
    x: &[bool],
    o: &UnitaryOp,
    o_prime: &UnitaryOp,
    in_bits: usize,
    set: &[usize],
    sim: &Simulator,
) -> Result<HybridMeasurement> {
    if o.dim() != o_prime.dim() {
        return Err(Error::dims(format!(
            "oracles of dimension {} and {}",
            o.dim(),
            o_prime.dim()
        )));
    }
    let arity = o.dim().trailing_zeros() as usize;
    let shift = arity
        .checked_sub(in_bits)
        .ok_or_else(|| Error::dims("address wider than the oracle"))?;
    for col in 0..o.dim() {
        if set.contains(&(col >> shift)) {
            continue;
        }
        let diff = (o.matrix().column(col) - o_prime.matrix().column(col)).norm();
        if diff > 1e-12 {
            return Err(Error::Precondition(format!(
                "oracles differ off S at address {}",
                col >> shift
            )));
        }
    }
    let first = adversary
        .steps()
        .iter()
        .find(|s| s.gate == QUERY)
        .ok_or_else(|| Error::Precondition(format!("adversary never calls `{QUERY}`")))?;
    let address = first.targets[..in_bits].to_vec();
    let reg = |u: &UnitaryOp| OracleRegistry::from([(QUERY.to_string(), u.clone())]);
    let profile = sim.query_profile(adversary, x, &reg(o), QUERY, &address)?;
    let phi = sim.run_pure(adversary, x, &reg(o))?;
    let psi = sim.run_pure(adversary, x, &reg(o_prime))?;
    Ok(HybridMeasurement {
        distance: (phi.amplitudes() - psi.amplitudes()).norm(),
        queries: profile.queries(),
        q_s: profile.set_magnitude(set),
        phi,
        psi,
    })
}

fn hybrid_report(name: &str, m: &HybridMeasurement, factor: f64, set: &[usize]) -> BoundReport {
    let bound = factor * (m.queries as f64 * m.q_s).sqrt();
    BoundReport::new(name, m.distance, bound)
        .clamped(2.0)
        .param("T", m.queries)
        .param("q_S", m.q_s)
        .param("S", json!(set))
        .with_witness(json!({
            "phi": qjson::vector_to_pairs(m.phi.amplitudes()),
            "psi": qjson::vector_to_pairs(m.psi.amplitudes()),
        }))
}

/// `‖φ − ψ‖ ≤ √(T·q_S)`, the hybrid inequality with its usual constant. False for XOR oracles.
pub fn bbbv_hybrid_check(
    adversary: &Circuit,
    x: &[bool],
    o: &UnitaryOp,
    o_prime: &UnitaryOp,
    in_bits: usize,
    set: &[usize],
    sim: &Simulator,
) -> Result<BoundReport> {
    let m = hybrid_measurement(adversary, x, o, o_prime, in_bits, set, sim)?;
    Ok(hybrid_report("bbbv-hybrid", &m, 1.0, set))
}

/// `‖φ − ψ‖ ≤ 2√(T·q_S)`: each differing query moves the state by at most twice the
/// amplitude it places on `S`, since `‖O − O'‖ ≤ 2` there.
pub fn bbbv_hybrid_check_doubled(
    adversary: &Circuit,
    x: &[bool],
    o: &UnitaryOp,
    o_prime: &UnitaryOp,
    in_bits: usize,
    set: &[usize],
    sim: &Simulator,
) -> Result<BoundReport> {
    let m = hybrid_measurement(adversary, x, o, o_prime, in_bits, set, sim)?;
    Ok(hybrid_report("bbbv-hybrid-doubled", &m, 2.0, set))
}

/// A gate and its adjoint, so the pair can join a gate set.
pub fn with_adjoint(name: &str, u: UnitaryOp) -> Result<[GateDef; 2]> {
    let dag = u.dagger();
    Ok([
        GateDef::unitary(name, u)?,
        GateDef::unitary(&format!("{name}_dg"), dag)?,
    ])
}

/// Haar unitary on every qubit, query, ..., query, Haar unitary. The oracle acts on the
/// first `in_bits + out_bits` qubits; `work` more qubits are spectators of the queries.
pub fn random_query_circuit<R: Rng + ?Sized>(
    in_bits: usize,
    out_bits: usize,
    work: usize,
    queries: usize,
    rng: &mut R,
) -> Result<Circuit> {
    let width = in_bits + out_bits + work;
    let mut defs = vec![GateDef::oracle(QUERY, in_bits + out_bits)];
    for k in 0..=queries {
        defs.extend(with_adjoint(&format!("U{k}"), haar_unitary(1 << width, rng))?);
    }
    let mut b = CircuitBuilder::new(GateSet::g0_with(defs)?);
    let qs = b.ancillas(width);
    for k in 0..queries {
        b.gate(&format!("U{k}"), &qs);
        b.gate(QUERY, &qs[..in_bits + out_bits]);
    }
    b.gate(&format!("U{queries}"), &qs);
    b.outputs(&qs);
    b.build()
}

/// `H^{⊗n}` on the address, one query with the output qubit in `|0⟩`.
pub fn grover_circuit(n: usize) -> Result<Circuit> {
    let mut b = CircuitBuilder::new(GateSet::g0_with(vec![GateDef::oracle(QUERY, n + 1)])?);
    let qs = b.ancillas(n + 1);
    for q in &qs[..n] {
        b.gate("H", &[*q]);
    }
    b.gate(QUERY, &qs);
    b.outputs(&qs);
    b.build()
}

/// Two Boolean oracles on `n` address bits that differ exactly on a random nonempty `S`.
pub fn differing_oracles<R: Rng + ?Sized>(
    n: usize,
    max_set: usize,
    rng: &mut R,
) -> Result<(UnitaryOp, UnitaryOp, Vec<usize>)> {
    let size = rng.random_range(1..=max_set.min(1 << n));
    let mut set: Vec<usize> = sample(rng, 1 << n, size).into_vec();
    set.sort_unstable();
    let f: Vec<usize> = (0..1usize << n).map(|_| rng.random_range(0..2)).collect();
    let mut g = f.clone();
    for &x in &set {
        g[x] ^= 1;
    }
    Ok((classical_oracle(n, 1, &f)?, classical_oracle(n, 1, &g)?, set))
}

/// Number of calls to [`QUERY`] in a circuit.
pub fn query_count(c: &Circuit) -> usize {
    c.steps()
        .iter()
        .filter(|s| c.step_kind(s) == StepKind::Oracle && s.gate == QUERY)
        .count()
}
