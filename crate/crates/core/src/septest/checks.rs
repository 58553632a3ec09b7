//! Desk-scale checks of the two counting-world facts: phase-invariant averaging hides
//! the counters, and after Fourier transform the counters equal the phase table sums.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::adversary::{Adversary, AdversaryStep};
use super::instance::OracleInstance;
use super::ledger::CountLedger;
use super::worlds::{
    measure_qubits, run_adversary, total_weight, CopyMode, CopyWorld, CountingWorld, QueryWorld, RealWorld,
};
use crate::bounds::BoundReport;
use crate::error::{Error, Result};
use crate::harness::rng_for;
use crate::qcore::{
    apply_to_factor, haar_state, phase_op, qft_zm, sample_m_phase_invariant, CVec, Ket, PhaseFunction, C64,
};

/// Monte Carlo comparison of output distributions under `O` and the counting oracle.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseInvarianceReport {
    pub samples: usize,
    pub modulus: u32,
    /// `½ Σ_s |mean(P_O(s) − P_{O1}(s))|`.
    pub distance: f64,
    /// `½ Σ_s σ_s`, the standard error of the same estimator.
    pub sigma: f64,
    pub holds: bool,
}

fn outcome_distributions(inst: &OracleInstance, adv: &Adversary) -> Result<(Vec<f64>, Vec<f64>)> {
    let all: Vec<usize> = (0..adv.alg_qubits).collect();
    let mut real = RealWorld::new(inst, adv)?;
    run_adversary(adv, &mut real)?;
    let mut count = CountingWorld::new(inst, adv, adv.queries())?;
    run_adversary(adv, &mut count)?;
    Ok((measure_qubits(&real, &all), measure_qubits(&count, &all)))
}

fn with_phases(base: &OracleInstance, psi: Vec<Ket>, phi: Vec<Ket>) -> Result<OracleInstance> {
    OracleInstance::new(base.n, base.t, psi, phi, base.out)
}

/// Draws `samples` M-phase-invariant instances around `base`; the verdict is
/// `distance ≤ 3·sigma`, measuring every algorithm qubit.
pub fn phase_invariance_check(
    base: &OracleInstance,
    adv: &Adversary,
    modulus: u32,
    samples: usize,
    seed: u64,
) -> Result<PhaseInvarianceReport> {
    let outcomes = 1usize << adv.alg_qubits;
    let diffs: Vec<Vec<f64>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, i as u64);
            let psi = base
                .psi
                .iter()
                .map(|k| sample_m_phase_invariant(k, modulus, &mut rng))
                .collect();
            let phi = base
                .phi
                .iter()
                .map(|k| sample_m_phase_invariant(k, modulus, &mut rng))
                .collect();
            let inst = with_phases(base, psi, phi)?;
            let (a, b) = outcome_distributions(&inst, adv)?;
            Ok(a.iter().zip(&b).map(|(x, y)| x - y).collect())
        })
        .collect::<Result<_>>()?;
    let n = samples as f64;
    let mut distance = 0.0;
    let mut sigma = 0.0;
    for s in 0..outcomes {
        let mean = diffs.iter().map(|d| d[s]).sum::<f64>() / n;
        let var = diffs.iter().map(|d| (d[s] - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        distance += 0.5 * mean.abs();
        sigma += 0.5 * (var / n).sqrt();
    }
    Ok(PhaseInvarianceReport {
        samples,
        modulus,
        distance,
        sigma,
        holds: distance <= 3.0 * sigma + 1e-12,
    })
}

/// Exact average over every phase pattern on the nonzero amplitudes of every state.
///
/// Returns `max_s |E P_O(s) − E P_{O1}(s)|`. The number of patterns is
/// `M^{2t(2^n − 1)}`, so this is only usable at the smallest sizes.
pub fn exact_phase_average_gap(base: &OracleInstance, adv: &Adversary, modulus: u32) -> Result<f64> {
    let states: Vec<&Ket> = base.psi.iter().chain(&base.phi).collect();
    let slots = states.len() * ((1usize << base.n) - 1);
    let total = (modulus as u128).checked_pow(slots as u32).filter(|&x| x <= 1 << 20);
    let total = total.ok_or_else(|| Error::budget("phase patterns", usize::MAX, 1 << 20))? as usize;
    let m = modulus as usize;
    let outcomes = 1usize << adv.alg_qubits;
    let sums = (0..total)
        .into_par_iter()
        .map(|mut code| {
            let mut kets = Vec::with_capacity(states.len());
            for k in &states {
                let mut table = vec![0u32; k.dim()];
                for entry in table.iter_mut().skip(1) {
                    *entry = (code % m) as u32;
                    code /= m;
                }
                let f = PhaseFunction::new(modulus, table)?;
                kets.push(phase_op(&f).apply(k)?);
            }
            let phi = kets.split_off(base.t);
            let inst = with_phases(base, kets, phi)?;
            let (a, b) = outcome_distributions(&inst, adv)?;
            Ok(a.iter().zip(&b).map(|(x, y)| x - y).collect::<Vec<f64>>())
        })
        .try_reduce(
            || vec![0.0; outcomes],
            |mut acc, d| {
                for (x, y) in acc.iter_mut().zip(d) {
                    *x += y;
                }
                Ok(acc)
            },
        )?;
    Ok(sums.iter().map(|s| (s / total as f64).abs()).fold(0.0, f64::max))
}

/// Outcome of the count-equals-table-sum check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompressedOracleReport {
    pub modulus: usize,
    /// Basis states with weight above the support tolerance.
    pub supported: usize,
    pub violations: usize,
    /// Weight on the counter values ±1, so the check is not vacuous.
    pub moved_weight: f64,
}

impl CompressedOracleReport {
    pub fn holds(&self) -> bool {
        self.violations == 0 && self.supported > 0
    }
}

/// `v` as a signed residue in `(−M/2, M/2]`.
fn centered(v: usize, m: usize) -> i64 {
    if 2 * v > m {
        v as i64 - m as i64
    } else {
        v as i64
    }
}

/// One query at `t = 1`, `n = 1`, with the phase tables held in superposition.
///
/// Factors: algorithm (3 qubits), the tables `F(0), F(1)` of `ψ_1` and `G(0), G(1)` of
/// `φ_1` over `Z_M`, then the counters `C_1, D_1` over `{−1, 0, 1}`. The tables start in
/// the Fourier image of `|0⟩`; each table value `F` queries the counting oracle with
/// `ψ_F = Ph_F |1⟩`. After the inverse transform every supported basis state must have
/// `C_1 = Σ_x centered(F(x))` and `D_1 = Σ_x centered(G(x))`.
pub fn compressed_oracle_claim(modulus: usize, seed: u64) -> Result<CompressedOracleReport> {
    let m = modulus;
    let qft = qft_zm(m)?;
    let alg = 8;
    let tables = m * m * m * m;
    let dims = [alg, m, m, m, m, 3, 3];
    let mut rng = rng_for(seed, 0);
    let start = haar_state(alg, &mut rng);
    let mut state = vec![C64::new(0.0, 0.0); alg * tables * 9];
    for a in 0..alg {
        // all tables 0, counters (0, 0)
        state[(a * tables) * 9 + 4] = start.amplitudes()[a];
    }
    for k in 1..=4 {
        apply_to_factor(&mut state, &dims, k, qft.matrix());
    }
    let one = Ket::basis(2, 1);
    let mut next = vec![C64::new(0.0, 0.0); state.len()];
    for f in 0..tables {
        let (f0, f1, g0, g1) = (f / (m * m * m), (f / (m * m)) % m, (f / m) % m, f % m);
        let psi = phase_op(&PhaseFunction::new(m as u32, vec![f0 as u32, f1 as u32])?).apply(&one)?;
        let phi = phase_op(&PhaseFunction::new(m as u32, vec![g0 as u32, g1 as u32])?).apply(&one)?;
        let inst = OracleInstance::new(1, 1, vec![psi], vec![phi], true)?;
        let sub = CVec::from_fn(alg, |a, _| state[(a * tables + f) * 9 + 4]);
        let adv = Adversary {
            n: 1,
            t: 1,
            alg_qubits: 3,
            initial: sub,
            steps: vec![AdversaryStep::Query],
            outputs: Vec::new(),
        };
        let mut w = CountingWorld::new(&inst, &adv, 1)?;
        run_adversary(&adv, &mut w)?;
        for (key, v) in w.branches() {
            let cd = ((key[0] + 1) * 3 + (key[1] + 1)) as usize;
            for a in 0..alg {
                next[(a * tables + f) * 9 + cd] += v[a];
            }
        }
    }
    let inv = qft.dagger();
    for k in 1..=4 {
        apply_to_factor(&mut next, &dims, k, inv.matrix());
    }
    let (mut supported, mut violations, mut moved_weight) = (0, 0, 0.0);
    for (idx, amp) in next.iter().enumerate() {
        let w = amp.norm_sqr();
        if w <= 1e-20 {
            continue;
        }
        supported += 1;
        let cd = idx % 9;
        let f = (idx / 9) % tables;
        let (c1, d1) = ((cd / 3) as i64 - 1, (cd % 3) as i64 - 1);
        let vf = centered(f / (m * m * m), m) + centered((f / (m * m)) % m, m);
        let vg = centered((f / m) % m, m) + centered(f % m, m);
        if c1 != 0 || d1 != 0 {
            moved_weight += w;
        }
        if c1 != vf || d1 != vg {
            violations += 1;
        }
    }
    Ok(CompressedOracleReport {
        modulus: m,
        supported,
        violations,
        moved_weight,
    })
}

/// Verification after a run against the symmetric simulator: the probability that some
/// `c_i` or `d_i` comes out negative, i.e. the algorithm returned more copies of a state
/// than it was handed. Averaged over `trials` seeded (instance, adversary) pairs and
/// compared with `min(1, 8tT/√(ℓ−T+1) + 2tℓ/(2^n−1+ℓ)) + 3σ`.
pub fn negative_count_check(
    n: usize,
    t: usize,
    queries: usize,
    l: usize,
    trials: usize,
    seed: u64,
) -> Result<BoundReport> {
    if trials < 2 || l <= queries {
        return Err(Error::Precondition(
            "negative-count check needs trials >= 2 and ℓ > T".into(),
        ));
    }
    let per_trial: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, i as u64);
            let inst = OracleInstance::random(n, t, rng.random(), &mut rng);
            let adv = Adversary::haar(n, t, 0, queries, &mut rng);
            let mut w = CopyWorld::new(&inst, &adv, l, queries, CopyMode::Symmetric)?;
            run_adversary(&adv, &mut w)?;
            let ledger = CountLedger::from_copy_world(&w);
            let bad: f64 = ledger
                .supported()
                .filter(|((c, d), _)| c.iter().chain(d).any(|&x| x < 0))
                .map(|(_, p)| p)
                .sum();
            Ok(bad / total_weight(&w))
        })
        .collect::<Result<_>>()?;
    let k = trials as f64;
    let mean = per_trial.iter().sum::<f64>() / k;
    let var = per_trial.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (k - 1.0);
    let sigma = (var / k).sqrt();
    let (tf, qf, lf) = (t as f64, queries as f64, l as f64);
    let bound = 8.0 * tf * qf / (lf - qf + 1.0).sqrt() + 2.0 * tf * lf / ((n as f64).exp2() - 1.0 + lf);
    Ok(BoundReport::new("negative-count", mean, bound)
        .clamped(1.0)
        .with_tolerance(3.0 * sigma + 1e-12)
        .param("n", n)
        .param("t", t)
        .param("T", queries)
        .param("l", l)
        .param("trials", trials)
        .param("sigma", sigma)
        .param("seed", seed))
}
