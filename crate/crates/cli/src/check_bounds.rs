use qpurify::bounds::*;
use qpurify::circuit::Circuit;
use qpurify::harness::{derive_seed, rng_for};
use qpurify::qcore::{haar_state, haar_unitary, UnitaryOp};
use qpurify::septest::negative_count_check;
use qpurify::sim::Simulator;
use rand::Rng;
use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{CliError, CliResult};
use crate::manifest::Run;
use crate::output;

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// Checks to run; all default checks when absent.
    pub select: Option<Vec<String>>,
    /// Multiplies every bound of this check by zero, to see the harness fail.
    pub inject_broken: Option<String>,
}

type Check = fn(u64, &Simulator) -> qpurify::Result<Vec<BoundReport>>;

/// Name, part of the default suite, checker. Seeds are derived from the position here,
/// so a check sees the same seed whatever else is selected.
const CHECKS: [(&str, bool, Check); 8] = [
    // false for XOR oracles, see the README
    ("bbbv-hybrid", false, hybrid_stated),
    ("bbbv-hybrid-doubled", true, hybrid_doubled),
    ("bbbv-perturbation", true, perturbation),
    ("jls", true, jls),
    ("rank", true, rank),
    ("leakage", true, leakage),
    ("cloning", true, cloning),
    ("negative-counts", true, negative_counts),
];

struct HybridInstance {
    n: usize,
    circuit: Circuit,
    o: UnitaryOp,
    o_prime: UnitaryOp,
    set: Vec<usize>,
}

/// Fifty two-oracle instances with `n ≤ 4` and at most three queries.
fn hybrid_instances(seed: u64) -> qpurify::Result<Vec<HybridInstance>> {
    (0..50u64)
        .map(|i| {
            let mut rng = rng_for(seed, i);
            let n = 1 + (i as usize % 4);
            let queries = 1 + (i as usize / 4) % 3;
            let circuit = random_query_circuit(n, 1, 1, queries, &mut rng)?;
            let (o, o_prime, set) = differing_oracles(n, 2, &mut rng)?;
            Ok(HybridInstance {
                n,
                circuit,
                o,
                o_prime,
                set,
            })
        })
        .collect()
}

fn hybrid_stated(seed: u64, sim: &Simulator) -> qpurify::Result<Vec<BoundReport>> {
    hybrid_instances(seed)?
        .iter()
        .map(|h| bbbv_hybrid_check(&h.circuit, &[], &h.o, &h.o_prime, h.n, &h.set, sim))
        .collect()
}

fn hybrid_doubled(seed: u64, sim: &Simulator) -> qpurify::Result<Vec<BoundReport>> {
    hybrid_instances(seed)?
        .iter()
        .map(|h| bbbv_hybrid_check_doubled(&h.circuit, &[], &h.o, &h.o_prime, h.n, &h.set, sim))
        .collect()
}

fn perturbation(seed: u64, sim: &Simulator) -> qpurify::Result<Vec<BoundReport>> {
    hybrid_instances(seed)?
        .iter()
        .enumerate()
        .map(|(i, h)| {
            let m = hybrid_measurement(&h.circuit, &[], &h.o, &h.o_prime, h.n, &h.set, sim)?;
            bbbv_perturbation_check(&m.phi, &m.psi, 100, derive_seed(seed, 1000 + i as u64))
        })
        .collect()
}

fn jls(seed: u64, _: &Simulator) -> qpurify::Result<Vec<BoundReport>> {
    let mut reports = Vec::new();
    for q in [1usize, 2] {
        for k in 0..5u64 {
            let mut rng = rng_for(seed, q as u64 * 10 + k);
            let adv = ReflectionAdversary::haar(2, 3, q, &mut rng);
            let psi = haar_state(3, &mut rng);
            for l in [2usize, 4, 8, 15] {
                reports.push(jls_check(&adv, &psi, l)?.param("adversary", k));
            }
        }
    }
    Ok(reports)
}

fn rank(seed: u64, _: &Simulator) -> qpurify::Result<Vec<BoundReport>> {
    let mut rng = rng_for(seed, 0);
    let mut reports = Vec::new();
    for _ in 0..100 {
        let d_i = rng.random_range(1..=16);
        let d_f = rng.random_range(1..=16);
        let u = haar_unitary(16, &mut rng);
        reports.push(rank_bound_check(d_i, d_f, &u, 1, &mut rng)?);
    }
    reports.push(rank_saturation(16, 8, 4)?);
    Ok(reports)
}

fn leakage(_: u64, _: &Simulator) -> qpurify::Result<Vec<BoundReport>> {
    let uniform = |k: usize| vec![1.0 / k as f64; k];
    let parity = |xs: &[usize]| xs.iter().fold(0, |a, x| a ^ (x & 1));
    Ok(vec![
        leakage_check(&uniform(2), 1, 1, &|x: &[usize]| x[0])?,
        leakage_check(&uniform(4), 4, 1, &majority_first_bit(2))?,
        leakage_check(&uniform(4), 3, 1, &parity)?,
        leakage_check(&uniform(4), 2, 2, &|x: &[usize]| x[0])?,
        leakage_check(&[0.5, 0.25, 0.125, 0.125], 5, 1, &majority_first_bit(2))?,
        leakage_check(&uniform(2), 6, 2, &|x: &[usize]| x.iter().sum::<usize>() % 4)?,
    ])
}

fn cloning(seed: u64, _: &Simulator) -> qpurify::Result<Vec<BoundReport>> {
    [1usize, 2]
        .iter()
        .map(|&l| cloning_frequency_check(3, l, 1000, derive_seed(seed, l as u64)))
        .collect()
}

fn negative_counts(seed: u64, _: &Simulator) -> qpurify::Result<Vec<BoundReport>> {
    Ok(vec![negative_count_check(2, 1, 2, 4, 1000, seed)?])
}

pub fn run(run: &Run<Params>) -> CliResult<()> {
    let root = run.seed()?;
    let Params { select, inject_broken } = &run.params;
    let chosen: Vec<usize> = match select {
        None => (0..CHECKS.len()).filter(|&i| CHECKS[i].1).collect(),
        Some(names) => names
            .iter()
            .map(|name| {
                CHECKS
                    .iter()
                    .position(|c| c.0 == name)
                    .ok_or_else(|| CliError::Usage(format!("unknown check `{name}`")))
            })
            .collect::<CliResult<_>>()?,
    };
    if let Some(name) = inject_broken {
        if !chosen.iter().any(|&i| CHECKS[i].0 == name) {
            return Err(CliError::Usage(format!(
                "inject_broken names `{name}`, which is not selected"
            )));
        }
    }
    let sim = Simulator::new(run.budget);
    let per_check: Vec<Vec<BoundReport>> = chosen
        .par_iter()
        .map(|&i| {
            let (name, _, check) = CHECKS[i];
            let seed = derive_seed(root, i as u64);
            let broken = inject_broken.as_deref() == Some(name);
            let reports = check(seed, &sim)?;
            Ok(reports
                .into_iter()
                .map(|r| {
                    let r = r.param("check", name).param("seed", seed);
                    if broken {
                        r.scaled(0.0).param("injected", "bound x 0")
                    } else {
                        r
                    }
                })
                .collect())
        })
        .collect::<CliResult<_>>()?;
    let reports: Vec<BoundReport> = per_check.into_iter().flatten().collect();
    output::emit(run.out.as_deref(), "check_bounds.jsonl", &output::json_lines(&reports))?;
    let failed = reports.iter().filter(|r| !r.holds).count();
    match reports.iter().find(|r| !r.holds) {
        None => Ok(()),
        Some(first) => {
            eprintln!(
                "first failing witness: {}",
                serde_json::to_string(first).expect("report serialises")
            );
            Err(CliError::Assertion(format!(
                "{failed} of {} reports fail",
                reports.len()
            )))
        }
    }
}
