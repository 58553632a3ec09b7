use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::passes::CompilerPass;
use crate::circuit::{check_property, space_of, time_of, Circuit, CircuitProperty};
use crate::error::{Error, Result};
use crate::harness::rng_for;
use crate::sim::{statistical_distance, OracleRegistry, Simulator};

/// Largest functional distance a compiler may introduce.
pub const THRESHOLD: f64 = 1.0 / 3.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContractReport {
    pub pass: String,
    pub gate_sets_equal: bool,
    pub max_distance: f64,
    pub close: bool,
    pub property_transformed: bool,
    #[serde(rename = "S")]
    pub s: usize,
    #[serde(rename = "T")]
    pub t: usize,
    #[serde(rename = "S_prime")]
    pub s_prime: usize,
    #[serde(rename = "T_prime")]
    pub t_prime: usize,
}

impl ContractReport {
    pub fn passed(&self) -> bool {
        self.gate_sets_equal && self.close && self.property_transformed
    }
}

/// Every bit string of the given width, in counting order.
pub fn all_inputs(bits: usize) -> Vec<Vec<bool>> {
    (0..1usize << bits)
        .map(|x| (0..bits).map(|j| (x >> (bits - 1 - j)) & 1 == 1).collect())
        .collect()
}

/// Exhaustive up to 12 bits, otherwise `count` seeded samples.
pub fn sample_inputs(bits: usize, count: usize, seed: u64) -> Vec<Vec<bool>> {
    if bits <= 12 {
        return all_inputs(bits);
    }
    let mut rng = rng_for(seed, 0);
    (0..count).map(|_| (0..bits).map(|_| rng.random()).collect()).collect()
}

pub fn verify_compiler_contract(
    pass: &dyn CompilerPass,
    c: &Circuit,
    inputs: &[Vec<bool>],
    p: &CircuitProperty,
    q: &CircuitProperty,
    registry: &OracleRegistry,
    sim: &Simulator,
) -> Result<ContractReport> {
    if !check_property(c, p) {
        return Err(Error::Precondition("source circuit lacks the input property".into()));
    }
    let out = pass.transform(c)?;
    let distances: Vec<f64> = inputs
        .par_iter()
        .map(|x| {
            let a = sim.run_distribution(c, x, registry)?;
            let b = sim.run_distribution(&out, x, registry)?;
            Ok(statistical_distance(&a, &b))
        })
        .collect::<Result<_>>()?;
    let max_distance = distances.into_iter().fold(0.0, f64::max);
    Ok(ContractReport {
        pass: pass.name().to_string(),
        gate_sets_equal: c.gate_set().equivalent(out.gate_set()),
        max_distance,
        close: max_distance <= THRESHOLD,
        property_transformed: check_property(&out, q),
        s: space_of(c),
        t: time_of(c),
        s_prime: space_of(&out),
        t_prime: time_of(&out),
    })
}
