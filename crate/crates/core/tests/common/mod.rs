#![allow(dead_code)]

use qpurify::circuit::{Circuit, CircuitBuilder, GateSet, QubitId};
use qpurify::harness::rng_for;
use rand::Rng;

/// Random circuit over the core gates on `width` qubits, the first `inputs` of them
/// inputs. With `resets`, some steps Trash a live qubit and Init a fresh one in its place.
pub fn random_circuit(seed: u64, width: usize, inputs: usize, steps: usize, resets: bool) -> Circuit {
    let mut rng = rng_for(seed, 0);
    let mut b = CircuitBuilder::new(GateSet::g0());
    let mut live: Vec<QubitId> = b.inputs(inputs);
    live.extend(b.ancillas(width - inputs));
    for _ in 0..steps {
        let roll = rng.random_range(0..10);
        if resets && roll == 0 && live.len() > 1 {
            let i = rng.random_range(0..live.len());
            let q = live.remove(i);
            b.trash(q);
            let fresh = b.init();
            live.insert(i, fresh);
            continue;
        }
        let i = rng.random_range(0..live.len());
        match roll % 4 {
            0 | 1 => {
                b.gate("H", &[live[i]]);
            }
            2 => {
                b.gate(if rng.random() { "T" } else { "Tdg" }, &[live[i]]);
            }
            _ if live.len() > 1 => {
                let mut j = rng.random_range(0..live.len() - 1);
                if j >= i {
                    j += 1;
                }
                b.gate("CNOT", &[live[i], live[j]]);
            }
            _ => {
                b.gate("H", &[live[i]]);
            }
        }
    }
    let k = rng.random_range(1..=live.len().min(3));
    let outs: Vec<QubitId> = live[..k].to_vec();
    b.outputs(&outs);
    b.build().expect("random circuit is well formed")
}

pub fn bits(x: usize, width: usize) -> Vec<bool> {
    (0..width).map(|j| (x >> (width - 1 - j)) & 1 == 1).collect()
}
