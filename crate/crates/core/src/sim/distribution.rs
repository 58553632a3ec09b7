use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Probabilities of out-register bitstrings (first out qubit leftmost).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OutputDistribution {
    probs: BTreeMap<String, f64>,
}

impl OutputDistribution {
    /// Validates that probabilities are nonnegative and sum to one.
    pub fn new(probs: BTreeMap<String, f64>) -> Result<Self> {
        if let Some((k, p)) = probs.iter().find(|(_, p)| **p < -1e-12 || !p.is_finite()) {
            return Err(Error::InvalidState(format!("probability {p} for `{k}`")));
        }
        let total: f64 = probs.values().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidState(format!("probabilities sum to {total}")));
        }
        Ok(OutputDistribution { probs })
    }

    /// Builds from integer-keyed marginals of a `width`-bit register, dropping exact zeros.
    pub(crate) fn from_marginals(width: usize, m: BTreeMap<usize, f64>) -> Result<Self> {
        let probs = m
            .into_iter()
            .filter(|(_, p)| *p > 0.0)
            .map(|(k, p)| (bitstring(k, width), p))
            .collect();
        OutputDistribution::new(probs)
    }

    pub fn point(bits: &str) -> Self {
        OutputDistribution {
            probs: BTreeMap::from([(bits.to_string(), 1.0)]),
        }
    }

    pub fn probability(&self, bits: &str) -> f64 {
        self.probs.get(bits).copied().unwrap_or(0.0)
    }

    pub fn probabilities(&self) -> &BTreeMap<String, f64> {
        &self.probs
    }

    /// The most likely bitstring (ties broken by order).
    pub fn mode(&self) -> Option<&str> {
        self.probs
            .iter()
            .fold(None, |best: Option<(&String, f64)>, (k, &p)| match best {
                Some((_, bp)) if bp >= p => best,
                _ => Some((k, p)),
            })
            .map(|(k, _)| k.as_str())
    }
}

pub(crate) fn bitstring(k: usize, width: usize) -> String {
    (0..width)
        .map(|j| if (k >> (width - 1 - j)) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Total variation distance.
pub fn statistical_distance(a: &OutputDistribution, b: &OutputDistribution) -> f64 {
    let mut keys: Vec<&String> = a.probs.keys().chain(b.probs.keys()).collect();
    keys.sort();
    keys.dedup();
    0.5 * keys
        .into_iter()
        .map(|k| (a.probability(k) - b.probability(k)).abs())
        .sum::<f64>()
}
