use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

/// Slack allowed on exact comparisons.
pub const EXACT_TOL: f64 = 1e-9;

/// One checked inequality `measured ≤ bound`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub measured: f64,
    /// The bound used for the verdict, after clamping.
    pub bound: f64,
    /// The bound as the inequality states it.
    pub raw_bound: f64,
    pub tolerance: f64,
    pub holds: bool,
    /// The raw bound exceeds the largest value the measured quantity can take.
    pub vacuous: bool,
    pub parameters: BTreeMap<String, Value>,
    /// Enough data to reproduce the verdict.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl BoundReport {
    pub fn new(name: &str, measured: f64, bound: f64) -> Self {
        BoundReport {
            name: name.to_string(),
            measured,
            bound,
            raw_bound: bound,
            tolerance: EXACT_TOL,
            holds: measured <= bound + EXACT_TOL,
            vacuous: false,
            parameters: BTreeMap::new(),
            witness: None,
        }
    }

    /// Allows `tolerance` instead of the exact slack.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.recompute();
        self
    }

    /// Clamps the bound to `cap`, the largest value the measured quantity can take.
    pub fn clamped(mut self, cap: f64) -> Self {
        if self.raw_bound > cap {
            self.vacuous = true;
            self.bound = cap;
            self.recompute();
        }
        self
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    pub fn with_witness(mut self, witness: Value) -> Self {
        self.witness = Some(witness);
        self
    }

    /// Rescales the bound, for harness self-tests.
    pub fn scaled(mut self, factor: f64) -> Self {
        self.raw_bound *= factor;
        self.bound *= factor;
        self.recompute();
        self
    }

    fn recompute(&mut self) {
        self.holds = self.measured <= self.bound + self.tolerance;
    }

    /// Holds and is not vacuous: counts as evidence.
    pub fn informative(&self) -> bool {
        self.holds && !self.vacuous
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports serialise")
    }
}
