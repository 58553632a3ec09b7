use qpurify::circuit::{space_of, time_of, StepKind};
use qpurify::harness::rng_for;
use qpurify::purify::{least_squares_slope, DelayedMeasurement};
use qpurify::septest::{build_measurement_algorithm, build_oracle, OracleInstance, ORACLE};
use qpurify::sim::{OracleRegistry, Simulator};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::manifest::Run;
use crate::output;

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub n: usize,
    pub t: Vec<usize>,
}

impl Default for Params {
    fn default() -> Self {
        Params { n: 2, t: vec![1, 3, 7] }
    }
}

#[derive(Debug, Serialize)]
struct Row {
    n: usize,
    t: usize,
    #[serde(rename = "S")]
    s: usize,
    #[serde(rename = "T")]
    time: usize,
    #[serde(rename = "S_prime")]
    s_prime: usize,
    #[serde(rename = "T_prime")]
    t_prime: usize,
    /// Worst of the `out = 0` and `out = 1` instances.
    success: f64,
    success_purified: f64,
    #[serde(skip)]
    resets: usize,
}

fn row(n: usize, t: usize, index: usize, seed: u64, sim: &Simulator) -> CliResult<Row> {
    let c = build_measurement_algorithm(n, t)?;
    let p = DelayedMeasurement::default().purify(&c)?.circuit;
    let (mut success, mut success_purified) = (f64::INFINITY, f64::INFINITY);
    for out in [false, true] {
        let inst = OracleInstance::random(n, t, out, &mut rng_for(seed, 2 * index as u64 + u64::from(out)));
        let reg = OracleRegistry::from([(ORACLE.to_string(), build_oracle(&inst)?)]);
        let bit = if out { "1" } else { "0" };
        success = success.min(sim.run_distribution(&c, &[], &reg)?.probability(bit));
        success_purified = success_purified.min(sim.run_distribution(&p, &[], &reg)?.probability(bit));
    }
    Ok(Row {
        n,
        t,
        s: space_of(&c),
        time: time_of(&c),
        s_prime: space_of(&p),
        t_prime: time_of(&p),
        success,
        success_purified,
        resets: c.count_kind(StepKind::Trash) + c.count_kind(StepKind::Init),
    })
}

pub fn run(run: &Run<Params>) -> CliResult<()> {
    let seed = run.seed()?;
    let Params { n, t } = &run.params;
    let sim = Simulator::new(run.budget);
    let rows: Vec<Row> = t
        .par_iter()
        .enumerate()
        .map(|(i, &t)| row(*n, t, i, seed, &sim))
        .collect::<CliResult<_>>()?;
    output::emit(run.out.as_deref(), "sep_demo.csv", &output::csv(&rows)?)?;

    let mut failures = Vec::new();
    for r in &rows {
        if r.success < 1.0 - 1e-9 || r.success_purified < 1.0 - 1e-9 {
            failures.push(format!(
                "t={}: success {} / purified {}",
                r.t, r.success, r.success_purified
            ));
        }
        if r.s_prime != r.s + r.resets {
            failures.push(format!(
                "t={}: S' - S = {} but {} resets",
                r.t,
                r.s_prime - r.s,
                r.resets
            ));
        }
    }
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.t as f64, r.s_prime as f64)).collect();
    if let Some(slope) = least_squares_slope(&points) {
        if slope <= 0.0 {
            failures.push(format!("S' does not grow with t (slope {slope})"));
        }
    }
    match failures.first() {
        None => Ok(()),
        Some(_) => Err(CliError::Assertion(failures.join("; "))),
    }
}
