use qpurify::circuit::space_of;
use qpurify::harness::{derive_seed, rng_for};
use qpurify::qcore::{checked_sym_dim, trace_distance_matrices};
use qpurify::septest::*;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::manifest::Run;
use crate::output;

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub n: usize,
    pub t: usize,
    /// Copy counts, swept in order.
    pub l: Vec<usize>,
    /// Phase modulus of the invariant distribution.
    pub modulus: u32,
    pub samples: usize,
    /// Queries of each random adversary.
    pub queries: usize,
    pub adversaries: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            n: 2,
            t: 2,
            l: vec![4, 8, 16],
            modulus: 5,
            samples: 10_000,
            queries: 2,
            adversaries: 3,
        }
    }
}

#[derive(Debug, Serialize)]
struct Row {
    stage: &'static str,
    params: String,
    measured: f64,
    bound: f64,
    verdict: bool,
}

fn check_params(p: &Params) -> CliResult<()> {
    if p.n == 0 || p.t == 0 || p.l.is_empty() || p.adversaries == 0 || p.samples < 2 {
        return Err(CliError::Usage(
            "simulator-chain needs n, t >= 1, some l values, adversaries >= 1, samples >= 2".into(),
        ));
    }
    if p.modulus < 2 * p.queries as u32 + 1 {
        return Err(CliError::Usage(format!(
            "modulus {} is below 2T+1 = {}; phase invariance does not apply",
            p.modulus,
            2 * p.queries + 1
        )));
    }
    if p.l.contains(&0) {
        return Err(CliError::Usage("l values must be positive".into()));
    }
    Ok(())
}

fn adversary_rows(p: &Params, k: usize, seed: u64) -> CliResult<Vec<Row>> {
    let mut rng = rng_for(seed, k as u64);
    let inst = OracleInstance::random(p.n, p.t, k.is_multiple_of(2), &mut rng);
    let adv = Adversary::haar(p.n, p.t, 0, p.queries, &mut rng);
    let tag = |l: Option<usize>| match l {
        Some(l) => format!("n={};t={};T={};adversary={k};l={l}", p.n, p.t, p.queries),
        None => format!("n={};t={};T={};adversary={k};M={}", p.n, p.t, p.queries, p.modulus),
    };
    let mut rows = Vec::new();

    let r = phase_invariance_check(&inst, &adv, p.modulus, p.samples, derive_seed(seed, 1000 + k as u64))?;
    rows.push(Row {
        stage: "O-vs-O1",
        params: format!("{};samples={}", tag(None), p.samples),
        measured: r.distance,
        bound: 3.0 * r.sigma,
        verdict: r.holds,
    });

    let mut count = CountingWorld::new(&inst, &adv, adv.queries())?;
    run_adversary(&adv, &mut count)?;
    let counted = algorithm_density(&count)?;
    let mut tds = Vec::new();
    for &l in &p.l {
        let mut exact = CopyWorld::new(&inst, &adv, l, adv.queries(), CopyMode::Exact)?;
        run_adversary(&adv, &mut exact)?;
        let td = trace_distance_matrices(&counted, &algorithm_density(&exact)?)?;
        rows.push(Row {
            stage: "O1-vs-O2",
            params: tag(Some(l)),
            measured: td,
            bound: 1e-9,
            verdict: td <= 1e-9,
        });

        let mut sym = CopyWorld::new(&inst, &adv, l, adv.queries(), CopyMode::Symmetric)?;
        run_adversary(&adv, &mut sym)?;
        let td = joint_trace_distance(&exact, &sym);
        let big_t = adv.queries();
        let bound = match (l + 1).saturating_sub(big_t) {
            0 => 1.0,
            room => (8.0 * (p.t * big_t) as f64 / (room as f64).sqrt()).min(1.0),
        };
        rows.push(Row {
            stage: "O2-vs-O3",
            params: tag(Some(l)),
            measured: td,
            bound,
            verdict: td <= bound + 1e-9,
        });
        tds.push(td);
    }
    // largest increase of the O2/O3 distance along the sweep
    let rise = tds.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    rows.push(Row {
        stage: "O2-vs-O3-monotone",
        params: format!("n={};t={};T={};adversary={k}", p.n, p.t, p.queries),
        measured: rise,
        bound: 1e-12,
        verdict: rise <= 1e-12,
    });

    let mut copy = CopyWorld::new(&inst, &adv, p.l[0], adv.queries(), CopyMode::Exact)?;
    run_adversary(&adv, &mut copy)?;
    rows.push(ledger_row(&CountLedger::from_copy_world(&copy), tag(Some(p.l[0]))));
    Ok(rows)
}

fn ledger_row(ledger: &CountLedger, params: String) -> Row {
    let violations = ledger.violations().len();
    Row {
        stage: "count-ledger",
        params: format!("{params};supported={}", ledger.supported().count()),
        measured: violations as f64,
        bound: 0.0,
        verdict: violations == 0,
    }
}

fn honest_rows(p: &Params, seed: u64) -> CliResult<Vec<Row>> {
    let l = p.l[0];
    let inst = OracleInstance::random(p.n, p.t, true, &mut rng_for(seed, p.adversaries as u64));
    let honest = Adversary::honest(p.n, p.t)?;
    let mut w = CopyWorld::new(&inst, &honest, l, honest.queries(), CopyMode::Exact)?;
    run_adversary(&honest, &mut w)?;
    let ledger = CountLedger::from_copy_world(&w);
    let tag = format!("n={};t={};adversary=honest;l={l}", p.n, p.t);
    let mut rows = vec![ledger_row(&ledger, tag.clone())];

    let success = ledger.success_weight();
    let s_alg = space_of(&build_measurement_algorithm(p.n, p.t)?);
    let row = dimension_ledger(p.n, p.t, l, s_alg);
    let d = (1u64 << p.n) - 1;
    let t = p.t as u32;
    let (full, less) = (checked_sym_dim(d, l as u64), checked_sym_dim(d, l as u64 - 1));
    let want_initial = full.and_then(|f| f.checked_pow(2 * t - 1));
    let want_final = (|| {
        let s = 1u128.checked_shl(s_alg as u32).filter(|_| s_alg < 128)?;
        full?
            .checked_pow(t)?
            .checked_mul(less?.checked_pow(t - 1)?)?
            .checked_mul(s)
    })();
    let show = |v: Option<u128>| v.map_or_else(|| "overflow".to_string(), |v| v.to_string());
    rows.push(Row {
        stage: "dimension-ledger",
        params: format!(
            "{tag};S={s_alg};D_Initial={};D_Final={};success={success}",
            show(row.d_initial),
            show(row.d_final)
        ),
        measured: row.ratio,
        bound: match (want_initial, want_final) {
            (Some(i), Some(f)) => f as f64 / i as f64,
            _ => f64::NAN,
        },
        verdict: (success - 1.0).abs() <= 1e-9
            && want_initial.is_some()
            && row.d_initial == want_initial
            && row.d_final == want_final,
    });
    Ok(rows)
}

pub fn run(run: &Run<Params>) -> CliResult<()> {
    let seed = run.seed()?;
    let p = &run.params;
    check_params(p)?;
    let mut jobs: Vec<Option<usize>> = (0..p.adversaries).map(Some).collect();
    jobs.push(None);
    let rows: Vec<Row> = jobs
        .par_iter()
        .map(|job| match job {
            Some(k) => adversary_rows(p, *k, seed),
            None => honest_rows(p, seed),
        })
        .collect::<CliResult<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    output::emit(run.out.as_deref(), "simulator_chain.csv", &output::csv(&rows)?)?;
    let failed: Vec<String> = rows
        .iter()
        .filter(|r| !r.verdict)
        .map(|r| format!("{} [{}]", r.stage, r.params))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Assertion(format!("violated: {}", failed.join(", "))))
    }
}
