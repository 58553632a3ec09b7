use serde::Serialize;

use super::passes::CompilerPass;
use crate::circuit::{space_of, time_of, Circuit};
use crate::error::Result;

pub const CSV_HEADER: &str = "n,t,S,T,pass,S_prime,T_prime";

#[derive(Clone, Debug)]
pub struct FamilyMember {
    pub n: usize,
    pub t: usize,
    pub circuit: Circuit,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlowupRow {
    pub n: usize,
    pub t: usize,
    #[serde(rename = "S")]
    pub s: usize,
    #[serde(rename = "T")]
    pub time: usize,
    pub pass: String,
    #[serde(rename = "S_prime")]
    pub s_prime: usize,
    #[serde(rename = "T_prime")]
    pub t_prime: usize,
}

/// Measured metrics of every pass on every family member, member-major.
pub fn blowup_table(family: &[FamilyMember], passes: &[&dyn CompilerPass]) -> Result<Vec<BlowupRow>> {
    let mut rows = Vec::new();
    for m in family {
        for p in passes {
            let out = p.transform(&m.circuit)?;
            rows.push(BlowupRow {
                n: m.n,
                t: m.t,
                s: space_of(&m.circuit),
                time: time_of(&m.circuit),
                pass: p.name().to_string(),
                s_prime: space_of(&out),
                t_prime: time_of(&out),
            });
        }
    }
    Ok(rows)
}

pub fn to_csv(rows: &[BlowupRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.n, r.t, r.s, r.time, r.pass, r.s_prime, r.t_prime
        ));
    }
    s
}

/// Ordinary least-squares slope of `y` on `x`; `None` with fewer than two distinct `x`.
pub fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}
