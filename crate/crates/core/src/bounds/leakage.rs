use std::collections::HashMap;

use super::report::BoundReport;
use crate::error::{Error, Result};

/// Largest number of joint outcomes enumerated.
pub const MAX_LEAKAGE_OUTCOMES: usize = 1 << 22;

/// Exact `Δ((i, X_i, L(X)), (i, Y, L(X)))` for `X_1..X_g, Y` iid from `dist`, `i` uniform
/// in `[g]`, against `√(r/2g)` where `L` takes at most `2^r` values.
pub fn leakage_check(dist: &[f64], g: usize, r: u32, leak: &dyn Fn(&[usize]) -> usize) -> Result<BoundReport> {
    let k = dist.len();
    if k == 0 || g == 0 {
        return Err(Error::InvalidState("leakage needs a nonempty domain and g >= 1".into()));
    }
    if (dist.iter().sum::<f64>() - 1.0).abs() > 1e-9 || dist.iter().any(|&p| p < 0.0) {
        return Err(Error::InvalidState("domain weights are not a distribution".into()));
    }
    let outcomes = k
        .checked_pow(g as u32)
        .filter(|&n| n <= MAX_LEAKAGE_OUTCOMES)
        .ok_or_else(|| Error::budget("leakage outcomes", usize::MAX, MAX_LEAKAGE_OUTCOMES))?;
    // joint[i][(x, l)] = Pr[X_i = x, L = l]; marginal[l] = Pr[L = l]
    let mut joint: Vec<HashMap<(usize, usize), f64>> = vec![HashMap::new(); g];
    let mut marginal: HashMap<usize, f64> = HashMap::new();
    let mut xs = vec![0usize; g];
    for code in 0..outcomes {
        let mut c = code;
        let mut p = 1.0;
        for slot in xs.iter_mut() {
            *slot = c % k;
            c /= k;
            p *= dist[*slot];
        }
        if p == 0.0 {
            continue;
        }
        let l = leak(&xs);
        if r < usize::BITS && l >= 1usize << r {
            return Err(Error::InvalidState(format!("leak value {l} does not fit in {r} bits")));
        }
        *marginal.entry(l).or_insert(0.0) += p;
        for (i, &x) in xs.iter().enumerate() {
            *joint[i].entry((x, l)).or_insert(0.0) += p;
        }
    }
    let mut delta = 0.0;
    for j in &joint {
        for (&l, &pl) in &marginal {
            for (y, &py) in dist.iter().enumerate() {
                let a = j.get(&(y, l)).copied().unwrap_or(0.0);
                delta += (a - pl * py).abs();
            }
        }
    }
    let measured = 0.5 * delta / g as f64;
    Ok(
        BoundReport::new("leakage", measured, (r as f64 / (2.0 * g as f64)).sqrt())
            .clamped(1.0)
            .param("domain", k)
            .param("g", g)
            .param("r", r),
    )
}

/// Majority of the first bit of each value, ties to 0.
pub fn majority_first_bit(bits: usize) -> impl Fn(&[usize]) -> usize {
    move |xs: &[usize]| {
        let ones = xs.iter().filter(|&&x| (x >> (bits - 1)) & 1 == 1).count();
        usize::from(2 * ones > xs.len())
    }
}
