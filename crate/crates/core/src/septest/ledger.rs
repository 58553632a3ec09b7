use std::collections::BTreeMap;

use serde::Serialize;

use super::worlds::{CopyWorld, CountingWorld, QueryWorld};
use crate::qcore::{checked_sym_dim, log2_sym_dim};

/// Branch weight below which a count tuple is not considered supported.
pub const SUPPORT_TOL: f64 = 1e-12;

/// `(c_1..c_t, d_1..d_t)` with `c_i = ℓ − |S_i|` and `d_i = ℓ − |T_i|`.
pub type CountTuple = (Vec<i64>, Vec<i64>);

/// Distribution of the simulator's count registers after a run.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CountLedger {
    pub t: usize,
    pub support: BTreeMap<String, f64>,
    #[serde(skip)]
    tuples: BTreeMap<CountTuple, f64>,
}

impl CountLedger {
    pub fn from_copy_world(w: &CopyWorld) -> Self {
        let t = w.t();
        let l = w.copies() as i64;
        let mut ledger = CountLedger::empty(t);
        for (key, v) in w.branches() {
            let (s, tr) = CopyWorld::copy_counts(key, t);
            let c = s.iter().map(|&k| l - k as i64).collect();
            let d = tr.iter().map(|&k| l - k as i64).collect();
            ledger.add((c, d), v.norm_squared());
        }
        ledger
    }

    /// The counting world's counters are the tuple itself.
    pub fn from_counting_world(w: &CountingWorld) -> Self {
        let t = w.t();
        let mut ledger = CountLedger::empty(t);
        for (key, v) in w.branches() {
            let c = key[..t].iter().map(|&x| x as i64).collect();
            let d = key[t..].iter().map(|&x| x as i64).collect();
            ledger.add((c, d), v.norm_squared());
        }
        ledger
    }

    pub fn empty(t: usize) -> Self {
        CountLedger {
            t,
            ..Default::default()
        }
    }

    fn add(&mut self, tuple: CountTuple, w: f64) {
        let label = format!("c={:?};d={:?}", tuple.0, tuple.1);
        *self.support.entry(label).or_insert(0.0) += w;
        *self.tuples.entry(tuple).or_insert(0.0) += w;
    }

    /// Union of supports, adding weights.
    pub fn merge(&mut self, other: &CountLedger) {
        for (k, &w) in &other.tuples {
            self.add(k.clone(), w);
        }
    }

    pub fn supported(&self) -> impl Iterator<Item = (&CountTuple, f64)> {
        self.tuples
            .iter()
            .filter(|(_, &w)| w > SUPPORT_TOL)
            .map(|(k, &w)| (k, w))
    }

    /// Supported tuples breaking `d_{i+1} = d_i − c_i` for some `i < t`.
    pub fn violations(&self) -> Vec<CountTuple> {
        self.supported()
            .filter(|((c, d), _)| (0..self.t.saturating_sub(1)).any(|i| d[i + 1] != d[i] - c[i]))
            .map(|(k, _)| k.clone())
            .collect()
    }

    pub fn holds(&self) -> bool {
        self.violations().is_empty()
    }

    /// Probability that the final counts satisfy `c_t ≥ 1` and every `d_i ≥ 1`.
    pub fn success_weight(&self) -> f64 {
        let t = self.t;
        self.supported()
            .filter(|((c, d), _)| c[t - 1] >= 1 && d.iter().all(|&x| x >= 1))
            .map(|(_, w)| w)
            .sum()
    }
}

/// Joint-system dimensions before and after a run that ends with `c_t ≥ 1`, `d_i ≥ 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionLedger {
    pub n: usize,
    pub t: usize,
    pub l: usize,
    pub s_alg: usize,
    /// Exact values; `None` when they overflow `u128`.
    pub d_initial: Option<u128>,
    pub d_final: Option<u128>,
    pub log2_initial: f64,
    pub log2_final: f64,
    pub log2_ratio: f64,
    pub ratio: f64,
}

/// `D_Initial = dim Sym^ℓ(C^D)^{2t−1}` and
/// `D_Final = dim Sym^ℓ(C^D)^t · dim Sym^{ℓ−1}(C^D)^{t−1} · 2^S` for `D = 2^n − 1`.
pub fn dimension_ledger(n: usize, t: usize, l: usize, s_alg: usize) -> DimensionLedger {
    assert!(n >= 1 && t >= 1 && l >= 1, "dimension ledger needs n, t, ℓ >= 1");
    let d = (1u64 << n) - 1;
    let (l64, t32) = (l as u64, t as u32);
    let full = checked_sym_dim(d, l64);
    let less = checked_sym_dim(d, l64 - 1);
    let d_initial = full.and_then(|f| f.checked_pow(2 * t32 - 1));
    let d_final = (|| {
        let a = full?.checked_pow(t32)?;
        let b = less?.checked_pow(t32 - 1)?;
        let s = 1u128.checked_shl(s_alg as u32).filter(|_| s_alg < 128)?;
        a.checked_mul(b)?.checked_mul(s)
    })();
    let log2_initial = (2 * t - 1) as f64 * log2_sym_dim(d, l64);
    let log2_final = t as f64 * log2_sym_dim(d, l64) + (t - 1) as f64 * log2_sym_dim(d, l64 - 1) + s_alg as f64;
    let ratio = match (d_initial, d_final) {
        (Some(i), Some(f)) => f as f64 / i as f64,
        _ => (log2_final - log2_initial).exp2(),
    };
    DimensionLedger {
        n,
        t,
        l,
        s_alg,
        d_initial,
        d_final,
        log2_initial,
        log2_final,
        log2_ratio: log2_final - log2_initial,
        ratio,
    }
}
