use serde::Serialize;

use crate::error::{Error, Result};

/// `W = (48T)^{-2} − 8tT/√(ℓ−T+1) − 2tℓ/(2^n−1+ℓ)` and its three terms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WFormula {
    /// `(48T)^{-2}`: the extraction guarantee.
    pub extraction: f64,
    /// `8tT/√(ℓ−T+1)`: the symmetric-simulation error.
    pub simulation: f64,
    /// `2tℓ/(2^n−1+ℓ)`: the chance of a bad count from cloning attempts.
    pub cloning: f64,
    pub value: f64,
}

pub fn w_formula(big_t: usize, t: usize, n: usize, l: f64) -> Result<WFormula> {
    let tt = big_t as f64;
    if l <= tt {
        return Err(Error::Precondition(format!("W needs ℓ > T (ℓ={l}, T={big_t})")));
    }
    if big_t == 0 || t == 0 {
        return Err(Error::Precondition("W needs T, t >= 1".into()));
    }
    let extraction = (48.0 * tt).powi(-2);
    let simulation = 8.0 * t as f64 * tt / (l - tt + 1.0).sqrt();
    let cloning = 2.0 * t as f64 * l / ((n as f64).exp2() - 1.0 + l);
    Ok(WFormula {
        extraction,
        simulation,
        cloning,
        value: extraction - simulation - cloning,
    })
}
