use rand::Rng;

use super::report::BoundReport;
use crate::error::{Error, Result};
use crate::harness::rng_for;
use crate::qcore::{cloning_bound, cloning_bound_quoted, copy_state, haar_state, split_isometry, CVec, C64};

/// Exact `(Pr[projection succeeds], Pr[clone | success])` for `ℓ` copies of `psi` joined
/// with a maximally mixed register and projected onto `Sym^{ℓ+1}`.
pub fn clone_attempt(psi: &[C64], l: usize) -> (f64, f64) {
    let d = psi.len();
    let copies = copy_state(psi, l);
    let iota = split_isometry(d, l);
    let target = copy_state(psi, l + 1);
    let (mut success, mut fidelity) = (0.0, 0.0);
    for j in 0..d {
        let mut e = CVec::zeros(d);
        e[j] = C64::new(1.0, 0.0);
        let projected = iota.adjoint() * e.kronecker(&copies);
        success += projected.norm_squared() / d as f64;
        fidelity += target.dotc(&projected).norm_sqr() / d as f64;
    }
    (success, fidelity / success)
}

/// Among trials whose projection succeeds, the frequency with which a measurement of
/// `|ψ⟩^{⊗ℓ+1}` also succeeds, against `(ℓ+1)/(D+ℓ) + 3σ`.
pub fn cloning_frequency_check(d: usize, l: usize, trials: usize, seed: u64) -> Result<BoundReport> {
    if d == 0 || l == 0 || trials == 0 {
        return Err(Error::Precondition("cloning check needs D, ℓ, trials >= 1".into()));
    }
    let mut rng = rng_for(seed, 0);
    let (mut projected, mut cloned) = (0usize, 0usize);
    for _ in 0..trials {
        let psi = haar_state(d, &mut rng);
        let (p, f) = clone_attempt(psi.amplitudes().as_slice(), l);
        if rng.random::<f64>() < p {
            projected += 1;
            if rng.random::<f64>() < f {
                cloned += 1;
            }
        }
    }
    let ratio = cloning_bound(d as u64, l as u64);
    let frequency = if projected == 0 {
        0.0
    } else {
        cloned as f64 / projected as f64
    };
    let sigma = (ratio * (1.0 - ratio) / projected.max(1) as f64).sqrt();
    Ok(BoundReport::new("cloning-frequency", frequency, ratio)
        .with_tolerance(3.0 * sigma + 1e-9)
        .param("D", d)
        .param("l", l)
        .param("trials", trials)
        .param("projected", projected)
        .param("cloned", cloned)
        .param("sigma", sigma)
        .param("quoted_ratio", cloning_bound_quoted(d as u64, l as u64))
        .param("seed", seed))
}
