use rand::Rng;
use rand_distr::StandardNormal;

use super::ops::{phase_op, PhaseFunction};
use super::types::{CMat, CVec, Ket, UnitaryOp, C64};

/// Complex standard Gaussian with `E|z|² = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re * s, im * s)
}

/// Haar-random unit vector in C^d.
pub fn haar_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Ket {
    loop {
        let v = CVec::from_fn(d, |_, _| complex_gaussian(rng));
        if let Ok(k) = Ket::normalized(v) {
            return k;
        }
    }
}

/// Haar-random n-qubit state on the orthogonal complement of `|0^n⟩`.
///
/// The `|0^n⟩` amplitude is exactly zero. For `n = 1` the complement is one-dimensional,
/// so the result is `|1⟩` up to a uniformly random phase.
pub fn haar_state_orth0<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Ket {
    let d = 1usize << n;
    loop {
        let mut v = CVec::from_fn(d, |_, _| complex_gaussian(rng));
        v[0] = C64::new(0.0, 0.0);
        if let Ok(k) = Ket::normalized(v) {
            return k;
        }
    }
}

/// Haar-random unitary of dimension `d` (QR of a Ginibre matrix with the phase fix).
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> UnitaryOp {
    let g = CMat::from_fn(d, d, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let ph = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, j)] *= ph;
        }
    }
    UnitaryOp::new_unchecked(q)
}

/// Uniform random function from n-bit strings to Z_M.
pub fn random_phase_function<R: Rng + ?Sized>(modulus: u32, n: usize, rng: &mut R) -> PhaseFunction {
    let table = (0..1usize << n).map(|_| rng.random_range(0..modulus)).collect();
    PhaseFunction::new(modulus, table).expect("entries drawn from Z_M")
}

/// Applies a uniformly random M-valued phase pattern to `base`.
pub fn sample_m_phase_invariant<R: Rng + ?Sized>(base: &Ket, modulus: u32, rng: &mut R) -> Ket {
    assert!(base.dim().is_power_of_two(), "phase patterns act on qubit registers");
    let n = base.dim().trailing_zeros() as usize;
    let f = random_phase_function(modulus.max(1), n, rng);
    phase_op(&f).apply(base).expect("matching dimensions")
}
