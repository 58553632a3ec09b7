use rand::Rng;

use super::report::BoundReport;
use crate::error::{Error, Result};
use crate::qcore::{
    apply_to_factor, copy_state, haar_unitary, pure_trace_distance, split_isometry, sym_dim, CMat, CVec, Ket, C64,
};

/// Largest joint dimension the harness will build.
pub const MAX_JLS_DIM: usize = 1 << 14;

/// `Q` reflection queries on a `D`-dimensional register, interleaved with unitaries on
/// `work ⊗ query`; `unitaries.len() = Q + 1`.
#[derive(Clone, Debug)]
pub struct ReflectionAdversary {
    pub work_dim: usize,
    pub query_dim: usize,
    pub unitaries: Vec<CMat>,
}

impl ReflectionAdversary {
    pub fn haar<R: Rng + ?Sized>(work_dim: usize, query_dim: usize, queries: usize, rng: &mut R) -> Self {
        let d = work_dim * query_dim;
        ReflectionAdversary {
            work_dim,
            query_dim,
            unitaries: (0..=queries).map(|_| haar_unitary(d, rng).into_matrix()).collect(),
        }
    }

    pub fn queries(&self) -> usize {
        self.unitaries.len().saturating_sub(1)
    }
}

fn run(adv: &ReflectionAdversary, copies: &CVec, reflect: &dyn Fn(&mut CVec)) -> CVec {
    let (w, d, s) = (adv.work_dim, adv.query_dim, copies.len());
    let mut start = CVec::zeros(w * d);
    start[0] = C64::new(1.0, 0.0);
    let mut state = start.kronecker(copies);
    let dims = [w * d, s];
    for (k, u) in adv.unitaries.iter().enumerate() {
        if k > 0 {
            reflect(&mut state);
        }
        apply_to_factor(state.as_mut_slice(), &dims, 0, u);
    }
    state
}

/// Exact trace distance between answering with `I − 2|ψ⟩⟨ψ|` and answering with the
/// reflection about `Sym^{ℓ+1}` of (query, stored copies), including the copy register;
/// the bound is `2Q/√(ℓ+1)`.
pub fn jls_check(adv: &ReflectionAdversary, psi: &Ket, l: usize) -> Result<BoundReport> {
    let d = adv.query_dim;
    if psi.dim() != d {
        return Err(Error::dims(format!("state of dimension {}, queries on {d}", psi.dim())));
    }
    let s = sym_dim(d as u64, l as u64) as usize;
    let total = adv.work_dim * d * s;
    if total > MAX_JLS_DIM {
        return Err(Error::budget("reflection harness dimension", total, MAX_JLS_DIM));
    }
    let copies = copy_state(psi.amplitudes().as_slice(), l);
    let a = psi.amplitudes();
    let true_refl = CMat::identity(d, d) - a * a.adjoint() * C64::new(2.0, 0.0);
    let iota = split_isometry(d, l);
    let sym_refl = CMat::identity(d * s, d * s) - &iota * iota.adjoint() * C64::new(2.0, 0.0);
    let w = adv.work_dim;
    let real = run(adv, &copies, &|v: &mut CVec| {
        apply_to_factor(v.as_mut_slice(), &[w, d, s], 1, &true_refl)
    });
    let sim = run(adv, &copies, &|v: &mut CVec| {
        apply_to_factor(v.as_mut_slice(), &[w, d * s], 1, &sym_refl)
    });
    let q = adv.queries();
    Ok(BoundReport::new(
        "jls-reflection",
        pure_trace_distance(&real, &sim),
        2.0 * q as f64 / ((l + 1) as f64).sqrt(),
    )
    .clamped(1.0)
    .param("Q", q)
    .param("D", d)
    .param("l", l)
    .param("work_dim", w))
}
