use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::types::{c, hermitian_eigenvalues, CMat, CVec, DensityOp, Ket, UnitaryOp, C64};
use crate::error::{Error, Result};

/// Reduced density operator on the factors listed in `keep` (in their original order).
pub fn partial_trace(rho: &DensityOp, dims: &[usize], keep: &[usize]) -> Result<DensityOp> {
    Ok(DensityOp::new_unchecked(partial_trace_matrix(
        rho.matrix(),
        dims,
        keep,
    )?))
}

pub fn partial_trace_matrix(m: &CMat, dims: &[usize], keep: &[usize]) -> Result<CMat> {
    let total: usize = dims.iter().product();
    if total != m.nrows() || m.nrows() != m.ncols() {
        return Err(Error::dims(format!(
            "factor dims {:?} multiply to {total}, matrix is {}x{}",
            dims,
            m.nrows(),
            m.ncols()
        )));
    }
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.len() != keep.len() || keep_sorted.iter().any(|&k| k >= dims.len()) {
        return Err(Error::dims(format!(
            "invalid keep set {keep:?} for {} factors",
            dims.len()
        )));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep_sorted.contains(i)).collect();
    // stride of each factor in the big-endian flattening
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let offsets = |factors: &[usize]| -> Vec<usize> {
        let mut out = vec![0usize];
        for &f in factors {
            let mut next = Vec::with_capacity(out.len() * dims[f]);
            for &o in &out {
                for v in 0..dims[f] {
                    next.push(o + v * strides[f]);
                }
            }
            out = next;
        }
        out
    };
    let ko = offsets(&keep_sorted);
    let to = offsets(&traced);
    let d = ko.len();
    let mut out = CMat::zeros(d, d);
    for (i, &oi) in ko.iter().enumerate() {
        for (j, &oj) in ko.iter().enumerate() {
            let mut s = C64::new(0.0, 0.0);
            for &t in &to {
                s += m[(oi + t, oj + t)];
            }
            out[(i, j)] = s;
        }
    }
    // kept factors come out in sorted order; permute if the caller asked for another order
    if keep_sorted != keep {
        let kdims: Vec<usize> = keep_sorted.iter().map(|&k| dims[k]).collect();
        let order: Vec<usize> = keep
            .iter()
            .map(|k| keep_sorted.iter().position(|x| x == k).unwrap())
            .collect();
        let perm = factor_permutation(&kdims, &order);
        let mut p = CMat::zeros(d, d);
        for (i, &pi) in perm.iter().enumerate() {
            for (j, &pj) in perm.iter().enumerate() {
                p[(i, j)] = out[(pi, pj)];
            }
        }
        return Ok(p);
    }
    Ok(out)
}

/// For factors with dimensions `dims`, reordered so that new factor `k` is old factor
/// `order[k]`, returns for every new flat index the old flat index.
fn factor_permutation(dims: &[usize], order: &[usize]) -> Vec<usize> {
    let total: usize = dims.iter().product();
    let new_dims: Vec<usize> = order.iter().map(|&o| dims[o]).collect();
    let mut old_strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        old_strides[i] = old_strides[i + 1] * dims[i + 1];
    }
    (0..total)
        .map(|mut idx| {
            let mut old = 0;
            for k in (0..new_dims.len()).rev() {
                let v = idx % new_dims[k];
                idx /= new_dims[k];
                old += v * old_strides[order[k]];
            }
            old
        })
        .collect()
}

/// Half the trace norm of `rho − sigma`.
pub fn trace_distance(rho: &DensityOp, sigma: &DensityOp) -> Result<f64> {
    trace_distance_matrices(rho.matrix(), sigma.matrix())
}

pub fn trace_distance_matrices(a: &CMat, b: &CMat) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::dims(format!(
            "trace distance of {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let diff = a - b;
    let s: f64 = hermitian_eigenvalues(&diff).iter().map(|l| l.abs()).sum();
    Ok((0.5 * s).clamp(0.0, 1.0))
}

/// Trace distance between two pure states, `sqrt(1 − |⟨a|b⟩|²)`.
pub fn pure_trace_distance(a: &CVec, b: &CVec) -> f64 {
    let ov = a.dotc(b).norm_sqr();
    (1.0 - ov).max(0.0).sqrt()
}

/// Fourier transform over Z_M with entries e^{2πi jk/M}/√M.
pub fn qft_zm(m: usize) -> Result<UnitaryOp> {
    if m < 2 {
        return Err(Error::Precondition(format!("QFT modulus must be at least 2, got {m}")));
    }
    let s = 1.0 / (m as f64).sqrt();
    let mat = CMat::from_fn(m, m, |j, k| {
        C64::from_polar(s, 2.0 * PI * ((j * k) % m) as f64 / m as f64)
    });
    Ok(UnitaryOp::new_unchecked(mat))
}

/// Diagonal `|y⟩ ↦ e^{2πi y/M}|y⟩` on Z_M.
pub fn phase_shift_zm(m: usize) -> UnitaryOp {
    let mut mat = CMat::zeros(m, m);
    for y in 0..m {
        mat[(y, y)] = C64::from_polar(1.0, 2.0 * PI * y as f64 / m as f64);
    }
    UnitaryOp::new_unchecked(mat)
}

/// `|z⟩ ↦ |z + 1 mod M⟩`.
pub fn shift_zm(m: usize) -> UnitaryOp {
    let mut mat = CMat::zeros(m, m);
    for z in 0..m {
        mat[((z + 1) % m, z)] = c(1.0, 0.0);
    }
    UnitaryOp::new_unchecked(mat)
}

/// A function from n-bit strings to Z_M, stored as a table indexed by the string's value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseFunction {
    modulus: u32,
    table: Vec<u32>,
}

impl PhaseFunction {
    pub fn new(modulus: u32, table: Vec<u32>) -> Result<Self> {
        if modulus < 1 {
            return Err(Error::Precondition("phase modulus must be positive".into()));
        }
        if !table.len().is_power_of_two() {
            return Err(Error::dims(format!("phase table length {} is not 2^n", table.len())));
        }
        if let Some(v) = table.iter().find(|&&v| v >= modulus) {
            return Err(Error::InvalidState(format!("phase entry {v} not in Z_{modulus}")));
        }
        Ok(PhaseFunction { modulus, table })
    }

    pub fn zero(modulus: u32, n: usize) -> Self {
        PhaseFunction {
            modulus,
            table: vec![0; 1 << n],
        }
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn get(&self, x: usize) -> u32 {
        self.table[x]
    }

    pub fn negated(&self) -> PhaseFunction {
        let m = self.modulus;
        PhaseFunction {
            modulus: m,
            table: self.table.iter().map(|&v| (m - v) % m).collect(),
        }
    }

    pub fn phase(&self, x: usize) -> C64 {
        C64::from_polar(1.0, 2.0 * PI * self.table[x] as f64 / self.modulus as f64)
    }
}

/// `|x⟩ ↦ e^{2πi F(x)/M}|x⟩`.
pub fn phase_op(f: &PhaseFunction) -> UnitaryOp {
    let d = f.table.len();
    let mut mat = CMat::zeros(d, d);
    for x in 0..d {
        mat[(x, x)] = f.phase(x);
    }
    UnitaryOp::new_unchecked(mat)
}

/// `P = 1 − 2|ψ⟩⟨ψ|`.
pub fn reflection_about(psi: &Ket) -> UnitaryOp {
    let d = psi.dim();
    let a = psi.amplitudes();
    UnitaryOp::new_unchecked(CMat::identity(d, d) - a * a.adjoint() * C64::from(2.0))
}

/// Hadamard on a flag qubit, the reflection controlled on the flag, Hadamard again.
/// Acts on `state ⊗ flag` and maps `|ψ⟩|b⟩ ↦ |ψ⟩|b⊕1⟩` while fixing states orthogonal to `|ψ⟩`.
pub fn controlled_flip_gadget(psi: &Ket) -> UnitaryOp {
    let d = psi.dim();
    let p = reflection_about(psi);
    let h = hadamard();
    let id = CMat::identity(d, d);
    let mut p0 = CMat::zeros(2, 2);
    p0[(0, 0)] = c(1.0, 0.0);
    let mut p1 = CMat::zeros(2, 2);
    p1[(1, 1)] = c(1.0, 0.0);
    let cp = id.kronecker(&p0) + p.matrix().kronecker(&p1);
    let hh = id.kronecker(h.matrix());
    UnitaryOp::new_unchecked(&hh * cp * &hh)
}

/// Classical-function oracle `|x, y⟩ ↦ |x, y ⊕ f(x)⟩` with `f` given as a table of
/// `out_bits`-bit values indexed by the `in_bits`-bit input.
pub fn classical_oracle(in_bits: usize, out_bits: usize, f: &[usize]) -> Result<UnitaryOp> {
    if f.len() != 1 << in_bits {
        return Err(Error::dims(format!(
            "function table has {} entries, expected {}",
            f.len(),
            1 << in_bits
        )));
    }
    let dy = 1usize << out_bits;
    if let Some(v) = f.iter().find(|&&v| v >= dy) {
        return Err(Error::InvalidState(format!(
            "function value {v} does not fit in {out_bits} bits"
        )));
    }
    let d = f.len() * dy;
    let mut mat = CMat::zeros(d, d);
    for (x, &fx) in f.iter().enumerate() {
        for y in 0..dy {
            mat[(x * dy + (y ^ fx), x * dy + y)] = c(1.0, 0.0);
        }
    }
    Ok(UnitaryOp::new_unchecked(mat))
}

/// Success bound for turning ℓ copies into ℓ+1: `dim Sym^ℓ / dim Sym^{ℓ+1} = (ℓ+1)/(D+ℓ)`.
pub fn cloning_bound(d: u64, l: u64) -> f64 {
    assert!(l >= 1, "cloning bound needs at least one copy");
    (l + 1) as f64 / (d + l) as f64
}

/// The ratio `ℓ/(D+ℓ)` as it is usually quoted; smaller than [`cloning_bound`].
pub fn cloning_bound_quoted(d: u64, l: u64) -> f64 {
    l as f64 / (d + l) as f64
}

pub fn hadamard() -> UnitaryOp {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    UnitaryOp::new_unchecked(CMat::from_row_slice(
        2,
        2,
        &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)],
    ))
}

pub fn pauli_x() -> UnitaryOp {
    UnitaryOp::new_unchecked(CMat::from_row_slice(
        2,
        2,
        &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
    ))
}

pub fn t_gate() -> UnitaryOp {
    UnitaryOp::new_unchecked(CMat::from_row_slice(
        2,
        2,
        &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), C64::from_polar(1.0, PI / 4.0)],
    ))
}

/// CNOT with the first qubit as control.
pub fn cnot() -> UnitaryOp {
    permutation_unitary(&[0, 1, 3, 2])
}

pub fn swap_gate() -> UnitaryOp {
    permutation_unitary(&[0, 2, 1, 3])
}

/// Unitary sending basis state `i` to `perm[i]`.
pub fn permutation_unitary(perm: &[usize]) -> UnitaryOp {
    let d = perm.len();
    let mut mat = CMat::zeros(d, d);
    for (i, &p) in perm.iter().enumerate() {
        mat[(p, i)] = c(1.0, 0.0);
    }
    UnitaryOp::new_unchecked(mat)
}

/// Applies a `2^k`-dimensional matrix to the qubits at `targets` of an `nqubits` register
/// stored big-endian (qubit 0 is the most significant bit).
pub fn apply_to_qubits(state: &mut [C64], nqubits: usize, targets: &[usize], gate: &CMat) {
    let k = targets.len();
    debug_assert_eq!(state.len(), 1 << nqubits);
    debug_assert_eq!(gate.nrows(), 1 << k);
    let masks: Vec<usize> = targets.iter().map(|&t| 1usize << (nqubits - 1 - t)).collect();
    let all: usize = masks.iter().fold(0, |a, m| a | m);
    // offsets of the 2^k sub-basis states, first target most significant
    let sub: Vec<usize> = (0..1usize << k)
        .map(|s| {
            (0..k)
                .filter(|&j| s & (1 << (k - 1 - j)) != 0)
                .fold(0usize, |a, j| a | masks[j])
        })
        .collect();
    let dim = 1usize << k;
    let mut buf = vec![C64::new(0.0, 0.0); dim];
    let mut out = vec![C64::new(0.0, 0.0); dim];
    for base in 0..state.len() {
        if base & all != 0 {
            continue;
        }
        for (s, &o) in sub.iter().enumerate() {
            buf[s] = state[base | o];
        }
        for (r, slot) in out.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (s, b) in buf.iter().enumerate() {
                let g = gate[(r, s)];
                if g.re != 0.0 || g.im != 0.0 {
                    acc += g * b;
                }
            }
            *slot = acc;
        }
        for (s, &o) in sub.iter().enumerate() {
            state[base | o] = out[s];
        }
    }
}

/// Applies `u` to factor `k` of a vector over a product of factors with dimensions `dims`.
pub fn apply_to_factor(state: &mut [C64], dims: &[usize], k: usize, u: &CMat) {
    let inner: usize = dims[k + 1..].iter().product();
    let dk = dims[k];
    let outer: usize = dims[..k].iter().product();
    let mut buf = vec![C64::new(0.0, 0.0); dk];
    for o in 0..outer {
        for i in 0..inner {
            for (v, b) in buf.iter_mut().enumerate() {
                *b = state[(o * dk + v) * inner + i];
            }
            for r in 0..dk {
                let mut acc = C64::new(0.0, 0.0);
                for (s, b) in buf.iter().enumerate() {
                    acc += u[(r, s)] * b;
                }
                state[(o * dk + r) * inner + i] = acc;
            }
        }
    }
}

/// Computational-basis probabilities of a pure state grouped by the bits at `qubits`.
pub fn marginal_probabilities(state: &[C64], nqubits: usize, qubits: &[usize]) -> BTreeMap<usize, f64> {
    let mut out = BTreeMap::new();
    for (idx, a) in state.iter().enumerate() {
        let p = a.norm_sqr();
        if p == 0.0 {
            continue;
        }
        let key = qubits
            .iter()
            .fold(0usize, |acc, &q| (acc << 1) | ((idx >> (nqubits - 1 - q)) & 1));
        *out.entry(key).or_insert(0.0) += p;
    }
    out
}
