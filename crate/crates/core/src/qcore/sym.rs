use std::collections::HashMap;

use itertools::Itertools;

use super::types::{CMat, CVec, Ket, C64, TOL};
use crate::error::{Error, Result};

/// `binomial(D+ℓ−1, ℓ)`, the dimension of the symmetric subspace of ℓ copies of C^D.
///
/// Panics if the value does not fit in a `u128`; use [`log2_sym_dim`] for huge arguments.
pub fn sym_dim(d: u64, l: u64) -> u128 {
    checked_sym_dim(d, l).unwrap_or_else(|| panic!("sym_dim({d}, {l}) overflows u128"))
}

pub fn checked_sym_dim(d: u64, l: u64) -> Option<u128> {
    if d == 0 {
        return Some(if l == 0 { 1 } else { 0 });
    }
    binomial(d as u128 + l as u128 - 1, l.min(d - 1) as u128)
}

fn binomial(n: u128, k: u128) -> Option<u128> {
    let mut acc: u128 = 1;
    for i in 1..=k {
        // acc * (n-k+i) is divisible by i at every step
        acc = acc.checked_mul(n - k + i)? / i;
    }
    Some(acc)
}

/// `log2` of [`sym_dim`], computed in floating point without overflow.
pub fn log2_sym_dim(d: u64, l: u64) -> f64 {
    let k = l.min(d.saturating_sub(1));
    let n = (d + l).saturating_sub(1);
    (1..=k).map(|i| ((n - k + i) as f64).log2() - (i as f64).log2()).sum()
}

/// Occupation numbers of a multiset over `D` labels.
pub type Occupation = Vec<u16>;

/// Multisets of size `k` over `D` labels, in lexicographic order of their sorted tuples.
#[derive(Clone, Debug)]
pub struct SymBasis {
    d: usize,
    k: usize,
    items: Vec<Occupation>,
    index: HashMap<Occupation, usize>,
}

impl SymBasis {
    pub fn new(d: usize, k: usize) -> Self {
        let mut items = Vec::new();
        for tuple in (0..d).combinations_with_replacement(k) {
            let mut occ = vec![0u16; d];
            for j in tuple {
                occ[j] += 1;
            }
            items.push(occ);
        }
        if d == 0 && k == 0 {
            items.push(Vec::new());
        }
        let index = items.iter().enumerate().map(|(i, o)| (o.clone(), i)).collect();
        SymBasis { d, k, items, index }
    }

    pub fn single_copy_dim(&self) -> usize {
        self.d
    }

    pub fn copies(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[Occupation] {
        &self.items
    }

    pub fn index_of(&self, occ: &[u16]) -> Option<usize> {
        self.index.get(occ).copied()
    }

    /// The sorted index tuple of the `i`-th multiset.
    pub fn tuple(&self, i: usize) -> Vec<usize> {
        occupation_tuple(&self.items[i])
    }
}

pub fn occupation_tuple(occ: &[u16]) -> Vec<usize> {
    occ.iter()
        .enumerate()
        .flat_map(|(j, &n)| std::iter::repeat_n(j, n as usize))
        .collect()
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// Amplitudes of `|ψ⟩^{⊗k}` in the occupation basis of `Sym^k`.
pub fn copy_state(psi: &[C64], k: usize) -> CVec {
    let basis = SymBasis::new(psi.len(), k);
    let lk = ln_factorial(k);
    CVec::from_iterator(
        basis.len(),
        basis.items().iter().map(|occ| {
            let mut amp = C64::new(1.0, 0.0);
            let mut ln_multi = lk;
            for (j, &n) in occ.iter().enumerate() {
                if n > 0 {
                    amp *= psi[j].powu(n as u32);
                    ln_multi -= ln_factorial(n as usize);
                }
            }
            amp * (0.5 * ln_multi).exp()
        }),
    )
}

/// Isometry `Sym^D_{k+1} → C^D ⊗ Sym^D_k` (the symmetric subspace viewed as one copy and the rest).
///
/// Columns are indexed by `Sym^{k+1}` occupations, rows by `j * dim(Sym^k) + index(m)`.
pub fn split_isometry(d: usize, k: usize) -> CMat {
    let big = SymBasis::new(d, k + 1);
    let small = SymBasis::new(d, k);
    let mut mat = CMat::zeros(d * small.len(), big.len());
    for (col, occ) in big.items().iter().enumerate() {
        for j in 0..d {
            if occ[j] == 0 {
                continue;
            }
            let mut rest = occ.clone();
            rest[j] -= 1;
            let r = small.index_of(&rest).expect("sub-multiset present");
            mat[(j * small.len() + r, col)] = C64::from((occ[j] as f64 / (k + 1) as f64).sqrt());
        }
    }
    mat
}

/// Columns are the normalised symmetric basis vectors of `Sym^k` inside `(C^D)^{⊗k}`.
pub fn sym_embedding(d: usize, k: usize) -> CMat {
    let basis = SymBasis::new(d, k);
    let full = d.pow(k as u32);
    let mut mat = CMat::zeros(full, basis.len());
    for x in 0..full {
        let mut occ = vec![0u16; d];
        let mut y = x;
        for _ in 0..k {
            occ[y % d] += 1;
            y /= d;
        }
        let col = basis.index_of(&occ).expect("occupation present");
        mat[(x, col)] = C64::from(1.0);
    }
    for mut col in mat.column_iter_mut() {
        let n = col.norm();
        col /= C64::from(n);
    }
    mat
}

/// Projector onto the symmetric subspace of `(C^D)^{⊗ℓ}`, built by averaging all `ℓ!`
/// copy-permutation operators. Fails if `D^ℓ` exceeds `budget`.
pub fn sym_projector(d: usize, l: usize, budget: usize) -> Result<CMat> {
    let full = d
        .checked_pow(l as u32)
        .filter(|&f| f <= budget)
        .ok_or_else(|| Error::budget("symmetric projector", d.saturating_pow(l as u32), budget))?;
    let perms: Vec<Vec<usize>> = (0..l).permutations(l).collect();
    let weight = 1.0 / perms.len() as f64;
    let mut mat = CMat::zeros(full, full);
    let mut digits = vec![0usize; l];
    for x in 0..full {
        let mut y = x;
        for slot in digits.iter_mut().rev() {
            *slot = y % d;
            y /= d;
        }
        for p in &perms {
            let target = p.iter().fold(0usize, |acc, &src| acc * d + digits[src]);
            mat[(target, x)] += C64::from(weight);
        }
    }
    Ok(mat)
}

/// Permutation operator on `(C^D)^{⊗ℓ}` moving copy `i` to slot `perm[i]`.
pub fn copy_permutation(d: usize, perm: &[usize]) -> CMat {
    let l = perm.len();
    let full = d.pow(l as u32);
    let mut mat = CMat::zeros(full, full);
    let mut digits = vec![0usize; l];
    let mut out = vec![0usize; l];
    for x in 0..full {
        let mut y = x;
        for slot in digits.iter_mut().rev() {
            *slot = y % d;
            y /= d;
        }
        for (i, &p) in perm.iter().enumerate() {
            out[p] = digits[i];
        }
        let target = out.iter().fold(0usize, |acc, &v| acc * d + v);
        mat[(target, x)] = C64::from(1.0);
    }
    mat
}

/// A state in ⊕_{k ∈ [k_min, k_max]} Sym^k(C^D), stored block by block in the occupation basis.
#[derive(Clone, Debug)]
pub struct SymRegister {
    d: usize,
    k_min: usize,
    blocks: Vec<SymBasis>,
    amps: CVec,
}

impl SymRegister {
    pub fn new(d: usize, k_min: usize, k_max: usize, amps: CVec) -> Result<Self> {
        if d == 0 || k_min > k_max {
            return Err(Error::InvalidState(format!(
                "bad register shape D={d}, k in [{k_min}, {k_max}]"
            )));
        }
        let blocks: Vec<SymBasis> = (k_min..=k_max).map(|k| SymBasis::new(d, k)).collect();
        let total: usize = blocks.iter().map(SymBasis::len).sum();
        if amps.len() != total {
            return Err(Error::dims(format!(
                "register needs {total} amplitudes, got {}",
                amps.len()
            )));
        }
        if (amps.norm() - 1.0).abs() > TOL {
            return Err(Error::InvalidState(format!(
                "register norm {} differs from 1",
                amps.norm()
            )));
        }
        Ok(SymRegister { d, k_min, blocks, amps })
    }

    /// `k` copies of `psi`, inside the window `[k_min, k_max]`.
    pub fn copies(psi: &Ket, k: usize, k_min: usize, k_max: usize) -> Result<Self> {
        if k < k_min || k > k_max {
            return Err(Error::CopyOverflow(format!("{k} copies outside [{k_min}, {k_max}]")));
        }
        let d = psi.dim();
        let blocks: Vec<SymBasis> = (k_min..=k_max).map(|k| SymBasis::new(d, k)).collect();
        let total: usize = blocks.iter().map(SymBasis::len).sum();
        let offset: usize = blocks[..k - k_min].iter().map(SymBasis::len).sum();
        let mut amps = CVec::zeros(total);
        let block = copy_state(psi.amplitudes().as_slice(), k);
        amps.rows_mut(offset, block.len()).copy_from(&block);
        SymRegister::new(d, k_min, k_max, amps)
    }

    pub fn single_copy_dim(&self) -> usize {
        self.d
    }

    pub fn copy_range(&self) -> (usize, usize) {
        (self.k_min, self.k_min + self.blocks.len() - 1)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amps
    }

    pub fn block(&self, k: usize) -> Option<(&SymBasis, CVec)> {
        let (lo, hi) = self.copy_range();
        if k < lo || k > hi {
            return None;
        }
        let offset: usize = self.blocks[..k - lo].iter().map(SymBasis::len).sum();
        let b = &self.blocks[k - lo];
        Some((b, self.amps.rows(offset, b.len()).into_owned()))
    }

    /// Probability of finding exactly `k` copies.
    pub fn copy_count_probability(&self, k: usize) -> f64 {
        self.block(k).map(|(_, v)| v.norm_squared()).unwrap_or(0.0)
    }
}
