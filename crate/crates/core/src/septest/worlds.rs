//! The real oracle and its simulators, all driven by the same [`Adversary`].
//!
//! Every world keeps a sparse map from a classical simulator key to the algorithm's
//! branch vector. The real world has a single unit key; the counting world keys by the
//! signed counters `[C_1..C_t, D_1..D_t]`; the copy worlds key by the occupation numbers
//! of the registers `[S_1..S_t, T_1..T_t]`, each holding copies of one hidden state.

use std::collections::BTreeMap;

use super::adversary::{Adversary, AdversaryStep};
use super::instance::OracleInstance;
use super::oracle::{build_oracle, flip_msb, oracle_block};
use crate::error::{Error, Result};
use crate::qcore::{apply_to_factor, apply_to_qubits, partial_trace_matrix, CMat, CVec, Occupation, C64};

/// Largest algorithm register for which densities are materialised.
pub const MAX_DENSITY_QUBITS: usize = 10;

const PRUNE: f64 = 1e-28;

/// A world the adversary can query.
pub trait QueryWorld {
    type Key: Ord + Clone;

    fn branches(&self) -> &BTreeMap<Self::Key, CVec>;
    fn branches_mut(&mut self) -> &mut BTreeMap<Self::Key, CVec>;
    fn alg_qubits(&self) -> usize;
    fn query(&mut self) -> Result<()>;
}

/// Runs every step of `adv` against `world`.
pub fn run_adversary<W: QueryWorld>(adv: &Adversary, world: &mut W) -> Result<()> {
    if world.alg_qubits() != adv.alg_qubits {
        return Err(Error::dims(format!(
            "adversary on {} qubits, world on {}",
            adv.alg_qubits,
            world.alg_qubits()
        )));
    }
    let nq = adv.alg_qubits;
    for s in &adv.steps {
        match s {
            AdversaryStep::Query => world.query()?,
            AdversaryStep::Gate { targets, matrix } => {
                let full = targets.len() == nq && targets.iter().enumerate().all(|(i, &q)| i == q);
                for v in world.branches_mut().values_mut() {
                    if full {
                        *v = matrix * &*v;
                    } else {
                        apply_to_qubits(v.as_mut_slice(), nq, targets, matrix);
                    }
                }
            }
        }
    }
    Ok(())
}

/// `Σ_k |v_k⟩⟨v_k|` over the branches: what the algorithm alone can see.
pub fn algorithm_density<W: QueryWorld>(world: &W) -> Result<CMat> {
    let nq = world.alg_qubits();
    if nq > MAX_DENSITY_QUBITS {
        return Err(Error::budget("algorithm density qubits", nq, MAX_DENSITY_QUBITS));
    }
    let d = 1usize << nq;
    let mut rho = CMat::zeros(d, d);
    for v in world.branches().values() {
        rho += v * v.adjoint();
    }
    Ok(rho)
}

/// Reduced density of the listed algorithm qubits.
pub fn reduced_density<W: QueryWorld>(world: &W, keep: &[usize]) -> Result<CMat> {
    let rho = algorithm_density(world)?;
    let dims = vec![2; world.alg_qubits()];
    partial_trace_matrix(&rho, &dims, keep)
}

/// Outcome probabilities of measuring the listed algorithm qubits, indexed big-endian.
pub fn measure_qubits<W: QueryWorld>(world: &W, qubits: &[usize]) -> Vec<f64> {
    let nq = world.alg_qubits();
    let mut p = vec![0.0; 1 << qubits.len()];
    for v in world.branches().values() {
        for (idx, a) in v.iter().enumerate() {
            let w = a.norm_sqr();
            if w == 0.0 {
                continue;
            }
            let o = qubits
                .iter()
                .fold(0, |acc, &q| (acc << 1) | ((idx >> (nq - 1 - q)) & 1));
            p[o] += w;
        }
    }
    p
}

/// Total squared norm over all branches; 1 for a well-formed world.
pub fn total_weight<W: QueryWorld>(world: &W) -> f64 {
    world.branches().values().map(|v| v.norm_squared()).sum()
}

/// `sqrt(1 − |⟨a|b⟩|²)` for the joint pure states of two worlds over the same keys.
pub fn joint_trace_distance<W: QueryWorld>(a: &W, b: &W) -> f64 {
    let mut ip = C64::new(0.0, 0.0);
    for (k, va) in a.branches() {
        if let Some(vb) = b.branches().get(k) {
            ip += va.dotc(vb);
        }
    }
    (1.0 - ip.norm_sqr()).max(0.0).sqrt()
}

fn add_into<K: Ord + Clone>(map: &mut BTreeMap<K, CVec>, key: &K, v: CVec) {
    match map.get_mut(key) {
        Some(acc) => *acc += v,
        None => {
            map.insert(key.clone(), v);
        }
    }
}

fn prune<K: Ord>(map: &mut BTreeMap<K, CVec>) {
    map.retain(|_, v| v.norm_squared() > PRUNE);
}

/// Algorithm-register geometry shared by the worlds.
#[derive(Clone, Copy, Debug)]
struct Layout {
    n: usize,
    controls: usize,
    work_dim: usize,
}

impl Layout {
    fn new(inst: &OracleInstance, alg_qubits: usize) -> Result<Self> {
        let arity = inst.arity();
        if alg_qubits < arity {
            return Err(Error::dims(format!(
                "{alg_qubits} algorithm qubits for an oracle on {arity}"
            )));
        }
        Ok(Layout {
            n: inst.n,
            controls: 1 << inst.m,
            work_dim: 1 << (alg_qubits - arity),
        })
    }

    fn dn(&self) -> usize {
        1 << self.n
    }

    fn block(&self) -> usize {
        self.dn() * self.dn() * self.work_dim
    }

    fn slot_dims(&self) -> [usize; 3] {
        [self.dn(), self.dn(), self.work_dim]
    }

    /// Index of slot coordinate `f` and remainder `r` inside a block.
    fn slot_index(&self, slot: usize, f: usize, r: usize) -> usize {
        let (dn, w) = (self.dn(), self.work_dim);
        if slot == 0 {
            f * dn * w + r
        } else {
            ((r / w) * dn + f) * w + r % w
        }
    }

    fn rest(&self) -> usize {
        self.dn() * self.work_dim
    }

    fn get(&self, v: &CVec, slot: usize, f: usize) -> CVec {
        CVec::from_fn(self.rest(), |r, _| v[self.slot_index(slot, f, r)])
    }

    fn put_add(&self, v: &mut CVec, slot: usize, f: usize, comp: &CVec, coef: f64) {
        for r in 0..self.rest() {
            v[self.slot_index(slot, f, r)] += comp[r] * coef;
        }
    }

    fn on_slot(&self, v: &mut CVec, slot: usize, m: &CMat) {
        apply_to_factor(v.as_mut_slice(), &self.slot_dims(), slot, m);
    }

    fn split_blocks(&self, v: &CVec) -> Vec<CVec> {
        let b = self.block();
        (0..self.controls).map(|c| v.rows(c * b, b).into_owned()).collect()
    }

    fn join_blocks(&self, blocks: &[CVec]) -> CVec {
        let b = self.block();
        let mut v = CVec::zeros(b * self.controls);
        for (c, x) in blocks.iter().enumerate() {
            v.rows_mut(c * b, b).copy_from(x);
        }
        v
    }

    /// `X` viewed as a `4^n × 2^w` row-major matrix: returns `u†X`.
    fn project_row(&self, u: &CVec, x: &CVec) -> CVec {
        let w = self.work_dim;
        let mut out = CVec::zeros(w);
        for (r, ur) in u.iter().enumerate() {
            if ur.norm_sqr() == 0.0 {
                continue;
            }
            let uc = ur.conj();
            for k in 0..w {
                out[k] += uc * x[r * w + k];
            }
        }
        out
    }

    fn outer(&self, u: &CVec, row: &CVec) -> CVec {
        let w = self.work_dim;
        CVec::from_fn(u.len() * w, |i, _| u[i / w] * row[i % w])
    }

    fn apply_block(&self, m: &CMat, x: &CVec) -> CVec {
        let w = self.work_dim;
        let d = m.nrows();
        let xm = CMat::from_fn(d, w, |r, k| x[r * w + k]);
        let y = m * xm;
        CVec::from_fn(d * w, |i, _| y[(i / w, i % w)])
    }
}

fn zero_ket(dim: usize) -> CVec {
    let mut v = CVec::zeros(dim);
    v[0] = C64::new(1.0, 0.0);
    v
}

/// Algorithm against the true oracle `O_{Ψ,out}`.
#[derive(Clone, Debug)]
pub struct RealWorld {
    oracle: CMat,
    arity: usize,
    alg_qubits: usize,
    branches: BTreeMap<(), CVec>,
}

impl RealWorld {
    pub fn new(inst: &OracleInstance, adv: &Adversary) -> Result<Self> {
        Layout::new(inst, adv.alg_qubits)?;
        let mut branches = BTreeMap::new();
        branches.insert((), adv.initial.clone());
        Ok(RealWorld {
            oracle: build_oracle(inst)?.into_matrix(),
            arity: inst.arity(),
            alg_qubits: adv.alg_qubits,
            branches,
        })
    }

    pub fn state(&self) -> &CVec {
        &self.branches[&()]
    }
}

impl QueryWorld for RealWorld {
    type Key = ();

    fn branches(&self) -> &BTreeMap<(), CVec> {
        &self.branches
    }

    fn branches_mut(&mut self) -> &mut BTreeMap<(), CVec> {
        &mut self.branches
    }

    fn alg_qubits(&self) -> usize {
        self.alg_qubits
    }

    fn query(&mut self) -> Result<()> {
        let targets: Vec<usize> = (0..self.arity).collect();
        let v = self.branches.get_mut(&()).expect("single branch");
        apply_to_qubits(v.as_mut_slice(), self.alg_qubits, &targets, &self.oracle);
        Ok(())
    }
}

/// Counter key: `[C_1..C_t, D_1..D_t]`.
pub type CountKey = Vec<i32>;

/// Algorithm against the counting oracle: the same swaps, plus signed counters.
#[derive(Clone, Debug)]
pub struct CountingWorld {
    inst: OracleInstance,
    layout: Layout,
    alg_qubits: usize,
    bound: i32,
    branches: BTreeMap<CountKey, CVec>,
}

impl CountingWorld {
    /// Counters live in `[−bound, bound]`; `bound` must cover the planned query count.
    pub fn new(inst: &OracleInstance, adv: &Adversary, bound: usize) -> Result<Self> {
        inst.validate()?;
        let layout = Layout::new(inst, adv.alg_qubits)?;
        let mut branches = BTreeMap::new();
        branches.insert(vec![0; 2 * inst.t], adv.initial.clone());
        Ok(CountingWorld {
            inst: inst.clone(),
            layout,
            alg_qubits: adv.alg_qubits,
            bound: bound as i32,
            branches,
        })
    }

    pub fn t(&self) -> usize {
        self.inst.t
    }

    /// Change of the counters when clause `c` maps its `u` vector to its `v` vector.
    fn delta(&self, c: usize) -> Vec<i32> {
        let t = self.inst.t;
        let mut e = vec![0; 2 * t];
        if c == 0 {
            e[0] += 1;
            e[t] += 1;
        } else {
            e[c - 1] -= 1;
            e[c] += 1;
            e[t + c] += 1;
        }
        e
    }

    fn shifted(&self, key: &CountKey, e: &[i32], sign: i32) -> Result<CountKey> {
        let k: CountKey = key.iter().zip(e).map(|(a, b)| a + sign * b).collect();
        if k.iter().any(|x| x.abs() > self.bound) {
            return Err(Error::CountSaturation(format!("counters {k:?} exceed ±{}", self.bound)));
        }
        Ok(k)
    }
}

impl QueryWorld for CountingWorld {
    type Key = CountKey;

    fn branches(&self) -> &BTreeMap<CountKey, CVec> {
        &self.branches
    }

    fn branches_mut(&mut self) -> &mut BTreeMap<CountKey, CVec> {
        &mut self.branches
    }

    fn alg_qubits(&self) -> usize {
        self.alg_qubits
    }

    fn query(&mut self) -> Result<()> {
        let ly = self.layout;
        let t = self.inst.t;
        let dn = ly.dn();
        let zero = zero_ket(dn);
        let uv: Vec<(CVec, CVec)> = (0..t)
            .map(|c| {
                if c == 0 {
                    (
                        zero.kronecker(&zero),
                        self.inst.psi(1).amplitudes().kronecker(self.inst.phi(1).amplitudes()),
                    )
                } else {
                    (
                        self.inst.psi(c).amplitudes().kronecker(&zero),
                        self.inst
                            .psi(c + 1)
                            .amplitudes()
                            .kronecker(self.inst.phi(c + 1).amplitudes()),
                    )
                }
            })
            .collect();
        let last = oracle_block(&self.inst, t);
        let zeros = CVec::zeros(ly.block());
        let mut out: BTreeMap<CountKey, Vec<CVec>> = BTreeMap::new();
        let slot = |out: &mut BTreeMap<CountKey, Vec<CVec>>, key: &CountKey, c: usize, x: CVec| {
            let e = out
                .entry(key.clone())
                .or_insert_with(|| vec![zeros.clone(); ly.controls]);
            e[c] += x;
        };
        for (key, v) in &self.branches {
            for (c, x) in ly.split_blocks(v).into_iter().enumerate() {
                if c > t {
                    slot(&mut out, key, c, x);
                } else if c == t {
                    slot(&mut out, key, c, ly.apply_block(&last, &x));
                } else {
                    let (u, w) = &uv[c];
                    let ux = ly.project_row(u, &x);
                    let wx = ly.project_row(w, &x);
                    let pu = ly.outer(u, &ux);
                    let pw = ly.outer(w, &wx);
                    let e = self.delta(c);
                    if ux.norm_squared() > PRUNE {
                        slot(&mut out, &self.shifted(key, &e, 1)?, c, ly.outer(w, &ux));
                    }
                    if wx.norm_squared() > PRUNE {
                        slot(&mut out, &self.shifted(key, &e, -1)?, c, ly.outer(u, &wx));
                    }
                    slot(&mut out, key, c, x - pu - pw);
                }
            }
        }
        self.branches = out.into_iter().map(|(k, b)| (k, ly.join_blocks(&b))).collect();
        prune(&mut self.branches);
        Ok(())
    }
}

/// Which membership test the copy simulator uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CopyMode {
    /// Projects onto the hidden state itself.
    Exact,
    /// Projects the query register jointly with the stored copies onto the symmetric
    /// subspace; never consults the hidden state.
    Symmetric,
}

/// Occupation key over the registers `[S_1..S_t, T_1..T_t]`.
pub type CopyKey = Vec<Occupation>;

/// Algorithm against a simulator that hands out and absorbs stored copies.
///
/// Each register is written in a frame whose first column is `|0^n⟩` and second the
/// register's state; label `j` of an occupation corresponds to frame column `j + 1`.
/// In [`CopyMode::Symmetric`] the frame is only a coordinate choice, since every
/// operation is covariant under unitaries fixing `|0^n⟩`.
#[derive(Clone, Debug)]
pub struct CopyWorld {
    inst: OracleInstance,
    layout: Layout,
    mode: CopyMode,
    l: usize,
    window: usize,
    alg_qubits: usize,
    frames: Vec<CMat>,
    frames_adj: Vec<CMat>,
    proj: Vec<CMat>,
    branches: BTreeMap<CopyKey, CVec>,
}

type BlockSet = BTreeMap<CopyKey, CVec>;

/// Orthonormal basis whose first columns are `|0⟩` and `psi`.
fn frame(psi: &CVec) -> CMat {
    let d = psi.len();
    let mut cols: Vec<CVec> = vec![zero_ket(d), psi.clone()];
    for e in 0..d {
        if cols.len() == d {
            break;
        }
        let mut v = CVec::zeros(d);
        v[e] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for c in &cols {
                let p = c.dotc(&v);
                v -= c * p;
            }
        }
        let nv = v.norm();
        if nv > 1e-6 {
            cols.push(v / C64::new(nv, 0.0));
        }
    }
    CMat::from_columns(&cols)
}

impl CopyWorld {
    /// Every register starts with `l` copies; counts must stay within `l ± window`.
    pub fn new(inst: &OracleInstance, adv: &Adversary, l: usize, window: usize, mode: CopyMode) -> Result<Self> {
        inst.validate()?;
        let layout = Layout::new(inst, adv.alg_qubits)?;
        let t = inst.t;
        let states: Vec<&CVec> = (1..=t)
            .map(|i| inst.psi(i).amplitudes())
            .chain((1..=t).map(|i| inst.phi(i).amplitudes()))
            .collect();
        let frames: Vec<CMat> = states.iter().map(|s| frame(s)).collect();
        let frames_adj = frames.iter().map(|f| f.adjoint()).collect();
        let proj = states.iter().map(|s| *s * s.adjoint()).collect();
        let d = (1usize << inst.n) - 1;
        let mut start = vec![0u16; d];
        start[0] = l as u16;
        let mut branches = BTreeMap::new();
        branches.insert(vec![start; 2 * t], adv.initial.clone());
        Ok(CopyWorld {
            inst: inst.clone(),
            layout,
            mode,
            l,
            window,
            alg_qubits: adv.alg_qubits,
            frames,
            frames_adj,
            proj,
            branches,
        })
    }

    pub fn t(&self) -> usize {
        self.inst.t
    }

    pub fn copies(&self) -> usize {
        self.l
    }

    pub fn mode(&self) -> CopyMode {
        self.mode
    }

    fn s(&self, i: usize) -> usize {
        i - 1
    }

    fn tr(&self, i: usize) -> usize {
        self.inst.t + i - 1
    }

    fn zero_proj(&self, set: &BlockSet, slot: usize) -> BlockSet {
        let ly = self.layout;
        set.iter()
            .map(|(k, v)| {
                let mut w = CVec::zeros(v.len());
                ly.put_add(&mut w, slot, 0, &ly.get(v, slot, 0), 1.0);
                (k.clone(), w)
            })
            .collect()
    }

    fn nonzero_part(&self, set: &BlockSet, slot: usize) -> BlockSet {
        let ly = self.layout;
        set.iter()
            .map(|(k, v)| {
                let mut w = v.clone();
                ly.put_add(&mut w, slot, 0, &ly.get(v, slot, 0), -1.0);
                (k.clone(), w)
            })
            .collect()
    }

    /// Moves the (non-`|0⟩` part of the) slot into register `reg`, leaving `|0⟩`.
    fn merge(&self, set: &BlockSet, slot: usize, reg: usize) -> BlockSet {
        let ly = self.layout;
        let mut out = BlockSet::new();
        for (key, v) in set {
            let mut w = v.clone();
            ly.on_slot(&mut w, slot, &self.frames_adj[reg]);
            let k: usize = key[reg].iter().map(|&x| x as usize).sum();
            for f in 1..ly.dn() {
                let comp = ly.get(&w, slot, f);
                if comp.norm_squared() <= PRUNE {
                    continue;
                }
                let j = f - 1;
                let mut nk = key.clone();
                nk[reg][j] += 1;
                let coef = ((key[reg][j] as f64 + 1.0) / (k as f64 + 1.0)).sqrt();
                let mut b = CVec::zeros(v.len());
                ly.put_add(&mut b, slot, 0, &comp, coef);
                add_into(&mut out, &nk, b);
            }
        }
        out
    }

    /// Hands one copy from register `reg` into the slot, which must hold `|0⟩`.
    fn split(&self, set: &BlockSet, slot: usize, reg: usize) -> Result<BlockSet> {
        let ly = self.layout;
        let mut out = BlockSet::new();
        for (key, v) in set {
            let comp = ly.get(v, slot, 0);
            if comp.norm_squared() <= PRUNE {
                continue;
            }
            let k: usize = key[reg].iter().map(|&x| x as usize).sum();
            if k == 0 {
                return Err(Error::CopyOverflow(format!("register {reg} is empty")));
            }
            for (j, &mj) in key[reg].iter().enumerate() {
                if mj == 0 {
                    continue;
                }
                let mut nk = key.clone();
                nk[reg][j] -= 1;
                let mut b = CVec::zeros(v.len());
                ly.put_add(&mut b, slot, j + 1, &comp, (mj as f64 / k as f64).sqrt());
                add_into(&mut out, &nk, b);
            }
        }
        for b in out.values_mut() {
            ly.on_slot(b, slot, &self.frames[reg]);
        }
        Ok(out)
    }

    fn member(&self, set: &BlockSet, slot: usize, reg: usize) -> Result<BlockSet> {
        match self.mode {
            CopyMode::Exact => {
                let ly = self.layout;
                Ok(set
                    .iter()
                    .map(|(k, v)| {
                        let mut w = v.clone();
                        ly.on_slot(&mut w, slot, &self.proj[reg]);
                        (k.clone(), w)
                    })
                    .collect())
            }
            CopyMode::Symmetric => self.split(&self.merge(&self.nonzero_part(set, slot), slot, reg), slot, reg),
        }
    }

    fn flip_b(&self, set: &BlockSet) -> BlockSet {
        let x = flip_msb(self.inst.n);
        set.iter()
            .map(|(k, v)| {
                let mut w = v.clone();
                self.layout.on_slot(&mut w, 1, &x);
                (k.clone(), w)
            })
            .collect()
    }

    /// The clause for control value `c` applied to the blocks `s` of that control.
    fn clause(&self, c: usize, s: &BlockSet) -> Result<BlockSet> {
        let t = self.inst.t;
        if c > t {
            return Ok(s.clone());
        }
        let mut out = s.clone();
        let mut acc = |set: BlockSet, sign: f64| {
            for (k, v) in set {
                add_into(&mut out, &k, v * C64::new(sign, 0.0));
            }
        };
        if c == t {
            if self.inst.out {
                let p = self.member(s, 0, self.s(t))?;
                acc(self.flip_b(&p), 1.0);
                acc(p, -1.0);
            }
            return Ok(out);
        }
        let (pu, pv, fwd, bwd);
        if c == 0 {
            pu = self.zero_proj(&self.zero_proj(s, 0), 1);
            pv = self.member(&self.member(s, 0, self.s(1))?, 1, self.tr(1))?;
            fwd = self.split(&self.split(&pu, 0, self.s(1))?, 1, self.tr(1))?;
            bwd = self.merge(&self.merge(&pv, 1, self.tr(1)), 0, self.s(1));
        } else {
            let i = c;
            pu = self.zero_proj(&self.member(s, 0, self.s(i))?, 1);
            pv = self.member(&self.member(s, 0, self.s(i + 1))?, 1, self.tr(i + 1))?;
            let moved = self.merge(&pu, 0, self.s(i));
            fwd = self.split(&self.split(&moved, 0, self.s(i + 1))?, 1, self.tr(i + 1))?;
            let back = self.merge(&self.merge(&pv, 1, self.tr(i + 1)), 0, self.s(i + 1));
            bwd = self.split(&back, 0, self.s(i))?;
        }
        acc(pu, -1.0);
        acc(pv, -1.0);
        acc(fwd, 1.0);
        acc(bwd, 1.0);
        Ok(out)
    }

    fn check_keys(&self) -> Result<()> {
        let lo = self.l.saturating_sub(self.window);
        let hi = self.l + self.window;
        for key in self.branches.keys() {
            for (r, occ) in key.iter().enumerate() {
                let k: usize = occ.iter().map(|&x| x as usize).sum();
                if k < lo || k > hi {
                    return Err(Error::CopyOverflow(format!(
                        "register {r} holds {k} copies, window [{lo}, {hi}]"
                    )));
                }
                if self.mode == CopyMode::Exact && occ[1..].iter().any(|&x| x != 0) {
                    return Err(Error::Invariant(format!("register {r} left the span of its state")));
                }
            }
        }
        Ok(())
    }

    /// `(copies in S_1..S_t, copies in T_1..T_t)` for a key.
    pub fn copy_counts(key: &CopyKey, t: usize) -> (Vec<usize>, Vec<usize>) {
        let k: Vec<usize> = key.iter().map(|o| o.iter().map(|&x| x as usize).sum()).collect();
        (k[..t].to_vec(), k[t..].to_vec())
    }
}

impl QueryWorld for CopyWorld {
    type Key = CopyKey;

    fn branches(&self) -> &BTreeMap<CopyKey, CVec> {
        &self.branches
    }

    fn branches_mut(&mut self) -> &mut BTreeMap<CopyKey, CVec> {
        &mut self.branches
    }

    fn alg_qubits(&self) -> usize {
        self.alg_qubits
    }

    fn query(&mut self) -> Result<()> {
        let ly = self.layout;
        let mut per_control: Vec<BlockSet> = vec![BlockSet::new(); ly.controls];
        for (key, v) in &self.branches {
            for (c, x) in ly.split_blocks(v).into_iter().enumerate() {
                if x.norm_squared() > PRUNE {
                    per_control[c].insert(key.clone(), x);
                }
            }
        }
        let mut out: BTreeMap<CopyKey, Vec<CVec>> = BTreeMap::new();
        let zeros = CVec::zeros(ly.block());
        for (c, set) in per_control.iter().enumerate() {
            for (k, x) in self.clause(c, set)? {
                let e = out.entry(k).or_insert_with(|| vec![zeros.clone(); ly.controls]);
                e[c] += x;
            }
        }
        self.branches = out.into_iter().map(|(k, b)| (k, ly.join_blocks(&b))).collect();
        prune(&mut self.branches);
        self.check_keys()
    }
}
