use super::instance::{control_width, OracleInstance, SaltedInstance};
use crate::circuit::{Circuit, CircuitBuilder, GateDef, GateSet};
use crate::error::{Error, Result};
use crate::qcore::{permutation_unitary, CMat, CVec, UnitaryOp, C64};

/// Registry name of the oracle gate.
pub const ORACLE: &str = "O";
pub const INC: &str = "INC";
pub const DEC: &str = "DEC";

/// Largest oracle we are willing to build densely (qubits).
pub const MAX_ORACLE_QUBITS: usize = 11;

fn swap_block(u: &CVec, v: &CVec) -> CMat {
    let d = u - v;
    let dim = u.len();
    CMat::identity(dim, dim) - &d * d.adjoint()
}

/// The `2^{2n}`-dimensional block of `O` for control value `c`.
pub fn oracle_block(inst: &OracleInstance, c: usize) -> CMat {
    let n = inst.n;
    let dn = 1usize << n;
    let dim = dn * dn;
    let zero = CVec::from_fn(dn, |i, _| if i == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
    let t = inst.t;
    if c > t {
        return CMat::identity(dim, dim);
    }
    if c == t {
        let p = inst.psi(t).amplitudes() * inst.psi(t).amplitudes().adjoint();
        let id = CMat::identity(dn, dn);
        let xb = if inst.out { flip_msb(n) } else { id.clone() };
        return (&id - &p).kronecker(&id) + p.kronecker(&xb);
    }
    let (u, v) = if c == 0 {
        (
            zero.kronecker(&zero),
            inst.psi(1).amplitudes().kronecker(inst.phi(1).amplitudes()),
        )
    } else {
        (
            inst.psi(c).amplitudes().kronecker(&zero),
            inst.psi(c + 1).amplitudes().kronecker(inst.phi(c + 1).amplitudes()),
        )
    };
    swap_block(&u, &v)
}

/// `X` on the most significant of `n` qubits.
pub(crate) fn flip_msb(n: usize) -> CMat {
    let d = 1usize << n;
    let half = d / 2;
    CMat::from_fn(d, d, |i, j| {
        if i == (j ^ half) {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Dense `O_{Ψ,out}` on `m + 2n` qubits: control, then the two state registers.
pub fn build_oracle(inst: &OracleInstance) -> Result<UnitaryOp> {
    inst.validate()?;
    if inst.arity() > MAX_ORACLE_QUBITS {
        return Err(Error::budget("oracle qubits", inst.arity(), MAX_ORACLE_QUBITS));
    }
    let block = 1usize << (2 * inst.n);
    let dim = 1usize << inst.arity();
    let mut o = CMat::zeros(dim, dim);
    for c in 0..1usize << inst.m {
        let b = oracle_block(inst, c);
        o.view_mut((c * block, c * block), (block, block)).copy_from(&b);
    }
    UnitaryOp::new(o)
}

/// `Σ_x |x⟩⟨x| ⊗ O_{Ψ_x, F(x)}`.
pub fn build_salted_oracle(s: &SaltedInstance) -> Result<UnitaryOp> {
    s.validate()?;
    let first = &s.instances[0];
    let qubits = s.n_salt + first.arity();
    if qubits > MAX_ORACLE_QUBITS {
        return Err(Error::budget("salted oracle qubits", qubits, MAX_ORACLE_QUBITS));
    }
    let block = 1usize << first.arity();
    let mut u = CMat::zeros(block << s.n_salt, block << s.n_salt);
    for (x, inst) in s.instances.iter().enumerate() {
        let o = build_oracle(inst)?;
        u.view_mut((x * block, x * block), (block, block)).copy_from(o.matrix());
    }
    UnitaryOp::new(u)
}

/// `c ↦ c+1 mod (t+1)` on control values `≤ t`, identity above.
pub fn increment(t: usize) -> UnitaryOp {
    let m = control_width(t);
    let perm: Vec<usize> = (0..1usize << m)
        .map(|c| if c <= t { (c + 1) % (t + 1) } else { c })
        .collect();
    permutation_unitary(&perm)
}

/// `G₀ ∪ {O, INC, DEC}` for chain length `t` and oracle arity `arity`.
pub fn algorithm_gate_set(t: usize, arity: usize) -> GateSet {
    let inc = increment(t);
    let dec = inc.dagger();
    GateSet::g0_with(vec![
        GateDef::oracle(ORACLE, arity),
        GateDef::unitary(INC, inc).expect("increment acts on qubits"),
        GateDef::unitary(DEC, dec).expect("decrement acts on qubits"),
    ])
    .expect("algorithm gate set is well formed")
}

/// The low-space algorithm that outputs `out` with certainty.
///
/// One query on `|0⟩|0^n⟩|0^n⟩`, then `t` rounds of: reset the second state register
/// qubit by qubit (Trash then Init), increment the control, query. The result is the
/// most significant qubit of the last second register.
pub fn build_measurement_algorithm(n: usize, t: usize) -> Result<Circuit> {
    measurement_algorithm(0, n, t)
}

/// Same algorithm with an `n_salt`-qubit salt input forwarded to every query.
pub fn build_salted_measurement_algorithm(n_salt: usize, n: usize, t: usize) -> Result<Circuit> {
    measurement_algorithm(n_salt, n, t)
}

fn measurement_algorithm(n_salt: usize, n: usize, t: usize) -> Result<Circuit> {
    if n == 0 || t == 0 {
        return Err(Error::InvalidState("measurement algorithm needs n, t >= 1".into()));
    }
    let m = control_width(t);
    let mut b = CircuitBuilder::new(algorithm_gate_set(t, n_salt + m + 2 * n));
    let salt = b.inputs(n_salt);
    let control = b.ancillas(m);
    let a = b.ancillas(n);
    let mut reg_b = b.ancillas(n);
    let query = |b: &mut CircuitBuilder, reg_b: &[u32]| {
        let targets: Vec<u32> = salt.iter().chain(&control).chain(&a).chain(reg_b).copied().collect();
        b.gate(ORACLE, &targets);
    };
    query(&mut b, &reg_b);
    for _ in 0..t {
        for q in reg_b.iter_mut() {
            b.trash(*q);
            *q = b.init();
        }
        b.gate(INC, &control);
        query(&mut b, &reg_b);
    }
    b.outputs(&[reg_b[0]]);
    b.build()
}
