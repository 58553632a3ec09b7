use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::qcore::{cnot, hadamard, t_gate, UnitaryOp, TOL};

#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    /// A fixed unitary on `arity` qubits; the matrix has dimension `2^arity`.
    Unitary { matrix: UnitaryOp, arity: usize },
    /// Traces out one qubit.
    Trash,
    /// Allocates one fresh qubit in `|0⟩`.
    Init,
    /// A unitary on `arity` qubits, resolved by name when the circuit is run.
    Oracle { arity: usize },
}

impl GateKind {
    pub fn is_unitary(&self) -> bool {
        matches!(self, GateKind::Unitary { .. } | GateKind::Oracle { .. })
    }

    pub fn arity(&self) -> usize {
        match self {
            GateKind::Unitary { arity, .. } | GateKind::Oracle { arity } => *arity,
            GateKind::Trash | GateKind::Init => 1,
        }
    }

    fn same_as(&self, other: &GateKind) -> bool {
        match (self, other) {
            (GateKind::Unitary { matrix: a, arity: x }, GateKind::Unitary { matrix: b, arity: y }) => {
                x == y && a.approx_eq(b, TOL)
            }
            (GateKind::Oracle { arity: x }, GateKind::Oracle { arity: y }) => x == y,
            (GateKind::Trash, GateKind::Trash) | (GateKind::Init, GateKind::Init) => true,
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateDef {
    pub name: String,
    pub kind: GateKind,
    /// Member of the fixed proper universal core.
    pub core: bool,
}

impl GateDef {
    pub fn unitary(name: &str, matrix: UnitaryOp) -> Result<Self> {
        let d = matrix.dim();
        if !d.is_power_of_two() || d < 2 {
            return Err(Error::dims(format!(
                "gate `{name}` has dimension {d}, not 2^k with k >= 1"
            )));
        }
        Ok(GateDef {
            name: name.to_string(),
            kind: GateKind::Unitary {
                arity: d.trailing_zeros() as usize,
                matrix,
            },
            core: false,
        })
    }

    pub fn oracle(name: &str, arity: usize) -> Self {
        GateDef {
            name: name.to_string(),
            kind: GateKind::Oracle { arity },
            core: false,
        }
    }

    fn core(mut self) -> Self {
        self.core = true;
        self
    }
}

/// A finite named gate set, closed under Hermitian transpose for its unitary gates.
#[derive(Clone, Debug, PartialEq)]
pub struct GateSet {
    gates: BTreeMap<String, GateDef>,
}

pub const TRASH: &str = "Trash";
pub const INIT: &str = "Init";

impl GateSet {
    pub fn new(defs: Vec<GateDef>) -> Result<Self> {
        let mut gates = BTreeMap::new();
        for g in defs {
            if let GateKind::Unitary { matrix, arity } = &g.kind {
                if matrix.dim() != 1 << arity {
                    return Err(Error::dims(format!(
                        "gate `{}` declares arity {arity} but has dimension {}",
                        g.name,
                        matrix.dim()
                    )));
                }
            }
            if let GateKind::Oracle { arity } = g.kind {
                if arity == 0 {
                    return Err(Error::InvalidState(format!("oracle `{}` has arity 0", g.name)));
                }
            }
            if gates.contains_key(&g.name) {
                return Err(Error::InvalidState(format!("duplicate gate name `{}`", g.name)));
            }
            gates.insert(g.name.clone(), g);
        }
        let set = GateSet { gates };
        set.check_dagger_closure()?;
        Ok(set)
    }

    fn check_dagger_closure(&self) -> Result<()> {
        for g in self.gates.values() {
            if let GateKind::Unitary { matrix, .. } = &g.kind {
                let dag = matrix.dagger();
                let found = self.gates.values().any(|h| match &h.kind {
                    GateKind::Unitary { matrix: m, .. } => m.approx_eq(&dag, TOL),
                    _ => false,
                });
                if !found {
                    return Err(Error::InvalidState(format!(
                        "gate set is not closed under adjoint: no dagger for `{}`",
                        g.name
                    )));
                }
            }
        }
        Ok(())
    }

    /// The core `{H, T, T†, CNOT, Init, Trash}`.
    pub fn g0() -> GateSet {
        GateSet::new(g0_defs()).expect("core gate set is well formed")
    }

    /// The core plus extra gates.
    pub fn g0_with(extra: Vec<GateDef>) -> Result<GateSet> {
        let mut defs = g0_defs();
        defs.extend(extra);
        GateSet::new(defs)
    }

    pub fn get(&self, name: &str) -> Option<&GateDef> {
        self.gates.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.gates.contains_key(name)
    }

    pub fn gates(&self) -> impl Iterator<Item = &GateDef> {
        self.gates.values()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.gates.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Every gate of `other` is present here under the same name with the same action.
    pub fn includes(&self, other: &GateSet) -> bool {
        other
            .gates
            .values()
            .all(|g| self.gates.get(&g.name).is_some_and(|h| h.kind.same_as(&g.kind)))
    }

    pub fn equivalent(&self, other: &GateSet) -> bool {
        self.len() == other.len() && self.includes(other)
    }
}

fn g0_defs() -> Vec<GateDef> {
    let t = t_gate();
    vec![
        GateDef::unitary("H", hadamard()).unwrap().core(),
        GateDef::unitary("T", t.clone()).unwrap().core(),
        GateDef::unitary("Tdg", t.dagger()).unwrap().core(),
        GateDef::unitary("CNOT", cnot()).unwrap().core(),
        GateDef {
            name: INIT.into(),
            kind: GateKind::Init,
            core: true,
        },
        GateDef {
            name: TRASH.into(),
            kind: GateKind::Trash,
            core: true,
        },
    ]
}
