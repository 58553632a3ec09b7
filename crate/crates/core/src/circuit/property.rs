use super::gate::GateSet;
use super::ir::{space_of, time_of, Circuit, StepKind};

#[derive(Clone, Debug, PartialEq)]
pub enum CircuitProperty {
    AllCircuits,
    /// Only unitary gates (including oracle calls) are applied.
    Unitary,
    /// Space at most `S`.
    Space(usize),
    /// Time at most `T`.
    Time(usize),
    /// The reference core is contained in the gate set and every non-unitary gate comes from it.
    Normal(GateSet),
    Intersection(Vec<CircuitProperty>),
}

impl CircuitProperty {
    pub fn normal_g0() -> Self {
        CircuitProperty::Normal(GateSet::g0())
    }
}

pub fn check_property(c: &Circuit, p: &CircuitProperty) -> bool {
    match p {
        CircuitProperty::AllCircuits => true,
        CircuitProperty::Unitary => c
            .steps()
            .iter()
            .all(|s| matches!(c.step_kind(s), StepKind::Unitary | StepKind::Oracle)),
        CircuitProperty::Space(s) => space_of(c) <= *s,
        CircuitProperty::Time(t) => time_of(c) <= *t,
        CircuitProperty::Normal(core) => {
            let gs = c.gate_set();
            gs.includes(core)
                && gs
                    .gates()
                    .filter(|g| !g.kind.is_unitary())
                    .all(|g| core.get(&g.name).is_some_and(|h| h.kind == g.kind))
        }
        CircuitProperty::Intersection(ps) => ps.iter().all(|q| check_property(c, q)),
    }
}
