//! Index-resolved view of the timed automaton underlying a PES file.
//!
//! The parser works with names; everything downstream works with indices.
//! Clock `i` (for `i` in `1..dim`) lives at DBM index `i`, index 0 being the
//! reference clock. Control variables are positions in a location vector.

use thiserror::Error;

use crate::ast::{CmpOp, PesFile};
use crate::bound::Bound;
use crate::fed::Federation;
use crate::zone::Zone;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("unknown clock `{0}`")]
    UnknownClock(String),
    #[error("unknown control `{0}`")]
    UnknownControl(String),
    #[error("`!=` cannot be used in a clock constraint")]
    ClockDisequality,
}

/// A clock comparison `clock ⋈ value` with the clock as a DBM index.
pub type ClockConstraint = (usize, CmpOp, i64);

/// A control-variable valuation; the discrete part of a state.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Location(pub Vec<i64>);

#[derive(Clone, Debug)]
pub struct Invariant {
    /// Control equalities gating the clause.
    pub premise: Vec<(usize, i64)>,
    pub bounds: Vec<ClockConstraint>,
}

impl Invariant {
    pub fn applies_at(&self, loc: &Location) -> bool {
        self.premise.iter().all(|&(c, v)| loc.0[c] == v)
    }
}

#[derive(Clone, Debug)]
pub struct Transition {
    /// Control tests (`==` or `!=`) deciding where the edge is available.
    pub guard: Vec<(usize, CmpOp, i64)>,
    pub clock_guard: Vec<ClockConstraint>,
    /// The clock guard as a zone; `None` when contradictory.
    pub guard_zone: Option<Zone>,
    pub assignments: Vec<(usize, i64)>,
    pub resets: Vec<usize>,
}

impl Transition {
    pub fn enabled_at(&self, loc: &Location) -> bool {
        self.guard.iter().all(|&(c, op, v)| op.eval(loc.0[c], v))
    }

    pub fn target_of(&self, loc: &Location) -> Location {
        let mut out = loc.clone();
        for &(c, v) in &self.assignments {
            out.0[c] = v;
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct Model {
    pub clock_names: Vec<String>,
    pub control_names: Vec<String>,
    pub invariants: Vec<Invariant>,
    pub transitions: Vec<Transition>,
    /// `INITIALLY:` constraints; `None` means all clocks start at zero.
    pub initial_constraints: Option<Vec<ClockConstraint>>,
}

/// Intersect a universe zone with a conjunction of clock constraints.
/// Returns `None` when the conjunction is unsatisfiable.
pub fn zone_of_atoms(dim: usize, atoms: &[ClockConstraint]) -> Option<Zone> {
    let mut z = Zone::universe(dim);
    for &(c, op, v) in atoms {
        z = constrain(z, c, op, v)?;
    }
    Some(z)
}

fn constrain(z: Zone, clock: usize, op: CmpOp, v: i64) -> Option<Zone> {
    debug_assert!(v >= 0 && v <= i32::MAX as i64 / 4);
    match op {
        CmpOp::Lt => z.with_constraint(clock, 0, Bound::lt(v)),
        CmpOp::Le => z.with_constraint(clock, 0, Bound::le(v)),
        CmpOp::Eq => z
            .with_constraint(clock, 0, Bound::le(v))
            .and_then(|z| z.with_constraint(0, clock, Bound::le(-v))),
        CmpOp::Ge => z.with_constraint(0, clock, Bound::le(-v)),
        CmpOp::Gt => z.with_constraint(0, clock, Bound::lt(-v)),
        CmpOp::Ne => unreachable!("clock constraints never use `!=`"),
    }
}

impl Model {
    pub fn from_file(file: &PesFile) -> Result<Model, ModelError> {
        let clock_idx = |name: &str| -> Result<usize, ModelError> {
            file.clocks
                .iter()
                .position(|c| c == name)
                .map(|i| i + 1)
                .ok_or_else(|| ModelError::UnknownClock(name.to_string()))
        };
        let control_idx = |name: &str| -> Result<usize, ModelError> {
            file.controls
                .iter()
                .position(|c| c == name)
                .ok_or_else(|| ModelError::UnknownControl(name.to_string()))
        };
        let clock_atom = |a: &crate::ast::ClockAtom| -> Result<ClockConstraint, ModelError> {
            if a.op == CmpOp::Ne {
                return Err(ModelError::ClockDisequality);
            }
            Ok((clock_idx(&a.clock)?, a.op, a.value))
        };

        let dim = file.clocks.len() + 1;
        let mut invariants = Vec::new();
        for clause in &file.invariants {
            let mut premise = Vec::new();
            for p in &clause.premise {
                premise.push((control_idx(&p.control)?, p.value));
            }
            let bounds = clause
                .bounds
                .iter()
                .map(&clock_atom)
                .collect::<Result<Vec<_>, _>>()?;
            invariants.push(Invariant { premise, bounds });
        }

        let mut transitions = Vec::new();
        for t in &file.transitions {
            let mut guard = Vec::new();
            for g in &t.guard {
                guard.push((control_idx(&g.control)?, g.op, g.value));
            }
            let clock_guard = t
                .clock_guard
                .iter()
                .map(&clock_atom)
                .collect::<Result<Vec<_>, _>>()?;
            let guard_zone = zone_of_atoms(dim, &clock_guard);
            let assignments = t
                .assignments
                .iter()
                .map(|(c, v)| Ok((control_idx(c)?, *v)))
                .collect::<Result<Vec<_>, ModelError>>()?;
            let resets = t
                .resets
                .iter()
                .map(|c| clock_idx(c))
                .collect::<Result<Vec<_>, _>>()?;
            transitions.push(Transition { guard, clock_guard, guard_zone, assignments, resets });
        }

        let initial_constraints = match &file.initially {
            None => None,
            Some(atoms) => Some(
                atoms
                    .iter()
                    .map(&clock_atom)
                    .collect::<Result<Vec<_>, _>>()?,
            ),
        };

        Ok(Model {
            clock_names: file.clocks.clone(),
            control_names: file.controls.clone(),
            invariants,
            transitions,
            initial_constraints,
        })
    }

    /// DBM dimension: one slot per clock plus the reference clock.
    pub fn dim(&self) -> usize {
        self.clock_names.len() + 1
    }

    /// All control variables start at zero.
    pub fn initial_location(&self) -> Location {
        Location(vec![0; self.control_names.len()])
    }

    /// The initial clock zone: every clock starts at zero, further
    /// restricted by the `INITIALLY:` constraints. `None` when the
    /// constraints exclude the origin.
    pub fn initial_zone(&self) -> Option<Zone> {
        let mut z = Zone::zero(self.dim());
        if let Some(atoms) = &self.initial_constraints {
            for &(c, op, v) in atoms {
                z = constrain(z, c, op, v)?;
            }
        }
        Some(z)
    }

    /// Conjunction of all invariant clauses whose premise holds at `loc`.
    /// `None` when the bounds are contradictory there.
    pub fn invariant_zone(&self, loc: &Location) -> Option<Zone> {
        let mut z = Zone::universe(self.dim());
        for inv in &self.invariants {
            if inv.applies_at(loc) {
                for &(c, op, v) in &inv.bounds {
                    z = constrain(z, c, op, v)?;
                }
            }
        }
        Some(z)
    }

    pub fn invariant_fed(&self, loc: &Location) -> Federation {
        match self.invariant_zone(loc) {
            Some(z) => Federation::from_zone(z),
            None => Federation::empty(self.dim()),
        }
    }

    /// Whether time can grow without bound at `loc`: true iff no applicable
    /// invariant clause imposes an upper bound on any clock.
    pub fn can_time_diverge(&self, loc: &Location) -> bool {
        self.invariants.iter().all(|inv| {
            !inv.applies_at(loc)
                || inv
                    .bounds
                    .iter()
                    .all(|&(_, op, _)| !matches!(op, CmpOp::Lt | CmpOp::Le | CmpOp::Eq))
        })
    }

    /// Transitions whose control guard holds at `loc`.
    pub fn enabled<'a>(&'a self, loc: &Location) -> Vec<&'a Transition> {
        self.transitions
            .iter()
            .filter(|t| t.enabled_at(loc))
            .collect()
    }

    /// Discrete successors of `(loc, zone)`: fire every enabled edge, reset
    /// its clocks and land inside the target invariant. Empty results are
    /// dropped.
    pub fn discrete_post(&self, loc: &Location, zone: &Zone) -> Vec<(Location, Zone)> {
        let mut out = Vec::new();
        for t in self.enabled(loc) {
            let Some(gz) = &t.guard_zone else { continue };
            let Some(fired) = zone.intersect(gz) else { continue };
            let reset = fired.reset(&t.resets);
            let target = t.target_of(loc);
            let Some(inv) = self.invariant_zone(&target) else { continue };
            if let Some(landed) = reset.intersect(&inv) {
                out.push((target, landed));
            }
        }
        out
    }

    pub fn fmt_location(&self, loc: &Location) -> String {
        self.control_names
            .iter()
            .zip(&loc.0)
            .map(|(n, v)| format!("{n}={v}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_pes;

    const SRC: &str = r"
#define CPD 2
CLOCKS: {x1,x2}
CONTROL: {p1,p2}
INITIALLY: x1 == 0 && x2 == 0
PREDICATE: {X}
START: X
EQUATIONS: {
1: nu X = p1 == 0
}
INVARIANT:
	p1 == 1 -> x1 <= CPD
	p1 == 1 && p2 == 1 -> x2 <= 1
TRANSITIONS:
	(p1 == 0, x1 >= 1)->(p1 = 1){x1};
	(p1 == 1 && p2 != 1)->(p2 = 1){x2};
";

    fn model() -> Model {
        Model::from_file(&parse_pes(SRC).unwrap()).unwrap()
    }

    #[test]
    fn invariant_selection_by_premise() {
        let m = model();
        let l0 = m.initial_location();
        assert_eq!(m.invariant_zone(&l0), Some(Zone::universe(3)));

        let l1 = Location(vec![1, 0]);
        let z1 = m.invariant_zone(&l1).unwrap();
        assert!(z1.contains_point(&[0, 2, 7]));
        assert!(!z1.contains_point(&[0, 3, 7]));

        let l11 = Location(vec![1, 1]);
        let z11 = m.invariant_zone(&l11).unwrap();
        assert!(z11.contains_point(&[0, 2, 1]));
        assert!(!z11.contains_point(&[0, 2, 2]));
    }

    #[test]
    fn divergence_depends_on_location() {
        let m = model();
        assert!(m.can_time_diverge(&m.initial_location()));
        assert!(!m.can_time_diverge(&Location(vec![1, 0])));
    }

    #[test]
    fn discrete_post_respects_guard_reset_invariant() {
        let m = model();
        let l0 = m.initial_location();
        // From x1 = x2 = 0 the first edge needs x1 >= 1: no successor.
        assert!(m.discrete_post(&l0, &Zone::zero(3)).is_empty());
        // After waiting into x1 = x2 ∈ [0, 5] the edge fires, resets x1 and
        // lands in x1 <= 2.
        let waited = Zone::zero(3).up().with_constraint(1, 0, Bound::le(5)).unwrap();
        let post = m.discrete_post(&l0, &waited);
        assert_eq!(post.len(), 1);
        let (target, z) = &post[0];
        assert_eq!(target, &Location(vec![1, 0]));
        assert!(z.contains_point(&[0, 0, 1]));
        assert!(z.contains_point(&[0, 0, 5]));
        assert!(!z.contains_point(&[0, 1, 0])); // x1 reset below x2
    }

    #[test]
    fn initial_zone_from_constraints() {
        let m = model();
        assert_eq!(m.initial_zone(), Some(Zone::zero(3)));
    }

    #[test]
    fn initial_constraints_must_admit_the_origin() {
        // Consistent bound: still the origin point.
        let relaxed = SRC.replace("INITIALLY: x1 == 0 && x2 == 0", "INITIALLY: x1 <= 3");
        let m = Model::from_file(&parse_pes(&relaxed).unwrap()).unwrap();
        assert_eq!(m.initial_zone(), Some(Zone::zero(3)));

        // Constraint excluding the origin: no initial state.
        let shifted = SRC.replace("INITIALLY: x1 == 0 && x2 == 0", "INITIALLY: x1 == 2");
        let m = Model::from_file(&parse_pes(&shifted).unwrap()).unwrap();
        assert_eq!(m.initial_zone(), None);
    }
}
