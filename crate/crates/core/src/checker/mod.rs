//! Symbolic fixpoint evaluation of equation systems over zones.
//!
//! A state set maps control locations to clock federations. Operator
//! evaluation is entirely backward (time and discrete predecessors), so the
//! classical results on backward analysis of timed automata apply: every
//! set the solver touches is a finite union of zones over the constants of
//! the input, and chains of approximants stabilise. A configurable zone
//! budget turns pathological blow-ups into an honest "inconclusive" answer
//! instead of an out-of-memory stop.

pub mod region;
mod solve;
mod universe;

pub use solve::{check_file, check_str, solve, CheckOptions, CheckOutcome, CheckerFailure, Solution, Stats};
pub use universe::{reachable_locations, Universe};

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::ast::CmpOp;
use crate::bound::Bound;
use crate::fed::Federation;
use crate::mes::{LFormula, MesError};
use crate::model::{Location, Model, ModelError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Valid => write!(f, "valid"),
            Verdict::Invalid => write!(f, "invalid"),
        }
    }
}

#[derive(Debug, Error)]
pub enum CheckError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Mes(#[from] MesError),
    #[error("inconclusive: exceeded the zone budget of {0} (raise --max-zones)")]
    ZoneBudget(u64),
    #[error("inconclusive: exceeded the location budget of {0}")]
    LocationBudget(usize),
    #[error("no initial state: the initial clock constraints contradict the invariant")]
    EmptyInitialState,
}

/// A set of states: locations mapped to non-empty clock federations.
/// Locations bound to the empty federation are simply absent.
#[derive(Clone, Debug, Default)]
pub struct StateSet(pub BTreeMap<Location, Federation>);

impl StateSet {
    pub fn empty() -> StateSet {
        StateSet::default()
    }

    pub fn get(&self, loc: &Location) -> Option<&Federation> {
        self.0.get(loc)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Insert, dropping empty federations to keep the map normalised.
    pub fn insert(&mut self, loc: Location, fed: Federation) {
        if !fed.is_empty() {
            self.0.insert(loc, fed);
        }
    }

    pub fn union_with(&mut self, other: &StateSet) {
        for (loc, fed) in &other.0 {
            match self.0.get_mut(loc) {
                Some(mine) => *mine = mine.union(fed),
                None => {
                    self.0.insert(loc.clone(), fed.clone());
                }
            }
        }
    }

    pub fn intersect(&self, other: &StateSet) -> StateSet {
        let mut out = StateSet::empty();
        for (loc, fed) in &self.0 {
            if let Some(theirs) = other.get(loc) {
                out.insert(loc.clone(), fed.intersect(theirs));
            }
        }
        out
    }

    /// Exact set equality, zone representations aside.
    pub fn set_eq(&self, other: &StateSet) -> bool {
        if self.0.len() != other.0.len() {
            return false;
        }
        self.0.iter().all(|(loc, fed)| {
            other.get(loc).map_or(false, |theirs| fed.set_eq(theirs))
        })
    }

    pub fn includes(&self, other: &StateSet) -> bool {
        other.0.iter().all(|(loc, fed)| {
            self.get(loc).map_or(false, |mine| mine.includes(fed))
        })
    }

    pub fn zone_count(&self) -> u64 {
        self.0.values().map(|f| f.len() as u64).sum()
    }
}

/// Evaluates one formula against an environment of variable approximants.
pub struct Evaluator<'a> {
    pub model: &'a Model,
    pub universe: &'a Universe,
    max_zones: u64,
    nodes: u64,
    zones: u64,
    peak: u64,
}

impl<'a> Evaluator<'a> {
    pub fn new(model: &'a Model, universe: &'a Universe, max_zones: u64) -> Evaluator<'a> {
        Evaluator { model, universe, max_zones, nodes: 0, zones: 0, peak: 0 }
    }

    pub fn counters(&self) -> (u64, u64, u64) {
        (self.nodes, self.zones, self.peak)
    }

    fn charge(&mut self, zones: u64) -> Result<(), CheckError> {
        self.zones += zones;
        self.peak = self.peak.max(zones);
        if self.zones > self.max_zones {
            Err(CheckError::ZoneBudget(self.max_zones))
        } else {
            Ok(())
        }
    }

    /// Evaluate `f` under `env` (current value per variable id). The result
    /// is always a subset of the universe.
    pub fn eval(&mut self, f: &LFormula, env: &[StateSet]) -> Result<StateSet, CheckError> {
        self.nodes += 1;
        let out = match f {
            LFormula::Prop(c, op, v) => {
                let mut out = StateSet::empty();
                for (loc, zone) in self.universe.iter() {
                    if op.eval(loc.0[*c], *v) {
                        out.insert(loc.clone(), Federation::from_zone(zone.clone()));
                    }
                }
                out
            }
            LFormula::Clock(c, op, v) => {
                let mut out = StateSet::empty();
                for (loc, zone) in self.universe.iter() {
                    if let Some(z) = constrain_clock(zone, *c, *op, *v) {
                        out.insert(loc.clone(), Federation::from_zone(z));
                    }
                }
                out
            }
            LFormula::And(parts) => {
                let mut it = parts.iter();
                let first = it.next().expect("conjunction is never empty");
                let mut acc = self.eval(first, env)?;
                for p in it {
                    let next = self.eval(p, env)?;
                    acc = acc.intersect(&next);
                }
                acc
            }
            LFormula::Or(parts) => {
                let mut acc = StateSet::empty();
                for p in parts {
                    let next = self.eval(p, env)?;
                    acc.union_with(&next);
                }
                acc
            }
            LFormula::ForallTime(b) => {
                let t = self.eval(b, env)?;
                self.forall_time(&t)
            }
            LFormula::ExistsTime(b) => {
                let t = self.eval(b, env)?;
                self.exists_time(&t)
            }
            LFormula::ForallTimeRel(r, b) => {
                let rel = self.eval(r, env)?;
                let t = self.eval(b, env)?;
                let mut out = self.exists_time(&rel);
                out.union_with(&self.forall_time(&t));
                out
            }
            LFormula::ExistsTimeRel(r, b) => {
                let rel = self.eval(r, env)?;
                let t = self.eval(b, env)?;
                self.exists_time_rel(&rel, &t)?
            }
            LFormula::AllAct(b) => {
                let s = self.eval(b, env)?;
                self.all_act(&s)
            }
            LFormula::ExistAct(b) => {
                let s = self.eval(b, env)?;
                self.exist_act(&s)
            }
            LFormula::UnableWaitInf => self.divergence_filter(false),
            LFormula::AbleWaitInf => self.divergence_filter(true),
            LFormula::Var(vr) => {
                let mut out = StateSet::empty();
                let sol = &env[vr.var];
                for (loc, zone) in self.universe.iter() {
                    let mut target = loc.clone();
                    for &(c, v) in &vr.assignments {
                        target.0[c] = v;
                    }
                    let Some(fed) = sol.get(&target) else { continue };
                    let jumped = zeroed(fed, &vr.resets).free(&vr.resets);
                    out.insert(loc.clone(), jumped.intersect_zone(zone));
                }
                out
            }
        };
        self.charge(out.zone_count())?;
        Ok(out)
    }

    /// States whose every future within the invariant satisfies `t`:
    /// `inv ∖ down(inv ∖ t)`.
    pub fn forall_time(&self, t: &StateSet) -> StateSet {
        let mut out = StateSet::empty();
        for (loc, zone) in self.universe.iter() {
            let inv = Federation::from_zone(zone.clone());
            let missed = match t.get(loc) {
                Some(fed) => inv.subtract(fed),
                None => inv.clone(),
            };
            if missed.is_empty() {
                out.insert(loc.clone(), inv);
            } else {
                out.insert(loc.clone(), inv.subtract(&missed.down()));
            }
        }
        out
    }

    /// States with some future within the invariant satisfying `t`:
    /// `inv ∩ down(t)`.
    pub fn exists_time(&self, t: &StateSet) -> StateSet {
        let mut out = StateSet::empty();
        for (loc, fed) in &t.0 {
            let Some(zone) = self.universe.zone(loc) else { continue };
            out.insert(loc.clone(), fed.down().intersect_zone(zone));
        }
        out
    }

    /// States with some future satisfying `t` such that every state passed
    /// through on the way satisfies `rel`. Computed as a least fixpoint of
    /// one-zone delay hand-offs; the closure term admits targets sitting on
    /// the open boundary of a `rel` zone.
    pub fn exists_time_rel(
        &mut self,
        rel: &StateSet,
        t: &StateSet,
    ) -> Result<StateSet, CheckError> {
        let mut out = StateSet::empty();
        for (loc, _zone) in self.universe.iter() {
            let Some(t_fed) = t.get(loc) else { continue };
            let rel_fed = match rel.get(loc) {
                Some(f) => f.clone(),
                None => Federation::empty(t_fed.dim()),
            };
            let mut v = t_fed.clone();
            loop {
                let mut grown = v.clone();
                for r in rel_fed.zones() {
                    let r_fed = Federation::from_zone(r.clone());
                    let cl = Federation::from_zone(r.closure());
                    // Delay within r towards states of v in r's closure.
                    grown = grown.union(&v.intersect(&cl).down().intersect(&r_fed));
                    // Hand-off from r onto its boundary points already in v.
                    grown = grown.union(&v.intersect(&r_fed).down().intersect(&cl).intersect(&rel_fed));
                }
                self.charge(grown.len() as u64)?;
                if grown.set_eq(&v) {
                    break;
                }
                v = grown;
            }
            out.insert(loc.clone(), v);
        }
        Ok(out)
    }

    /// States whose every available transition lands in `s`. Available
    /// means: guard satisfied and the reset lands inside the target
    /// invariant. Locations with nothing available satisfy this vacuously.
    pub fn all_act(&self, s: &StateSet) -> StateSet {
        let mut out = StateSet::empty();
        for (loc, zone) in self.universe.iter() {
            let inv = Federation::from_zone(zone.clone());
            let mut bad = Federation::empty(zone.dim());
            for t in self.model.enabled(loc) {
                let Some(gz) = &t.guard_zone else { continue };
                let target = t.target_of(loc);
                let Some(target_inv) = self.universe.zone(&target) else { continue };
                let target_inv = Federation::from_zone(target_inv.clone());
                let missed = match s.get(&target) {
                    Some(fed) => target_inv.subtract(fed),
                    None => target_inv,
                };
                if missed.is_empty() {
                    continue;
                }
                let pre = zeroed(&missed, &t.resets).free(&t.resets).intersect_zone(gz);
                bad = bad.union(&pre);
            }
            out.insert(loc.clone(), inv.subtract(&bad));
        }
        out
    }

    /// States with some available transition landing in `s`.
    pub fn exist_act(&self, s: &StateSet) -> StateSet {
        let mut out = StateSet::empty();
        for (loc, zone) in self.universe.iter() {
            let mut good = Federation::empty(zone.dim());
            for t in self.model.enabled(loc) {
                let Some(gz) = &t.guard_zone else { continue };
                let target = t.target_of(loc);
                let Some(fed) = s.get(&target) else { continue };
                let pre = zeroed(fed, &t.resets).free(&t.resets).intersect_zone(gz);
                good = good.union(&pre);
            }
            out.insert(loc.clone(), good.intersect_zone(zone));
        }
        out
    }

    /// `divergent = true` keeps locations where time can grow unboundedly,
    /// `false` keeps the rest. Divergence is determined by the invariant.
    fn divergence_filter(&self, divergent: bool) -> StateSet {
        let mut out = StateSet::empty();
        for (loc, zone) in self.universe.iter() {
            if self.model.can_time_diverge(loc) == divergent {
                out.insert(loc.clone(), Federation::from_zone(zone.clone()));
            }
        }
        out
    }
}

/// Restrict a federation to valuations where each listed clock is 0.
fn zeroed(fed: &Federation, resets: &[usize]) -> Federation {
    let mut out = fed.clone();
    for &r in resets {
        // x_r <= 0 suffices: x_r >= 0 holds in every zone.
        out = out.constrained(r, 0, Bound::le(0));
    }
    out
}

fn constrain_clock(zone: &crate::zone::Zone, c: usize, op: CmpOp, v: i64) -> Option<crate::zone::Zone> {
    debug_assert!(v >= 0);
    match op {
        CmpOp::Lt => zone.with_constraint(c, 0, Bound::lt(v)),
        CmpOp::Le => zone.with_constraint(c, 0, Bound::le(v)),
        CmpOp::Eq => zone
            .with_constraint(c, 0, Bound::le(v))
            .and_then(|z| z.with_constraint(0, c, Bound::le(-v))),
        CmpOp::Ge => zone.with_constraint(0, c, Bound::le(-v)),
        CmpOp::Gt => zone.with_constraint(0, c, Bound::lt(-v)),
        CmpOp::Ne => unreachable!("clock atoms never use `!=`"),
    }
}
