//! The state universe the solver works over.
//!
//! Locations are gathered by closing the initial location under two kinds
//! of control step: firing any transition whose control guard holds (clock
//! guards are irrelevant to which locations can ever matter), and applying
//! any control-assignment that appears on a variable reference in the
//! equation system. Each gathered location carries its full invariant zone.
//! This over-approximates what is reachable in time, which is harmless —
//! fixpoints restrict to how the operators actually consult states, and
//! every consultation stays inside this closure — while keeping the
//! construction cheap and independent of clock constants.
//!
//! `reachable_locations` is the precise end: a forward zone exploration
//! (delay, then edges) of the automaton alone, used to validate that the
//! extrapolation widening preserves discrete reachability.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::fed::Federation;
use crate::mes::{clock_ceilings, LFormula, Mes};
use crate::model::{Location, Model};
use crate::zone::Zone;

use super::{CheckError, StateSet};

#[derive(Clone, Debug)]
pub struct Universe {
    zones: BTreeMap<Location, Zone>,
}

impl Universe {
    /// Close the initial location under control steps. Locations whose
    /// invariant is contradictory carry no states and are skipped.
    pub fn build(model: &Model, mes: &Mes, max_locations: usize) -> Result<Universe, CheckError> {
        // Distinct control-assignment vectors used by variable references.
        let mut sigmas: Vec<Vec<(usize, i64)>> = Vec::new();
        for body in &mes.bodies {
            body.walk(&mut |f| {
                if let LFormula::Var(v) = f {
                    if !v.assignments.is_empty() && !sigmas.contains(&v.assignments) {
                        sigmas.push(v.assignments.clone());
                    }
                }
            });
        }

        let mut zones = BTreeMap::new();
        let mut queue = VecDeque::new();
        let l0 = model.initial_location();
        if let Some(inv) = model.invariant_zone(&l0) {
            zones.insert(l0.clone(), inv);
            queue.push_back(l0);
        }
        while let Some(loc) = queue.pop_front() {
            let mut targets = Vec::new();
            for t in &model.transitions {
                if t.enabled_at(&loc) {
                    targets.push(t.target_of(&loc));
                }
            }
            for sigma in &sigmas {
                let mut jumped = loc.clone();
                for &(c, v) in sigma {
                    jumped.0[c] = v;
                }
                targets.push(jumped);
            }
            for target in targets {
                if zones.contains_key(&target) {
                    continue;
                }
                let Some(inv) = model.invariant_zone(&target) else { continue };
                zones.insert(target.clone(), inv);
                if zones.len() > max_locations {
                    return Err(CheckError::LocationBudget(max_locations));
                }
                queue.push_back(target);
            }
        }
        Ok(Universe { zones })
    }

    pub fn zone(&self, loc: &Location) -> Option<&Zone> {
        self.zones.get(loc)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Location, &Zone)> {
        self.zones.iter()
    }

    pub fn len(&self) -> usize {
        self.zones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zones.is_empty()
    }

    /// Every location with its full invariant zone.
    pub fn full_set(&self) -> StateSet {
        let mut out = StateSet::empty();
        for (loc, zone) in &self.zones {
            out.insert(loc.clone(), Federation::from_zone(zone.clone()));
        }
        out
    }
}

/// Locations reachable by alternating delay and discrete steps, starting
/// from the initial state. With `extrapolate` set, zones are widened to the
/// per-clock ceilings after every step — the classical abstraction — which
/// must not change the answer.
pub fn reachable_locations(
    model: &Model,
    mes: &Mes,
    extrapolate: bool,
    max_locations: usize,
) -> Result<BTreeSet<Location>, CheckError> {
    let k = clock_ceilings(model, mes);
    let widen = |z: Zone| if extrapolate { z.extrapolate(&k) } else { z };

    let mut passed: BTreeMap<Location, Federation> = BTreeMap::new();
    let mut queue: VecDeque<(Location, Zone)> = VecDeque::new();

    let l0 = model.initial_location();
    if let (Some(z0), Some(inv0)) = (model.initial_zone(), model.invariant_zone(&l0)) {
        if let Some(start) = z0.intersect(&inv0) {
            let delayed = start.up().intersect(&inv0).expect("delay keeps the seed");
            queue.push_back((l0, widen(delayed)));
        }
    }

    // Without extrapolation the exploration need not terminate; fail
    // honestly instead of spinning.
    const MAX_STEPS: u64 = 1_000_000;
    let mut steps = 0u64;
    while let Some((loc, zone)) = queue.pop_front() {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(CheckError::ZoneBudget(MAX_STEPS));
        }
        let fed = passed.entry(loc.clone()).or_insert_with(|| Federation::empty(zone.dim()));
        if fed.includes(&Federation::from_zone(zone.clone())) {
            continue;
        }
        *fed = fed.union(&Federation::from_zone(zone.clone()));
        if passed.len() > max_locations {
            return Err(CheckError::LocationBudget(max_locations));
        }
        for (target, landed) in model.discrete_post(&loc, &zone) {
            let inv = model
                .invariant_zone(&target)
                .expect("post already landed inside the invariant");
            let delayed = landed.up().intersect(&inv).expect("delay keeps the landing");
            queue.push_back((target, widen(delayed)));
        }
    }
    Ok(passed.into_keys().collect())
}
