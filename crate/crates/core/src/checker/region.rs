//! Region-graph decision procedure.
//!
//! An independent oracle for small systems: instead of zones it works over
//! the classical Alur–Dill regions, each clock tracked either exactly (an
//! integer value up to its ceiling), as an integer part plus a positive
//! fraction (with the fractional orderings between clocks recorded as
//! ranks), or as "beyond the ceiling". The temporal operators become
//! finite walks over delay chains, so none of the DBM machinery is
//! involved — agreement between this checker and the zone checker is
//! evidence for both.
//!
//! The price is size: region counts explode with clocks and constants, so
//! the oracle refuses systems with more than a few clocks or large
//! ceilings.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::ast::{CmpOp, Parity, PesFile};
use crate::mes::{clock_ceilings, LFormula, Mes, MesError};
use crate::model::{ClockConstraint, Location, Model, ModelError};

use super::Verdict;

pub const MAX_CLOCKS: usize = 4;
pub const MAX_CEILING: i64 = 16;
const MAX_STATES: usize = 500_000;

#[derive(Debug, Error)]
pub enum RegionError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Mes(#[from] MesError),
    #[error("the region oracle handles at most {MAX_CLOCKS} clocks, this system has {0}")]
    TooManyClocks(usize),
    #[error("the region oracle handles constants up to {MAX_CEILING}; clock `{0}` reaches {1}")]
    CeilingTooLarge(String, i64),
    #[error("no initial state: the initial clock constraints contradict the invariant")]
    EmptyInitialState,
    #[error("the region oracle ran out of its state budget ({0})")]
    StateBudget(usize),
}

/// One clock inside a region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum ClockReg {
    /// Exactly the integer value (≤ the clock's ceiling).
    Exact(i64),
    /// Integer part (< ceiling) plus a positive fraction whose ordering
    /// class among the fractional clocks is `rank` (0 = smallest).
    Frac(i64, usize),
    /// Strictly above the ceiling.
    Beyond,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Region(Vec<ClockReg>);

impl Region {
    fn from_point(values: &[i64], k: &[i64]) -> Region {
        Region(
            values
                .iter()
                .enumerate()
                .map(|(i, &v)| if v > k[i + 1] { ClockReg::Beyond } else { ClockReg::Exact(v) })
                .collect(),
        )
    }

    fn satisfies(&self, c: usize, op: CmpOp, val: i64) -> bool {
        match self.0[c - 1] {
            ClockReg::Beyond => matches!(op, CmpOp::Gt | CmpOp::Ge | CmpOp::Ne),
            ClockReg::Exact(ip) => op.eval(ip, val),
            ClockReg::Frac(ip, _) => match op {
                CmpOp::Lt | CmpOp::Le => ip < val,
                CmpOp::Gt | CmpOp::Ge => ip >= val,
                CmpOp::Eq => false,
                CmpOp::Ne => true,
            },
        }
    }

    fn satisfies_all(&self, atoms: &[ClockConstraint]) -> bool {
        atoms.iter().all(|&(c, op, v)| self.satisfies(c, op, v))
    }

    /// Whether time can pass while staying in this region. Regions holding
    /// any exact clock are instantaneous.
    fn is_thick(&self) -> bool {
        !self.0.iter().any(|c| matches!(c, ClockReg::Exact(_)))
    }

    /// All clocks beyond their ceilings: delays stay here forever.
    fn is_absorbing(&self) -> bool {
        self.0.iter().all(|c| matches!(c, ClockReg::Beyond))
    }

    fn reset(&self, clocks: &[usize]) -> Region {
        let mut out = self.0.clone();
        for &c in clocks {
            out[c - 1] = ClockReg::Exact(0);
        }
        normalize_ranks(out)
    }

    /// The region entered immediately after this one as time flows.
    fn delay_successor(&self, k: &[i64]) -> Region {
        if self.is_absorbing() {
            return self.clone();
        }
        let has_exact = self.0.iter().any(|c| matches!(c, ClockReg::Exact(_)));
        let mut out = self.0.clone();
        if has_exact {
            // Exact clocks pick up a fraction, becoming the new smallest
            // fractional class (or passing beyond their ceiling).
            let spawns_class = self
                .0
                .iter()
                .enumerate()
                .any(|(i, c)| matches!(c, ClockReg::Exact(ip) if *ip < k[i + 1]));
            for (i, c) in out.iter_mut().enumerate() {
                *c = match *c {
                    ClockReg::Exact(ip) if ip >= k[i + 1] => ClockReg::Beyond,
                    ClockReg::Exact(ip) => ClockReg::Frac(ip, 0),
                    ClockReg::Frac(ip, r) if spawns_class => ClockReg::Frac(ip, r + 1),
                    other => other,
                };
            }
        } else {
            // The largest fractional class reaches the next integer.
            let max_rank = self
                .0
                .iter()
                .filter_map(|c| match c {
                    ClockReg::Frac(_, r) => Some(*r),
                    _ => None,
                })
                .max()
                .expect("non-absorbing region without exact clocks has fractions");
            for c in out.iter_mut() {
                if let ClockReg::Frac(ip, r) = *c {
                    if r == max_rank {
                        *c = ClockReg::Exact(ip + 1);
                    }
                }
            }
        }
        normalize_ranks(out)
    }
}

/// Remap fractional ranks onto 0..m, preserving order.
fn normalize_ranks(mut parts: Vec<ClockReg>) -> Region {
    let mut ranks: Vec<usize> = parts
        .iter()
        .filter_map(|c| match c {
            ClockReg::Frac(_, r) => Some(*r),
            _ => None,
        })
        .collect();
    ranks.sort_unstable();
    ranks.dedup();
    for c in parts.iter_mut() {
        if let ClockReg::Frac(ip, r) = *c {
            let new = ranks.binary_search(&r).expect("rank present");
            *c = ClockReg::Frac(ip, new);
        }
    }
    Region(parts)
}

type State = (usize, usize); // (location id, region id)

struct RegionChecker<'a> {
    model: &'a Model,
    mes: &'a Mes,
    k: Vec<i64>,
    regions: Vec<Region>,
    region_ids: BTreeMap<Region, usize>,
    succ_cache: Vec<Option<usize>>,
    locs: Vec<Location>,
    loc_ids: BTreeMap<Location, usize>,
    /// The reachable-closure universe of states.
    states: BTreeSet<State>,
    /// Memoised invariant-respecting delay chains.
    chains: BTreeMap<State, Vec<usize>>,
    /// Variable-reference jumps appearing in the system.
    jumps: Vec<(Vec<(usize, i64)>, Vec<usize>)>,
}

impl<'a> RegionChecker<'a> {
    fn intern_region(&mut self, r: Region) -> usize {
        if let Some(&id) = self.region_ids.get(&r) {
            return id;
        }
        let id = self.regions.len();
        self.regions.push(r.clone());
        self.region_ids.insert(r, id);
        self.succ_cache.push(None);
        id
    }

    fn intern_loc(&mut self, l: Location) -> usize {
        if let Some(&id) = self.loc_ids.get(&l) {
            return id;
        }
        let id = self.locs.len();
        self.locs.push(l.clone());
        self.loc_ids.insert(l, id);
        id
    }

    fn successor(&mut self, region: usize) -> usize {
        if let Some(s) = self.succ_cache[region] {
            return s;
        }
        let next = self.regions[region].delay_successor(&self.k);
        let id = self.intern_region(next);
        self.succ_cache[region] = Some(id);
        id
    }

    fn inv_holds(&self, loc: usize, region: usize) -> bool {
        let l = &self.locs[loc];
        let r = &self.regions[region];
        self.model
            .invariants
            .iter()
            .all(|inv| !inv.applies_at(l) || r.satisfies_all(&inv.bounds))
    }

    /// Regions visitable from `state` by pure delay, invariant respected.
    /// Ends at the absorbing region when time can diverge.
    fn chain(&mut self, state: State) -> Vec<usize> {
        if let Some(c) = self.chains.get(&state) {
            return c.clone();
        }
        let (loc, mut cur) = state;
        let mut out = Vec::new();
        loop {
            if !self.inv_holds(loc, cur) {
                break;
            }
            out.push(cur);
            let next = self.successor(cur);
            if next == cur {
                break;
            }
            cur = next;
        }
        self.chains.insert(state, out.clone());
        out
    }

    fn diverges(&mut self, state: State) -> bool {
        let chain = self.chain(state);
        chain
            .last()
            .map_or(false, |&r| self.regions[r].is_absorbing())
    }

    /// Available edges from a state: control guard, clock guard, and the
    /// landing invariant all satisfied. Returns the successor states.
    fn edge_posts(&mut self, state: State) -> Vec<State> {
        let (loc, region) = state;
        let l = self.locs[loc].clone();
        let mut out = Vec::new();
        for t in 0..self.model.transitions.len() {
            let tr = &self.model.transitions[t];
            if !tr.enabled_at(&l) || !self.regions[region].satisfies_all(&tr.clock_guard) {
                continue;
            }
            let target = tr.target_of(&l);
            let post = self.regions[region].reset(&tr.resets);
            let tid = self.intern_loc(target);
            let rid = self.intern_region(post);
            if self.inv_holds(tid, rid) {
                out.push((tid, rid));
            }
        }
        out
    }

    fn var_post(&mut self, state: State, assignments: &[(usize, i64)], resets: &[usize]) -> State {
        let (loc, region) = state;
        let mut target = self.locs[loc].clone();
        for &(c, v) in assignments {
            target.0[c] = v;
        }
        let tid = self.intern_loc(target);
        let rid = self.intern_region(self.regions[region].reset(resets));
        (tid, rid)
    }

    fn build_universe(&mut self, init: State) -> Result<(), RegionError> {
        let mut queue = VecDeque::new();
        self.states.insert(init);
        queue.push_back(init);
        while let Some(state) = queue.pop_front() {
            let mut next = Vec::new();
            for &r in &self.chain(state) {
                next.push((state.0, r));
            }
            next.extend(self.edge_posts(state));
            for i in 0..self.jumps.len() {
                let (assignments, resets) = self.jumps[i].clone();
                let post = self.var_post(state, &assignments, &resets);
                if self.inv_holds(post.0, post.1) {
                    next.push(post);
                }
            }
            for s in next {
                if self.states.insert(s) {
                    if self.states.len() > MAX_STATES {
                        return Err(RegionError::StateBudget(MAX_STATES));
                    }
                    queue.push_back(s);
                }
            }
        }
        Ok(())
    }

    fn eval(&mut self, f: &LFormula, env: &[BTreeSet<State>]) -> BTreeSet<State> {
        let all: Vec<State> = self.states.iter().copied().collect();
        match f {
            LFormula::Prop(c, op, v) => all
                .into_iter()
                .filter(|&(l, _)| op.eval(self.locs[l].0[*c], *v))
                .collect(),
            LFormula::Clock(c, op, v) => all
                .into_iter()
                .filter(|&(_, r)| self.regions[r].satisfies(*c, *op, *v))
                .collect(),
            LFormula::And(parts) => {
                let mut sets = parts.iter().map(|p| self.eval(p, env));
                let first = sets.next().expect("conjunction is never empty");
                sets.fold(first, |acc, s| acc.intersection(&s).copied().collect())
            }
            LFormula::Or(parts) => {
                let mut acc = BTreeSet::new();
                for p in parts {
                    acc.extend(self.eval(p, env));
                }
                acc
            }
            LFormula::ForallTime(b) => {
                let t = self.eval(b, env);
                all.into_iter()
                    .filter(|&(l, r)| self.chain((l, r)).iter().all(|&c| t.contains(&(l, c))))
                    .collect()
            }
            LFormula::ExistsTime(b) => {
                let t = self.eval(b, env);
                all.into_iter()
                    .filter(|&(l, r)| self.chain((l, r)).iter().any(|&c| t.contains(&(l, c))))
                    .collect()
            }
            LFormula::ForallTimeRel(rel, b) => {
                let r = self.eval(rel, env);
                let t = self.eval(b, env);
                all.into_iter()
                    .filter(|&(l, reg)| {
                        let chain = self.chain((l, reg));
                        chain.iter().any(|&c| r.contains(&(l, c)))
                            || chain.iter().all(|&c| t.contains(&(l, c)))
                    })
                    .collect()
            }
            LFormula::ExistsTimeRel(rel, b) => {
                let r = self.eval(rel, env);
                let t = self.eval(b, env);
                all.into_iter()
                    .filter(|&(l, reg)| {
                        for (i, &c) in self.chain((l, reg)).iter().enumerate() {
                            let here = (l, c);
                            // A delay may end here if everything strictly
                            // earlier was in rel; a thick region contains
                            // its own earlier instants.
                            if t.contains(&here)
                                && (i == 0
                                    || !self.regions[c].is_thick()
                                    || r.contains(&here))
                            {
                                return true;
                            }
                            if !r.contains(&here) {
                                return false;
                            }
                        }
                        false
                    })
                    .collect()
            }
            LFormula::AllAct(b) => {
                let s = self.eval(b, env);
                all.into_iter()
                    .filter(|&st| self.edge_posts(st).iter().all(|p| s.contains(p)))
                    .collect()
            }
            LFormula::ExistAct(b) => {
                let s = self.eval(b, env);
                all.into_iter()
                    .filter(|&st| self.edge_posts(st).iter().any(|p| s.contains(p)))
                    .collect()
            }
            LFormula::UnableWaitInf => all.into_iter().filter(|&st| !self.diverges(st)).collect(),
            LFormula::AbleWaitInf => all.into_iter().filter(|&st| self.diverges(st)).collect(),
            LFormula::Var(vr) => {
                let sol = env[vr.var].clone();
                all.into_iter()
                    .filter(|&st| sol.contains(&self.var_post(st, &vr.assignments, &vr.resets)))
                    .collect()
            }
        }
    }

    fn solve(&mut self) -> Result<Vec<BTreeSet<State>>, RegionError> {
        let order = self.mes.evaluation_order()?;
        let mut env: Vec<BTreeSet<State>> = vec![BTreeSet::new(); self.mes.vars.len()];
        for block in order {
            for &v in &block.vars {
                env[v] = match block.parity {
                    Parity::Nu => self.states.clone(),
                    Parity::Mu => BTreeSet::new(),
                };
            }
            loop {
                let mut changed = false;
                for &v in &block.vars {
                    let body = self.mes.bodies[v].clone();
                    let next = self.eval(&body, &env);
                    if next != env[v] {
                        env[v] = next;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
        }
        Ok(env)
    }
}

/// Decide a file by explicit region construction. Refuses systems beyond
/// the oracle's size limits.
pub fn check_file_region(file: &PesFile) -> Result<Verdict, RegionError> {
    let model = Model::from_file(file)?;
    let mes = Mes::from_file(file, &model)?;
    if model.clock_names.len() > MAX_CLOCKS {
        return Err(RegionError::TooManyClocks(model.clock_names.len()));
    }
    let k = clock_ceilings(&model, &mes);
    for (i, name) in model.clock_names.iter().enumerate() {
        if k[i + 1] > MAX_CEILING {
            return Err(RegionError::CeilingTooLarge(name.clone(), k[i + 1]));
        }
    }

    // Every clock starts at zero; the initial constraints may only narrow
    // that point. If they exclude it there is no initial state at all.
    if model.initial_zone().is_none() {
        return Err(RegionError::EmptyInitialState);
    }
    let values = vec![0i64; model.clock_names.len()];

    let mut jumps: Vec<(Vec<(usize, i64)>, Vec<usize>)> = Vec::new();
    for body in &mes.bodies {
        body.walk(&mut |f| {
            if let LFormula::Var(v) = f {
                let j = (v.assignments.clone(), v.resets.clone());
                if !jumps.contains(&j) {
                    jumps.push(j);
                }
            }
        });
    }

    let mut rc = RegionChecker {
        model: &model,
        mes: &mes,
        k: k.clone(),
        regions: Vec::new(),
        region_ids: BTreeMap::new(),
        succ_cache: Vec::new(),
        locs: Vec::new(),
        loc_ids: BTreeMap::new(),
        states: BTreeSet::new(),
        chains: BTreeMap::new(),
        jumps,
    };

    let l0 = rc.intern_loc(model.initial_location());
    let r0 = rc.intern_region(Region::from_point(&values, &k));
    if !rc.inv_holds(l0, r0) {
        return Err(RegionError::EmptyInitialState);
    }
    rc.build_universe((l0, r0))?;
    let env = rc.solve()?;
    if env[mes.start].contains(&(l0, r0)) {
        Ok(Verdict::Valid)
    } else {
        Ok(Verdict::Invalid)
    }
}
