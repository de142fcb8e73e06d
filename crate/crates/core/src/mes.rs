//! Lowered equation systems.
//!
//! `Mes` is the checker-facing form of the `EQUATIONS:` section: predicate
//! variables and control/clock names become indices, and implications are
//! desugared into disjunctions (the parser guarantees the left-hand side is
//! a conjunction of atoms, so its negation stays a disjunction of atoms —
//! a clock equality negates into the two strict comparisons around it).
//!
//! The checker needs the blocks in dependency order. Distinct block labels
//! referring to each other cyclically are merged when they share a parity;
//! a cyclic dependency between a `mu` and a `nu` block would be a genuinely
//! alternating fixpoint, which this solver does not support.

use thiserror::Error;

use crate::ast::{CmpOp, Formula, Parity, PesFile};
use crate::model::Model;

#[derive(Debug, Error)]
pub enum MesError {
    #[error("unknown predicate variable `{0}`")]
    UnknownVar(String),
    #[error("unknown control `{0}`")]
    UnknownControl(String),
    #[error("unknown clock `{0}`")]
    UnknownClock(String),
    #[error("the left-hand side of `->` must be a conjunction of atoms")]
    BadImplication,
    #[error("blocks {0:?} depend on each other cyclically with mixed parities")]
    AlternatingBlocks(Vec<u32>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LVarRef {
    pub var: usize,
    pub assignments: Vec<(usize, i64)>,
    pub resets: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LFormula {
    Prop(usize, CmpOp, i64),
    Clock(usize, CmpOp, i64),
    And(Vec<LFormula>),
    Or(Vec<LFormula>),
    ForallTime(Box<LFormula>),
    ExistsTime(Box<LFormula>),
    ForallTimeRel(Box<LFormula>, Box<LFormula>),
    ExistsTimeRel(Box<LFormula>, Box<LFormula>),
    AllAct(Box<LFormula>),
    ExistAct(Box<LFormula>),
    UnableWaitInf,
    AbleWaitInf,
    Var(LVarRef),
}

impl LFormula {
    pub fn and(mut parts: Vec<LFormula>) -> LFormula {
        if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            LFormula::And(parts)
        }
    }

    pub fn or(mut parts: Vec<LFormula>) -> LFormula {
        if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            LFormula::Or(parts)
        }
    }

    /// Visit every node, relation formulas included.
    pub fn walk(&self, f: &mut impl FnMut(&LFormula)) {
        f(self);
        match self {
            LFormula::And(parts) | LFormula::Or(parts) => {
                for p in parts {
                    p.walk(f);
                }
            }
            LFormula::ForallTime(b)
            | LFormula::ExistsTime(b)
            | LFormula::AllAct(b)
            | LFormula::ExistAct(b) => b.walk(f),
            LFormula::ForallTimeRel(r, b) | LFormula::ExistsTimeRel(r, b) => {
                r.walk(f);
                b.walk(f);
            }
            _ => {}
        }
    }
}

/// A group of equations solved as one simultaneous fixpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergedBlock {
    pub parity: Parity,
    pub vars: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Mes {
    /// Variable names, indexed by variable id.
    pub vars: Vec<String>,
    pub start: usize,
    /// Defining body per variable id.
    pub bodies: Vec<LFormula>,
    pub parity_of: Vec<Parity>,
    pub block_of: Vec<u32>,
}

impl Mes {
    pub fn from_file(file: &PesFile, model: &Model) -> Result<Mes, MesError> {
        // Variable ids follow definition order across blocks.
        let mut vars = Vec::new();
        for block in &file.blocks {
            for (name, _) in &block.equations {
                vars.push(name.clone());
            }
        }
        let var_idx = |name: &str| -> Result<usize, MesError> {
            vars.iter()
                .position(|v| v == name)
                .ok_or_else(|| MesError::UnknownVar(name.to_string()))
        };
        let start = var_idx(&file.start)?;

        let lower = Lowerer { model, vars: &vars };
        let mut bodies = Vec::new();
        let mut parity_of = Vec::new();
        let mut block_of = Vec::new();
        for block in &file.blocks {
            for (_, body) in &block.equations {
                bodies.push(lower.formula(body)?);
                parity_of.push(block.parity);
                block_of.push(block.id);
            }
        }
        Ok(Mes { vars, start, bodies, parity_of, block_of })
    }

    /// Variable ids referenced by `var`'s body.
    pub fn dependencies(&self, var: usize) -> Vec<usize> {
        let mut deps = Vec::new();
        self.bodies[var].walk(&mut |f| {
            if let LFormula::Var(v) = f {
                if !deps.contains(&v.var) {
                    deps.push(v.var);
                }
            }
        });
        deps
    }

    /// Blocks in evaluation order, dependencies first. Cyclic same-parity
    /// blocks are merged; mixed-parity cycles are rejected.
    pub fn evaluation_order(&self) -> Result<Vec<MergedBlock>, MesError> {
        // Distinct block labels, in declaration order.
        let mut labels: Vec<u32> = Vec::new();
        for &b in &self.block_of {
            if !labels.contains(&b) {
                labels.push(b);
            }
        }
        let label_pos = |l: u32| labels.iter().position(|&x| x == l).unwrap();

        // Edges: block → blocks it depends on.
        let mut edges: Vec<Vec<usize>> = vec![Vec::new(); labels.len()];
        for var in 0..self.vars.len() {
            let from = label_pos(self.block_of[var]);
            for dep in self.dependencies(var) {
                let to = label_pos(self.block_of[dep]);
                if from != to && !edges[from].contains(&to) {
                    edges[from].push(to);
                }
            }
        }

        let sccs = tarjan(labels.len(), &edges);
        let mut out = Vec::new();
        for scc in sccs {
            let parities: Vec<Parity> = scc
                .iter()
                .map(|&b| {
                    let label = labels[b];
                    self.parity_of[self.block_of.iter().position(|&x| x == label).unwrap()]
                })
                .collect();
            if parities.iter().any(|&p| p != parities[0]) {
                return Err(MesError::AlternatingBlocks(
                    scc.iter().map(|&b| labels[b]).collect(),
                ));
            }
            let mut vars = Vec::new();
            for (var, &label) in self.block_of.iter().enumerate() {
                if scc.contains(&label_pos(label)) {
                    vars.push(var);
                }
            }
            out.push(MergedBlock { parity: parities[0], vars });
        }
        Ok(out)
    }
}

/// Tarjan's strongly connected components. SCCs come out with dependencies
/// first: a component is finished only after everything reachable from it.
fn tarjan(n: usize, edges: &[Vec<usize>]) -> Vec<Vec<usize>> {
    struct State<'a> {
        edges: &'a [Vec<usize>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        out: Vec<Vec<usize>>,
    }
    fn visit(s: &mut State, v: usize) {
        s.index[v] = Some(s.next);
        s.low[v] = s.next;
        s.next += 1;
        s.stack.push(v);
        s.on_stack[v] = true;
        for &w in &s.edges[v].to_vec() {
            match s.index[w] {
                None => {
                    visit(s, w);
                    s.low[v] = s.low[v].min(s.low[w]);
                }
                Some(wi) if s.on_stack[w] => s.low[v] = s.low[v].min(wi),
                _ => {}
            }
        }
        if s.low[v] == s.index[v].unwrap() {
            let mut scc = Vec::new();
            loop {
                let w = s.stack.pop().unwrap();
                s.on_stack[w] = false;
                scc.push(w);
                if w == v {
                    break;
                }
            }
            scc.sort_unstable();
            s.out.push(scc);
        }
    }
    let mut s = State {
        edges,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        next: 0,
        out: Vec::new(),
    };
    for v in 0..n {
        if s.index[v].is_none() {
            visit(&mut s, v);
        }
    }
    s.out
}

struct Lowerer<'a> {
    model: &'a Model,
    vars: &'a [String],
}

impl Lowerer<'_> {
    fn control(&self, name: &str) -> Result<usize, MesError> {
        self.model
            .control_names
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| MesError::UnknownControl(name.to_string()))
    }

    fn clock(&self, name: &str) -> Result<usize, MesError> {
        self.model
            .clock_names
            .iter()
            .position(|c| c == name)
            .map(|i| i + 1)
            .ok_or_else(|| MesError::UnknownClock(name.to_string()))
    }

    fn formula(&self, f: &Formula) -> Result<LFormula, MesError> {
        Ok(match f {
            Formula::Prop(a) => LFormula::Prop(self.control(&a.control)?, a.op, a.value),
            Formula::Clock(a) => LFormula::Clock(self.clock(&a.clock)?, a.op, a.value),
            Formula::And(fs) => LFormula::And(
                fs.iter().map(|g| self.formula(g)).collect::<Result<_, _>>()?,
            ),
            Formula::Or(fs) => LFormula::Or(
                fs.iter().map(|g| self.formula(g)).collect::<Result<_, _>>()?,
            ),
            Formula::Implies(lhs, rhs) => {
                let mut parts = self.negated_atoms(lhs)?;
                parts.push(self.formula(rhs)?);
                LFormula::or(parts)
            }
            Formula::ForallTime(b) => LFormula::ForallTime(Box::new(self.formula(b)?)),
            Formula::ExistsTime(b) => LFormula::ExistsTime(Box::new(self.formula(b)?)),
            Formula::ForallTimeRel(r, b) => LFormula::ForallTimeRel(
                Box::new(self.formula(r)?),
                Box::new(self.formula(b)?),
            ),
            Formula::ExistsTimeRel(r, b) => LFormula::ExistsTimeRel(
                Box::new(self.formula(r)?),
                Box::new(self.formula(b)?),
            ),
            Formula::AllAct(b) => LFormula::AllAct(Box::new(self.formula(b)?)),
            Formula::ExistAct(b) => LFormula::ExistAct(Box::new(self.formula(b)?)),
            Formula::UnableWaitInf => LFormula::UnableWaitInf,
            Formula::AbleWaitInf => LFormula::AbleWaitInf,
            Formula::Var(v) => {
                let var = self
                    .vars
                    .iter()
                    .position(|x| x == &v.name)
                    .ok_or_else(|| MesError::UnknownVar(v.name.clone()))?;
                let assignments = v
                    .assignments
                    .iter()
                    .map(|(c, val)| Ok((self.control(c)?, *val)))
                    .collect::<Result<Vec<_>, MesError>>()?;
                let resets = v
                    .resets
                    .iter()
                    .map(|c| self.clock(c))
                    .collect::<Result<Vec<_>, _>>()?;
                LFormula::Var(LVarRef { var, assignments, resets })
            }
        })
    }

    /// Negate a conjunction of atoms into a list of disjuncts.
    fn negated_atoms(&self, f: &Formula) -> Result<Vec<LFormula>, MesError> {
        match f {
            Formula::Prop(a) => Ok(vec![LFormula::Prop(
                self.control(&a.control)?,
                a.op.negated(),
                a.value,
            )]),
            Formula::Clock(a) => {
                let c = self.clock(&a.clock)?;
                Ok(match a.op {
                    CmpOp::Eq => vec![
                        LFormula::Clock(c, CmpOp::Lt, a.value),
                        LFormula::Clock(c, CmpOp::Gt, a.value),
                    ],
                    CmpOp::Ne => return Err(MesError::BadImplication),
                    op => vec![LFormula::Clock(c, op.negated(), a.value)],
                })
            }
            Formula::And(fs) => {
                let mut out = Vec::new();
                for g in fs {
                    out.extend(self.negated_atoms(g)?);
                }
                Ok(out)
            }
            _ => Err(MesError::BadImplication),
        }
    }
}

/// Per-clock maximal constants, indexed like DBM clocks (slot 0 unused).
/// Every comparison site counts: transition guards, invariant bounds, the
/// initial condition and formula atoms. Clocks never compared stay at 0.
pub fn clock_ceilings(model: &Model, mes: &Mes) -> Vec<i64> {
    let mut k = vec![0i64; model.dim()];
    fn bump(k: &mut [i64], c: usize, v: i64) {
        if v > k[c] {
            k[c] = v;
        }
    }
    for t in &model.transitions {
        for &(c, _, v) in &t.clock_guard {
            bump(&mut k, c, v);
        }
    }
    for inv in &model.invariants {
        for &(c, _, v) in &inv.bounds {
            bump(&mut k, c, v);
        }
    }
    if let Some(init) = &model.initial_constraints {
        for &(c, _, v) in init {
            bump(&mut k, c, v);
        }
    }
    for body in &mes.bodies {
        body.walk(&mut |f| {
            if let LFormula::Clock(c, _, v) = f {
                bump(&mut k, *c, *v);
            }
        });
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_pes;

    fn build(src: &str) -> (Model, Mes) {
        let file = parse_pes(src).unwrap();
        let model = Model::from_file(&file).unwrap();
        let mes = Mes::from_file(&file, &model).unwrap();
        (model, mes)
    }

    #[test]
    fn implication_desugars_to_disjunction() {
        let (_, mes) = build(
            r"
CONTROL: {p1}
CLOCKS: {x1}
PREDICATE: {X}
START: X
EQUATIONS: {
1: nu X = (p1 == 0 && x1 == 2) -> X
}
",
        );
        let expected = LFormula::Or(vec![
            LFormula::Prop(0, CmpOp::Ne, 0),
            LFormula::Clock(1, CmpOp::Lt, 2),
            LFormula::Clock(1, CmpOp::Gt, 2),
            LFormula::Var(LVarRef { var: 0, assignments: vec![], resets: vec![] }),
        ]);
        assert_eq!(mes.bodies[0], expected);
    }

    #[test]
    fn blocks_come_out_dependencies_first() {
        let (_, mes) = build(
            r"
CONTROL: {p1}
PREDICATE: {X, X2}
START: X
EQUATIONS: {
1: mu X = X2
2: nu X2 = p1 == 0
}
",
        );
        let order = mes.evaluation_order().unwrap();
        assert_eq!(order.len(), 2);
        // X2's block (no dependencies) first, X's block second.
        assert_eq!(order[0].vars, vec![1]);
        assert_eq!(order[0].parity, Parity::Nu);
        assert_eq!(order[1].vars, vec![0]);
        assert_eq!(order[1].parity, Parity::Mu);
    }

    #[test]
    fn cyclic_same_parity_blocks_merge() {
        let (_, mes) = build(
            r"
CONTROL: {p1}
PREDICATE: {X, X2}
START: X
EQUATIONS: {
1: nu X = X2
2: nu X2 = X
}
",
        );
        let order = mes.evaluation_order().unwrap();
        assert_eq!(order.len(), 1);
        assert_eq!(order[0].vars, vec![0, 1]);
    }

    #[test]
    fn alternating_cycle_is_rejected() {
        let (_, mes) = build(
            r"
CONTROL: {p1}
PREDICATE: {X, X2}
START: X
EQUATIONS: {
1: nu X = X2
2: mu X2 = X
}
",
        );
        assert!(matches!(
            mes.evaluation_order(),
            Err(MesError::AlternatingBlocks(_))
        ));
    }

    #[test]
    fn ceilings_take_the_max_over_every_site()  {
        let (model, mes) = build(
            r"
CLOCKS: {x1,y}
CONTROL: {p}
INITIALLY: x1 == 0 && y == 0
PREDICATE: {X}
START: X
EQUATIONS: {
1: nu X = y >= 1
}
INVARIANT:
	p == 1 -> y <= 26
TRANSITIONS:
	(p == 0, x1 >= 808)->(p = 1){x1};
	(p == 1, y <= 26 && x1 >= 52)->(p = 0);
",
        );
        assert_eq!(clock_ceilings(&model, &mes), vec![0, 808, 26]);
    }

    #[test]
    fn unused_clock_has_ceiling_zero() {
        let (model, mes) = build(
            r"
CLOCKS: {x1,x2}
CONTROL: {p}
PREDICATE: {X}
START: X
EQUATIONS: {
1: nu X = x1 <= 3
}
",
        );
        assert_eq!(clock_ceilings(&model, &mes), vec![0, 3, 0]);
    }
}
