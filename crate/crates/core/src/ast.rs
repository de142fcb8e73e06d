//! Abstract syntax for PES files: a timed automaton together with an
//! alternation-free modal equation system over its states.

/// Comparison operators usable in atoms.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn eval(self, lhs: i64, rhs: i64) -> bool {
        match self {
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ne => lhs != rhs,
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Gt => lhs > rhs,
            CmpOp::Ge => lhs >= rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    /// The operator accepting exactly the complementary integers.
    pub fn negated(self) -> CmpOp {
        match self {
            CmpOp::Eq => CmpOp::Ne,
            CmpOp::Ne => CmpOp::Eq,
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Le => CmpOp::Gt,
            CmpOp::Gt => CmpOp::Le,
            CmpOp::Ge => CmpOp::Lt,
        }
    }
}

/// A test on a control (discrete) variable: `control ⋈ value`.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct PropAtom {
    pub control: String,
    pub op: CmpOp,
    pub value: i64,
}

/// A test on a clock against an integer constant: `clock ⋈ value`.
/// `!=` is not part of the clock atom syntax.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct ClockAtom {
    pub clock: String,
    pub op: CmpOp,
    pub value: i64,
}

/// A reference to a predicate variable, optionally under a substitution.
///
/// `X[p1=1, z]{x1}` reads: evaluate `X` after setting control `p1` to 1 and
/// resetting clocks `z` (bracket entry without `=`) and `x1` (brace list).
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct VarRef {
    pub name: String,
    /// Control updates applied before consulting the variable.
    pub assignments: Vec<(String, i64)>,
    /// Clocks reset to zero before consulting the variable.
    pub resets: Vec<String>,
}

impl VarRef {
    pub fn plain(name: impl Into<String>) -> VarRef {
        VarRef { name: name.into(), assignments: Vec::new(), resets: Vec::new() }
    }
}

/// Formulae of the alternation-free timed modal equation system.
///
/// The grammar is negation-free except for the restricted implication form,
/// whose left-hand side must be a conjunction of atoms.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub enum Formula {
    Prop(PropAtom),
    Clock(ClockAtom),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    /// `lhs -> rhs` with `lhs` a conjunction of atoms.
    Implies(Box<Formula>, Box<Formula>),
    /// `\forall time(f)`: f holds after every delay within the invariant.
    ForallTime(Box<Formula>),
    /// `\exists time(f)`: f holds after some delay within the invariant.
    ExistsTime(Box<Formula>),
    /// `\forall time\rel[r](f)`: delay universality released by `r`.
    ForallTimeRel(Box<Formula>, Box<Formula>),
    /// `\exists time\rel[r](f)`: delay existence with prefix constrained
    /// to `r`.
    ExistsTimeRel(Box<Formula>, Box<Formula>),
    /// Every enabled action step lands in the argument.
    AllAct(Box<Formula>),
    /// Some enabled action step lands in the argument.
    ExistAct(Box<Formula>),
    /// Time cannot diverge from the current location.
    UnableWaitInf,
    /// Time can diverge from the current location.
    AbleWaitInf,
    Var(VarRef),
}

impl Formula {
    pub fn and(fs: Vec<Formula>) -> Formula {
        match fs.len() {
            1 => fs.into_iter().next().unwrap(),
            _ => Formula::And(fs),
        }
    }

    pub fn or(fs: Vec<Formula>) -> Formula {
        match fs.len() {
            1 => fs.into_iter().next().unwrap(),
            _ => Formula::Or(fs),
        }
    }

    /// Visit every node of the formula tree.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        match self {
            Formula::And(fs) | Formula::Or(fs) => {
                for g in fs {
                    g.walk(f);
                }
            }
            Formula::Implies(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            Formula::ForallTime(g)
            | Formula::ExistsTime(g)
            | Formula::AllAct(g)
            | Formula::ExistAct(g) => g.walk(f),
            Formula::ForallTimeRel(r, g) | Formula::ExistsTimeRel(r, g) => {
                r.walk(f);
                g.walk(f);
            }
            Formula::Prop(_)
            | Formula::Clock(_)
            | Formula::UnableWaitInf
            | Formula::AbleWaitInf
            | Formula::Var(_) => {}
        }
    }
}

/// Fixpoint parity of an equation block.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Parity {
    /// Least fixpoint.
    Mu,
    /// Greatest fixpoint.
    Nu,
}

impl Parity {
    pub fn keyword(self) -> &'static str {
        match self {
            Parity::Mu => "mu",
            Parity::Nu => "nu",
        }
    }
}

/// One equation block: a set of equations computed under a common fixpoint
/// parity. Equations written under the same numeric label belong to the same
/// block and may be mutually recursive.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EquationBlock {
    pub id: u32,
    pub parity: Parity,
    pub equations: Vec<(String, Formula)>,
}

/// One invariant clause `premise -> bounds`: when the control premise holds
/// at a location, the clock bounds constrain how long the system may stay.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InvariantClause {
    /// Conjunction of control equality tests; empty means "always".
    pub premise: Vec<PropAtom>,
    /// Conjunction of clock bounds enforced while the premise holds.
    pub bounds: Vec<ClockAtom>,
}

/// One transition declaration
/// `(guard, clock-guard)->(assignments){resets};`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TransitionDecl {
    /// Control tests (`==` / `!=`) selecting source locations.
    pub guard: Vec<PropAtom>,
    /// Clock constraints that must hold when firing.
    pub clock_guard: Vec<ClockAtom>,
    /// Control updates applied on firing.
    pub assignments: Vec<(String, i64)>,
    /// Clocks reset to zero on firing.
    pub resets: Vec<String>,
}

/// A parsed PES file, after `#define` expansion and symbol resolution.
///
/// The `defines` list is retained verbatim (in declaration order) so files
/// can be re-emitted, but no constant name survives inside the AST: every
/// value position holds its expanded integer.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PesFile {
    pub defines: Vec<(String, i64)>,
    /// Declared clocks plus any clocks promoted from formula-only use, in
    /// declaration/promotion order.
    pub clocks: Vec<String>,
    pub controls: Vec<String>,
    /// `None` if the INITIALLY section is absent (all clocks start at zero).
    pub initially: Option<Vec<ClockAtom>>,
    pub predicates: Vec<String>,
    pub start: String,
    pub blocks: Vec<EquationBlock>,
    pub invariants: Vec<InvariantClause>,
    pub transitions: Vec<TransitionDecl>,
}

impl PesFile {
    pub fn block_of(&self, var: &str) -> Option<&EquationBlock> {
        self.blocks
            .iter()
            .find(|b| b.equations.iter().any(|(name, _)| name == var))
    }

    pub fn formula_of(&self, var: &str) -> Option<&Formula> {
        self.blocks.iter().find_map(|b| {
            b.equations
                .iter()
                .find(|(name, _)| name == var)
                .map(|(_, f)| f)
        })
    }
}
