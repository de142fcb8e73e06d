//! Parser for PES files.
//!
//! Parsing runs in two phases. The syntactic phase builds raw structures in
//! which identifiers are still unclassified and constant names unexpanded —
//! this keeps the grammar independent of section order, since a formula may
//! mention clocks that are only declared further down the file. The
//! resolution phase then builds symbol tables, expands `#define` constants,
//! classifies every atom as a control or clock test, and validates the file.
//!
//! Two quirks of the format are handled here rather than downstream:
//!
//! * `{f}` is an alternative spelling of `(f)` inside formulae;
//! * clocks that appear only in formulae (specification clocks such as the
//!   `z` of bounded-liveness properties) need not be declared. An identifier
//!   that resolves to nothing, sits in a clock position (left of a clock
//!   comparison, or a reset binding), and begins with `x`, `y` or `z` is
//!   promoted to a fresh clock appended to the clock list.

use std::collections::BTreeMap;

use crate::ast::*;
use crate::lex::{tokenize, ParseError, Section, TokKind, Token};

// ---------------------------------------------------------------------------
// Raw (unresolved) structures
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
enum RawValue {
    Int(i64),
    Name(String, usize),
}

#[derive(Clone, Debug)]
struct RawAtom {
    lhs: String,
    lhs_pos: usize,
    op: CmpOp,
    value: RawValue,
}

#[derive(Clone, Debug)]
enum RawBinding {
    Assign(String, usize, RawValue),
    Reset(String, usize),
}

#[derive(Clone, Debug)]
enum RawFormula {
    Atom(RawAtom),
    And(Vec<RawFormula>),
    Or(Vec<RawFormula>),
    Implies(Box<RawFormula>, Box<RawFormula>),
    ForallTime(Box<RawFormula>),
    ExistsTime(Box<RawFormula>),
    ForallTimeRel(Box<RawFormula>, Box<RawFormula>),
    ExistsTimeRel(Box<RawFormula>, Box<RawFormula>),
    AllAct(Box<RawFormula>),
    ExistAct(Box<RawFormula>),
    UnableWaitInf,
    AbleWaitInf,
    Var {
        name: String,
        pos: usize,
        bindings: Vec<RawBinding>,
        braces: Vec<(String, usize)>,
    },
}

#[derive(Clone, Debug)]
struct RawEquation {
    block_id: u32,
    parity: Parity,
    parity_pos: usize,
    var: String,
    var_pos: usize,
    body: RawFormula,
}

#[derive(Clone, Debug)]
struct RawInvariant {
    premise: Vec<RawAtom>,
    bounds: Vec<RawAtom>,
}

#[derive(Clone, Debug)]
struct RawTransition {
    guard: Vec<RawAtom>,
    clock_guard: Vec<RawAtom>,
    assignments: Vec<(String, usize, RawValue)>,
    resets: Vec<(String, usize)>,
}

#[derive(Default)]
struct RawFile {
    defines: Vec<(String, usize, i64)>,
    clocks: Vec<(String, usize)>,
    controls: Vec<(String, usize)>,
    initially: Option<Vec<RawAtom>>,
    predicates: Vec<(String, usize)>,
    start: Option<(String, usize)>,
    equations: Vec<RawEquation>,
    invariants: Vec<RawInvariant>,
    transitions: Vec<RawTransition>,
    seen_sections: Vec<Section>,
}

// ---------------------------------------------------------------------------
// Syntactic phase
// ---------------------------------------------------------------------------

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Token>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&TokKind> {
        self.toks.get(self.pos).map(|t| &t.kind)
    }

    fn peek2(&self) -> Option<&TokKind> {
        self.toks.get(self.pos + 1).map(|t| &t.kind)
    }

    fn here(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|t| t.span.start)
            .unwrap_or(self.src.len())
    }

    fn err(&self, msg: impl std::fmt::Display) -> ParseError {
        ParseError::at(self.src, self.here(), msg)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, kind: &TokKind) -> bool {
        if self.peek() == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: &TokKind) -> Result<(), ParseError> {
        if self.eat(kind) {
            Ok(())
        } else {
            match self.peek() {
                Some(t) => Err(self.err(format!("expected {kind}, found {t}"))),
                None => Err(self.err(format!("expected {kind}, found end of file"))),
            }
        }
    }

    fn expect_ident(&mut self) -> Result<(String, usize), ParseError> {
        let pos = self.here();
        match self.peek() {
            Some(TokKind::Ident(_)) => {
                let Some(Token { kind: TokKind::Ident(s), .. }) = self.bump() else {
                    unreachable!()
                };
                Ok((s, pos))
            }
            Some(t) => Err(self.err(format!("expected identifier, found {t}"))),
            None => Err(self.err("expected identifier, found end of file")),
        }
    }

    fn expect_int(&mut self) -> Result<i64, ParseError> {
        match self.peek() {
            Some(TokKind::Int(_)) => {
                let Some(Token { kind: TokKind::Int(n), .. }) = self.bump() else {
                    unreachable!()
                };
                Ok(n)
            }
            Some(t) => Err(self.err(format!("expected integer, found {t}"))),
            None => Err(self.err("expected integer, found end of file")),
        }
    }

    fn cmp_op(&mut self) -> Option<CmpOp> {
        let op = match self.peek()? {
            TokKind::EqEq => CmpOp::Eq,
            TokKind::Ne => CmpOp::Ne,
            TokKind::Lt => CmpOp::Lt,
            TokKind::Le => CmpOp::Le,
            TokKind::Gt => CmpOp::Gt,
            TokKind::Ge => CmpOp::Ge,
            _ => return None,
        };
        self.pos += 1;
        Some(op)
    }

    fn value(&mut self) -> Result<RawValue, ParseError> {
        let pos = self.here();
        match self.peek() {
            Some(TokKind::Int(_)) => Ok(RawValue::Int(self.expect_int()?)),
            Some(TokKind::Ident(_)) => {
                let (name, _) = self.expect_ident()?;
                Ok(RawValue::Name(name, pos))
            }
            Some(t) => Err(self.err(format!("expected integer or constant name, found {t}"))),
            None => Err(self.err("expected integer or constant name, found end of file")),
        }
    }

    /// `ident ⋈ value`
    fn atom(&mut self) -> Result<RawAtom, ParseError> {
        let (lhs, lhs_pos) = self.expect_ident()?;
        let op = self
            .cmp_op()
            .ok_or_else(|| self.err("expected comparison operator"))?;
        let value = self.value()?;
        Ok(RawAtom { lhs, lhs_pos, op, value })
    }

    /// `atom && atom && ...`
    fn atom_conj(&mut self) -> Result<Vec<RawAtom>, ParseError> {
        let mut atoms = vec![self.atom()?];
        while self.eat(&TokKind::AndAnd) {
            atoms.push(self.atom()?);
        }
        Ok(atoms)
    }

    // -- Formulae ----------------------------------------------------------

    fn formula(&mut self) -> Result<RawFormula, ParseError> {
        let lhs = self.formula_or()?;
        if self.eat(&TokKind::Arrow) {
            let rhs = self.formula()?;
            Ok(RawFormula::Implies(Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn formula_or(&mut self) -> Result<RawFormula, ParseError> {
        let first = self.formula_and()?;
        if self.peek() != Some(&TokKind::OrOr) {
            return Ok(first);
        }
        let mut parts = vec![first];
        while self.eat(&TokKind::OrOr) {
            parts.push(self.formula_and()?);
        }
        Ok(RawFormula::Or(parts))
    }

    fn formula_and(&mut self) -> Result<RawFormula, ParseError> {
        let first = self.formula_unary()?;
        if self.peek() != Some(&TokKind::AndAnd) {
            return Ok(first);
        }
        let mut parts = vec![first];
        while self.eat(&TokKind::AndAnd) {
            parts.push(self.formula_unary()?);
        }
        Ok(RawFormula::And(parts))
    }

    fn formula_unary(&mut self) -> Result<RawFormula, ParseError> {
        match self.peek() {
            Some(TokKind::LParen) => {
                self.pos += 1;
                let f = self.formula()?;
                self.expect(&TokKind::RParen)?;
                Ok(f)
            }
            Some(TokKind::LBrace) => {
                // `{f}` is an alternative grouping for `(f)`.
                self.pos += 1;
                let f = self.formula()?;
                self.expect(&TokKind::RBrace)?;
                Ok(f)
            }
            Some(TokKind::Forall) => {
                self.pos += 1;
                self.time_keyword()?;
                if self.eat(&TokKind::Rel) {
                    let (rel, body) = self.rel_args()?;
                    Ok(RawFormula::ForallTimeRel(Box::new(rel), Box::new(body)))
                } else {
                    Ok(RawFormula::ForallTime(Box::new(self.paren_formula()?)))
                }
            }
            Some(TokKind::Exists) => {
                self.pos += 1;
                self.time_keyword()?;
                if self.eat(&TokKind::Rel) {
                    let (rel, body) = self.rel_args()?;
                    Ok(RawFormula::ExistsTimeRel(Box::new(rel), Box::new(body)))
                } else {
                    Ok(RawFormula::ExistsTime(Box::new(self.paren_formula()?)))
                }
            }
            Some(TokKind::AllAct) => {
                self.pos += 1;
                Ok(RawFormula::AllAct(Box::new(self.paren_formula()?)))
            }
            Some(TokKind::ExistAct) => {
                self.pos += 1;
                Ok(RawFormula::ExistAct(Box::new(self.paren_formula()?)))
            }
            Some(TokKind::Ident(name)) => match name.as_str() {
                "UnableWaitInf" => {
                    self.pos += 1;
                    Ok(RawFormula::UnableWaitInf)
                }
                "AbleWaitInf" => {
                    self.pos += 1;
                    Ok(RawFormula::AbleWaitInf)
                }
                _ => {
                    // Either an atom `ident ⋈ value` or a variable reference
                    // with optional bindings.
                    if matches!(
                        self.peek2(),
                        Some(
                            TokKind::EqEq
                                | TokKind::Ne
                                | TokKind::Lt
                                | TokKind::Le
                                | TokKind::Gt
                                | TokKind::Ge
                        )
                    ) {
                        Ok(RawFormula::Atom(self.atom()?))
                    } else {
                        self.var_ref()
                    }
                }
            },
            Some(t) => Err(self.err(format!("expected formula, found {t}"))),
            None => Err(self.err("expected formula, found end of file")),
        }
    }

    fn time_keyword(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some(TokKind::Ident(s)) if s == "time" => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err("expected `time` after quantifier")),
        }
    }

    fn paren_formula(&mut self) -> Result<RawFormula, ParseError> {
        self.expect(&TokKind::LParen)?;
        let f = self.formula()?;
        self.expect(&TokKind::RParen)?;
        Ok(f)
    }

    fn rel_args(&mut self) -> Result<(RawFormula, RawFormula), ParseError> {
        self.expect(&TokKind::LBracket)?;
        let rel = self.formula()?;
        self.expect(&TokKind::RBracket)?;
        let body = self.paren_formula()?;
        Ok((rel, body))
    }

    fn var_ref(&mut self) -> Result<RawFormula, ParseError> {
        let (name, pos) = self.expect_ident()?;
        let mut bindings = Vec::new();
        let mut braces = Vec::new();
        if self.eat(&TokKind::LBracket) {
            loop {
                let (id, id_pos) = self.expect_ident()?;
                if self.eat(&TokKind::Assign) {
                    let v = self.value()?;
                    bindings.push(RawBinding::Assign(id, id_pos, v));
                } else {
                    bindings.push(RawBinding::Reset(id, id_pos));
                }
                if !self.eat(&TokKind::Comma) {
                    break;
                }
            }
            self.expect(&TokKind::RBracket)?;
        }
        // A brace list of clock resets may follow only when it is
        // unambiguously part of the reference: `X{x1}`. A brace that opens a
        // grouped sub-formula (e.g. in `X && {p1 == 0}`) is left alone —
        // grouping braces always enclose a formula, never a bare clock list,
        // so we look ahead for `ident }` or `ident ,`.
        if self.peek() == Some(&TokKind::LBrace) {
            let is_reset_list = matches!(self.peek2(), Some(TokKind::Ident(_)))
                && matches!(
                    self.toks.get(self.pos + 2).map(|t| &t.kind),
                    Some(TokKind::RBrace | TokKind::Comma)
                );
            if is_reset_list {
                self.pos += 1;
                loop {
                    let (id, id_pos) = self.expect_ident()?;
                    braces.push((id, id_pos));
                    if !self.eat(&TokKind::Comma) {
                        break;
                    }
                }
                self.expect(&TokKind::RBrace)?;
            }
        }
        Ok(RawFormula::Var { name, pos, bindings, braces })
    }

    // -- Sections ----------------------------------------------------------

    fn file(&mut self) -> Result<RawFile, ParseError> {
        let mut raw = RawFile::default();
        while let Some(tok) = self.peek() {
            match tok {
                TokKind::Define => {
                    self.pos += 1;
                    let (name, pos) = self.expect_ident()?;
                    let value = self.expect_int()?;
                    raw.defines.push((name, pos, value));
                }
                TokKind::Section(sec) => {
                    let sec = *sec;
                    if raw.seen_sections.contains(&sec) {
                        return Err(self.err(format!(
                            "duplicate section {}",
                            sec.header()
                        )));
                    }
                    raw.seen_sections.push(sec);
                    self.pos += 1;
                    match sec {
                        Section::Clocks => raw.clocks = self.name_list(false)?,
                        Section::Control => raw.controls = self.name_list(true)?,
                        Section::Initially => raw.initially = Some(self.atom_conj()?),
                        Section::Predicate => raw.predicates = self.name_list(false)?,
                        Section::Start => {
                            let (name, pos) = self.expect_ident()?;
                            raw.start = Some((name, pos));
                        }
                        Section::Equations => self.equations(&mut raw)?,
                        Section::Invariant => self.invariants(&mut raw)?,
                        Section::Transitions => self.transitions(&mut raw)?,
                    }
                }
                t => return Err(self.err(format!("expected section header, found {t}"))),
            }
        }
        Ok(raw)
    }

    /// `{ name, name(2), ... }` — value-count hints are parsed and discarded
    /// when `hints` is true.
    fn name_list(&mut self, hints: bool) -> Result<Vec<(String, usize)>, ParseError> {
        self.expect(&TokKind::LBrace)?;
        let mut names = Vec::new();
        if self.peek() != Some(&TokKind::RBrace) {
            loop {
                let (name, pos) = self.expect_ident()?;
                if hints && self.eat(&TokKind::LParen) {
                    self.expect_int()?;
                    self.expect(&TokKind::RParen)?;
                }
                names.push((name, pos));
                if !self.eat(&TokKind::Comma) {
                    break;
                }
            }
        }
        self.expect(&TokKind::RBrace)?;
        Ok(names)
    }

    fn equations(&mut self, raw: &mut RawFile) -> Result<(), ParseError> {
        self.expect(&TokKind::LBrace)?;
        while self.peek() != Some(&TokKind::RBrace) {
            if self.peek().is_none() {
                return Err(self.err("unterminated EQUATIONS section"));
            }
            let block_id = self.expect_int()?;
            if block_id < 0 || block_id > u32::MAX as i64 {
                return Err(self.err("block label out of range"));
            }
            self.expect(&TokKind::Colon)?;
            let parity_pos = self.here();
            let (kw, _) = self.expect_ident()?;
            let parity = match kw.as_str() {
                "mu" => Parity::Mu,
                "nu" => Parity::Nu,
                other => {
                    return Err(ParseError::at(
                        self.src,
                        parity_pos,
                        format!("expected `mu` or `nu`, found `{other}`"),
                    ))
                }
            };
            let (var, var_pos) = self.expect_ident()?;
            self.expect(&TokKind::Assign)?;
            let body = self.formula()?;
            raw.equations.push(RawEquation {
                block_id: block_id as u32,
                parity,
                parity_pos,
                var,
                var_pos,
                body,
            });
        }
        self.expect(&TokKind::RBrace)?;
        Ok(())
    }

    fn invariants(&mut self, raw: &mut RawFile) -> Result<(), ParseError> {
        // Clauses `premise -> bounds` follow each other until the next
        // section header; the grammar needs no line breaks because a clause
        // cannot start with `&&`.
        while matches!(self.peek(), Some(TokKind::Ident(_))) {
            let premise = self.atom_conj()?;
            self.expect(&TokKind::Arrow)?;
            let bounds = self.atom_conj()?;
            raw.invariants.push(RawInvariant { premise, bounds });
        }
        Ok(())
    }

    fn transitions(&mut self, raw: &mut RawFile) -> Result<(), ParseError> {
        while self.peek() == Some(&TokKind::LParen) {
            self.pos += 1;
            let mut guard = Vec::new();
            let mut clock_guard = Vec::new();
            if self.peek() != Some(&TokKind::RParen) {
                guard = self.atom_conj()?;
                if self.eat(&TokKind::Comma) {
                    clock_guard = self.atom_conj()?;
                }
            }
            self.expect(&TokKind::RParen)?;
            self.expect(&TokKind::Arrow)?;
            self.expect(&TokKind::LParen)?;
            let mut assignments = Vec::new();
            if self.peek() != Some(&TokKind::RParen) {
                loop {
                    let (name, pos) = self.expect_ident()?;
                    self.expect(&TokKind::Assign)?;
                    let v = self.value()?;
                    assignments.push((name, pos, v));
                    if !self.eat(&TokKind::Comma) {
                        break;
                    }
                }
            }
            self.expect(&TokKind::RParen)?;
            let mut resets = Vec::new();
            if self.eat(&TokKind::LBrace) {
                if self.peek() != Some(&TokKind::RBrace) {
                    loop {
                        resets.push(self.expect_ident()?);
                        if !self.eat(&TokKind::Comma) {
                            break;
                        }
                    }
                }
                self.expect(&TokKind::RBrace)?;
            }
            self.expect(&TokKind::Semi)?;
            raw.transitions.push(RawTransition { guard, clock_guard, assignments, resets });
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Resolution phase
// ---------------------------------------------------------------------------

struct Resolver<'a> {
    src: &'a str,
    defines: BTreeMap<String, i64>,
    clocks: Vec<String>,
    controls: Vec<String>,
    predicates: Vec<String>,
}

const CLOCK_OPS: [CmpOp; 5] = [CmpOp::Lt, CmpOp::Le, CmpOp::Eq, CmpOp::Ge, CmpOp::Gt];

impl<'a> Resolver<'a> {
    fn err(&self, pos: usize, msg: impl std::fmt::Display) -> ParseError {
        ParseError::at(self.src, pos, msg)
    }

    fn value(&self, v: &RawValue) -> Result<i64, ParseError> {
        match v {
            RawValue::Int(n) => Ok(*n),
            RawValue::Name(name, pos) => self
                .defines
                .get(name)
                .copied()
                .ok_or_else(|| self.err(*pos, format!("unknown constant `{name}`"))),
        }
    }

    fn is_clock(&self, name: &str) -> bool {
        self.clocks.iter().any(|c| c == name)
    }

    fn is_control(&self, name: &str) -> bool {
        self.controls.iter().any(|c| c == name)
    }

    /// Resolve an identifier in a clock position, promoting undeclared
    /// specification clocks (`x*`/`y*`/`z*`) on first use.
    fn clock_or_promote(&mut self, name: &str, pos: usize) -> Result<String, ParseError> {
        if self.is_clock(name) {
            return Ok(name.to_string());
        }
        if self.is_control(name)
            || self.defines.contains_key(name)
            || self.predicates.iter().any(|p| p == name)
        {
            return Err(self.err(pos, format!("`{name}` is not a clock")));
        }
        if matches!(name.as_bytes().first(), Some(b'x' | b'y' | b'z')) {
            self.clocks.push(name.to_string());
            Ok(name.to_string())
        } else {
            Err(self.err(pos, format!("unresolved identifier `{name}`")))
        }
    }

    fn clock_atom(&mut self, a: &RawAtom, promote: bool) -> Result<ClockAtom, ParseError> {
        let clock = if promote {
            self.clock_or_promote(&a.lhs, a.lhs_pos)?
        } else if self.is_clock(&a.lhs) {
            a.lhs.clone()
        } else {
            return Err(self.err(a.lhs_pos, format!("`{}` is not a declared clock", a.lhs)));
        };
        if !CLOCK_OPS.contains(&a.op) {
            return Err(self.err(
                a.lhs_pos,
                format!("operator `{}` is not allowed on clocks", a.op.symbol()),
            ));
        }
        Ok(ClockAtom { clock, op: a.op, value: self.value(&a.value)? })
    }

    fn prop_atom(&mut self, a: &RawAtom, ops: &[CmpOp]) -> Result<PropAtom, ParseError> {
        if !self.is_control(&a.lhs) {
            return Err(self.err(a.lhs_pos, format!("`{}` is not a declared control", a.lhs)));
        }
        if !ops.contains(&a.op) {
            return Err(self.err(
                a.lhs_pos,
                format!("operator `{}` is not allowed here", a.op.symbol()),
            ));
        }
        Ok(PropAtom { control: a.lhs.clone(), op: a.op, value: self.value(&a.value)? })
    }

    /// Classify a formula atom as a control or clock test.
    fn formula_atom(&mut self, a: &RawAtom) -> Result<Formula, ParseError> {
        if self.is_control(&a.lhs) {
            Ok(Formula::Prop(PropAtom {
                control: a.lhs.clone(),
                op: a.op,
                value: self.value(&a.value)?,
            }))
        } else {
            Ok(Formula::Clock(self.clock_atom(a, true)?))
        }
    }

    fn formula(&mut self, raw: &RawFormula) -> Result<Formula, ParseError> {
        Ok(match raw {
            RawFormula::Atom(a) => self.formula_atom(a)?,
            RawFormula::And(fs) => Formula::And(
                fs.iter().map(|f| self.formula(f)).collect::<Result<_, _>>()?,
            ),
            RawFormula::Or(fs) => Formula::Or(
                fs.iter().map(|f| self.formula(f)).collect::<Result<_, _>>()?,
            ),
            RawFormula::Implies(l, r) => {
                let lhs = self.formula(l)?;
                self.check_atom_conj(&lhs, l)?;
                Formula::Implies(Box::new(lhs), Box::new(self.formula(r)?))
            }
            RawFormula::ForallTime(f) => Formula::ForallTime(Box::new(self.formula(f)?)),
            RawFormula::ExistsTime(f) => Formula::ExistsTime(Box::new(self.formula(f)?)),
            RawFormula::ForallTimeRel(r, f) => Formula::ForallTimeRel(
                Box::new(self.formula(r)?),
                Box::new(self.formula(f)?),
            ),
            RawFormula::ExistsTimeRel(r, f) => Formula::ExistsTimeRel(
                Box::new(self.formula(r)?),
                Box::new(self.formula(f)?),
            ),
            RawFormula::AllAct(f) => Formula::AllAct(Box::new(self.formula(f)?)),
            RawFormula::ExistAct(f) => Formula::ExistAct(Box::new(self.formula(f)?)),
            RawFormula::UnableWaitInf => Formula::UnableWaitInf,
            RawFormula::AbleWaitInf => Formula::AbleWaitInf,
            RawFormula::Var { name, pos, bindings, braces } => {
                if !self.predicates.iter().any(|p| p == name) {
                    return Err(self.err(
                        *pos,
                        format!("`{name}` is not a declared predicate variable"),
                    ));
                }
                let mut assignments = Vec::new();
                let mut resets = Vec::new();
                for b in bindings {
                    match b {
                        RawBinding::Assign(ctrl, cpos, v) => {
                            if !self.is_control(ctrl) {
                                return Err(self.err(
                                    *cpos,
                                    format!("`{ctrl}` is not a declared control"),
                                ));
                            }
                            assignments.push((ctrl.clone(), self.value(v)?));
                        }
                        RawBinding::Reset(id, cpos) => {
                            resets.push(self.clock_or_promote(id, *cpos)?);
                        }
                    }
                }
                for (id, cpos) in braces {
                    resets.push(self.clock_or_promote(id, *cpos)?);
                }
                Formula::Var(VarRef { name: name.clone(), assignments, resets })
            }
        })
    }

    fn check_atom_conj(&self, f: &Formula, raw: &RawFormula) -> Result<(), ParseError> {
        let ok = match f {
            Formula::Prop(_) | Formula::Clock(_) => true,
            Formula::And(fs) => fs
                .iter()
                .all(|g| matches!(g, Formula::Prop(_) | Formula::Clock(_))),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            let pos = raw_pos(raw).unwrap_or(0);
            Err(self.err(
                pos,
                "the left-hand side of `->` must be a conjunction of atoms",
            ))
        }
    }
}

fn raw_pos(raw: &RawFormula) -> Option<usize> {
    match raw {
        RawFormula::Atom(a) => Some(a.lhs_pos),
        RawFormula::Var { pos, .. } => Some(*pos),
        RawFormula::And(fs) | RawFormula::Or(fs) => fs.first().and_then(raw_pos),
        RawFormula::Implies(l, _) => raw_pos(l),
        RawFormula::ForallTime(f)
        | RawFormula::ExistsTime(f)
        | RawFormula::AllAct(f)
        | RawFormula::ExistAct(f) => raw_pos(f),
        RawFormula::ForallTimeRel(r, _) | RawFormula::ExistsTimeRel(r, _) => raw_pos(r),
        RawFormula::UnableWaitInf | RawFormula::AbleWaitInf => None,
    }
}

/// Parse a PES file into its resolved AST.
pub fn parse_pes(src: &str) -> Result<PesFile, ParseError> {
    let toks = tokenize(src)?;
    let mut parser = Parser { src, toks, pos: 0 };
    let raw = parser.file()?;

    // Required sections.
    let Some((start, start_pos)) = raw.start.clone() else {
        return Err(ParseError::at(src, src.len(), "missing START: section"));
    };
    if !raw.seen_sections.contains(&Section::Predicate) {
        return Err(ParseError::at(src, src.len(), "missing PREDICATE: section"));
    }
    if !raw.seen_sections.contains(&Section::Equations) {
        return Err(ParseError::at(src, src.len(), "missing EQUATIONS: section"));
    }

    // Symbol tables and disjointness.
    let register = |seen: &mut BTreeMap<String, &'static str>,
                        name: &str,
                        kind: &'static str,
                        pos: usize|
     -> Result<(), ParseError> {
        if let Some(prev) = seen.insert(name.to_string(), kind) {
            return Err(ParseError::at(
                src,
                pos,
                format!("`{name}` is declared twice (as {prev} and {kind})"),
            ));
        }
        Ok(())
    };
    let mut names: BTreeMap<String, &'static str> = BTreeMap::new();
    let mut defines_map = BTreeMap::new();
    let mut defines = Vec::new();
    for (name, pos, value) in &raw.defines {
        register(&mut names, name, "a constant", *pos)?;
        defines_map.insert(name.clone(), *value);
        defines.push((name.clone(), *value));
    }
    for (name, pos) in &raw.clocks {
        register(&mut names, name, "a clock", *pos)?;
    }
    for (name, pos) in &raw.controls {
        register(&mut names, name, "a control", *pos)?;
    }
    for (name, pos) in &raw.predicates {
        register(&mut names, name, "a predicate", *pos)?;
    }

    let mut resolver = Resolver {
        src,
        defines: defines_map,
        clocks: raw.clocks.iter().map(|(n, _)| n.clone()).collect(),
        controls: raw.controls.iter().map(|(n, _)| n.clone()).collect(),
        predicates: raw.predicates.iter().map(|(n, _)| n.clone()).collect(),
    };

    // START must be a declared predicate.
    if !resolver.predicates.iter().any(|p| p == &start) {
        return Err(ParseError::at(
            src,
            start_pos,
            format!("start variable `{start}` is not a declared predicate"),
        ));
    }

    // INITIALLY: clock constraints only (no promotion — the initial
    // condition constrains declared model clocks).
    let initially = match &raw.initially {
        None => None,
        Some(atoms) => Some(
            atoms
                .iter()
                .map(|a| resolver.clock_atom(a, false))
                .collect::<Result<Vec<_>, _>>()?,
        ),
    };

    // Invariants: control-equality premises, clock bounds.
    let mut invariants = Vec::new();
    for inv in &raw.invariants {
        let premise = inv
            .premise
            .iter()
            .map(|a| resolver.prop_atom(a, &[CmpOp::Eq]))
            .collect::<Result<Vec<_>, _>>()?;
        let bounds = inv
            .bounds
            .iter()
            .map(|a| resolver.clock_atom(a, false))
            .collect::<Result<Vec<_>, _>>()?;
        invariants.push(InvariantClause { premise, bounds });
    }

    // Transitions.
    let mut transitions = Vec::new();
    for t in &raw.transitions {
        let guard = t
            .guard
            .iter()
            .map(|a| resolver.prop_atom(a, &[CmpOp::Eq, CmpOp::Ne]))
            .collect::<Result<Vec<_>, _>>()?;
        let clock_guard = t
            .clock_guard
            .iter()
            .map(|a| resolver.clock_atom(a, false))
            .collect::<Result<Vec<_>, _>>()?;
        let mut assignments = Vec::new();
        let mut assigned = Vec::new();
        for (name, pos, v) in &t.assignments {
            if !resolver.is_control(name) {
                return Err(ParseError::at(
                    src,
                    *pos,
                    format!("`{name}` is not a declared control"),
                ));
            }
            if assigned.contains(name) {
                return Err(ParseError::at(
                    src,
                    *pos,
                    format!("control `{name}` is assigned twice in one transition"),
                ));
            }
            assigned.push(name.clone());
            assignments.push((name.clone(), resolver.value(v)?));
        }
        let mut resets = Vec::new();
        for (name, pos) in &t.resets {
            if !resolver.is_clock(name) {
                return Err(ParseError::at(
                    src,
                    *pos,
                    format!("`{name}` is not a declared clock"),
                ));
            }
            resets.push(name.clone());
        }
        transitions.push(TransitionDecl { guard, clock_guard, assignments, resets });
    }

    // Equations: resolve bodies, merge equal labels into blocks, reject
    // label reuse with conflicting parity.
    let mut blocks: Vec<EquationBlock> = Vec::new();
    let mut defined_vars: Vec<String> = Vec::new();
    for eq in &raw.equations {
        if !resolver.predicates.iter().any(|p| p == &eq.var) {
            return Err(ParseError::at(
                src,
                eq.var_pos,
                format!("equation defines `{}`, which is not a declared predicate", eq.var),
            ));
        }
        if defined_vars.contains(&eq.var) {
            return Err(ParseError::at(
                src,
                eq.var_pos,
                format!("predicate `{}` has more than one defining equation", eq.var),
            ));
        }
        defined_vars.push(eq.var.clone());
        let body = resolver.formula(&eq.body)?;
        match blocks.iter_mut().find(|b| b.id == eq.block_id) {
            Some(block) => {
                if block.parity != eq.parity {
                    return Err(ParseError::at(
                        src,
                        eq.parity_pos,
                        format!(
                            "block {} mixes mu and nu equations",
                            eq.block_id
                        ),
                    ));
                }
                block.equations.push((eq.var.clone(), body));
            }
            None => blocks.push(EquationBlock {
                id: eq.block_id,
                parity: eq.parity,
                equations: vec![(eq.var.clone(), body)],
            }),
        }
    }

    // Every declared predicate needs a defining equation.
    for (name, pos) in &raw.predicates {
        if !defined_vars.contains(name) {
            return Err(ParseError::at(
                src,
                *pos,
                format!("predicate `{name}` has no defining equation"),
            ));
        }
    }

    Ok(PesFile {
        defines,
        clocks: resolver.clocks,
        controls: resolver.controls,
        initially,
        predicates: resolver.predicates,
        start,
        blocks,
        invariants,
        transitions,
    })
}
