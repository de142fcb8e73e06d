//! Pretty-printer for PES files.
//!
//! The printer guarantees a structural round trip: `parse(print(f))` yields a
//! file equal to `f`. Constant definitions are re-emitted as `#define` lines,
//! but since expansion is total at parse time, every occurrence in the body
//! of the file is printed as its numeral.
//!
//! Inside formulae, composite operands (conjunctions, disjunctions,
//! implications and atoms) are parenthesised; the temporal operators carry
//! their own delimiters and are printed bare.

use std::fmt::Write;

use crate::ast::*;

/// Print a formula. Atoms at top level are printed without parentheses.
pub fn print_formula(f: &Formula) -> String {
    let mut s = String::new();
    fmt_formula(&mut s, f, false);
    s
}

fn fmt_formula(out: &mut String, f: &Formula, operand: bool) {
    match f {
        Formula::Prop(a) => {
            if operand {
                let _ = write!(out, "({} {} {})", a.control, a.op.symbol(), a.value);
            } else {
                let _ = write!(out, "{} {} {}", a.control, a.op.symbol(), a.value);
            }
        }
        Formula::Clock(a) => {
            if operand {
                let _ = write!(out, "({} {} {})", a.clock, a.op.symbol(), a.value);
            } else {
                let _ = write!(out, "{} {} {}", a.clock, a.op.symbol(), a.value);
            }
        }
        Formula::And(parts) => fmt_nary(out, parts, " && ", operand),
        Formula::Or(parts) => fmt_nary(out, parts, " || ", operand),
        Formula::Implies(lhs, rhs) => {
            if operand {
                out.push('(');
            }
            fmt_formula(out, lhs, true);
            out.push_str(" -> ");
            fmt_formula(out, rhs, true);
            if operand {
                out.push(')');
            }
        }
        Formula::ForallTime(body) => fmt_op(out, "\\forall time", None, body),
        Formula::ExistsTime(body) => fmt_op(out, "\\exists time", None, body),
        Formula::ForallTimeRel(rel, body) => fmt_op(out, "\\forall time", Some(rel), body),
        Formula::ExistsTimeRel(rel, body) => fmt_op(out, "\\exists time", Some(rel), body),
        Formula::AllAct(body) => fmt_op(out, "\\AllAct", None, body),
        Formula::ExistAct(body) => fmt_op(out, "\\ExistAct", None, body),
        Formula::UnableWaitInf => out.push_str("UnableWaitInf"),
        Formula::AbleWaitInf => out.push_str("AbleWaitInf"),
        Formula::Var(v) => {
            out.push_str(&v.name);
            if !v.assignments.is_empty() {
                out.push('[');
                for (i, (ctrl, val)) in v.assignments.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    let _ = write!(out, "{ctrl}={val}");
                }
                out.push(']');
            }
            if !v.resets.is_empty() {
                out.push('{');
                out.push_str(&v.resets.join(","));
                out.push('}');
            }
        }
    }
}

fn fmt_nary(out: &mut String, parts: &[Formula], sep: &str, operand: bool) {
    if operand {
        out.push('(');
    }
    for (i, p) in parts.iter().enumerate() {
        if i > 0 {
            out.push_str(sep);
        }
        fmt_formula(out, p, true);
    }
    if operand {
        out.push(')');
    }
}

fn fmt_op(out: &mut String, name: &str, rel: Option<&Formula>, body: &Formula) {
    out.push_str(name);
    if let Some(rel) = rel {
        out.push_str("\\rel[");
        fmt_formula(out, rel, false);
        out.push(']');
    }
    out.push('(');
    fmt_formula(out, body, false);
    out.push(')');
}

fn fmt_clock_atom(a: &ClockAtom) -> String {
    format!("{} {} {}", a.clock, a.op.symbol(), a.value)
}

fn fmt_prop_atom(a: &PropAtom) -> String {
    format!("{} {} {}", a.control, a.op.symbol(), a.value)
}

/// Print a whole file in canonical section order.
pub fn pretty_print(file: &PesFile) -> String {
    let mut out = String::new();
    for (name, value) in &file.defines {
        let _ = writeln!(out, "#define {name} {value}");
    }
    if !file.defines.is_empty() {
        out.push('\n');
    }
    if !file.clocks.is_empty() {
        let _ = writeln!(out, "CLOCKS: {{{}}}", file.clocks.join(","));
    }
    if !file.controls.is_empty() {
        let _ = writeln!(out, "CONTROL: {{{}}}", file.controls.join(","));
    }
    if let Some(init) = &file.initially {
        let atoms: Vec<_> = init.iter().map(fmt_clock_atom).collect();
        let _ = writeln!(out, "INITIALLY: {}", atoms.join(" && "));
    }
    let _ = writeln!(out, "PREDICATE: {{{}}}", file.predicates.join(","));
    let _ = writeln!(out, "START: {}", file.start);
    let _ = writeln!(out, "EQUATIONS: {{");
    for block in &file.blocks {
        for (var, body) in &block.equations {
            let _ = writeln!(
                out,
                "{}: {} {} = {}",
                block.id,
                block.parity.keyword(),
                var,
                print_formula(body)
            );
        }
    }
    let _ = writeln!(out, "}}");
    if !file.invariants.is_empty() {
        let _ = writeln!(out, "INVARIANT:");
        for clause in &file.invariants {
            let premise: Vec<_> = clause.premise.iter().map(fmt_prop_atom).collect();
            let bounds: Vec<_> = clause.bounds.iter().map(fmt_clock_atom).collect();
            let _ = writeln!(out, "\t{} -> {}", premise.join(" && "), bounds.join(" && "));
        }
    }
    if !file.transitions.is_empty() {
        let _ = writeln!(out, "TRANSITIONS:");
        for t in &file.transitions {
            out.push_str("\t(");
            let guard: Vec<_> = t.guard.iter().map(fmt_prop_atom).collect();
            out.push_str(&guard.join(" && "));
            if !t.clock_guard.is_empty() {
                let cg: Vec<_> = t.clock_guard.iter().map(fmt_clock_atom).collect();
                let _ = write!(out, ", {}", cg.join(" && "));
            }
            out.push_str(")->(");
            let assigns: Vec<_> = t
                .assignments
                .iter()
                .map(|(c, v)| format!("{c} = {v}"))
                .collect();
            out.push_str(&assigns.join(", "));
            out.push(')');
            if !t.resets.is_empty() {
                let _ = write!(out, "{{{}}}", t.resets.join(","));
            }
            out.push_str(";\n");
        }
    }
    out
}
