//! Block-wise fixpoint solving and the top-level check entry point.

use std::time::Instant;

use crate::ast::Parity;
use crate::ast::PesFile;
use crate::fed::Federation;
use crate::mes::Mes;
use crate::model::{Location, Model};
use crate::parse::parse_pes;

use super::{CheckError, Evaluator, StateSet, Universe, Verdict};

#[derive(Clone, Copy, Debug)]
pub struct CheckOptions {
    /// Cumulative zone budget; exceeding it aborts with an inconclusive
    /// error rather than an unbounded computation.
    pub max_zones: u64,
    /// Cap on distinct control locations.
    pub max_locations: usize,
}

impl Default for CheckOptions {
    fn default() -> CheckOptions {
        CheckOptions { max_zones: 1_000_000, max_locations: 200_000 }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Stats {
    /// Operator evaluations performed.
    pub nodes: u64,
    /// Zones materialised across all evaluations.
    pub zones: u64,
    /// Largest single state set, in zones.
    pub peak: u64,
    /// Wall-clock time of the whole check.
    pub ms: u128,
}

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub verdict: Verdict,
    pub stats: Stats,
}

/// The solved system: one state set per variable, in `Mes` variable order.
#[derive(Clone, Debug)]
pub struct Solution {
    pub sets: Vec<StateSet>,
    pub stats: Stats,
}

/// A membership question asked while solving: does the initial zone at
/// `loc` belong to variable `var`? Approximants move towards the fixpoint
/// monotonically within a block, so a nu-approximant losing the witness
/// settles the answer negatively and a mu-approximant gaining it settles
/// it positively — no need to finish the fixpoint.
struct Watch {
    var: usize,
    loc: Location,
    init: Federation,
}

enum Solved {
    Full(Vec<StateSet>),
    Early(Verdict),
}

fn solve_watched(
    model: &Model,
    mes: &Mes,
    universe: &Universe,
    opts: &CheckOptions,
    watch: Option<&Watch>,
) -> Result<(Solved, Stats), CheckError> {
    let order = mes.evaluation_order()?;
    let mut ev = Evaluator::new(model, universe, opts.max_zones);
    let mut env: Vec<StateSet> = vec![StateSet::empty(); mes.vars.len()];
    for block in order {
        for &v in &block.vars {
            env[v] = match block.parity {
                Parity::Nu => universe.full_set(),
                Parity::Mu => StateSet::empty(),
            };
        }
        let watched_here = watch.filter(|w| block.vars.contains(&w.var));
        // Chaotic iteration with immediate propagation: reuse the newest
        // approximant of every variable within the sweep.
        loop {
            let mut changed = false;
            for &v in &block.vars {
                let next = ev.eval(&mes.bodies[v], &env)?;
                if !next.set_eq(&env[v]) {
                    env[v] = next;
                    changed = true;
                }
            }
            if let Some(w) = watched_here {
                let holds = env[w.var]
                    .get(&w.loc)
                    .map_or(false, |fed| fed.includes(&w.init));
                match block.parity {
                    Parity::Nu if !holds => {
                        let (nodes, zones, peak) = ev.counters();
                        return Ok((
                            Solved::Early(Verdict::Invalid),
                            Stats { nodes, zones, peak, ms: 0 },
                        ));
                    }
                    Parity::Mu if holds => {
                        let (nodes, zones, peak) = ev.counters();
                        return Ok((
                            Solved::Early(Verdict::Valid),
                            Stats { nodes, zones, peak, ms: 0 },
                        ));
                    }
                    _ => {}
                }
            }
            if !changed {
                break;
            }
        }
    }
    let (nodes, zones, peak) = ev.counters();
    Ok((Solved::Full(env), Stats { nodes, zones, peak, ms: 0 }))
}

/// Solve every block of `mes` over `model`, dependencies first.
pub fn solve(
    model: &Model,
    mes: &Mes,
    universe: &Universe,
    opts: &CheckOptions,
) -> Result<Solution, CheckError> {
    let (solved, stats) = solve_watched(model, mes, universe, opts, None)?;
    match solved {
        Solved::Full(sets) => Ok(Solution { sets, stats }),
        Solved::Early(_) => unreachable!("nothing watched"),
    }
}

/// Check a parsed file: does its initial state satisfy the start variable?
pub fn check_file(file: &PesFile, opts: &CheckOptions) -> Result<CheckOutcome, CheckError> {
    let t0 = Instant::now();
    let model = Model::from_file(file)?;
    let mes = Mes::from_file(file, &model)?;
    let universe = Universe::build(&model, &mes, opts.max_locations)?;

    let l0 = model.initial_location();
    let init = model
        .initial_zone()
        .and_then(|z0| universe.zone(&l0).and_then(|inv| z0.intersect(inv)))
        .ok_or(CheckError::EmptyInitialState)?;
    let watch = Watch { var: mes.start, loc: l0, init: Federation::from_zone(init) };

    let (solved, mut stats) = solve_watched(&model, &mes, &universe, opts, Some(&watch))?;
    stats.ms = t0.elapsed().as_millis();
    let verdict = match solved {
        Solved::Early(v) => v,
        Solved::Full(sets) => match sets[mes.start].get(&watch.loc) {
            Some(fed) if fed.includes(&watch.init) => Verdict::Valid,
            _ => Verdict::Invalid,
        },
    };
    Ok(CheckOutcome { verdict, stats })
}

/// Convenience wrapper: parse then check.
pub fn check_str(src: &str, opts: &CheckOptions) -> Result<CheckOutcome, CheckerFailure> {
    let file = parse_pes(src).map_err(CheckerFailure::Parse)?;
    check_file(&file, opts).map_err(CheckerFailure::Check)
}

#[derive(Debug, thiserror::Error)]
pub enum CheckerFailure {
    #[error(transparent)]
    Parse(crate::lex::ParseError),
    #[error(transparent)]
    Check(CheckError),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn verdict(src: &str) -> Verdict {
        check_str(src, &CheckOptions::default()).unwrap().verdict
    }

    #[test]
    fn nu_self_loop_is_valid() {
        assert_eq!(
            verdict(
                r"
CONTROL: {p1}
PREDICATE: {X}
START: X
EQUATIONS: {
1: nu X = X
}
"
            ),
            Verdict::Valid
        );
    }

    #[test]
    fn mu_self_loop_is_invalid() {
        assert_eq!(
            verdict(
                r"
CONTROL: {p1}
PREDICATE: {X}
START: X
EQUATIONS: {
1: mu X = X
}
"
            ),
            Verdict::Invalid
        );
    }

    #[test]
    fn reachability_through_time_and_actions() {
        // From x1 = 0, wait past the guard and fire; the mu-formula finds
        // the action path.
        let src = r"
CLOCKS: {x1}
CONTROL: {p1}
PREDICATE: {X}
START: X
EQUATIONS: {
1: mu X = (p1 == 1) || \exists time(\ExistAct(X))
}
TRANSITIONS:
	(p1 == 0, x1 >= 3)->(p1 = 1);
";
        assert_eq!(verdict(src), Verdict::Valid);
    }

    #[test]
    fn unreachable_target_is_invalid() {
        // The invariant keeps x1 <= 2 but the guard needs x1 >= 3.
        let src = r"
CLOCKS: {x1}
CONTROL: {p1}
PREDICATE: {X}
START: X
EQUATIONS: {
1: mu X = (p1 == 1) || \exists time(\ExistAct(X))
}
INVARIANT:
	p1 == 0 -> x1 <= 2
TRANSITIONS:
	(p1 == 0, x1 >= 3)->(p1 = 1);
";
        assert_eq!(verdict(src), Verdict::Invalid);
    }

    #[test]
    fn safety_with_unavoidable_violation() {
        // nu X = (x1 <= 5) && ∀time(AllAct(X)) fails: waiting past 5 at the
        // initial location already breaks the target.
        let src = r"
CLOCKS: {x1}
CONTROL: {p1}
PREDICATE: {X}
START: X
EQUATIONS: {
1: nu X = \forall time((x1 <= 5) && \AllAct(X))
}
";
        assert_eq!(verdict(src), Verdict::Invalid);
    }

    #[test]
    fn safety_protected_by_invariant() {
        // Same property, but the invariant never lets x1 pass 5.
        let src = r"
CLOCKS: {x1}
CONTROL: {p1}
PREDICATE: {X}
START: X
EQUATIONS: {
1: nu X = \forall time((x1 <= 5) && \AllAct(X))
}
INVARIANT:
	p1 == 0 -> x1 <= 5
";
        assert_eq!(verdict(src), Verdict::Valid);
    }

    #[test]
    fn blocks_solve_in_dependency_order() {
        // X2 (nu) holds everywhere p1 != 2; X (mu) asks to reach a state
        // where X2 fails — impossible, since p1 never becomes 2.
        let src = r"
CONTROL: {p1}
PREDICATE: {X, X2}
START: X
EQUATIONS: {
1: mu X = (p1 == 2) || \ExistAct(X)
2: nu X2 = X
}
TRANSITIONS:
	(p1 == 0)->(p1 = 1);
	(p1 == 1)->(p1 = 0);
";
        // START is X; X2 wraps it from an outer block. The verdict follows
        // X alone.
        assert_eq!(verdict(src), Verdict::Invalid);
    }

    #[test]
    fn zone_budget_aborts() {
        let src = r"
CLOCKS: {x1}
CONTROL: {p1}
PREDICATE: {X}
START: X
EQUATIONS: {
1: nu X = \forall time(\AllAct(X))
}
TRANSITIONS:
	(p1 == 0, x1 >= 1)->(p1 = 1){x1};
	(p1 == 1, x1 >= 1)->(p1 = 0){x1};
";
        let err = check_str(src, &CheckOptions { max_zones: 2, max_locations: 10 }).unwrap_err();
        assert!(err.to_string().contains("inconclusive"), "{err}");
    }

    #[test]
    fn initial_constraints_restrict_or_reject_the_origin() {
        // All clocks start at zero. An INITIALLY clause that excludes the
        // origin leaves no initial state at all, which is a configuration
        // error rather than a verdict.
        let src = r"
CLOCKS: {x1}
CONTROL: {p1}
INITIALLY: x1 == 4
PREDICATE: {X}
START: X
EQUATIONS: {
1: nu X = x1 <= 3
}
";
        let file = parse_pes(src).unwrap();
        let err = check_file(&file, &CheckOptions::default()).unwrap_err();
        assert!(matches!(err, CheckError::EmptyInitialState));
        let src_ok = r"
CLOCKS: {x1}
CONTROL: {p1}
INITIALLY: x1 <= 3
PREDICATE: {X}
START: X
EQUATIONS: {
1: nu X = x1 <= 3
}
";
        assert_eq!(verdict(src_ok), Verdict::Valid);
    }
}
