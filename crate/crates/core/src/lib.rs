//! A model checker for real-time systems described as predicate equation
//! systems: a timed automaton (controls, clocks, invariants, transitions)
//! paired with an alternation-free system of fixpoint equations over
//! timed modal operators.
//!
//! The pipeline: [`parse::parse_pes`] turns a `.pes` file into an AST,
//! [`model::Model`] and [`mes::Mes`] resolve it into an indexed automaton
//! and equation system, and [`checker::check_file`] decides whether the
//! initial state satisfies the start variable by fixpoint iteration over
//! zones (difference bound matrices). [`checker::region`] holds an
//! independent region-graph oracle for small systems, and [`benchgen`]
//! regenerates the benchmark suite the checker is exercised on.

pub mod ast;
pub mod benchgen;
pub mod bound;
pub mod checker;
pub mod fed;
pub mod lex;
pub mod mes;
pub mod model;
pub mod parse;
pub mod print;
pub mod suite;
pub mod zone;

pub use ast::PesFile;
pub use checker::{check_file, CheckOptions, CheckOutcome, Verdict};
pub use fed::Federation;
pub use lex::ParseError;
pub use parse::parse_pes;
pub use zone::Zone;
