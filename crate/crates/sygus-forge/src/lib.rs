//! Program synthesis for linear integer arithmetic with booleans.
//!
//! Given a problem `exists f. forall inputs. phi(f, inputs)` where
//! `phi` is quantifier-free and `f` ranges over a syntactic space of
//! integer/boolean programs, the crate either produces a term for `f`,
//! proves that no function satisfies `phi`, or reports why it gave up.
//! Two engines share the same exact decision procedure for ground
//! formulas:
//!
//! * [`cegis::solve_cegis`] enumerates candidate programs from a
//!   [`grammar::GrammarSpec`] in non-decreasing size order, keeps the
//!   counterexamples that refuted earlier candidates, and only proposes
//!   programs consistent with every stored point.
//! * [`single_invocation::solve_single_invocation`] applies when every
//!   occurrence of `f` in the property uses one shared argument vector:
//!   the property is rewritten to a first-order formula `Q` over the
//!   function's output, and the engine instantiates `Q` with candidate
//!   argument terms until the instances cover every case, assembling the
//!   answer as a nest of conditionals. Its syntax-guided variant,
//!   [`single_invocation::solve_si_syntax_guided`], restricts the guards
//!   and leaves so the assembled program stays inside a grammar.
//!
//! Module map:
//!
//! * [`term`]: terms, sorts, values, evaluation, canonical printing, and
//!   the algebraic simplifier.
//! * [`grammar`]: datatype-shaped grammars, program trees, denotation
//!   into terms, and direct program evaluation.
//! * [`enumerator`]: the size-ordered candidate stream with optional
//!   equivalence pruning against the stored points.
//! * [`solver`]: the ground decision procedure (DPLL over atoms, integer
//!   elimination underneath) with a resource budget.
//! * [`cegis`], [`single_invocation`]: the two engines above, sharing
//!   [`cegis::Conjecture`], verdicts, traces, and statistics.
//! * [`verifier`]: independent checks of a finished solution, both by the
//!   solver and by brute-force grid evaluation.
//! * [`frontend`]: the problem-file format (parser and printer), engine
//!   selection, and [`cli`] behind the `sygus-forge` binary.
//!
//! The quickest way in is `examples/solve_file.rs`, which parses a
//! problem file and runs whichever engine fits its shape; the other
//! examples exercise one module each.

pub mod cegis;
pub mod cli;
pub mod enumerator;
pub mod frontend;
pub mod grammar;
pub mod single_invocation;
pub mod solver;
pub mod term;
pub mod verifier;

pub use term::{Assignment, Op, Sort, Term, Value};
