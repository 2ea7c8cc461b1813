//! The ground decision procedure on its own.
//!
//! Formulas are quantifier-free mixes of boolean structure and linear
//! integer atoms. `check_sat_term` either returns a model (which the
//! solver re-validates by evaluation before handing it out) or a proof
//! of unsatisfiability; a work budget turns runaway searches into an
//! explicit resource error instead of a wrong answer.

use sygus_forge::solver::{check_sat_term, find_counterexample, SatResult, SolverConfig, SolverError};
use sygus_forge::term::{Sort, Term};

fn main() {
    let x = || Term::var("x", Sort::Int);
    let y = || Term::var("y", Sort::Int);
    let p = || Term::var("p", Sort::Bool);

    // Satisfiable: 2x = y (as x + x = y), y > 3, and p deciding y <= 10.
    let twice = Term::eq(Term::add(x(), x()), y());
    let sat = Term::conjoin(vec![
        twice.clone(),
        Term::gt(y(), Term::int(3)),
        Term::or(Term::not(p()), Term::leq(y(), Term::int(10))),
    ]);
    match check_sat_term(&sat, &SolverConfig::default()).expect("solver failure") {
        SatResult::Sat(model) => println!("sat:   {sat}\n  model: {model}"),
        SatResult::Unsat => unreachable!("formula has models"),
    }

    // Unsatisfiable: x < y and y < x cannot both hold.
    let unsat = Term::and(Term::lt(x(), y()), Term::lt(y(), x()));
    match check_sat_term(&unsat, &SolverConfig::default()).expect("solver failure") {
        SatResult::Unsat => println!("unsat: {unsat}"),
        SatResult::Sat(m) => unreachable!("impossible model {m}"),
    }

    // Counterexample search: "x + 1 > x" is valid (no counterexample),
    // "x <= 2x" fails for negative x.
    let valid = Term::gt(Term::add(x(), Term::int(1)), x());
    let cex = find_counterexample(&valid, &SolverConfig::default()).expect("solver failure");
    println!("valid: {valid}  (counterexample: {:?})", cex.map(|a| a.to_string()));

    let falsifiable = Term::leq(x(), Term::add(x(), x()));
    let cex = find_counterexample(&falsifiable, &SolverConfig::default())
        .expect("solver failure")
        .expect("negative x falsifies");
    println!("not valid: {falsifiable}  fails at {cex}");

    // A starved budget gives up loudly rather than guessing.
    let starved = SolverConfig { budget: 2 };
    match check_sat_term(&sat, &starved) {
        Err(SolverError::ResourceLimit) => println!("budget 2: resource limit, no verdict"),
        other => unreachable!("expected a resource error, got {other:?}"),
    }
}
