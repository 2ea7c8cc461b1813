//! Enumerative refinement on the two-argument maximum, built in code.
//!
//! The conjecture asks for `f(x, y)` with `f(x,y) >= x`, `f(x,y) >= y`,
//! and `f(x,y) = x or f(x,y) = y`. Candidates come from a small
//! arithmetic grammar in size order; each refuted candidate contributes
//! the point that killed it, and later candidates must survive every
//! stored point before the solver sees them.

use sygus_forge::cegis::{solve_cegis, CegisConfig, Conjecture, Trace, Verdict};
use sygus_forge::grammar::{Constructor, DatatypeDef, GrammarSpec};
use sygus_forge::term::{Op, Sort, Term};
use sygus_forge::verifier::{grid_check, verify, Verification};

fn max_grammar(inputs: &[(String, Sort)]) -> GrammarSpec {
    let s = DatatypeDef {
        name: "S".to_string(),
        sort: Sort::Int,
        constructors: vec![
            Constructor::numeral(0),
            Constructor::numeral(1),
            Constructor::input_var("x"),
            Constructor::input_var("y"),
            Constructor::builtin(Op::Add, &["S", "S"]),
            Constructor::builtin(Op::Sub, &["S", "S"]),
            Constructor::builtin(Op::Ite, &["C", "S", "S"]),
        ],
    };
    let c = DatatypeDef {
        name: "C".to_string(),
        sort: Sort::Bool,
        constructors: vec![
            Constructor::builtin(Op::Leq, &["S", "S"]),
            Constructor::builtin(Op::Eq, &["S", "S"]),
            Constructor::builtin(Op::And, &["C", "C"]),
            Constructor::builtin(Op::Or, &["C", "C"]),
            Constructor::builtin(Op::Not, &["C"]),
        ],
    };
    GrammarSpec::new(vec![s, c], "S", inputs).expect("well-formed grammar")
}

fn main() {
    let inputs = vec![
        ("x".to_string(), Sort::Int),
        ("y".to_string(), Sort::Int),
    ];
    let f = |a: Term, b: Term| Term::call("f", vec![a, b]);
    let x = || Term::var("x", Sort::Int);
    let y = || Term::var("y", Sort::Int);
    let property = Term::conjoin(vec![
        Term::geq(f(x(), y()), x()),
        Term::geq(f(x(), y()), y()),
        Term::or(
            Term::eq(f(x(), y()), x()),
            Term::eq(f(x(), y()), y()),
        ),
    ]);

    let conjecture = Conjecture::new(
        "f",
        inputs.clone(),
        Sort::Int,
        inputs.clone(),
        property,
        Some(max_grammar(&inputs)),
    )
    .expect("well-sorted conjecture");

    let outcome = solve_cegis(&conjecture, &CegisConfig::default()).expect("engine failure");

    let Trace::Cegis(rounds) = &outcome.trace else {
        unreachable!("cegis produces a cegis trace");
    };
    println!("round | size | candidate                    | counterexample");
    for r in rounds {
        let cex = match &r.counterexample {
            Some(a) => a.to_string(),
            None => "none (verified)".to_string(),
        };
        println!("{:>5} | {:>4} | {:<28} | {}", r.round, r.size, r.body.to_string(), cex);
    }
    println!(
        "scanned {} candidates, stored {} points, {} solver checks, {:?}",
        outcome.stats.candidates_scanned,
        outcome.stats.points,
        outcome.stats.solver_checks,
        outcome.stats.wall,
    );

    let Verdict::Solution { body, formals, .. } = &outcome.verdict else {
        panic!("expected a solution, got {:?}", outcome.verdict);
    };
    println!("solution: {body}");

    // Two independent checks of the result: the solver proves the
    // property for all integers, the grid evaluates it pointwise.
    let solver_says = verify(&conjecture, body, formals, &Default::default())
        .expect("verifier failure");
    assert!(matches!(solver_says, Verification::Valid));
    let grid_says = grid_check(&conjecture, body, formals, 20).expect("grid failure");
    assert!(matches!(grid_says, Verification::Valid));
    println!("verified: solver proof and 41x41 grid both accept");
}
