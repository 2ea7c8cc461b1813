//! Checking a finished body two independent ways.
//!
//! `verify` hands the property (with the candidate body substituted for
//! the function) to the decision procedure and gets a proof or a
//! counterexample; `grid_check` evaluates the same thing pointwise over
//! a finite box. Agreement between the two is the cheapest end-to-end
//! sanity check there is: one trusts the solver, the other only trusts
//! the evaluator.

use sygus_forge::cegis::Conjecture;
use sygus_forge::solver::SolverConfig;
use sygus_forge::term::{Sort, Term};
use sygus_forge::verifier::{grid_check, verify, Verification};

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
    let conjecture = Conjecture::new("f", inputs.clone(), Sort::Int, inputs.clone(), property, None)
        .expect("well-sorted conjecture");
    let solver = SolverConfig::default();

    let candidates = [
        ("the maximum", Term::ite(Term::geq(x(), y()), x(), y())),
        ("the minimum", Term::ite(Term::leq(x(), y()), x(), y())),
        ("first argument", x()),
        ("constant one", Term::int(1)),
    ];

    for (label, body) in &candidates {
        let proof = verify(&conjecture, body, &inputs, &solver).expect("verifier failure");
        let grid = grid_check(&conjecture, body, &inputs, 5).expect("grid failure");
        print!("{label:<15} {body}\n  solver: ");
        match &proof {
            Verification::Valid => print!("valid"),
            Verification::Invalid(at) => print!("fails at {at}"),
            Verification::Unknown(why) => print!("unknown ({why})"),
        }
        print!("\n  grid:   ");
        match &grid {
            Verification::Valid => println!("valid over [-5, 5]^2"),
            Verification::Invalid(at) => println!("fails at {at}"),
            Verification::Unknown(why) => println!("unknown ({why})"),
        }
        // The two oracles may disagree only on the verdict's witness,
        // never on validity over the scanned box.
        assert_eq!(
            matches!(proof, Verification::Valid),
            matches!(grid, Verification::Valid),
        );
    }
}
