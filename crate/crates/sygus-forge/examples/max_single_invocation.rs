//! Quantifier instantiation on the maximum property, no grammar at all.
//!
//! Every call of `f` in the property uses the same argument vector
//! `(x, y)`, so the property can be read as a first-order statement
//! `Q(g)` about the single output value `g = f(x, y)`. The engine asks
//! the solver for argument terms `t` such that the instances `Q(t_i)`
//! jointly cover all inputs, then stitches the terms into a conditional
//! chain. Here two rounds suffice: `t_1 = k1` and `t_2 = k2`, giving
//! `ite (>= k1 k2) k1 k2` over skolemized formals.

use sygus_forge::cegis::{Conjecture, Trace, Verdict};
use sygus_forge::single_invocation::{solve_single_invocation, SiConfig};
use sygus_forge::term::{Sort, Term};
use sygus_forge::verifier::{verify, Verification};

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
    let conjecture = Conjecture::new("f", inputs.clone(), Sort::Int, inputs, property, None)
        .expect("well-sorted conjecture");

    let outcome =
        solve_single_invocation(&conjecture, &SiConfig::default()).expect("engine failure");

    let Trace::Si(rounds) = &outcome.trace else {
        unreachable!("instantiation produces an instantiation trace");
    };
    for r in rounds {
        println!("round {}:", r.round);
        println!("  model still uncovered: {}", r.model);
        println!("  witness output:        {}", r.witness);
        println!("  instantiated with t =  {}", r.chosen);
        println!("  clause added:          {}", r.clause);
    }

    let Verdict::Solution { body, raw_body, formals, .. } = &outcome.verdict else {
        panic!("expected a solution, got {:?}", outcome.verdict);
    };
    println!("chain as assembled: {raw_body}");
    println!("after simplify:     {body}");
    let names: Vec<&str> = formals.iter().map(|(n, _)| n.as_str()).collect();
    println!("formals:            {}", names.join(", "));

    // The skolem formals are positional stand-ins for (x, y); the
    // verifier substitutes by position, so the proof goes through.
    let check = verify(&conjecture, body, formals, &Default::default())
        .expect("verifier failure");
    assert!(matches!(check, Verification::Valid));
    println!("verified: the chain satisfies the property for all inputs");
}
