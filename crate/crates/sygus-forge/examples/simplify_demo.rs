//! The term simplifier: a small, confluent rewrite pass.
//!
//! It folds constants, collapses syntactic tautologies like `t <= t`,
//! flattens and canonically orders `and`/`or` while dropping identity
//! and absorbing elements, cancels double negation, and resolves `ite`
//! with a constant or irrelevant condition. It never invents new atoms,
//! so a simplified chain still reads like the run that produced it.

use sygus_forge::term::{simplify, Sort, Term};

fn show(label: &str, t: &Term) {
    let s = simplify(t);
    println!("{label}\n  before: {t}\n  after:  {s}");
    // Simplification is a fixpoint, so a second pass is the identity.
    assert_eq!(simplify(&s), s);
}

fn main() {
    let x = || Term::var("x", Sort::Int);
    let y = || Term::var("y", Sort::Int);
    let p = || Term::var("p", Sort::Bool);

    show("constant folding", &Term::add(Term::int(2), Term::int(3)));

    show("reflexive comparison", &Term::leq(Term::add(x(), y()), Term::add(x(), y())));

    show(
        "boolean flattening and identities",
        &Term::and(
            Term::and(Term::Bool(true), p()),
            Term::or(Term::Bool(false), Term::leq(x(), y())),
        ),
    );

    show(
        "absorbing element",
        &Term::or(Term::leq(x(), y()), Term::Bool(true)),
    );

    show("double negation", &Term::not(Term::not(p())));

    show(
        "conditional with known guard",
        &Term::ite(Term::leq(Term::int(0), Term::int(1)), x(), y()),
    );

    show(
        "conditional with equal branches",
        &Term::ite(p(), Term::add(x(), Term::int(0)), Term::add(x(), Term::int(0))),
    );

    // What a synthesized chain looks like before and after: the closing
    // round of the maximum run produces a guarded chain whose guard
    // simplifies to a single comparison.
    let chain = Term::ite(
        Term::and(Term::geq(x(), x()), Term::geq(x(), y())),
        x(),
        y(),
    );
    show("synthesized chain", &chain);
}
