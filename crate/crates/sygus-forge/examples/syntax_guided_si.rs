//! Quantifier instantiation that keeps the answer inside a grammar.
//!
//! The plain instantiation engine is free to return any term; when the
//! problem carries a grammar the result must also be a derivation. This
//! variant first checks that the property itself is a sentence of the
//! grammar's condition language (a template with a hole where the
//! function's output goes), restricts instantiation picks to grammar
//! leaves, and assembles the final program from the grammar's `ite`
//! constructor, guard templates plugged with the chosen leaves.

use sygus_forge::cegis::{Trace, Verdict};
use sygus_forge::frontend::parse_problem;
use sygus_forge::grammar::denote;
use sygus_forge::single_invocation::{solve_si_syntax_guided, SiConfig};

const MAX: &str = "\
(set-logic LIA)
(synth-fun f ((x Int) (y Int)) Int
  ((S Int ((Constant 0) (Constant 1) (Variable x) (Variable y) (+ S S) (- S S) (ite C S S)))
   (C Bool ((<= S S) (= S S) (and C C) (or C C) (not C)))))
(declare-var x Int)
(declare-var y Int)
(constraint (>= (f x y) x))
(constraint (>= (f x y) y))
(constraint (or (= (f x y) x) (= (f x y) y)))
(check-synth)
";

fn main() {
    let problem = parse_problem(MAX).expect("well-formed problem");
    let conjecture = problem.conjecture().expect("well-sorted conjecture");
    let grammar = conjecture.grammar().expect("problem has a grammar");

    let outcome =
        solve_si_syntax_guided(&conjecture, &SiConfig::default()).expect("engine failure");

    let Trace::Si(rounds) = &outcome.trace else {
        unreachable!("instantiation produces an instantiation trace");
    };
    for r in rounds {
        println!("round {}:", r.round);
        println!("  model still uncovered: {}", r.model);
        let leaf = r
            .chosen_program
            .as_ref()
            .expect("syntax-guided picks are grammar leaves");
        println!("  grammar leaf picked:   {leaf} (denotes {})", r.chosen);
        println!("  clause added:          {}", r.clause);
    }

    let Verdict::Solution { body, formals, program, .. } = &outcome.verdict else {
        panic!("expected a solution, got {:?}", outcome.verdict);
    };
    let program = program.as_ref().expect("syntax-guided returns a derivation");
    println!("derivation: {program}");
    println!("body:       {body}");

    // The derivation really belongs to the grammar and denotes the body
    // printed above, so the answer is simultaneously a proof object for
    // the property and a sentence of the target language.
    grammar.conforms(program).expect("derivation conforms");
    let denoted = denote(program, grammar).expect("derivation denotes");
    println!("denotation: {denoted}");
    let names: Vec<&str> = formals.iter().map(|(n, _)| n.as_str()).collect();
    println!("formals:    {}", names.join(", "));
}
