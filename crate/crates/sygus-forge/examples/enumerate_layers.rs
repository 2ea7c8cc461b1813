//! Walk the candidate stream layer by layer.
//!
//! Programs are enumerated in non-decreasing size (constructor count),
//! each layer in a fixed deterministic order. The second half streams
//! through the same grammar with a stored input point and skips every
//! program that disagrees with `max` there, which is how the refinement
//! loop consumes the enumerator.

use sygus_forge::enumerator::{enumerate_layer, EnumeratorState, NextCandidate};
use sygus_forge::grammar::{denote, eval_program, Constructor, DatatypeDef, GrammarSpec};
use sygus_forge::term::{Assignment, Op, Sort, Value};

fn max_grammar() -> GrammarSpec {
    let inputs = vec![
        ("x".to_string(), Sort::Int),
        ("y".to_string(), Sort::Int),
    ];
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
    GrammarSpec::new(vec![s, c], "S", &inputs).expect("well-formed grammar")
}

fn main() {
    let g = max_grammar();

    for size in 0..=3 {
        let layer = enumerate_layer(&g, "S", size);
        let shown: Vec<String> = layer
            .iter()
            .take(4)
            .map(|p| denote(p, &g).expect("denotes").to_string())
            .collect();
        let more = if layer.len() > 4 { ", ..." } else { "" };
        println!("size {size}: {:>6} programs  [{}{more}]", layer.len(), shown.join(", "));
    }

    // Stream candidates that agree with max at (x, y) = (0, 1). The
    // enumerator still scans everything in order; the point filters.
    let mut point = Assignment::new();
    point.set("x", 0i64);
    point.set("y", 1i64);
    let points = vec![point];

    let mut cursor = EnumeratorState::new(g.clone(), 3, false);
    let mut check = |p: &sygus_forge::grammar::ProgramTerm, a: &Assignment| {
        Ok(eval_program(p, &g, a)? == Value::Int(1.into()))
    };

    println!("\nconsistent with f(0, 1) = 1, sizes 0..=3:");
    let mut found = 0;
    loop {
        match cursor.next_consistent(&points, &mut check).expect("evaluation") {
            NextCandidate::Candidate { program, size } => {
                found += 1;
                if found <= 8 {
                    let t = denote(&program, &g).expect("denotes");
                    println!("  size {size}: {t}");
                }
            }
            NextCandidate::Exhausted | NextCandidate::CapReached => break,
        }
    }
    println!(
        "  ... {found} consistent out of {} scanned",
        cursor.total_scanned()
    );
}
