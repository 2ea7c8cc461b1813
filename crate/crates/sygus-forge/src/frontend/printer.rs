//! Canonical rendering of problems and solutions. `parse` of a printed
//! problem reproduces the same structure, and printing that is a fixpoint.

use std::fmt::Write;

use super::ProblemFile;
use crate::grammar::{Denotation, GrammarSpec};
use crate::term::{Sort, Term};

pub fn print_define_fun(
    name: &str,
    formals: &[(String, Sort)],
    result_sort: &Sort,
    body: &Term,
) -> String {
    format!(
        "(define-fun {name} ({}) {result_sort} {body})",
        formals
            .iter()
            .map(|(n, s)| format!("({n} {s})"))
            .collect::<Vec<_>>()
            .join(" ")
    )
}

pub fn print_grammar(g: &GrammarSpec) -> String {
    let mut out = String::from("(");
    for (i, dt) in g.datatypes().iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        write!(out, "({} {} (", dt.name, dt.sort).unwrap();
        for (j, c) in dt.constructors.iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            match &c.denotation {
                Denotation::Numeral(n) => write!(out, "(Constant {n})").unwrap(),
                Denotation::InputVar(v) => write!(out, "(Variable {v})").unwrap(),
                Denotation::Builtin(op) => {
                    write!(out, "({}", op.symbol()).unwrap();
                    for a in &c.args {
                        write!(out, " {a}").unwrap();
                    }
                    out.push(')');
                }
            }
        }
        out.push_str("))");
    }
    out.push(')');
    out
}

pub fn print_problem(p: &ProblemFile) -> String {
    let mut out = String::from("(set-logic LIA)\n");
    let params = p
        .params
        .iter()
        .map(|(n, s)| format!("({n} {s})"))
        .collect::<Vec<_>>()
        .join(" ");
    match &p.grammar {
        Some(g) => writeln!(
            out,
            "(synth-fun {} ({params}) {} {})",
            p.fun_name,
            p.result_sort,
            print_grammar(g)
        )
        .unwrap(),
        None => writeln!(out, "(synth-fun {} ({params}) {})", p.fun_name, p.result_sort).unwrap(),
    }
    for (n, s) in &p.declared_vars {
        writeln!(out, "(declare-var {n} {s})").unwrap();
    }
    for c in &p.constraints {
        writeln!(out, "(constraint {c})").unwrap();
    }
    out.push_str("(check-synth)\n");
    out
}
