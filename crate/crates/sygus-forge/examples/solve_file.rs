//! Parse a problem file and run whichever engine fits its shape.
//!
//!     cargo run --example solve_file -- [path]
//!
//! Without an argument this solves `fixtures/max.sl`. Try the other
//! fixtures to see an infeasible problem (`max_nullary.sl`) and one the
//! instantiation engine must decline (`abs.sl` with `--mode si` on the
//! command-line tool).

use std::path::PathBuf;

use sygus_forge::cegis::Verdict;
use sygus_forge::frontend::{parse_problem, print_define_fun, solve_problem, SolveOptions};

fn main() {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/max.sl")
    });
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()));
    let problem = match parse_problem(&text) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            std::process::exit(3);
        }
    };

    let (engine, outcome) =
        solve_problem(&problem, &SolveOptions::default()).expect("engine failure");

    println!("file:   {}", path.display());
    println!("engine: {engine}");
    println!("rounds: {}", outcome.stats.rounds);
    println!("checks: {}", outcome.stats.solver_checks);
    println!("wall:   {:?}", outcome.stats.wall);
    match &outcome.verdict {
        Verdict::Solution { body, formals, .. } => {
            let d = print_define_fun(&problem.fun_name, formals, &problem.result_sort, body);
            println!("result: {d}");
        }
        Verdict::NoSolution => println!("result: infeasible"),
        Verdict::Unknown(reason) => println!("result: unknown ({reason})"),
    }
}
