//! Command-line driver.
//!
//! Results go to stdout: a `define-fun` on success, `infeasible` when the
//! problem is provably unsolvable, `unknown` when the engine gives up.
//! Traces, statistics, and diagnostics go to stderr. Exit codes: 0
//! solution, 1 infeasible, 2 unknown, 3 unreadable or malformed input,
//! 4 internal consistency failure.

use std::io::Write;
use std::path::PathBuf;

use clap::Parser;

use crate::cegis::{CegisRound, EngineError, Stats, Trace, Verdict};
use crate::frontend::{
    parse_problem, print_define_fun, solve_problem, EngineChoice, Mode, SolveOptions,
};
use crate::single_invocation::SiRound;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ModeArg {
    Auto,
    Cegis,
    Si,
}

#[derive(Debug, Parser)]
#[command(
    name = "sygus-forge",
    about = "Synthesize linear integer arithmetic functions from problem files"
)]
pub struct Args {
    /// Problem file.
    pub file: PathBuf,

    /// Engine: enumeration (cegis), instantiation (si), or pick by shape.
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    pub mode: ModeArg,

    /// Largest candidate size the enumerator may propose.
    #[arg(long, default_value_t = 8)]
    pub max_size: usize,

    /// Round cap; defaults to 500 for cegis and 64 for si.
    #[arg(long)]
    pub rounds: Option<usize>,

    /// Print the simplified solution body (the default).
    #[arg(long, overrides_with = "no_simplify")]
    pub simplify: bool,

    /// Print the solution body exactly as synthesized.
    #[arg(long)]
    pub no_simplify: bool,

    /// Print the round table to stderr.
    #[arg(long)]
    pub trace: bool,

    /// Print run statistics to stderr.
    #[arg(long)]
    pub stats: bool,

    /// Accepted for forward compatibility; the engine is deterministic.
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn run(args: &Args, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match try_run(args, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            3
        }
    }
}

fn try_run(args: &Args, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, String> {
    if args.seed.is_some() {
        let _ = writeln!(err, "warning: the engine is deterministic; --seed is ignored");
    }
    let text = std::fs::read_to_string(&args.file)
        .map_err(|e| format!("cannot read {}: {e}", args.file.display()))?;
    let problem = parse_problem(&text).map_err(|e| format!("parse error: {e}"))?;

    let options = SolveOptions {
        mode: match args.mode {
            ModeArg::Auto => Mode::Auto,
            ModeArg::Cegis => Mode::Cegis,
            ModeArg::Si => Mode::Si,
        },
        max_size: args.max_size,
        rounds: args.rounds,
        ..SolveOptions::default()
    };

    let (choice, outcome) = match solve_problem(&problem, &options) {
        Ok(pair) => pair,
        Err(EngineError::Invalid(msg)) => return Err(format!("invalid problem: {msg}")),
        Err(EngineError::Internal(msg)) => {
            let _ = writeln!(err, "internal consistency failure: {msg}");
            return Ok(4);
        }
    };

    if args.trace {
        print_trace(&outcome.trace, err);
    }
    if args.stats {
        print_stats(choice, &outcome.verdict, &outcome.stats, err);
    }

    let code = match &outcome.verdict {
        Verdict::Solution {
            body,
            raw_body,
            formals,
            ..
        } => {
            let printed = if args.no_simplify { raw_body } else { body };
            let _ = writeln!(
                out,
                "{}",
                print_define_fun(&problem.fun_name, formals, &problem.result_sort, printed)
            );
            0
        }
        Verdict::NoSolution => {
            let _ = writeln!(out, "infeasible");
            1
        }
        Verdict::Unknown(reason) => {
            let _ = writeln!(out, "unknown");
            let _ = writeln!(err, "gave up: {reason}");
            2
        }
    };
    Ok(code)
}

fn table(header: &[&str], rows: &[Vec<String>], err: &mut dyn Write) {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let line = |cells: &[String], err: &mut dyn Write| {
        let rendered: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{:<width$}", c, width = widths[i]))
            .collect();
        let _ = writeln!(err, "{}", rendered.join(" | ").trim_end());
    };
    line(
        &header.iter().map(|h| h.to_string()).collect::<Vec<_>>(),
        err,
    );
    let _ = writeln!(
        err,
        "{}",
        widths
            .iter()
            .map(|w| "-".repeat(*w))
            .collect::<Vec<_>>()
            .join("-+-")
    );
    for row in rows {
        line(row, err);
    }
}

fn print_trace(trace: &Trace, err: &mut dyn Write) {
    match trace {
        Trace::Cegis(rounds) => {
            let rows: Vec<Vec<String>> = rounds
                .iter()
                .map(|r: &CegisRound| {
                    vec![
                        r.round.to_string(),
                        r.program.to_string(),
                        r.size.to_string(),
                        match &r.counterexample {
                            Some(p) => p.to_string(),
                            None => "none".to_string(),
                        },
                    ]
                })
                .collect();
            table(&["round", "candidate", "size", "counterexample"], &rows, err);
        }
        Trace::Si(rounds) => {
            let rows: Vec<Vec<String>> = rounds
                .iter()
                .map(|r: &SiRound| {
                    vec![
                        r.round.to_string(),
                        r.model.to_string(),
                        r.chosen.to_string(),
                        r.clause.to_string(),
                    ]
                })
                .collect();
            table(&["round", "model", "choice of t", "added clause"], &rows, err);
        }
    }
}

fn print_stats(choice: EngineChoice, verdict: &Verdict, stats: &Stats, err: &mut dyn Write) {
    let _ = writeln!(err, "mode: {choice}");
    let _ = writeln!(
        err,
        "verdict: {}",
        match verdict {
            Verdict::Solution { .. } => "solution",
            Verdict::NoSolution => "infeasible",
            Verdict::Unknown(_) => "unknown",
        }
    );
    let _ = writeln!(err, "rounds: {}", stats.rounds);
    if choice == EngineChoice::Cegis {
        let _ = writeln!(err, "candidates scanned: {}", stats.candidates_scanned);
        let _ = writeln!(err, "points stored: {}", stats.points);
    }
    let _ = writeln!(err, "solver checks: {}", stats.solver_checks);
    if let Verdict::Solution {
        program: Some(p), ..
    } = verdict
    {
        let _ = writeln!(err, "solution size: {}", p.size());
    }
    let _ = writeln!(err, "time: {:?}", stats.wall);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_problem(dir: &std::path::Path, name: &str, text: &str) -> PathBuf {
        let path = dir.join(name);
        std::fs::write(&path, text).unwrap();
        path
    }

    fn run_captured(args: &Args) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(args, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    fn default_args(file: PathBuf) -> Args {
        Args {
            file,
            mode: ModeArg::Auto,
            max_size: 8,
            rounds: None,
            simplify: false,
            no_simplify: false,
            trace: false,
            stats: false,
            seed: None,
        }
    }

    const MAX_PROBLEM: &str = "\
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

    #[test]
    fn solves_and_reports_trace_and_stats() {
        let dir = std::env::temp_dir();
        let file = write_problem(&dir, "cli_max.sl", MAX_PROBLEM);
        let mut args = default_args(file);
        args.trace = true;
        args.stats = true;
        let (code, out, err) = run_captured(&args);
        assert_eq!(code, 0, "stderr: {err}");
        assert_eq!(
            out.trim(),
            "(define-fun f ((x Int) (y Int)) Int (ite (>= x y) x y))"
        );
        assert!(err.contains("mode: si (syntax-guided)"));
        assert!(err.contains("choice of t"));
        assert!(err.contains("rounds: 2"));
    }

    #[test]
    fn raw_body_is_printed_without_simplification() {
        let dir = std::env::temp_dir();
        let file = write_problem(&dir, "cli_max_raw.sl", MAX_PROBLEM);
        let mut args = default_args(file);
        args.no_simplify = true;
        let (code, out, _) = run_captured(&args);
        assert_eq!(code, 0);
        // The unsimplified chain still contains the guard built from the
        // whole property.
        assert!(out.contains("(and (<= x x)"), "got: {out}");
    }

    #[test]
    fn missing_file_and_bad_input_exit_3() {
        let (code, _, err) = run_captured(&default_args(PathBuf::from("/nonexistent.sl")));
        assert_eq!(code, 3);
        assert!(err.contains("cannot read"));

        let dir = std::env::temp_dir();
        let file = write_problem(&dir, "cli_bad.sl", "(set-logic LIA) (oops)");
        let (code, _, err) = run_captured(&default_args(file));
        assert_eq!(code, 3);
        assert!(err.contains("parse error"));
    }

    #[test]
    fn seed_is_ignored_with_a_warning() {
        let dir = std::env::temp_dir();
        let file = write_problem(&dir, "cli_seeded.sl", MAX_PROBLEM);
        let mut args = default_args(file);
        args.seed = Some(7);
        let (code, _, err) = run_captured(&args);
        assert_eq!(code, 0);
        assert!(err.contains("--seed is ignored"));
    }
}
