//! Problem files, engine selection, and textual output.

pub mod parser;
pub mod printer;
pub mod sexp;

use std::fmt;

use crate::cegis::{solve_cegis, CegisConfig, Conjecture, EngineError, SynthesisOutcome};
use crate::single_invocation::{
    solve_si_syntax_guided, solve_single_invocation, PoolPolicy, SiConfig,
};
use crate::solver::SolverConfig;
use crate::term::{Sort, Term};

pub use parser::{parse_problem, ParseError};
pub use printer::{print_define_fun, print_problem};

/// A parsed synthesis problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemFile {
    pub fun_name: String,
    pub params: Vec<(String, Sort)>,
    pub result_sort: Sort,
    pub grammar: Option<crate::grammar::GrammarSpec>,
    pub declared_vars: Vec<(String, Sort)>,
    pub constraints: Vec<Term>,
}

impl ProblemFile {
    /// All constraints conjoined.
    pub fn property(&self) -> Term {
        Term::conjoin(self.constraints.clone())
    }

    pub fn conjecture(&self) -> Result<Conjecture, EngineError> {
        Conjecture::new(
            &self.fun_name,
            self.params.clone(),
            self.result_sort.clone(),
            self.declared_vars.clone(),
            self.property(),
            self.grammar.clone(),
        )
    }
}

/// Engine selection requested on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Auto,
    Cegis,
    Si,
}

/// Engine actually run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineChoice {
    Cegis,
    /// Instantiation over free-form terms; solutions are written over
    /// skolem formals.
    SiDirect,
    /// Instantiation constrained to the grammar.
    SiSyntaxGuided,
}

impl fmt::Display for EngineChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineChoice::Cegis => write!(f, "cegis"),
            EngineChoice::SiDirect => write!(f, "si (direct)"),
            EngineChoice::SiSyntaxGuided => write!(f, "si (syntax-guided)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub mode: Mode,
    pub max_size: usize,
    /// Round cap; `None` keeps each engine's default (500 for cegis, 64
    /// for instantiation).
    pub rounds: Option<usize>,
    pub prune: bool,
    pub solver: SolverConfig,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            mode: Mode::Auto,
            max_size: 8,
            rounds: None,
            prune: false,
            solver: SolverConfig::default(),
        }
    }
}

/// `auto` picks instantiation exactly when the property is
/// single-invocation and the grammar (if any) can express guarded chains;
/// everything else falls to enumeration.
pub fn choose_engine(c: &Conjecture, mode: Mode) -> EngineChoice {
    let si_flavor = || {
        if c.grammar().is_some() {
            EngineChoice::SiSyntaxGuided
        } else {
            EngineChoice::SiDirect
        }
    };
    match mode {
        Mode::Cegis => EngineChoice::Cegis,
        Mode::Si => si_flavor(),
        Mode::Auto => {
            let applicable = c.single_invocation()
                && c.grammar().map_or(true, |g| g.ite_capable());
            if applicable {
                si_flavor()
            } else {
                EngineChoice::Cegis
            }
        }
    }
}

pub fn solve_problem(
    problem: &ProblemFile,
    options: &SolveOptions,
) -> Result<(EngineChoice, SynthesisOutcome), EngineError> {
    let conjecture = problem.conjecture()?;
    let choice = choose_engine(&conjecture, options.mode);
    let outcome = match choice {
        EngineChoice::Cegis => {
            let config = CegisConfig {
                max_size: options.max_size,
                max_rounds: options.rounds.unwrap_or(500),
                prune: options.prune,
                solver: options.solver.clone(),
            };
            solve_cegis(&conjecture, &config)?
        }
        EngineChoice::SiDirect | EngineChoice::SiSyntaxGuided => {
            let config = SiConfig {
                max_rounds: options.rounds.unwrap_or(64),
                policy: PoolPolicy::InputVarsThenConstant,
                solver: options.solver.clone(),
            };
            if choice == EngineChoice::SiDirect {
                solve_single_invocation(&conjecture, &config)?
            } else {
                solve_si_syntax_guided(&conjecture, &config)?
            }
        }
    };
    Ok((choice, outcome))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cegis::Verdict;

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
    fn auto_prefers_instantiation_when_it_applies() {
        let p = parse_problem(MAX_PROBLEM).unwrap();
        let c = p.conjecture().unwrap();
        assert_eq!(choose_engine(&c, Mode::Auto), EngineChoice::SiSyntaxGuided);
        assert_eq!(choose_engine(&c, Mode::Cegis), EngineChoice::Cegis);

        // No grammar: direct instantiation.
        let mut bare = p.clone();
        bare.grammar = None;
        let c = bare.conjecture().unwrap();
        assert_eq!(choose_engine(&c, Mode::Auto), EngineChoice::SiDirect);
        assert_eq!(choose_engine(&c, Mode::Si), EngineChoice::SiDirect);

        // Multi-invocation property: enumeration is the only route.
        let multi = MAX_PROBLEM.replace("(constraint (>= (f x y) y))", "(constraint (>= (f y x) y))");
        let p = parse_problem(&multi).unwrap();
        let c = p.conjecture().unwrap();
        assert_eq!(choose_engine(&c, Mode::Auto), EngineChoice::Cegis);
    }

    #[test]
    fn solves_end_to_end_in_both_modes() {
        let p = parse_problem(MAX_PROBLEM).unwrap();
        let (choice, out) = solve_problem(&p, &SolveOptions::default()).unwrap();
        assert_eq!(choice, EngineChoice::SiSyntaxGuided);
        let Verdict::Solution { body, formals, .. } = &out.verdict else {
            panic!("expected solution, got {:?}", out.verdict);
        };
        assert_eq!(
            print_define_fun("f", formals, &Sort::Int, body),
            "(define-fun f ((x Int) (y Int)) Int (ite (>= x y) x y))"
        );

        let cegis_opts = SolveOptions {
            mode: Mode::Cegis,
            ..SolveOptions::default()
        };
        let (choice, out) = solve_problem(&p, &cegis_opts).unwrap();
        assert_eq!(choice, EngineChoice::Cegis);
        assert!(out.verdict.is_solution());
    }
}
