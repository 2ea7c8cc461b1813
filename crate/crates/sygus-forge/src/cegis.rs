//! Counterexample-guided synthesis.
//!
//! The loop alternates two queries. First the enumerator streams programs
//! in size order and yields the next one consistent with every stored
//! input point; if the (finite) language runs out the conjecture is
//! unrealizable, and hitting the size cap gives up. Second, the solver
//! looks for an input on which the candidate violates the property; no
//! such input means the candidate is a solution, otherwise the input joins
//! the point store and the stream resumes where it left off.
//!
//! A counterexample that matches an already stored point would loop
//! forever, since the candidate was checked against every stored point
//! before being proposed. That situation is a broken invariant, reported
//! as [`EngineError::Internal`] rather than a verdict.

use std::time::{Duration, Instant};

use crate::enumerator::{EnumeratorState, NextCandidate};
use crate::grammar::{denote, eval_program, GrammarSpec, ProgramTerm};
use crate::single_invocation::{detect_single_invocation, SiRound};
use crate::solver::{find_counterexample, SolverConfig, SolverError};
use crate::term::{
    apply_function, check_sorts, evaluate_with, simplify, Assignment, FunSig, Sort, Term,
    TermError, Value,
};

/// A synthesis problem: find a body for `fun_name` making `property` hold
/// for every assignment of the input variables.
#[derive(Debug, Clone)]
pub struct Conjecture {
    fun_name: String,
    params: Vec<(String, Sort)>,
    result_sort: Sort,
    input_vars: Vec<(String, Sort)>,
    property: Term,
    grammar: Option<GrammarSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("invalid conjecture: {0}")]
    Invalid(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Conjecture {
    pub fn new(
        fun_name: &str,
        params: Vec<(String, Sort)>,
        result_sort: Sort,
        input_vars: Vec<(String, Sort)>,
        property: Term,
        grammar: Option<GrammarSpec>,
    ) -> Result<Self, EngineError> {
        let sig = FunSig {
            name: fun_name.to_string(),
            params: params.iter().map(|(_, s)| s.clone()).collect(),
            result: result_sort.clone(),
        };
        match check_sorts(&property, Some(&sig)) {
            Ok(Sort::Bool) => {}
            Ok(s) => {
                return Err(EngineError::Invalid(format!(
                    "property has sort {s}, expected Bool"
                )))
            }
            Err(e) => return Err(EngineError::Invalid(e.to_string())),
        }
        for (name, sort) in property.free_vars() {
            match input_vars.iter().find(|(n, _)| *n == name) {
                None => {
                    return Err(EngineError::Invalid(format!(
                        "property mentions undeclared variable `{name}`"
                    )))
                }
                Some((_, s)) if *s != sort => {
                    return Err(EngineError::Invalid(format!(
                        "variable `{name}` used with sort {sort}, declared {s}"
                    )))
                }
                Some(_) => {}
            }
        }
        if let Some(g) = &grammar {
            if *g.result_sort() != result_sort {
                return Err(EngineError::Invalid(format!(
                    "grammar produces {}, function returns {result_sort}",
                    g.result_sort()
                )));
            }
            if g.inputs() != params.as_slice() {
                return Err(EngineError::Invalid(
                    "grammar inputs differ from the function parameters".to_string(),
                ));
            }
        }
        Ok(Conjecture {
            fun_name: fun_name.to_string(),
            params,
            result_sort,
            input_vars,
            property,
            grammar,
        })
    }

    pub fn fun_name(&self) -> &str {
        &self.fun_name
    }

    pub fn params(&self) -> &[(String, Sort)] {
        &self.params
    }

    pub fn result_sort(&self) -> &Sort {
        &self.result_sort
    }

    pub fn input_vars(&self) -> &[(String, Sort)] {
        &self.input_vars
    }

    pub fn property(&self) -> &Term {
        &self.property
    }

    pub fn grammar(&self) -> Option<&GrammarSpec> {
        self.grammar.as_ref()
    }

    /// Variables the function is applied to, when every application uses
    /// one identical vector of distinct variables.
    pub fn invocation_vars(&self) -> Option<Vec<(String, Sort)>> {
        detect_single_invocation(&self.property, &self.fun_name).ok()
    }

    pub fn single_invocation(&self) -> bool {
        self.invocation_vars().is_some()
    }

    /// The property with every application of the function replaced by
    /// `body` (a term over the parameters) at the respective arguments.
    pub fn apply_body(&self, body: &Term) -> Result<Term, EngineError> {
        apply_function(&self.property, &self.fun_name, &self.params, body)
            .map_err(|e| EngineError::Internal(format!("body substitution failed: {e}")))
    }

    /// Does the property hold at `point` when the function is interpreted
    /// by `program`?
    pub fn holds_at(
        &self,
        program: &ProgramTerm,
        point: &Assignment,
    ) -> Result<bool, TermError> {
        let grammar = self
            .grammar
            .as_ref()
            .expect("holds_at requires a grammar-backed conjecture");
        let mut call = |_: &str, args: &[Value]| -> Result<Value, TermError> {
            let mut env = Assignment::new();
            for ((name, _), v) in self.params.iter().zip(args) {
                env.set(name, v.clone());
            }
            eval_program(program, grammar, &env)
        };
        match evaluate_with(&self.property, point, &mut call)? {
            Value::Bool(b) => Ok(b),
            v => Err(TermError::IllSorted(format!(
                "property evaluated to {v}"
            ))),
        }
    }
}

/// Why a run ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Solution {
        /// Simplified body.
        body: Term,
        /// Body exactly as synthesized.
        raw_body: Term,
        /// Formal parameters the body is written over.
        formals: Vec<(String, Sort)>,
        /// Grammar derivation, for grammar-backed engines.
        program: Option<ProgramTerm>,
    },
    /// Proof that no function satisfies the property (within the grammar,
    /// when one is given).
    NoSolution,
    Unknown(String),
}

impl Verdict {
    pub fn is_solution(&self) -> bool {
        matches!(self, Verdict::Solution { .. })
    }
}

#[derive(Debug, Clone, Default)]
pub struct Stats {
    /// Candidate or instantiation rounds completed.
    pub rounds: usize,
    /// Programs the enumerator examined.
    pub candidates_scanned: usize,
    /// Satisfiability queries issued.
    pub solver_checks: usize,
    /// Counterexample points stored.
    pub points: usize,
    pub wall: Duration,
}

#[derive(Debug, Clone)]
pub struct CegisRound {
    pub round: usize,
    pub program: ProgramTerm,
    pub body: Term,
    pub size: usize,
    /// `None` on the closing round that produced the solution.
    pub counterexample: Option<Assignment>,
}

#[derive(Debug, Clone)]
pub enum Trace {
    Cegis(Vec<CegisRound>),
    Si(Vec<SiRound>),
}

impl Trace {
    pub fn rounds(&self) -> usize {
        match self {
            Trace::Cegis(v) => v.len(),
            Trace::Si(v) => v.len(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthesisOutcome {
    pub verdict: Verdict,
    pub trace: Trace,
    pub stats: Stats,
}

/// Solver models bind only the variables that appear in the queried
/// formula; a stored point must be total over the declared inputs, so
/// absent variables get the solver's defaults.
pub(crate) fn pad_point(mut point: Assignment, vars: &[(String, Sort)]) -> Assignment {
    for (name, sort) in vars {
        if point.get(name).is_none() {
            let v = match sort {
                Sort::Int => Value::Int(0.into()),
                _ => Value::Bool(false),
            };
            point.set(name, v);
        }
    }
    point
}

#[derive(Debug, Clone)]
pub struct CegisConfig {
    pub max_size: usize,
    pub max_rounds: usize,
    pub prune: bool,
    pub solver: SolverConfig,
}

impl Default for CegisConfig {
    fn default() -> Self {
        CegisConfig {
            max_size: 8,
            max_rounds: 500,
            prune: false,
            solver: SolverConfig::default(),
        }
    }
}

pub fn solve_cegis(c: &Conjecture, config: &CegisConfig) -> Result<SynthesisOutcome, EngineError> {
    let start = Instant::now();
    let mut stats = Stats::default();
    let mut rounds: Vec<CegisRound> = Vec::new();

    let Some(grammar) = c.grammar() else {
        return Ok(SynthesisOutcome {
            verdict: Verdict::Unknown("no grammar to enumerate candidates from".to_string()),
            trace: Trace::Cegis(rounds),
            stats,
        });
    };

    let mut enumerator = EnumeratorState::new(grammar.clone(), config.max_size, config.prune);
    let mut points: Vec<Assignment> = Vec::new();

    let finish = |verdict: Verdict,
                  rounds: Vec<CegisRound>,
                  mut stats: Stats,
                  enumerator: &EnumeratorState|
     -> Result<SynthesisOutcome, EngineError> {
        stats.rounds = rounds.len();
        stats.candidates_scanned = enumerator.total_scanned();
        stats.wall = start.elapsed();
        Ok(SynthesisOutcome {
            verdict,
            trace: Trace::Cegis(rounds),
            stats,
        })
    };

    loop {
        if rounds.len() >= config.max_rounds {
            return finish(
                Verdict::Unknown(format!("round limit ({}) reached", config.max_rounds)),
                rounds,
                stats,
                &enumerator,
            );
        }

        let mut verdict = |p: &ProgramTerm, a: &Assignment| c.holds_at(p, a);
        let next = enumerator
            .next_consistent(&points, &mut verdict)
            .map_err(|e| EngineError::Internal(format!("candidate evaluation failed: {e}")))?;

        let (program, size) = match next {
            NextCandidate::Candidate { program, size } => (program, size),
            NextCandidate::Exhausted => {
                // Every program in the language fails one of the stored
                // points, so no program satisfies the property.
                return finish(Verdict::NoSolution, rounds, stats, &enumerator);
            }
            NextCandidate::CapReached => {
                return finish(
                    Verdict::Unknown(format!(
                        "no candidate within size cap {}",
                        config.max_size
                    )),
                    rounds,
                    stats,
                    &enumerator,
                );
            }
        };

        let body = denote(&program, grammar)
            .map_err(|e| EngineError::Internal(format!("denotation failed: {e}")))?;
        let applied = c.apply_body(&body)?;

        stats.solver_checks += 1;
        let cex = match find_counterexample(&applied, &config.solver) {
            Ok(cex) => cex,
            Err(SolverError::ResourceLimit) => {
                rounds.push(CegisRound {
                    round: rounds.len() + 1,
                    program,
                    body,
                    size,
                    counterexample: None,
                });
                return finish(
                    Verdict::Unknown("solver budget exhausted".to_string()),
                    rounds,
                    stats,
                    &enumerator,
                );
            }
            Err(e) => return Err(EngineError::Internal(e.to_string())),
        };

        let round = rounds.len() + 1;
        match cex {
            None => {
                rounds.push(CegisRound {
                    round,
                    program: program.clone(),
                    body: body.clone(),
                    size,
                    counterexample: None,
                });
                stats.points = points.len();
                return finish(
                    Verdict::Solution {
                        body: simplify(&body),
                        raw_body: body,
                        formals: c.params().to_vec(),
                        program: Some(program),
                    },
                    rounds,
                    stats,
                    &enumerator,
                );
            }
            Some(point) => {
                let point = pad_point(point, c.input_vars());
                if points.contains(&point) {
                    return Err(EngineError::Internal(format!(
                        "solver returned already-stored counterexample {point} \
                         for candidate {program}; the refinement loop cannot progress"
                    )));
                }
                rounds.push(CegisRound {
                    round,
                    program,
                    body,
                    size,
                    counterexample: Some(point.clone()),
                });
                points.push(point);
                stats.points = points.len();
                enumerator.point_added();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::test_grammars::{int_pair_grammar, leaf_only_grammar};
    use crate::term::evaluate;

    fn max_property() -> Term {
        let x = Term::var("x", Sort::Int);
        let y = Term::var("y", Sort::Int);
        let f = Term::call("f", vec![x.clone(), y.clone()]);
        Term::conjoin(vec![
            Term::geq(f.clone(), x.clone()),
            Term::geq(f.clone(), y.clone()),
            Term::or(Term::eq(f.clone(), x), Term::eq(f, y)),
        ])
    }

    fn pair_params() -> Vec<(String, Sort)> {
        vec![("x".to_string(), Sort::Int), ("y".to_string(), Sort::Int)]
    }

    fn max_conjecture(grammar: Option<GrammarSpec>) -> Conjecture {
        Conjecture::new(
            "f",
            pair_params(),
            Sort::Int,
            pair_params(),
            max_property(),
            grammar,
        )
        .unwrap()
    }

    #[test]
    fn synthesizes_the_maximum_function() {
        let c = max_conjecture(Some(int_pair_grammar()));
        let out = solve_cegis(&c, &CegisConfig::default()).unwrap();
        let Verdict::Solution { body, raw_body, program, .. } = &out.verdict else {
            panic!("expected solution, got {:?}", out.verdict);
        };
        // The body is certified: no counterexample remains.
        let applied = c.apply_body(raw_body).unwrap();
        assert!(find_counterexample(&applied, &SolverConfig::default())
            .unwrap()
            .is_none());
        // Behavior is max on a grid.
        for xv in -6..=6 {
            for yv in -6..=6 {
                let a = Assignment::from_ints(&[("x", xv), ("y", yv)]);
                let got = evaluate(body, &a).unwrap();
                assert_eq!(got, Value::from(xv.max(yv)), "at ({xv}, {yv})");
            }
        }
        assert!(program.is_some());
        assert_eq!(out.stats.rounds, out.trace.rounds());
        // Only the final round lacks a counterexample.
        let Trace::Cegis(rounds) = &out.trace else { unreachable!() };
        assert!(rounds.last().unwrap().counterexample.is_none());
        assert!(rounds[..rounds.len() - 1]
            .iter()
            .all(|r| r.counterexample.is_some()));
        // Sizes never decrease along the stream.
        assert!(rounds.windows(2).all(|w| w[0].size <= w[1].size));
    }

    #[test]
    fn leaf_grammar_is_provably_insufficient() {
        let c = max_conjecture(Some(leaf_only_grammar()));
        let out = solve_cegis(&c, &CegisConfig::default()).unwrap();
        assert_eq!(out.verdict, Verdict::NoSolution);
        // All four leaves were considered before giving up.
        assert_eq!(out.stats.candidates_scanned, 4);
        assert!(out.stats.rounds < 4);
    }

    #[test]
    fn projection_conjecture_solves_at_size_zero() {
        let x = Term::var("x", Sort::Int);
        let y = Term::var("y", Sort::Int);
        let property = Term::eq(Term::call("f", vec![x.clone(), y]), x);
        let c = Conjecture::new(
            "f",
            pair_params(),
            Sort::Int,
            pair_params(),
            property,
            Some(leaf_only_grammar()),
        )
        .unwrap();
        let out = solve_cegis(&c, &CegisConfig::default()).unwrap();
        let Verdict::Solution { body, .. } = &out.verdict else {
            panic!("expected solution, got {:?}", out.verdict);
        };
        assert_eq!(body.to_string(), "x");
    }

    #[test]
    fn missing_grammar_and_caps_give_unknown() {
        let c = max_conjecture(None);
        let out = solve_cegis(&c, &CegisConfig::default()).unwrap();
        assert!(matches!(out.verdict, Verdict::Unknown(_)));

        let c = max_conjecture(Some(int_pair_grammar()));
        let tight = CegisConfig {
            max_size: 1,
            ..CegisConfig::default()
        };
        let out = solve_cegis(&c, &tight).unwrap();
        assert!(
            matches!(&out.verdict, Verdict::Unknown(msg) if msg.contains("size cap")),
            "got {:?}",
            out.verdict
        );

        let one_round = CegisConfig {
            max_rounds: 1,
            ..CegisConfig::default()
        };
        let out = solve_cegis(&c, &one_round).unwrap();
        assert!(
            matches!(&out.verdict, Verdict::Unknown(msg) if msg.contains("round limit")),
            "got {:?}",
            out.verdict
        );
    }

    #[test]
    fn conjecture_validation_catches_misuse() {
        // Property of the wrong sort.
        let bad = Conjecture::new(
            "f",
            pair_params(),
            Sort::Int,
            pair_params(),
            Term::var("x", Sort::Int),
            None,
        );
        assert!(matches!(bad, Err(EngineError::Invalid(_))));

        // Undeclared variable.
        let bad = Conjecture::new(
            "f",
            pair_params(),
            Sort::Int,
            vec![("x".to_string(), Sort::Int)],
            max_property(),
            None,
        );
        assert!(matches!(bad, Err(EngineError::Invalid(_))));

        // Grammar over different parameters.
        let other_params = vec![("a".to_string(), Sort::Int), ("b".to_string(), Sort::Int)];
        let bad = Conjecture::new(
            "f",
            other_params,
            Sort::Int,
            pair_params(),
            max_property(),
            Some(int_pair_grammar()),
        );
        assert!(matches!(bad, Err(EngineError::Invalid(_))));
    }
}
