//! Instantiation-based synthesis for single-invocation properties.
//!
//! A property is single-invocation when every application of the unknown
//! function uses one identical vector of distinct variables. Replacing that
//! application by a goal variable `g` and the invocation variables by
//! skolem constants turns the synthesis problem into a first-order
//! question: find terms t1..tn such that for every value of the skolems
//! some `Q(t_i)` holds. The loop alternates two queries:
//!
//! * if the conjunction of all `not Q(t_i)` is unsatisfiable, the guarded
//!   chain `ite(Q(t1), t1, ite(Q(t2), t2, ... tn))` is a solution;
//! * otherwise a model of `Q(e) and all not Q(t_i)` exhibits a witness
//!   value `e` that the current terms miss, and the pool policy picks a
//!   new term with that value under the model. A fresh pick can never
//!   repeat an existing term: the model satisfies `not Q(t_i)` for every
//!   stored term but `Q` holds of the pick's value.
//!
//! When the witness query is unsatisfiable there is a skolem assignment
//! under which no output value works at all, so the conjecture has no
//! solution, with or without a grammar.
//!
//! [`solve_si_syntax_guided`] additionally keeps every choice inside a
//! grammar: picks are nullary constructors (input variables first, then
//! numerals, in declaration order), guards are built by inverting the
//! grammar's denotation over the rewritten property, and the result is a
//! derivation of the grammar with `ite` at the spine.

use std::time::Instant;

use num_bigint::BigInt;

use crate::cegis::{Conjecture, EngineError, Stats, SynthesisOutcome, Trace, Verdict};
use crate::grammar::{denote, Denotation, GrammarSpec, ProgramTerm};
use crate::solver::{check_sat_term, find_counterexample, SatResult, SolverConfig, SolverError};
use crate::term::{simplify, substitute, Assignment, Op, Sort, Term, Value};

/// How the next instantiation term is chosen from a witness model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoolPolicy {
    /// First skolem whose model value matches the witness, else the
    /// witness value as a numeral.
    InputVarsThenConstant,
    /// Always the witness value as a numeral.
    ConstantOnly,
}

#[derive(Debug, Clone)]
pub struct SiConfig {
    pub max_rounds: usize,
    pub policy: PoolPolicy,
    pub solver: SolverConfig,
}

impl Default for SiConfig {
    fn default() -> Self {
        SiConfig {
            max_rounds: 64,
            policy: PoolPolicy::InputVarsThenConstant,
            solver: SolverConfig::default(),
        }
    }
}

/// One instantiation round: the witness model, the term picked from it,
/// and the blocking clause the pick adds to later queries.
#[derive(Debug, Clone)]
pub struct SiRound {
    pub round: usize,
    pub model: Assignment,
    pub witness: Value,
    pub chosen: Term,
    pub chosen_program: Option<ProgramTerm>,
    pub clause: Term,
}

/// The arguments the function is applied to, when the property applies it
/// to one identical vector of distinct variables everywhere.
pub fn detect_single_invocation(
    property: &Term,
    fun_name: &str,
) -> Result<Vec<(String, Sort)>, String> {
    let mut calls: Vec<&[Term]> = Vec::new();
    fn walk<'t>(t: &'t Term, fun: &str, out: &mut Vec<&'t [Term]>) {
        match t {
            Term::Call(name, args) if name == fun => {
                out.push(args);
                for a in args {
                    walk(a, fun, out);
                }
            }
            Term::Call(_, args) | Term::App(_, args) => {
                for a in args {
                    walk(a, fun, out);
                }
            }
            _ => {}
        }
    }
    walk(property, fun_name, &mut calls);

    let Some(first) = calls.first() else {
        return Err(format!("`{fun_name}` is never applied"));
    };
    for other in &calls[1..] {
        if other != first {
            return Err(format!(
                "`{fun_name}` is applied to different argument vectors"
            ));
        }
    }
    let mut vars = Vec::with_capacity(first.len());
    for arg in first.iter() {
        match arg {
            Term::Var(name, sort) => {
                if vars.iter().any(|(n, _)| n == name) {
                    return Err(format!(
                        "`{fun_name}` is applied to repeated variable `{name}`"
                    ));
                }
                vars.push((name.clone(), sort.clone()));
            }
            other => {
                return Err(format!(
                    "`{fun_name}` is applied to non-variable argument {other}"
                ))
            }
        }
    }
    Ok(vars)
}

/// The property rewritten over a goal variable and skolem constants.
struct SiProblem {
    skolems: Vec<(String, Sort)>,
    goal: String,
    q: Term,
}

impl SiProblem {
    /// `Q` with the goal replaced by `t`.
    fn q_at(&self, t: &Term) -> Result<Term, EngineError> {
        let mut map = std::collections::BTreeMap::new();
        map.insert(self.goal.clone(), t.clone());
        substitute(&self.q, &map)
            .map_err(|e| EngineError::Internal(format!("goal substitution failed: {e}")))
    }
}

/// `Err` carries the reason the rewriting does not apply; engines report
/// it as an unknown verdict.
fn build_problem(c: &Conjecture) -> Result<SiProblem, String> {
    let invocation = detect_single_invocation(c.property(), c.fun_name())?;
    if *c.result_sort() != Sort::Int {
        return Err(format!(
            "instantiation handles integer-valued functions, `{}` returns {}",
            c.fun_name(),
            c.result_sort()
        ));
    }
    // Skolem j stands for parameter j. Names k1..kn unless the problem
    // already uses one of them; the % space is reserved for internals.
    let taken: Vec<&str> = c.input_vars().iter().map(|(n, _)| n.as_str()).collect();
    let plain_free = (1..=invocation.len()).all(|j| !taken.contains(&format!("k{j}").as_str()));
    let skolems: Vec<(String, Sort)> = invocation
        .iter()
        .enumerate()
        .map(|(idx, (_, sort))| {
            let name = if plain_free {
                format!("k{}", idx + 1)
            } else {
                format!("%k{}", idx + 1)
            };
            (name, sort.clone())
        })
        .collect();

    let goal = "%g".to_string();
    let goal_body = Term::Var(goal.clone(), Sort::Int);
    let no_calls = crate::term::apply_function(c.property(), c.fun_name(), c.params(), &goal_body)
        .map_err(|e| format!("cannot rewrite applications: {e}"))?;
    let mut map = std::collections::BTreeMap::new();
    for ((iv, sort), (k, _)) in invocation.iter().zip(&skolems) {
        map.insert(iv.clone(), Term::Var(k.clone(), sort.clone()));
    }
    let q = substitute(&no_calls, &map).map_err(|e| format!("cannot introduce skolems: {e}"))?;
    Ok(SiProblem {
        skolems,
        goal,
        q,
    })
}

/// Right-nested conditional: each case guards its value, the last value is
/// the unguarded default.
pub fn build_ite_chain(cases: &[(Term, Term)], default: &Term) -> Term {
    cases.iter().rev().fold(default.clone(), |acc, (guard, value)| {
        Term::ite(guard.clone(), value.clone(), acc)
    })
}

enum StepOutcome {
    /// All stored terms are jointly exhaustive.
    Covered,
    Witness(Assignment, BigInt),
    NoFunction,
    Budget,
}

/// The two queries of one round, shared by both engines.
fn instantiation_step(
    si: &SiProblem,
    terms: &[Term],
    solver: &SolverConfig,
    stats: &mut Stats,
) -> Result<StepOutcome, EngineError> {
    let mut blocked: Vec<Term> = Vec::with_capacity(terms.len() + 1);
    for t in terms {
        blocked.push(Term::not(si.q_at(t)?));
    }
    if !terms.is_empty() {
        stats.solver_checks += 1;
        match check_sat_term(&Term::conjoin(blocked.clone()), solver) {
            Ok(SatResult::Unsat) => return Ok(StepOutcome::Covered),
            Ok(SatResult::Sat(_)) => {}
            Err(SolverError::ResourceLimit) => return Ok(StepOutcome::Budget),
            Err(e) => return Err(EngineError::Internal(e.to_string())),
        }
    }
    let e_var = Term::Var("%e".to_string(), Sort::Int);
    let mut parts = vec![si.q_at(&e_var)?];
    parts.extend(blocked);
    stats.solver_checks += 1;
    match check_sat_term(&Term::conjoin(parts), solver) {
        Ok(SatResult::Sat(model)) => {
            let witness = model
                .get("%e")
                .and_then(|v| v.as_int())
                .cloned()
                .ok_or_else(|| EngineError::Internal("witness model lacks a value".into()))?;
            Ok(StepOutcome::Witness(model, witness))
        }
        // Some skolem assignment admits no output value at all, so no
        // function exists.
        Ok(SatResult::Unsat) => Ok(StepOutcome::NoFunction),
        Err(SolverError::ResourceLimit) => Ok(StepOutcome::Budget),
        Err(e) => Err(EngineError::Internal(e.to_string())),
    }
}

/// Best-effort check that the finished body satisfies the rewritten
/// property everywhere; the covering proof from the final round already
/// guarantees it, so a failure is an internal inconsistency.
fn certify(
    si: &SiProblem,
    body: &Term,
    solver: &SolverConfig,
    stats: &mut Stats,
) -> Result<(), EngineError> {
    stats.solver_checks += 1;
    match find_counterexample(&si.q_at(body)?, solver) {
        Ok(None) | Err(SolverError::ResourceLimit) => Ok(()),
        Ok(Some(cex)) => Err(EngineError::Internal(format!(
            "synthesized body fails its own property at {cex}"
        ))),
        Err(e) => Err(EngineError::Internal(e.to_string())),
    }
}

fn unknown_outcome(reason: String, rounds: Vec<SiRound>, mut stats: Stats, start: Instant) -> SynthesisOutcome {
    stats.rounds = rounds.len();
    stats.wall = start.elapsed();
    SynthesisOutcome {
        verdict: Verdict::Unknown(reason),
        trace: Trace::Si(rounds),
        stats,
    }
}

/// Instantiation over free-form terms: picks are skolems or numerals.
pub fn solve_single_invocation(
    c: &Conjecture,
    config: &SiConfig,
) -> Result<SynthesisOutcome, EngineError> {
    let start = Instant::now();
    let mut stats = Stats::default();
    let mut rounds: Vec<SiRound> = Vec::new();

    let si = match build_problem(c) {
        Ok(p) => p,
        Err(reason) => return Ok(unknown_outcome(reason, rounds, stats, start)),
    };
    let mut terms: Vec<Term> = Vec::new();

    loop {
        match instantiation_step(&si, &terms, &config.solver, &mut stats)? {
            StepOutcome::Covered => {
                let cases: Vec<(Term, Term)> = terms[..terms.len() - 1]
                    .iter()
                    .map(|t| Ok((si.q_at(t)?, t.clone())))
                    .collect::<Result<_, EngineError>>()?;
                let raw_body = build_ite_chain(&cases, terms.last().expect("covered: nonempty"));
                certify(&si, &raw_body, &config.solver, &mut stats)?;
                stats.rounds = rounds.len();
                stats.wall = start.elapsed();
                return Ok(SynthesisOutcome {
                    verdict: Verdict::Solution {
                        body: simplify(&raw_body),
                        raw_body,
                        formals: si.skolems.clone(),
                        program: None,
                    },
                    trace: Trace::Si(rounds),
                    stats,
                });
            }
            StepOutcome::NoFunction => {
                stats.rounds = rounds.len();
                stats.wall = start.elapsed();
                return Ok(SynthesisOutcome {
                    verdict: Verdict::NoSolution,
                    trace: Trace::Si(rounds),
                    stats,
                });
            }
            StepOutcome::Budget => {
                return Ok(unknown_outcome(
                    "solver budget exhausted".to_string(),
                    rounds,
                    stats,
                    start,
                ));
            }
            StepOutcome::Witness(model, witness) => {
                if rounds.len() >= config.max_rounds {
                    return Ok(unknown_outcome(
                        format!("round limit ({}) reached", config.max_rounds),
                        rounds,
                        stats,
                        start,
                    ));
                }
                let chosen = match config.policy {
                    PoolPolicy::InputVarsThenConstant => si
                        .skolems
                        .iter()
                        .find(|(name, sort)| {
                            *sort == Sort::Int && model_value(&model, name) == witness
                        })
                        .map(|(name, sort)| Term::Var(name.clone(), sort.clone()))
                        .unwrap_or_else(|| Term::Int(witness.clone())),
                    PoolPolicy::ConstantOnly => Term::Int(witness.clone()),
                };
                if terms.contains(&chosen) {
                    return Err(EngineError::Internal(format!(
                        "pool picked already-stored term {chosen} from model {model}"
                    )));
                }
                rounds.push(SiRound {
                    round: rounds.len() + 1,
                    model,
                    witness: Value::Int(witness),
                    chosen: chosen.clone(),
                    chosen_program: None,
                    clause: Term::not(si.q_at(&chosen)?),
                });
                terms.push(chosen);
            }
        }
    }
}

/// Instantiation constrained to a grammar: picks are nullary constructors,
/// guards are grammar derivations of the rewritten property, and the
/// solution is a derivation with `ite` at the spine.
pub fn solve_si_syntax_guided(
    c: &Conjecture,
    config: &SiConfig,
) -> Result<SynthesisOutcome, EngineError> {
    let start = Instant::now();
    let mut stats = Stats::default();
    let mut rounds: Vec<SiRound> = Vec::new();

    let Some(grammar) = c.grammar() else {
        return Ok(unknown_outcome(
            "syntax-guided instantiation requires a grammar".to_string(),
            rounds,
            stats,
            start,
        ));
    };
    let si = match build_problem(c) {
        Ok(p) => p,
        Err(reason) => return Ok(unknown_outcome(reason, rounds, stats, start)),
    };
    if !grammar.ite_capable() {
        return Ok(unknown_outcome(
            "grammar has no ite constructor on its start symbol".to_string(),
            rounds,
            stats,
            start,
        ));
    }

    // Guards are produced by plugging picks into a derivation of the
    // rewritten property, so that property must itself be a sentence of
    // the condition language (with the goal variable in start-symbol
    // positions).
    let template = match derive_template(grammar, &si, c.params()) {
        Ok(t) => t,
        Err(reason) => return Ok(unknown_outcome(reason, rounds, stats, start)),
    };

    let to_skolems: std::collections::BTreeMap<String, Term> = c
        .params()
        .iter()
        .zip(&si.skolems)
        .map(|((p, _), (k, sort))| (p.clone(), Term::Var(k.clone(), sort.clone())))
        .collect();
    let over_skolems = |t: &Term| -> Result<Term, EngineError> {
        substitute(t, &to_skolems)
            .map_err(|e| EngineError::Internal(format!("skolem renaming failed: {e}")))
    };

    let mut terms: Vec<Term> = Vec::new();
    let mut programs: Vec<ProgramTerm> = Vec::new();

    loop {
        match instantiation_step(&si, &terms, &config.solver, &mut stats)? {
            StepOutcome::Covered => {
                let program = assemble_program(grammar, &template, &programs);
                grammar
                    .conforms(&program)
                    .map_err(|e| EngineError::Internal(format!("assembled program: {e}")))?;
                let raw_body = denote(&program, grammar)
                    .map_err(|e| EngineError::Internal(format!("denotation failed: {e}")))?;
                certify(&si, &over_skolems(&raw_body)?, &config.solver, &mut stats)?;
                stats.rounds = rounds.len();
                stats.wall = start.elapsed();
                return Ok(SynthesisOutcome {
                    verdict: Verdict::Solution {
                        body: simplify(&raw_body),
                        raw_body,
                        formals: c.params().to_vec(),
                        program: Some(program),
                    },
                    trace: Trace::Si(rounds),
                    stats,
                });
            }
            StepOutcome::NoFunction => {
                stats.rounds = rounds.len();
                stats.wall = start.elapsed();
                return Ok(SynthesisOutcome {
                    verdict: Verdict::NoSolution,
                    trace: Trace::Si(rounds),
                    stats,
                });
            }
            StepOutcome::Budget => {
                return Ok(unknown_outcome(
                    "solver budget exhausted".to_string(),
                    rounds,
                    stats,
                    start,
                ));
            }
            StepOutcome::Witness(model, witness) => {
                if rounds.len() >= config.max_rounds {
                    return Ok(unknown_outcome(
                        format!("round limit ({}) reached", config.max_rounds),
                        rounds,
                        stats,
                        start,
                    ));
                }
                let Some(pick) = pick_leaf(grammar, c.params(), &si, &model, &witness) else {
                    return Ok(unknown_outcome(
                        format!("no grammar variable or numeral produces witness {witness}"),
                        rounds,
                        stats,
                        start,
                    ));
                };
                let chosen = over_skolems(
                    &denote(&pick, grammar)
                        .map_err(|e| EngineError::Internal(format!("denotation failed: {e}")))?,
                )?;
                if terms.contains(&chosen) {
                    return Err(EngineError::Internal(format!(
                        "pool picked already-stored term {chosen} from model {model}"
                    )));
                }
                rounds.push(SiRound {
                    round: rounds.len() + 1,
                    model,
                    witness: Value::Int(witness),
                    chosen: chosen.clone(),
                    chosen_program: Some(pick.clone()),
                    clause: Term::not(si.q_at(&chosen)?),
                });
                terms.push(chosen);
                programs.push(pick);
            }
        }
    }
}

/// A model binds only the variables of the queried formula; anything that
/// dropped out is unconstrained and takes the solver's default of zero.
fn model_value(model: &Assignment, name: &str) -> BigInt {
    model
        .get(name)
        .and_then(|v| v.as_int())
        .cloned()
        .unwrap_or_default()
}

/// Nullary pick matching the witness: input-variable constructors first,
/// then numerals, each in declaration order.
fn pick_leaf(
    grammar: &GrammarSpec,
    params: &[(String, Sort)],
    si: &SiProblem,
    model: &Assignment,
    witness: &BigInt,
) -> Option<ProgramTerm> {
    let start = grammar.start();
    let ctors = &grammar.datatype(start)?.constructors;
    for ctor in ctors {
        if let Denotation::InputVar(p) = &ctor.denotation {
            let idx = params.iter().position(|(name, _)| name == p)?;
            let (k, _) = &si.skolems[idx];
            if model_value(model, k) == *witness {
                return Some(ProgramTerm::leaf(&ctor.name, start));
            }
        }
    }
    for ctor in ctors {
        if let Denotation::Numeral(n) = &ctor.denotation {
            if n == witness {
                return Some(ProgramTerm::leaf(&ctor.name, start));
            }
        }
    }
    None
}

const HOLE: &str = "%hole";

/// Derivation of the rewritten property in the condition language, with
/// hole leaves where the goal variable sits. `Err` is the reason it cannot
/// be derived.
fn derive_template(
    grammar: &GrammarSpec,
    si: &SiProblem,
    params: &[(String, Sort)],
) -> Result<ProgramTerm, String> {
    let condition = grammar
        .ite_condition_datatype()
        .expect("checked ite-capable");
    // Work over parameter names so variable leaves match directly.
    for (extra, _) in si.q.free_vars() {
        if extra == si.goal || si.skolems.iter().any(|(k, _)| *k == extra) {
            continue;
        }
        return Err(format!(
            "property constrains `{extra}`, which the function is not applied to"
        ));
    }
    let map: std::collections::BTreeMap<String, Term> = si
        .skolems
        .iter()
        .zip(params)
        .map(|((k, _), (p, sort))| (k.clone(), Term::Var(p.clone(), sort.clone())))
        .collect();
    let q_params = substitute(&si.q, &map).map_err(|e| e.to_string())?;
    express(grammar, condition, &q_params, &si.goal).ok_or_else(|| {
        format!(
            "property is not a sentence of the condition language `{condition}`"
        )
    })
}

/// Syntax-directed inverse of the denotation map.
fn express(grammar: &GrammarSpec, datatype: &str, t: &Term, goal: &str) -> Option<ProgramTerm> {
    let def = grammar.datatype(datatype)?;
    match t {
        Term::Var(name, _) if name == goal => {
            // The goal may only sit where the synthesized term goes.
            (datatype == grammar.start()).then(|| ProgramTerm::leaf(HOLE, datatype))
        }
        Term::Var(name, _) => def
            .constructors
            .iter()
            .find(|c| matches!(&c.denotation, Denotation::InputVar(v) if v == name))
            .map(|c| ProgramTerm::leaf(&c.name, datatype)),
        Term::Int(n) => def
            .constructors
            .iter()
            .find(|c| matches!(&c.denotation, Denotation::Numeral(m) if m == n))
            .map(|c| ProgramTerm::leaf(&c.name, datatype)),
        Term::App(op, args) => {
            'ctor: for c in &def.constructors {
                if c.denotation != Denotation::Builtin(*op) {
                    continue;
                }
                let mut children = Vec::with_capacity(args.len());
                for (arg, child_dt) in args.iter().zip(&c.args) {
                    match express(grammar, child_dt, arg, goal) {
                        Some(p) => children.push(p),
                        None => continue 'ctor,
                    }
                }
                return Some(ProgramTerm::node(&c.name, datatype, children));
            }
            None
        }
        _ => None,
    }
}

fn plug(template: &ProgramTerm, filler: &ProgramTerm) -> ProgramTerm {
    if template.constructor == HOLE {
        return filler.clone();
    }
    ProgramTerm {
        constructor: template.constructor.clone(),
        datatype: template.datatype.clone(),
        children: template
            .children
            .iter()
            .map(|c| plug(c, filler))
            .collect(),
    }
}

/// `ite(Q(p1), p1, ite(Q(p2), p2, ... pn))` as a grammar derivation.
fn assemble_program(
    grammar: &GrammarSpec,
    template: &ProgramTerm,
    programs: &[ProgramTerm],
) -> ProgramTerm {
    let start = grammar.start();
    let ite_name = grammar
        .datatype(start)
        .expect("validated")
        .constructors
        .iter()
        .find(|c| c.denotation == Denotation::Builtin(Op::Ite))
        .expect("checked ite-capable")
        .name
        .clone();
    let (last, guarded) = programs.split_last().expect("covered: nonempty");
    guarded.iter().rev().fold(last.clone(), |acc, p| {
        ProgramTerm::node(&ite_name, start, vec![plug(template, p), p.clone(), acc])
    })
}
