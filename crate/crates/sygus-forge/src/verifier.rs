//! Independent solution checking.
//!
//! [`verify`] asks the solver whether any assignment of the declared input
//! variables falsifies the property once the function is interpreted by
//! the candidate body. [`grid_check`] answers the same question by direct
//! evaluation over a bounded integer grid; it shares no machinery with the
//! solver, which is what makes it a useful second opinion in tests.

use crate::cegis::{pad_point, Conjecture, EngineError};
use crate::solver::{find_counterexample, SolverConfig, SolverError};
use crate::term::{check_sorts, evaluate, evaluate_with, Assignment, Sort, Term, TermError, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verification {
    Valid,
    /// An input assignment on which the property fails.
    Invalid(Assignment),
    Unknown(String),
}

impl Verification {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verification::Valid)
    }
}

/// A candidate body must bind exactly the function's parameter positions:
/// same count, same sorts, distinct names, and no stray variables. Bodies
/// from the instantiation engines are written over skolems rather than the
/// declared parameters, which is why the formal list travels with them.
fn check_shape(
    c: &Conjecture,
    body: &Term,
    formals: &[(String, Sort)],
) -> Result<(), EngineError> {
    if formals.len() != c.params().len() {
        return Err(EngineError::Invalid(format!(
            "body binds {} formals, function takes {}",
            formals.len(),
            c.params().len()
        )));
    }
    for ((f, fs), (_, ps)) in formals.iter().zip(c.params()) {
        if fs != ps {
            return Err(EngineError::Invalid(format!(
                "formal `{f}` has sort {fs}, parameter position wants {ps}"
            )));
        }
    }
    for (i, (f, _)) in formals.iter().enumerate() {
        if formals[..i].iter().any(|(g, _)| g == f) {
            return Err(EngineError::Invalid(format!("repeated formal `{f}`")));
        }
    }
    for (v, _) in body.free_vars() {
        if !formals.iter().any(|(f, _)| *f == v) {
            return Err(EngineError::Invalid(format!(
                "body mentions `{v}`, which is not a formal"
            )));
        }
    }
    match check_sorts(body, None) {
        Ok(s) if s == *c.result_sort() => Ok(()),
        Ok(s) => Err(EngineError::Invalid(format!(
            "body has sort {s}, function returns {}",
            c.result_sort()
        ))),
        Err(e) => Err(EngineError::Invalid(e.to_string())),
    }
}

/// Solver-backed check that the body satisfies the property for every
/// input assignment.
pub fn verify(
    c: &Conjecture,
    body: &Term,
    formals: &[(String, Sort)],
    config: &SolverConfig,
) -> Result<Verification, EngineError> {
    check_shape(c, body, formals)?;
    let applied = crate::term::apply_function(c.property(), c.fun_name(), formals, body)
        .map_err(|e| EngineError::Internal(format!("body substitution failed: {e}")))?;
    match find_counterexample(&applied, config) {
        Ok(None) => Ok(Verification::Valid),
        Ok(Some(cex)) => Ok(Verification::Invalid(pad_point(cex, c.input_vars()))),
        Err(SolverError::ResourceLimit) => {
            Ok(Verification::Unknown("solver budget exhausted".to_string()))
        }
        Err(e) => Err(EngineError::Internal(e.to_string())),
    }
}

/// Exhaustive check over the integer box `[-radius, radius]` per integer
/// input, with boolean inputs ranging over both truth values. Points are
/// scanned in declaration order, each coordinate ascending; the first
/// failure is reported.
pub fn grid_check(
    c: &Conjecture,
    body: &Term,
    formals: &[(String, Sort)],
    radius: i64,
) -> Result<Verification, EngineError> {
    check_shape(c, body, formals)?;
    let vars = c.input_vars();
    let mut point = Assignment::new();
    let verdict = scan(c, body, formals, radius, vars, &mut point)
        .map_err(|e| EngineError::Internal(e.to_string()))?;
    Ok(match verdict {
        Some(cex) => Verification::Invalid(cex),
        None => Verification::Valid,
    })
}

fn scan(
    c: &Conjecture,
    body: &Term,
    formals: &[(String, Sort)],
    radius: i64,
    rest: &[(String, Sort)],
    point: &mut Assignment,
) -> Result<Option<Assignment>, TermError> {
    let Some(((name, sort), rest)) = rest.split_first() else {
        let mut call = |_: &str, args: &[Value]| {
            let mut env = Assignment::new();
            for ((f, _), v) in formals.iter().zip(args) {
                env.set(f, v.clone());
            }
            evaluate(body, &env)
        };
        return match evaluate_with(c.property(), point, &mut call)? {
            Value::Bool(true) => Ok(None),
            Value::Bool(false) => Ok(Some(point.clone())),
            v => Err(TermError::IllSorted(format!("property evaluated to {v}"))),
        };
    };
    let values: Vec<Value> = match sort {
        Sort::Int => (-radius..=radius).map(Value::from).collect(),
        _ => vec![Value::Bool(false), Value::Bool(true)],
    };
    for v in values {
        point.set(name, v);
        if let Some(cex) = scan(c, body, formals, radius, rest, point)? {
            return Ok(Some(cex));
        }
    }
    Ok(None)
}
