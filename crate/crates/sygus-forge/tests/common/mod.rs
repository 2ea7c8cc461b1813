//! Shared helpers for the integration suites: fixture loading, an
//! independent i64 formula representation with its own evaluator (the
//! differential oracle never touches the crate's term evaluator), and
//! seeded random generators.

#![allow(dead_code)]

use std::path::PathBuf;
use std::time::Duration;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sygus_forge::frontend::{parse_problem, ProblemFile};
use sygus_forge::term::{evaluate, evaluate_with, Assignment, Sort, Term, TermError, Value};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn parse_fixture(name: &str) -> ProblemFile {
    let path = fixture_path(name);
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()));
    parse_problem(&text).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Does `property` hold at `point` when calls of `fun` are interpreted
/// by `body` written over `formals` (bound positionally)?
pub fn property_holds(
    property: &Term,
    fun: &str,
    formals: &[(String, Sort)],
    body: &Term,
    point: &Assignment,
) -> bool {
    let mut call = |name: &str, args: &[Value]| -> Result<Value, TermError> {
        assert_eq!(name, fun, "property calls only the synthesized function");
        let mut env = Assignment::new();
        for ((formal, _), v) in formals.iter().zip(args) {
            env.set(formal, v.clone());
        }
        evaluate(body, &env)
    };
    match evaluate_with(property, point, &mut call) {
        Ok(Value::Bool(b)) => b,
        other => panic!("property evaluation failed: {other:?}"),
    }
}

/// A linear atom `sum(coeffs[i] * x_i) + constant (<= | =) 0` over a
/// fixed variable list. Kept in plain integers so the oracle shares no
/// code with the solver it checks.
#[derive(Debug, Clone)]
pub struct LinAtom {
    pub coeffs: Vec<i64>,
    pub constant: i64,
    pub is_eq: bool,
}

impl LinAtom {
    pub fn holds(&self, point: &[i64]) -> bool {
        let lhs: i64 = self
            .coeffs
            .iter()
            .zip(point)
            .map(|(c, x)| c * x)
            .sum::<i64>()
            + self.constant;
        if self.is_eq {
            lhs == 0
        } else {
            lhs <= 0
        }
    }
}

/// Quantifier-free boolean skeleton over linear atoms.
#[derive(Debug, Clone)]
pub enum Formula {
    Atom(LinAtom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn holds(&self, point: &[i64]) -> bool {
        match self {
            Formula::Atom(a) => a.holds(point),
            Formula::Not(f) => !f.holds(point),
            Formula::And(f, g) => f.holds(point) && g.holds(point),
            Formula::Or(f, g) => f.holds(point) || g.holds(point),
        }
    }

    /// Lower to the crate's term language, substituting `leaves[i]` for
    /// variable `i`. Coefficients become repeated addition since the
    /// language has no multiplication.
    pub fn to_term(&self, leaves: &[Term]) -> Term {
        match self {
            Formula::Atom(a) => {
                let mut lhs = Term::int(a.constant);
                for (c, leaf) in a.coeffs.iter().zip(leaves) {
                    for _ in 0..c.unsigned_abs() {
                        lhs = if *c > 0 {
                            Term::add(lhs, leaf.clone())
                        } else {
                            Term::sub(lhs, leaf.clone())
                        };
                    }
                }
                if a.is_eq {
                    Term::eq(lhs, Term::int(0))
                } else {
                    Term::leq(lhs, Term::int(0))
                }
            }
            Formula::Not(f) => Term::not(f.to_term(leaves)),
            Formula::And(f, g) => Term::and(f.to_term(leaves), g.to_term(leaves)),
            Formula::Or(f, g) => Term::or(f.to_term(leaves), g.to_term(leaves)),
        }
    }
}

/// Random formula over `n_vars` integer variables: boolean skeleton of
/// bounded depth, atom coefficients in `[-coeff, coeff]`, constants in
/// `[-constant, constant]`.
pub fn random_formula(
    rng: &mut ChaCha8Rng,
    n_vars: usize,
    depth: usize,
    coeff: i64,
    constant: i64,
) -> Formula {
    if depth == 0 || rng.gen_bool(0.45) {
        let coeffs = (0..n_vars).map(|_| rng.gen_range(-coeff..=coeff)).collect();
        return Formula::Atom(LinAtom {
            coeffs,
            constant: rng.gen_range(-constant..=constant),
            is_eq: rng.gen_bool(0.3),
        });
    }
    match rng.gen_range(0..3) {
        0 => Formula::Not(Box::new(random_formula(rng, n_vars, depth - 1, coeff, constant))),
        1 => Formula::And(
            Box::new(random_formula(rng, n_vars, depth - 1, coeff, constant)),
            Box::new(random_formula(rng, n_vars, depth - 1, coeff, constant)),
        ),
        _ => Formula::Or(
            Box::new(random_formula(rng, n_vars, depth - 1, coeff, constant)),
            Box::new(random_formula(rng, n_vars, depth - 1, coeff, constant)),
        ),
    }
}

/// Exhaustive scan of the box `[-radius, radius]^n`: the first point
/// satisfying the formula, if any.
pub fn box_model(f: &Formula, n_vars: usize, radius: i64) -> Option<Vec<i64>> {
    let mut point = vec![-radius; n_vars];
    loop {
        if f.holds(&point) {
            return Some(point);
        }
        // Odometer increment over the box.
        let mut i = 0;
        loop {
            if i == n_vars {
                return None;
            }
            point[i] += 1;
            if point[i] <= radius {
                break;
            }
            point[i] = -radius;
            i += 1;
        }
    }
}

pub fn as_millis(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}
