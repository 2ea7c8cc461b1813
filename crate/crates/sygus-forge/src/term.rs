//! Core term language: linear integer arithmetic with booleans.
//!
//! Terms are immutable trees. The comparison operators kept internally are
//! `<=` and `=`; the surface forms `>=`, `>` and `<` are normalized away by
//! the smart constructors (and the parser) and restored by the printer, so
//! `parse(print(t)) == t` holds while printed output still reads naturally.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

/// Sorts: integers, booleans, and named datatypes introduced by grammars.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Int,
    Bool,
    Datatype(String),
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Int => write!(f, "Int"),
            Sort::Bool => write!(f, "Bool"),
            Sort::Datatype(name) => write!(f, "{name}"),
        }
    }
}

/// Builtin operators. `Leq` and `Eq` are the only comparisons; see the
/// module doc for how the other relations are encoded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    Add,
    Sub,
    Leq,
    Eq,
    And,
    Or,
    Not,
    Ite,
}

impl Op {
    pub fn arity(self) -> usize {
        match self {
            Op::Not => 1,
            Op::Ite => 3,
            _ => 2,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Op::Add => "+",
            Op::Sub => "-",
            Op::Leq => "<=",
            Op::Eq => "=",
            Op::And => "and",
            Op::Or => "or",
            Op::Not => "not",
            Op::Ite => "ite",
        }
    }

    fn rank(self) -> u8 {
        match self {
            Op::Add => 0,
            Op::Sub => 1,
            Op::Leq => 2,
            Op::Eq => 3,
            Op::And => 4,
            Op::Or => 5,
            Op::Not => 6,
            Op::Ite => 7,
        }
    }
}

/// A term of the property language. `Call` is an application of the function
/// being synthesized; it is eliminated by substitution before evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String, Sort),
    Int(BigInt),
    Bool(bool),
    App(Op, Vec<Term>),
    Call(String, Vec<Term>),
}

/// A runtime value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Int(BigInt),
    Bool(bool),
}

impl Value {
    pub fn sort(&self) -> Sort {
        match self {
            Value::Int(_) => Sort::Int,
            Value::Bool(_) => Sort::Bool,
        }
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Value::Int(n) => Some(n),
            Value::Bool(_) => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            Value::Int(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

impl From<i64> for Value {
    fn from(n: i64) -> Self {
        Value::Int(BigInt::from(n))
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

/// A total map from variable names to values.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    bindings: BTreeMap<String, Value>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(mut self, name: &str, value: impl Into<Value>) -> Self {
        self.bindings.insert(name.to_string(), value.into());
        self
    }

    pub fn set(&mut self, name: &str, value: impl Into<Value>) {
        self.bindings.insert(name.to_string(), value.into());
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.bindings.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Value)> {
        self.bindings.iter()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn from_ints(pairs: &[(&str, i64)]) -> Self {
        let mut a = Self::new();
        for (name, n) in pairs {
            a.set(name, *n);
        }
        a
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (name, value) in &self.bindings {
            if !first {
                write!(f, ", ")?;
            }
            write!(f, "{name} -> {value}")?;
            first = false;
        }
        if first {
            write!(f, "(empty)")?;
        }
        Ok(())
    }
}

/// Signature of the synthesized function, used to sort-check `Call` nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunSig {
    pub name: String,
    pub params: Vec<Sort>,
    pub result: Sort,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TermError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("uninterpreted call to `{0}`")]
    UninterpretedCall(String),
    #[error("sort mismatch for `{variable}`: expected {expected}, found {found}")]
    SortMismatch {
        variable: String,
        expected: Sort,
        found: Sort,
    },
    #[error("ill-sorted term at {0}")]
    IllSorted(String),
}

impl Term {
    pub fn var(name: &str, sort: Sort) -> Term {
        Term::Var(name.to_string(), sort)
    }

    pub fn int(n: i64) -> Term {
        Term::Int(BigInt::from(n))
    }

    pub fn add(a: Term, b: Term) -> Term {
        Term::App(Op::Add, vec![a, b])
    }

    pub fn sub(a: Term, b: Term) -> Term {
        Term::App(Op::Sub, vec![a, b])
    }

    pub fn neg(a: Term) -> Term {
        Term::sub(Term::int(0), a)
    }

    pub fn leq(a: Term, b: Term) -> Term {
        Term::App(Op::Leq, vec![a, b])
    }

    /// `a >= b`, stored as `b <= a`.
    pub fn geq(a: Term, b: Term) -> Term {
        Term::leq(b, a)
    }

    /// `a > b`, stored as `not (a <= b)`.
    pub fn gt(a: Term, b: Term) -> Term {
        Term::not(Term::leq(a, b))
    }

    /// `a < b`, stored as `not (b <= a)`.
    pub fn lt(a: Term, b: Term) -> Term {
        Term::not(Term::leq(b, a))
    }

    pub fn eq(a: Term, b: Term) -> Term {
        Term::App(Op::Eq, vec![a, b])
    }

    pub fn and(a: Term, b: Term) -> Term {
        Term::App(Op::And, vec![a, b])
    }

    pub fn or(a: Term, b: Term) -> Term {
        Term::App(Op::Or, vec![a, b])
    }

    pub fn not(a: Term) -> Term {
        Term::App(Op::Not, vec![a])
    }

    pub fn ite(c: Term, a: Term, b: Term) -> Term {
        Term::App(Op::Ite, vec![c, a, b])
    }

    pub fn call(name: &str, args: Vec<Term>) -> Term {
        Term::Call(name.to_string(), args)
    }

    /// Conjoin a list of boolean terms; empty input yields `true`.
    pub fn conjoin(mut terms: Vec<Term>) -> Term {
        match terms.len() {
            0 => Term::Bool(true),
            1 => terms.pop().unwrap(),
            _ => {
                let mut acc = terms.pop().unwrap();
                while let Some(t) = terms.pop() {
                    acc = Term::and(t, acc);
                }
                acc
            }
        }
    }

    /// Sort of the root node, when determinable without a call signature.
    pub fn root_sort(&self) -> Option<Sort> {
        match self {
            Term::Var(_, s) => Some(s.clone()),
            Term::Int(_) => Some(Sort::Int),
            Term::Bool(_) => Some(Sort::Bool),
            Term::App(op, args) => match op {
                Op::Add | Op::Sub => Some(Sort::Int),
                Op::Leq | Op::Eq | Op::And | Op::Or | Op::Not => Some(Sort::Bool),
                Op::Ite => args.get(1).and_then(|a| a.root_sort()),
            },
            Term::Call(_, _) => None,
        }
    }

    /// Free variables with their sorts, in name order.
    pub fn free_vars(&self) -> BTreeSet<(String, Sort)> {
        let mut acc = BTreeSet::new();
        fn walk(t: &Term, acc: &mut BTreeSet<(String, Sort)>) {
            match t {
                Term::Var(name, sort) => {
                    acc.insert((name.clone(), sort.clone()));
                }
                Term::Int(_) | Term::Bool(_) => {}
                Term::App(_, args) | Term::Call(_, args) => {
                    for a in args {
                        walk(a, acc);
                    }
                }
            }
        }
        walk(self, &mut acc);
        acc
    }

    pub fn contains_call(&self, name: &str) -> bool {
        match self {
            Term::Call(n, args) => n == name || args.iter().any(|a| a.contains_call(name)),
            Term::App(_, args) => args.iter().any(|a| a.contains_call(name)),
            _ => false,
        }
    }

    /// Canonical s-expression rendering. See module doc for the comparison
    /// orientation rules.
    pub fn to_sexp(&self) -> String {
        let mut out = String::new();
        write_sexp(self, &mut out);
        out
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sexp())
    }
}

fn write_sexp(t: &Term, out: &mut String) {
    match t {
        Term::Var(name, _) => out.push_str(name),
        Term::Int(n) => {
            if n < &BigInt::zero() {
                out.push_str("(- ");
                out.push_str(&(-n).to_string());
                out.push(')');
            } else {
                out.push_str(&n.to_string());
            }
        }
        Term::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Term::App(Op::Leq, args) => {
            // Orient so the operand that is smaller in the canonical order
            // comes first: `x <= 5` stays `(<= x 5)` while `5 <= x` is
            // rendered `(>= x 5)`.
            let (a, b) = (&args[0], &args[1]);
            if canonical_cmp(a, b) != Ordering::Greater {
                write_app("<=", &[a, b], out);
            } else {
                write_app(">=", &[b, a], out);
            }
        }
        Term::App(Op::Not, args) if matches!(&args[0], Term::App(Op::Leq, _)) => {
            // `not (a <= b)` is a strict comparison; print it as one.
            let inner = match &args[0] {
                Term::App(Op::Leq, xs) => xs,
                _ => unreachable!(),
            };
            let (a, b) = (&inner[0], &inner[1]);
            if canonical_cmp(a, b) != Ordering::Greater {
                write_app(">", &[a, b], out);
            } else {
                write_app("<", &[b, a], out);
            }
        }
        Term::App(Op::Sub, args) if args[0] == Term::int(0) => {
            write_app("-", &[&args[1]], out);
        }
        Term::App(op, args) => {
            let refs: Vec<&Term> = args.iter().collect();
            write_app(op.symbol(), &refs, out);
        }
        Term::Call(name, args) => {
            let refs: Vec<&Term> = args.iter().collect();
            write_app(name, &refs, out);
        }
    }
}

fn write_app(head: &str, args: &[&Term], out: &mut String) {
    out.push('(');
    out.push_str(head);
    for a in args {
        out.push(' ');
        write_sexp(a, out);
    }
    out.push(')');
}

/// Total order on terms used for canonical sorting of `and`/`or` operands
/// and for orienting printed comparisons. Applications come first so that
/// atoms like `f(x,y) >= x` keep the compound operand on the left.
pub fn canonical_cmp(a: &Term, b: &Term) -> Ordering {
    fn kind(t: &Term) -> u8 {
        match t {
            Term::App(..) => 0,
            Term::Call(..) => 1,
            Term::Var(..) => 2,
            Term::Int(_) => 3,
            Term::Bool(_) => 4,
        }
    }
    match (a, b) {
        (Term::App(op1, a1), Term::App(op2, a2)) => op1
            .rank()
            .cmp(&op2.rank())
            .then_with(|| cmp_children(a1, a2)),
        (Term::Call(n1, a1), Term::Call(n2, a2)) => {
            n1.cmp(n2).then_with(|| cmp_children(a1, a2))
        }
        (Term::Var(n1, _), Term::Var(n2, _)) => n1.cmp(n2),
        (Term::Int(x), Term::Int(y)) => x.cmp(y),
        (Term::Bool(x), Term::Bool(y)) => x.cmp(y),
        _ => kind(a).cmp(&kind(b)),
    }
}

fn cmp_children(xs: &[Term], ys: &[Term]) -> Ordering {
    for (x, y) in xs.iter().zip(ys.iter()) {
        match canonical_cmp(x, y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    xs.len().cmp(&ys.len())
}

/// Evaluate a closed term under an assignment. `Call` nodes are an error;
/// use [`evaluate_with`] to supply an interpretation for them.
pub fn evaluate(t: &Term, a: &Assignment) -> Result<Value, TermError> {
    evaluate_with(t, a, &mut |name, _| {
        Err(TermError::UninterpretedCall(name.to_string()))
    })
}

/// Evaluate with a handler for `Call` nodes. `ite` only evaluates the taken
/// branch.
pub fn evaluate_with<F>(t: &Term, a: &Assignment, call: &mut F) -> Result<Value, TermError>
where
    F: FnMut(&str, &[Value]) -> Result<Value, TermError>,
{
    match t {
        Term::Var(name, _) => a
            .get(name)
            .cloned()
            .ok_or_else(|| TermError::UnboundVariable(name.clone())),
        Term::Int(n) => Ok(Value::Int(n.clone())),
        Term::Bool(b) => Ok(Value::Bool(*b)),
        Term::App(op, args) => {
            let ill = || TermError::IllSorted(format!("({} ...)", op.symbol()));
            match op {
                Op::Ite => {
                    let c = evaluate_with(&args[0], a, call)?
                        .as_bool()
                        .ok_or_else(ill)?;
                    let taken = if c { &args[1] } else { &args[2] };
                    evaluate_with(taken, a, call)
                }
                Op::Not => {
                    let v = evaluate_with(&args[0], a, call)?
                        .as_bool()
                        .ok_or_else(ill)?;
                    Ok(Value::Bool(!v))
                }
                Op::Add | Op::Sub => {
                    let x = evaluate_with(&args[0], a, call)?;
                    let y = evaluate_with(&args[1], a, call)?;
                    let (x, y) = (x.as_int().ok_or_else(ill)?, y.as_int().ok_or_else(ill)?);
                    Ok(Value::Int(if *op == Op::Add { x + y } else { x - y }))
                }
                Op::Leq | Op::Eq => {
                    let x = evaluate_with(&args[0], a, call)?;
                    let y = evaluate_with(&args[1], a, call)?;
                    let (x, y) = (x.as_int().ok_or_else(ill)?, y.as_int().ok_or_else(ill)?);
                    Ok(Value::Bool(if *op == Op::Leq { x <= y } else { x == y }))
                }
                Op::And | Op::Or => {
                    let x = evaluate_with(&args[0], a, call)?
                        .as_bool()
                        .ok_or_else(ill)?;
                    let y = evaluate_with(&args[1], a, call)?
                        .as_bool()
                        .ok_or_else(ill)?;
                    Ok(Value::Bool(if *op == Op::And { x && y } else { x || y }))
                }
            }
        }
        Term::Call(name, args) => {
            let mut vals = Vec::with_capacity(args.len());
            for arg in args {
                vals.push(evaluate_with(arg, a, call)?);
            }
            call(name, &vals)
        }
    }
}

/// Simultaneous substitution of variables by terms. Rejects replacements
/// whose root sort differs from the variable's sort.
pub fn substitute(t: &Term, sigma: &BTreeMap<String, Term>) -> Result<Term, TermError> {
    match t {
        Term::Var(name, sort) => match sigma.get(name) {
            None => Ok(t.clone()),
            Some(r) => {
                if let Some(found) = r.root_sort() {
                    if found != *sort {
                        return Err(TermError::SortMismatch {
                            variable: name.clone(),
                            expected: sort.clone(),
                            found,
                        });
                    }
                }
                Ok(r.clone())
            }
        },
        Term::Int(_) | Term::Bool(_) => Ok(t.clone()),
        Term::App(op, args) => {
            let mut out = Vec::with_capacity(args.len());
            for a in args {
                out.push(substitute(a, sigma)?);
            }
            Ok(Term::App(*op, out))
        }
        Term::Call(name, args) => {
            let mut out = Vec::with_capacity(args.len());
            for a in args {
                out.push(substitute(a, sigma)?);
            }
            Ok(Term::Call(name.clone(), out))
        }
    }
}

/// Replace every application `fname(args...)` by `body[params := args]`.
pub fn apply_function(
    t: &Term,
    fname: &str,
    params: &[(String, Sort)],
    body: &Term,
) -> Result<Term, TermError> {
    match t {
        Term::Var(..) | Term::Int(_) | Term::Bool(_) => Ok(t.clone()),
        Term::App(op, args) => {
            let mut out = Vec::with_capacity(args.len());
            for a in args {
                out.push(apply_function(a, fname, params, body)?);
            }
            Ok(Term::App(*op, out))
        }
        Term::Call(name, args) => {
            let mut out = Vec::with_capacity(args.len());
            for a in args {
                out.push(apply_function(a, fname, params, body)?);
            }
            if name == fname {
                let mut sigma = BTreeMap::new();
                for ((p, _), arg) in params.iter().zip(out.iter()) {
                    sigma.insert(p.clone(), arg.clone());
                }
                substitute(body, &sigma)
            } else {
                Ok(Term::Call(name.clone(), out))
            }
        }
    }
}

/// Full sort check. Returns the sort of the term. `fun` supplies the
/// signature for `Call` nodes when the term may mention the synthesized
/// function.
pub fn check_sorts(t: &Term, fun: Option<&FunSig>) -> Result<Sort, TermError> {
    let mut seen: BTreeMap<String, Sort> = BTreeMap::new();
    check_sorts_at(t, fun, &mut seen, "root")
}

fn check_sorts_at(
    t: &Term,
    fun: Option<&FunSig>,
    seen: &mut BTreeMap<String, Sort>,
    path: &str,
) -> Result<Sort, TermError> {
    match t {
        Term::Var(name, sort) => {
            if let Some(prev) = seen.get(name) {
                if prev != sort {
                    return Err(TermError::SortMismatch {
                        variable: name.clone(),
                        expected: prev.clone(),
                        found: sort.clone(),
                    });
                }
            } else {
                seen.insert(name.clone(), sort.clone());
            }
            Ok(sort.clone())
        }
        Term::Int(_) => Ok(Sort::Int),
        Term::Bool(_) => Ok(Sort::Bool),
        Term::App(op, args) => {
            if args.len() != op.arity() {
                return Err(TermError::IllSorted(format!(
                    "{path}: `{}` expects {} arguments, got {}",
                    op.symbol(),
                    op.arity(),
                    args.len()
                )));
            }
            let mut sorts = Vec::with_capacity(args.len());
            for (i, a) in args.iter().enumerate() {
                let sub = format!("{path}.{i}");
                sorts.push(check_sorts_at(a, fun, seen, &sub)?);
            }
            let want = |expected: &[Sort], result: Sort| -> Result<Sort, TermError> {
                if sorts == expected {
                    Ok(result)
                } else {
                    Err(TermError::IllSorted(format!(
                        "{path}: bad argument sorts for `{}`",
                        op.symbol()
                    )))
                }
            };
            match op {
                Op::Add | Op::Sub => want(&[Sort::Int, Sort::Int], Sort::Int),
                Op::Leq | Op::Eq => want(&[Sort::Int, Sort::Int], Sort::Bool),
                Op::And | Op::Or => want(&[Sort::Bool, Sort::Bool], Sort::Bool),
                Op::Not => want(&[Sort::Bool], Sort::Bool),
                Op::Ite => {
                    if sorts[0] == Sort::Bool && sorts[1] == sorts[2] {
                        Ok(sorts[1].clone())
                    } else {
                        Err(TermError::IllSorted(format!("{path}: bad `ite` sorts")))
                    }
                }
            }
        }
        Term::Call(name, args) => {
            let sig = fun.ok_or_else(|| TermError::UninterpretedCall(name.clone()))?;
            if sig.name != *name {
                return Err(TermError::UninterpretedCall(name.clone()));
            }
            if args.len() != sig.params.len() {
                return Err(TermError::IllSorted(format!(
                    "{path}: `{name}` expects {} arguments, got {}",
                    sig.params.len(),
                    args.len()
                )));
            }
            for (i, (a, expected)) in args.iter().zip(sig.params.iter()).enumerate() {
                let sub = format!("{path}.{i}");
                let found = check_sorts_at(a, fun, seen, &sub)?;
                if found != *expected {
                    return Err(TermError::IllSorted(format!(
                        "{sub}: argument {i} of `{name}` has sort {found}, expected {expected}"
                    )));
                }
            }
            Ok(sig.result.clone())
        }
    }
}

/// Simplify a term. The rewrite system is deliberately small:
///
/// - constant folding on all operators
/// - `t <= t -> true`, `t = t -> true` for syntactically equal operands
/// - `and`/`or` are flattened, sorted canonically, and identity/absorbing
///   elements removed
/// - `not (not t) -> t`
/// - `ite true a b -> a`, `ite false a b -> b`, `ite c a a -> a`
///
/// The result is a fixpoint: simplifying twice changes nothing.
pub fn simplify(t: &Term) -> Term {
    match t {
        Term::Var(..) | Term::Int(_) | Term::Bool(_) => t.clone(),
        Term::Call(name, args) => {
            Term::Call(name.clone(), args.iter().map(simplify).collect())
        }
        Term::App(op, args) => {
            let args: Vec<Term> = args.iter().map(simplify).collect();
            simplify_node(*op, args)
        }
    }
}

fn simplify_node(op: Op, args: Vec<Term>) -> Term {
    match op {
        Op::Add | Op::Sub => match (&args[0], &args[1]) {
            (Term::Int(x), Term::Int(y)) => {
                Term::Int(if op == Op::Add { x + y } else { x - y })
            }
            _ => Term::App(op, args),
        },
        Op::Leq | Op::Eq => {
            if args[0] == args[1] {
                return Term::Bool(true);
            }
            match (&args[0], &args[1]) {
                (Term::Int(x), Term::Int(y)) => {
                    Term::Bool(if op == Op::Leq { x <= y } else { x == y })
                }
                _ => Term::App(op, args),
            }
        }
        Op::Not => match &args[0] {
            Term::Bool(b) => Term::Bool(!b),
            Term::App(Op::Not, inner) => inner[0].clone(),
            _ => Term::App(Op::Not, args),
        },
        Op::And | Op::Or => {
            let absorbing = op == Op::Or; // `true` absorbs `or`, `false` absorbs `and`
            let mut flat = Vec::new();
            let mut stack: Vec<Term> = args.into_iter().rev().collect();
            while let Some(t) = stack.pop() {
                match t {
                    Term::App(o, xs) if o == op => {
                        for x in xs.into_iter().rev() {
                            stack.push(x);
                        }
                    }
                    Term::Bool(b) => {
                        if b == absorbing {
                            return Term::Bool(absorbing);
                        }
                        // identity element: drop
                    }
                    other => flat.push(other),
                }
            }
            flat.sort_by(canonical_cmp);
            match flat.len() {
                0 => Term::Bool(!absorbing),
                1 => flat.pop().unwrap(),
                _ => {
                    let mut acc = flat.pop().unwrap();
                    while let Some(x) = flat.pop() {
                        acc = Term::App(op, vec![x, acc]);
                    }
                    acc
                }
            }
        }
        Op::Ite => {
            let mut it = args.into_iter();
            let (c, a, b) = (it.next().unwrap(), it.next().unwrap(), it.next().unwrap());
            match c {
                Term::Bool(true) => a,
                Term::Bool(false) => b,
                _ if a == b => a,
                c => Term::ite(c, a, b),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Term {
        Term::var("x", Sort::Int)
    }

    fn y() -> Term {
        Term::var("y", Sort::Int)
    }

    /// The running example property: f is a max of its two arguments.
    /// Instantiated here with `v` standing for the function value.
    fn max_property(v: Term) -> Term {
        Term::and(
            Term::geq(v.clone(), x()),
            Term::and(
                Term::geq(v.clone(), y()),
                Term::or(Term::eq(v.clone(), x()), Term::eq(v, y())),
            ),
        )
    }

    /// Independent reference evaluator over i64, used to cross-check
    /// `evaluate` on the frozen examples.
    fn naive_eval_bool(t: &Term, a: &Assignment) -> bool {
        fn int(t: &Term, a: &Assignment) -> i64 {
            match t {
                Term::Var(n, _) => {
                    let v = a.get(n).unwrap().as_int().unwrap();
                    i64::try_from(v).unwrap()
                }
                Term::Int(n) => i64::try_from(n).unwrap(),
                Term::App(Op::Add, xs) => int(&xs[0], a) + int(&xs[1], a),
                Term::App(Op::Sub, xs) => int(&xs[0], a) - int(&xs[1], a),
                Term::App(Op::Ite, xs) => {
                    if naive_eval_bool(&xs[0], a) {
                        int(&xs[1], a)
                    } else {
                        int(&xs[2], a)
                    }
                }
                _ => panic!("not an int term"),
            }
        }
        match t {
            Term::Bool(b) => *b,
            Term::Var(n, _) => a.get(n).unwrap().as_bool().unwrap(),
            Term::App(Op::Leq, xs) => int(&xs[0], a) <= int(&xs[1], a),
            Term::App(Op::Eq, xs) => int(&xs[0], a) == int(&xs[1], a),
            Term::App(Op::And, xs) => naive_eval_bool(&xs[0], a) && naive_eval_bool(&xs[1], a),
            Term::App(Op::Or, xs) => naive_eval_bool(&xs[0], a) || naive_eval_bool(&xs[1], a),
            Term::App(Op::Not, xs) => !naive_eval_bool(&xs[0], a),
            Term::App(Op::Ite, xs) => {
                if naive_eval_bool(&xs[0], a) {
                    naive_eval_bool(&xs[1], a)
                } else {
                    naive_eval_bool(&xs[2], a)
                }
            }
            _ => panic!("not a bool term"),
        }
    }

    #[test]
    fn evaluates_conditional_max_term() {
        let t = Term::ite(Term::leq(x(), y()), y(), x());
        let a = Assignment::from_ints(&[("x", 1), ("y", 2)]);
        assert_eq!(evaluate(&t, &a).unwrap(), Value::from(2));
        let b = Assignment::from_ints(&[("x", 3), ("y", 1)]);
        assert_eq!(evaluate(&t, &b).unwrap(), Value::from(3));
    }

    #[test]
    fn evaluates_max_property_against_reference() {
        let cases = [
            (3, 7, 3, false), // value x is not a max when y is larger
            (7, 3, 7, true),
            (0, 0, 0, true),
            (2, 5, 5, true),
            (2, 5, 6, false),
        ];
        for (xv, yv, v, expected) in cases {
            let prop = max_property(Term::int(v));
            let a = Assignment::from_ints(&[("x", xv), ("y", yv)]);
            let got = evaluate(&prop, &a).unwrap().as_bool().unwrap();
            assert_eq!(got, expected, "x={xv} y={yv} v={v}");
            assert_eq!(got, naive_eval_bool(&prop, &a));
        }
    }

    #[test]
    fn unbound_variable_is_an_error() {
        let t = Term::add(x(), y());
        let a = Assignment::from_ints(&[("x", 1)]);
        assert_eq!(
            evaluate(&t, &a),
            Err(TermError::UnboundVariable("y".to_string()))
        );
    }

    #[test]
    fn ite_does_not_evaluate_untaken_branch() {
        let t = Term::ite(Term::Bool(true), x(), Term::var("unbound", Sort::Int));
        let a = Assignment::from_ints(&[("x", 5)]);
        assert_eq!(evaluate(&t, &a).unwrap(), Value::from(5));
    }

    #[test]
    fn substitution_is_simultaneous() {
        // g >= x with both vars mapped to k1 collapses to k1 <= k1.
        let g = Term::var("g", Sort::Int);
        let k1 = Term::var("k1", Sort::Int);
        let t = Term::geq(g, x());
        let mut sigma = BTreeMap::new();
        sigma.insert("g".to_string(), k1.clone());
        sigma.insert("x".to_string(), k1.clone());
        assert_eq!(
            substitute(&t, &sigma).unwrap(),
            Term::leq(k1.clone(), k1.clone())
        );

        // Swapping x and y must not cascade.
        let swap = {
            let mut m = BTreeMap::new();
            m.insert("x".to_string(), y());
            m.insert("y".to_string(), x());
            m
        };
        assert_eq!(
            substitute(&Term::sub(x(), y()), &swap).unwrap(),
            Term::sub(y(), x())
        );
    }

    #[test]
    fn empty_substitution_is_identity() {
        let t = Term::add(x(), y());
        assert_eq!(substitute(&t, &BTreeMap::new()).unwrap(), t);
    }

    #[test]
    fn substitution_rejects_sort_mismatch() {
        let mut sigma = BTreeMap::new();
        sigma.insert("x".to_string(), Term::Bool(true));
        let err = substitute(&x(), &sigma).unwrap_err();
        assert!(matches!(err, TermError::SortMismatch { .. }));
    }

    #[test]
    fn substitution_composes_on_disjoint_domains() {
        let t = Term::add(x(), y());
        let mut s1 = BTreeMap::new();
        s1.insert("x".to_string(), Term::add(Term::var("a", Sort::Int), Term::int(1)));
        let mut s2 = BTreeMap::new();
        s2.insert("y".to_string(), Term::var("b", Sort::Int));

        let sequential = substitute(&substitute(&t, &s1).unwrap(), &s2).unwrap();
        let mut composed = BTreeMap::new();
        for (k, v) in s1.iter() {
            composed.insert(k.clone(), substitute(v, &s2).unwrap());
        }
        for (k, v) in s2.iter() {
            composed.entry(k.clone()).or_insert_with(|| v.clone());
        }
        assert_eq!(sequential, substitute(&t, &composed).unwrap());
    }

    #[test]
    fn apply_function_substitutes_arguments() {
        // P = f(x, y) >= x  with  f := x + y  gives  x + y >= x.
        let prop = Term::geq(Term::call("f", vec![x(), y()]), x());
        let params = vec![("x".to_string(), Sort::Int), ("y".to_string(), Sort::Int)];
        let body = Term::add(x(), y());
        let got = apply_function(&prop, "f", &params, &body).unwrap();
        assert_eq!(got, Term::geq(Term::add(x(), y()), x()));

        // Arguments are substituted positionally, including swapped uses.
        let prop2 = Term::eq(Term::call("f", vec![y(), x()]), Term::int(0));
        let got2 = apply_function(&prop2, "f", &params, &body).unwrap();
        assert_eq!(got2, Term::eq(Term::add(y(), x()), Term::int(0)));
    }

    #[test]
    fn simplifies_instantiated_max_guard_to_single_comparison() {
        let k1 = Term::var("k1", Sort::Int);
        let k2 = Term::var("k2", Sort::Int);
        let guard = Term::and(
            Term::geq(k1.clone(), k1.clone()),
            Term::and(
                Term::geq(k1.clone(), k2.clone()),
                Term::or(
                    Term::eq(k1.clone(), k1.clone()),
                    Term::eq(k1.clone(), k2.clone()),
                ),
            ),
        );
        let t = Term::ite(guard, k1.clone(), k2.clone());
        let s = simplify(&t);
        assert_eq!(
            s,
            Term::ite(Term::leq(k2.clone(), k1.clone()), k1, k2)
        );
        assert_eq!(s.to_sexp(), "(ite (>= k1 k2) k1 k2)");
    }

    #[test]
    fn simplifies_program_shaped_guard_over_inputs() {
        let guard = Term::and(
            Term::geq(x(), x()),
            Term::and(
                Term::geq(x(), y()),
                Term::or(Term::eq(x(), x()), Term::eq(x(), y())),
            ),
        );
        let t = Term::ite(guard, x(), y());
        let s = simplify(&t);
        assert_eq!(s.to_sexp(), "(ite (>= x y) x y)");
    }

    #[test]
    fn simplify_folds_constants() {
        assert_eq!(simplify(&Term::add(Term::int(2), Term::int(3))), Term::int(5));
        assert_eq!(
            simplify(&Term::leq(Term::int(2), Term::int(3))),
            Term::Bool(true)
        );
        assert_eq!(
            simplify(&Term::not(Term::not(x_leq_y()))),
            x_leq_y()
        );
        assert_eq!(
            simplify(&Term::ite(x_leq_y(), y(), y())),
            y()
        );
        assert_eq!(simplify(&x()), x());
    }

    fn x_leq_y() -> Term {
        Term::leq(x(), y())
    }

    #[test]
    fn simplify_is_idempotent_on_samples() {
        let samples = vec![
            Term::ite(
                Term::and(Term::geq(x(), x()), Term::geq(x(), y())),
                x(),
                y(),
            ),
            Term::and(Term::or(Term::Bool(false), x_leq_y()), Term::Bool(true)),
            Term::add(Term::sub(x(), x()), Term::int(3)),
            Term::or(Term::eq(y(), x()), Term::eq(x(), y())),
        ];
        for t in samples {
            let once = simplify(&t);
            assert_eq!(simplify(&once), once, "not a fixpoint: {t}");
        }
    }

    #[test]
    fn printer_orients_comparisons() {
        assert_eq!(Term::leq(x(), y()).to_sexp(), "(<= x y)");
        assert_eq!(Term::leq(y(), x()).to_sexp(), "(>= x y)");
        assert_eq!(Term::leq(x(), Term::int(5)).to_sexp(), "(<= x 5)");
        assert_eq!(Term::leq(Term::int(5), x()).to_sexp(), "(>= x 5)");
        assert_eq!(Term::gt(x(), y()).to_sexp(), "(> x y)");
        assert_eq!(Term::lt(x(), y()).to_sexp(), "(< x y)");
        let fxy = Term::call("f", vec![x(), y()]);
        assert_eq!(Term::geq(fxy, x()).to_sexp(), "(>= (f x y) x)");
    }

    #[test]
    fn printer_renders_negatives_and_negation() {
        assert_eq!(Term::int(-5).to_sexp(), "(- 5)");
        assert_eq!(Term::neg(x()).to_sexp(), "(- x)");
        assert_eq!(Term::sub(x(), y()).to_sexp(), "(- x y)");
    }

    #[test]
    fn sort_checking_accepts_and_rejects() {
        let sig = FunSig {
            name: "f".to_string(),
            params: vec![Sort::Int, Sort::Int],
            result: Sort::Int,
        };
        let good = Term::geq(Term::call("f", vec![x(), y()]), x());
        assert_eq!(check_sorts(&good, Some(&sig)).unwrap(), Sort::Bool);

        let bad_arity = Term::call("f", vec![x()]);
        assert!(check_sorts(&bad_arity, Some(&sig)).is_err());

        let bad_args = Term::and(x(), y());
        assert!(check_sorts(&bad_args, None).is_err());

        let conflicting = Term::and(
            Term::leq(x(), y()),
            Term::var("x", Sort::Bool),
        );
        assert!(check_sorts(&conflicting, None).is_err());
    }

    #[test]
    fn free_vars_are_collected_with_sorts() {
        let t = max_property(Term::call("f", vec![x(), y()]));
        let vars = t.free_vars();
        assert_eq!(
            vars.into_iter().collect::<Vec<_>>(),
            vec![
                ("x".to_string(), Sort::Int),
                ("y".to_string(), Sort::Int)
            ]
        );
    }
}
