//! Exact satisfiability for ground formulas over linear integer arithmetic
//! with booleans.
//!
//! A formula is lowered to a propositional skeleton over interned atoms:
//! `e <= 0`, `e = 0` (with `e` a linear expression), and free boolean
//! variables. Integer-valued `ite`s are compiled away by case splitting
//! while the linear expressions are built, so the cost is linear in the
//! depth of an `ite` chain. A DPLL search assigns atoms (first unassigned
//! atom of the simplified residual, true branch first); each boolean leaf
//! is then checked for integer solvability.
//!
//! The integer core eliminates equalities by substitution, driving
//! coefficients down to a unit with Euclidean changes of variable, then
//! projects inequalities one variable at a time. Projection keeps the
//! problem exact: when the integer ("dark") shadow of a projection is
//! unsatisfiable but the real shadow is not, the gap is covered by a finite
//! set of splinter problems, one per feasible remainder of the eliminated
//! variable. Models are reconstructed on the way back up, picking the value
//! closest to zero inside each variable's feasible interval, so reported
//! witnesses stay small.
//!
//! Every model found is re-evaluated against the original term before it is
//! returned; a mismatch is reported as an internal error, never as a wrong
//! answer.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::term::{evaluate, Assignment, Op, Sort, Term, Value};

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Abstract work units (search nodes, elimination rounds). Exhausting
    /// the budget yields [`SolverError::ResourceLimit`], never a wrong
    /// sat/unsat answer.
    pub budget: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { budget: 1_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    Sat(Assignment),
    Unsat,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolverError {
    #[error("formula is not ground: contains application of `{0}`")]
    NonGround(String),
    #[error("not a boolean formula: {0}")]
    NotBoolean(String),
    #[error("resource budget exhausted")]
    ResourceLimit,
    #[error("internal solver error: {0}")]
    Internal(String),
}

/// Integer linear expression: sum of coefficient * variable plus constant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
struct LinExpr {
    coeffs: BTreeMap<String, BigInt>,
    constant: BigInt,
}

impl LinExpr {
    fn from_const(n: BigInt) -> Self {
        LinExpr {
            coeffs: BTreeMap::new(),
            constant: n,
        }
    }

    fn from_var(name: &str) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(name.to_string(), BigInt::one());
        LinExpr {
            coeffs,
            constant: BigInt::zero(),
        }
    }

    fn is_const(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn coeff(&self, var: &str) -> BigInt {
        self.coeffs.get(var).cloned().unwrap_or_else(BigInt::zero)
    }

    fn add(&self, other: &LinExpr) -> LinExpr {
        let mut out = self.clone();
        for (v, c) in &other.coeffs {
            let entry = out.coeffs.entry(v.clone()).or_insert_with(BigInt::zero);
            *entry += c;
            if entry.is_zero() {
                out.coeffs.remove(v);
            }
        }
        out.constant += &other.constant;
        out
    }

    fn sub(&self, other: &LinExpr) -> LinExpr {
        self.add(&other.neg())
    }

    fn neg(&self) -> LinExpr {
        self.scale(&BigInt::from(-1))
    }

    fn scale(&self, k: &BigInt) -> LinExpr {
        if k.is_zero() {
            return LinExpr::default();
        }
        LinExpr {
            coeffs: self.coeffs.iter().map(|(v, c)| (v.clone(), c * k)).collect(),
            constant: &self.constant * k,
        }
    }

    fn add_const(&self, k: &BigInt) -> LinExpr {
        let mut out = self.clone();
        out.constant += k;
        out
    }

    fn without(&self, var: &str) -> LinExpr {
        let mut out = self.clone();
        out.coeffs.remove(var);
        out
    }

    /// Replace `var` by `expr`.
    fn subst(&self, var: &str, expr: &LinExpr) -> LinExpr {
        let a = self.coeff(var);
        if a.is_zero() {
            return self.clone();
        }
        self.without(var).add(&expr.scale(&a))
    }

    /// Gcd of the variable coefficients; zero when constant.
    fn var_gcd(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.coeffs.values() {
            g = g.gcd(c);
        }
        g
    }

    /// Evaluate under a model, treating missing variables as zero.
    fn eval(&self, model: &BTreeMap<String, BigInt>) -> BigInt {
        let mut total = self.constant.clone();
        for (v, c) in &self.coeffs {
            if let Some(val) = model.get(v) {
                total += c * val;
            }
        }
        total
    }
}

impl fmt::Display for LinExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in &self.coeffs {
            if first {
                write!(f, "{c}*{v}")?;
                first = false;
            } else if c.is_negative() {
                write!(f, " - {}*{v}", -c)?;
            } else {
                write!(f, " + {c}*{v}")?;
            }
        }
        if first {
            write!(f, "{}", self.constant)
        } else if self.constant.is_negative() {
            write!(f, " - {}", -&self.constant)
        } else if !self.constant.is_zero() {
            write!(f, " + {}", self.constant)
        } else {
            Ok(())
        }
    }
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

/// Atoms of the propositional skeleton. `Leq(e)` stands for `e <= 0`,
/// `Eq(e)` for `e = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Atom {
    Leq(LinExpr),
    Eq(LinExpr),
    BoolVar(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Prop {
    True,
    False,
    Atom(usize),
    Not(Box<Prop>),
    And(Vec<Prop>),
    Or(Vec<Prop>),
}

/// A sort-checked, call-free boolean term together with its lowered
/// skeleton, ready for satisfiability checks.
#[derive(Debug, Clone)]
pub struct GroundFormula {
    term: Term,
    prop: Prop,
    atoms: Vec<Atom>,
    vars: Vec<(String, Sort)>,
    bool_atom: BTreeMap<String, usize>,
}

impl GroundFormula {
    pub fn new(term: Term) -> Result<Self, SolverError> {
        for (name, _) in collect_calls(&term) {
            return Err(SolverError::NonGround(name));
        }
        match crate::term::check_sorts(&term, None) {
            Ok(Sort::Bool) => {}
            Ok(s) => return Err(SolverError::NotBoolean(format!("root sort is {s}"))),
            Err(e) => return Err(SolverError::NotBoolean(e.to_string())),
        }
        let mut lowering = Lowering::default();
        let prop = lowering.lower_bool(&term)?;
        let vars = term.free_vars().into_iter().collect();
        Ok(GroundFormula {
            term,
            prop,
            atoms: lowering.atoms,
            vars,
            bool_atom: lowering.bool_atom,
        })
    }

    pub fn term(&self) -> &Term {
        &self.term
    }
}

fn collect_calls(t: &Term) -> Vec<(String, usize)> {
    let mut out = Vec::new();
    fn walk(t: &Term, out: &mut Vec<(String, usize)>) {
        match t {
            Term::Call(name, args) => {
                out.push((name.clone(), args.len()));
                for a in args {
                    walk(a, out);
                }
            }
            Term::App(_, args) => {
                for a in args {
                    walk(a, out);
                }
            }
            _ => {}
        }
    }
    walk(t, &mut out);
    out
}

#[derive(Default)]
struct Lowering {
    atoms: Vec<Atom>,
    intern: HashMap<Atom, usize>,
    bool_atom: BTreeMap<String, usize>,
}

impl Lowering {
    fn intern(&mut self, atom: Atom) -> usize {
        if let Some(&i) = self.intern.get(&atom) {
            return i;
        }
        let i = self.atoms.len();
        if let Atom::BoolVar(name) = &atom {
            self.bool_atom.insert(name.clone(), i);
        }
        self.atoms.push(atom.clone());
        self.intern.insert(atom, i);
        i
    }

    fn lower_bool(&mut self, t: &Term) -> Result<Prop, SolverError> {
        match t {
            Term::Bool(true) => Ok(Prop::True),
            Term::Bool(false) => Ok(Prop::False),
            Term::Var(name, Sort::Bool) => {
                let i = self.intern(Atom::BoolVar(name.clone()));
                Ok(Prop::Atom(i))
            }
            Term::App(Op::And, args) => Ok(Prop::And(vec![
                self.lower_bool(&args[0])?,
                self.lower_bool(&args[1])?,
            ])),
            Term::App(Op::Or, args) => Ok(Prop::Or(vec![
                self.lower_bool(&args[0])?,
                self.lower_bool(&args[1])?,
            ])),
            Term::App(Op::Not, args) => Ok(Prop::Not(Box::new(self.lower_bool(&args[0])?))),
            Term::App(op @ (Op::Leq | Op::Eq), args) => self.lower_cmp(*op, &args[0], &args[1]),
            Term::App(Op::Ite, args) => {
                let c = self.lower_bool(&args[0])?;
                let a = self.lower_bool(&args[1])?;
                let b = self.lower_bool(&args[2])?;
                Ok(Prop::Or(vec![
                    Prop::And(vec![c.clone(), a]),
                    Prop::And(vec![Prop::Not(Box::new(c)), b]),
                ]))
            }
            other => Err(SolverError::Internal(format!(
                "cannot lower as boolean: {other}"
            ))),
        }
    }

    fn lower_cmp(&mut self, op: Op, a: &Term, b: &Term) -> Result<Prop, SolverError> {
        let ca = self.lin_cases(a)?;
        let cb = self.lin_cases(b)?;
        let mut arms = Vec::new();
        for (ga, ea) in &ca {
            for (gb, eb) in &cb {
                let e = ea.sub(eb);
                let base = self.cmp_atom(op, e);
                let mut guard = Vec::new();
                if *ga != Prop::True {
                    guard.push(ga.clone());
                }
                if *gb != Prop::True {
                    guard.push(gb.clone());
                }
                if guard.is_empty() {
                    arms.push(base);
                } else {
                    guard.push(base);
                    arms.push(Prop::And(guard));
                }
            }
        }
        Ok(if arms.len() == 1 {
            arms.pop().unwrap()
        } else {
            Prop::Or(arms)
        })
    }

    fn cmp_atom(&mut self, op: Op, e: LinExpr) -> Prop {
        if e.is_const() {
            let holds = match op {
                Op::Leq => !e.constant.is_positive(),
                _ => e.constant.is_zero(),
            };
            return if holds { Prop::True } else { Prop::False };
        }
        let atom = match op {
            Op::Leq => Atom::Leq(e),
            _ => {
                // `e = 0` and `-e = 0` are the same atom; fix the sign of
                // the first coefficient.
                let flip = e
                    .coeffs
                    .values()
                    .next()
                    .map(|c| c.is_negative())
                    .unwrap_or(false);
                Atom::Eq(if flip { e.neg() } else { e })
            }
        };
        Prop::Atom(self.intern(atom))
    }

    /// Guarded linear views of an integer term. The guards of one call are
    /// exclusive and exhaustive; an `ite` contributes its branches guarded
    /// by its (lowered) condition.
    fn lin_cases(&mut self, t: &Term) -> Result<Vec<(Prop, LinExpr)>, SolverError> {
        match t {
            Term::Int(n) => Ok(vec![(Prop::True, LinExpr::from_const(n.clone()))]),
            Term::Var(name, Sort::Int) => Ok(vec![(Prop::True, LinExpr::from_var(name))]),
            Term::App(op @ (Op::Add | Op::Sub), args) => {
                let ca = self.lin_cases(&args[0])?;
                let cb = self.lin_cases(&args[1])?;
                let mut out = Vec::with_capacity(ca.len() * cb.len());
                for (ga, ea) in &ca {
                    for (gb, eb) in &cb {
                        let e = if *op == Op::Add { ea.add(eb) } else { ea.sub(eb) };
                        out.push((conj2(ga.clone(), gb.clone()), e));
                    }
                }
                Ok(out)
            }
            Term::App(Op::Ite, args) => {
                let c = self.lower_bool(&args[0])?;
                let mut out = Vec::new();
                for (g, e) in self.lin_cases(&args[1])? {
                    out.push((conj2(c.clone(), g), e));
                }
                let nc = Prop::Not(Box::new(c));
                for (g, e) in self.lin_cases(&args[2])? {
                    out.push((conj2(nc.clone(), g), e));
                }
                Ok(out)
            }
            other => Err(SolverError::Internal(format!(
                "cannot lower as integer: {other}"
            ))),
        }
    }
}

fn conj2(a: Prop, b: Prop) -> Prop {
    match (a, b) {
        (Prop::True, x) | (x, Prop::True) => x,
        (a, b) => Prop::And(vec![a, b]),
    }
}

/// Three-valued residual of `p` under a partial atom assignment.
fn residual(p: &Prop, asg: &[Option<bool>]) -> Prop {
    match p {
        Prop::True => Prop::True,
        Prop::False => Prop::False,
        Prop::Atom(i) => match asg[*i] {
            Some(true) => Prop::True,
            Some(false) => Prop::False,
            None => Prop::Atom(*i),
        },
        Prop::Not(q) => match residual(q, asg) {
            Prop::True => Prop::False,
            Prop::False => Prop::True,
            r => Prop::Not(Box::new(r)),
        },
        Prop::And(v) => {
            let mut out = Vec::new();
            for q in v {
                match residual(q, asg) {
                    Prop::False => return Prop::False,
                    Prop::True => {}
                    r => out.push(r),
                }
            }
            match out.len() {
                0 => Prop::True,
                1 => out.pop().unwrap(),
                _ => Prop::And(out),
            }
        }
        Prop::Or(v) => {
            let mut out = Vec::new();
            for q in v {
                match residual(q, asg) {
                    Prop::True => return Prop::True,
                    Prop::False => {}
                    r => out.push(r),
                }
            }
            match out.len() {
                0 => Prop::False,
                1 => out.pop().unwrap(),
                _ => Prop::Or(out),
            }
        }
    }
}

fn min_atom(p: &Prop) -> Option<usize> {
    match p {
        Prop::True | Prop::False => None,
        Prop::Atom(i) => Some(*i),
        Prop::Not(q) => min_atom(q),
        Prop::And(v) | Prop::Or(v) => v.iter().filter_map(min_atom).min(),
    }
}

struct Search<'a> {
    formula: &'a GroundFormula,
    budget: u64,
    fresh: u64,
}

type IntModel = BTreeMap<String, BigInt>;

impl<'a> Search<'a> {
    fn spend(&mut self) -> Result<(), SolverError> {
        if self.budget == 0 {
            return Err(SolverError::ResourceLimit);
        }
        self.budget -= 1;
        Ok(())
    }

    fn dpll(&mut self, asg: &mut Vec<Option<bool>>) -> Result<Option<Assignment>, SolverError> {
        self.spend()?;
        let r = residual(&self.formula.prop, asg);
        match r {
            Prop::False => Ok(None),
            Prop::True => self.theory_leaf(asg),
            ref r => {
                let i = min_atom(r).ok_or_else(|| {
                    SolverError::Internal("residual without atoms is not constant".into())
                })?;
                for value in [true, false] {
                    asg[i] = Some(value);
                    if let Some(m) = self.dpll(asg)? {
                        asg[i] = None;
                        return Ok(Some(m));
                    }
                    asg[i] = None;
                }
                Ok(None)
            }
        }
    }

    /// The boolean skeleton is satisfied; decide whether the implied
    /// integer constraints have a solution and assemble a full model.
    fn theory_leaf(&mut self, asg: &[Option<bool>]) -> Result<Option<Assignment>, SolverError> {
        let mut eqs = Vec::new();
        let mut ineqs = Vec::new();
        let mut diseqs = Vec::new();
        for (i, atom) in self.formula.atoms.iter().enumerate() {
            let Some(value) = asg[i] else { continue };
            match atom {
                Atom::Leq(e) => {
                    if value {
                        ineqs.push(e.clone());
                    } else {
                        // not (e <= 0) is e >= 1.
                        ineqs.push(e.neg().add_const(&BigInt::one()));
                    }
                }
                Atom::Eq(e) => {
                    if value {
                        eqs.push(e.clone());
                    } else {
                        diseqs.push(e.clone());
                    }
                }
                Atom::BoolVar(_) => {}
            }
        }
        let Some(ints) = self.split_diseqs(&eqs, ineqs, &diseqs, 0)? else {
            return Ok(None);
        };
        let model = self.assemble(asg, ints)?;
        Ok(Some(model))
    }

    /// Each disequality `e != 0` splits into `e <= -1` or `e >= 1`; the
    /// low side is explored first so witnesses stay near zero.
    fn split_diseqs(
        &mut self,
        eqs: &[LinExpr],
        ineqs: Vec<LinExpr>,
        diseqs: &[LinExpr],
        next: usize,
    ) -> Result<Option<IntModel>, SolverError> {
        self.spend()?;
        if next == diseqs.len() {
            return self.solve(eqs.to_vec(), ineqs);
        }
        let e = &diseqs[next];
        let low = e.add_const(&BigInt::one());
        let high = e.neg().add_const(&BigInt::one());
        for branch in [low, high] {
            let mut with = ineqs.clone();
            with.push(branch);
            if let Some(m) = self.split_diseqs(eqs, with, diseqs, next + 1)? {
                return Ok(Some(m));
            }
        }
        Ok(None)
    }

    fn assemble(&self, asg: &[Option<bool>], ints: IntModel) -> Result<Assignment, SolverError> {
        let mut model = Assignment::new();
        for (name, sort) in &self.formula.vars {
            match sort {
                Sort::Int => {
                    let v = ints.get(name).cloned().unwrap_or_else(BigInt::zero);
                    model.set(name, Value::Int(v));
                }
                Sort::Bool => {
                    let v = self
                        .formula
                        .bool_atom
                        .get(name)
                        .and_then(|&i| asg[i])
                        .unwrap_or(false);
                    model.set(name, Value::Bool(v));
                }
                Sort::Datatype(d) => {
                    return Err(SolverError::Internal(format!(
                        "variable `{name}` has datatype sort {d}"
                    )))
                }
            }
        }
        match evaluate(&self.formula.term, &model) {
            Ok(Value::Bool(true)) => Ok(model),
            Ok(v) => Err(SolverError::Internal(format!(
                "model {model} evaluates the formula to {v}"
            ))),
            Err(e) => Err(SolverError::Internal(format!(
                "model re-evaluation failed: {e}"
            ))),
        }
    }

    /// Decide a conjunction of equalities and inequalities, returning a
    /// model of the occurring variables on success.
    fn solve(&mut self, mut eqs: Vec<LinExpr>, mut ineqs: Vec<LinExpr>) -> Result<Option<IntModel>, SolverError> {
        self.spend()?;
        // Substitutions to replay in reverse once the reduced system has a
        // model.
        let mut steps: Vec<(String, LinExpr)> = Vec::new();
        'eqs: loop {
            // Normalize: drop trivial equalities, fail on unsatisfiable
            // ones, divide through by the coefficient gcd.
            let mut k = 0;
            while k < eqs.len() {
                let g = eqs[k].var_gcd();
                if g.is_zero() {
                    if eqs[k].constant.is_zero() {
                        eqs.remove(k);
                        continue;
                    }
                    return Ok(None);
                }
                if !eqs[k].constant.is_multiple_of(&g) {
                    return Ok(None);
                }
                if g > BigInt::one() {
                    let e = &eqs[k];
                    eqs[k] = LinExpr {
                        coeffs: e.coeffs.iter().map(|(v, c)| (v.clone(), c / &g)).collect(),
                        constant: &e.constant / &g,
                    };
                }
                k += 1;
            }
            let Some(eq) = eqs.first().cloned() else {
                break 'eqs;
            };
            // Orient so the minimum-magnitude coefficient is positive.
            let (var, a) = eq
                .coeffs
                .iter()
                .min_by_key(|(_, c)| c.abs())
                .map(|(v, c)| (v.clone(), c.clone()))
                .expect("normalized equality has variables");
            let eq = if a.is_negative() { eq.neg() } else { eq };
            let a = a.abs();
            if a.is_one() {
                // var = -(rest)
                let expr = eq.without(&var).neg();
                eqs.remove(0);
                for e in eqs.iter_mut().chain(ineqs.iter_mut()) {
                    *e = e.subst(&var, &expr);
                }
                steps.push((var, expr));
            } else {
                // Change of variable u = var + sum(q_j * x_j) with
                // a_j = q_j * a + r_j; the equality keeps coefficient `a`
                // on u while every other coefficient drops below `a`, so
                // the minimum strictly shrinks toward a unit.
                self.spend()?;
                let u = format!("%u{}", self.fresh);
                self.fresh += 1;
                let mut expr = LinExpr::from_var(&u);
                for (v, c) in &eq.coeffs {
                    if *v == var {
                        continue;
                    }
                    let (q, _) = c.div_mod_floor(&a);
                    if !q.is_zero() {
                        expr = expr.sub(&LinExpr::from_var(v).scale(&q));
                    }
                }
                for e in eqs.iter_mut().chain(ineqs.iter_mut()) {
                    *e = e.subst(&var, &expr);
                }
                steps.push((var, expr));
            }
        }
        let model = self.project(ineqs)?;
        Ok(model.map(|mut m| {
            for (var, expr) in steps.iter().rev() {
                let v = expr.eval(&m);
                m.insert(var.clone(), v);
            }
            m
        }))
    }

    /// Decide a pure inequality system by variable projection.
    fn project(&mut self, mut ineqs: Vec<LinExpr>) -> Result<Option<IntModel>, SolverError> {
        self.spend()?;
        // Tighten: divide each inequality by its coefficient gcd, rounding
        // the constant up (the integer points are preserved).
        let mut k = 0;
        while k < ineqs.len() {
            let g = ineqs[k].var_gcd();
            if g.is_zero() {
                if ineqs[k].constant.is_positive() {
                    return Ok(None);
                }
                ineqs.remove(k);
                continue;
            }
            if g > BigInt::one() {
                let e = &ineqs[k];
                ineqs[k] = LinExpr {
                    coeffs: e.coeffs.iter().map(|(v, c)| (v.clone(), c / &g)).collect(),
                    constant: ceil_div(&e.constant, &g),
                };
            }
            k += 1;
        }
        if ineqs.is_empty() {
            return Ok(Some(IntModel::new()));
        }

        // Pick the variable with the cheapest projection: unbounded
        // variables are free, otherwise minimize the pair count.
        let mut occurrences: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
        for e in &ineqs {
            for (v, c) in &e.coeffs {
                let entry = occurrences.entry(v).or_insert((0, 0));
                if c.is_negative() {
                    entry.0 += 1; // lower bound on v
                } else {
                    entry.1 += 1; // upper bound on v
                }
            }
        }
        let (&var, _) = occurrences
            .iter()
            .min_by_key(|(v, (lo, up))| (lo * up, *v))
            .expect("nonempty system has variables");
        let var = var.to_string();

        let mut rest = Vec::new();
        let mut lowers: Vec<(BigInt, LinExpr)> = Vec::new(); // a * var >= R
        let mut uppers: Vec<(BigInt, LinExpr)> = Vec::new(); // b * var <= U
        for e in ineqs.iter() {
            let c = e.coeff(&var);
            if c.is_zero() {
                rest.push(e.clone());
            } else if c.is_negative() {
                lowers.push((-c, e.without(&var)));
            } else {
                uppers.push((c, e.without(&var).neg()));
            }
        }

        if lowers.is_empty() || uppers.is_empty() {
            // One-sided: any value far enough along works, so the
            // constraints vanish; clamp toward zero when rebuilding.
            let Some(mut m) = self.project(rest)? else {
                return Ok(None);
            };
            let v = bounded_choice(&lowers, &uppers, &m)?;
            m.insert(var, v);
            return Ok(Some(m));
        }

        // Integer shadow: b*R - a*U + (a-1)(b-1) <= 0 for every pair. For
        // pairs with a unit coefficient the correction term vanishes and
        // the projection is already exact.
        let one = BigInt::one();
        let mut exact = true;
        let mut dark = rest.clone();
        let mut real = rest;
        for (a, r) in &lowers {
            for (b, u) in &uppers {
                let shadow = r.scale(b).sub(&u.scale(a));
                let correction = (a - &one) * (b - &one);
                if !correction.is_zero() {
                    exact = false;
                }
                dark.push(shadow.add_const(&correction));
                real.push(shadow);
            }
        }

        if let Some(mut m) = self.project(dark)? {
            let v = bounded_choice(&lowers, &uppers, &m)?;
            m.insert(var, v);
            return Ok(Some(m));
        }
        if exact || self.project(real)?.is_none() {
            return Ok(None);
        }

        // Gray zone: any solution must pin a * var within a bounded offset
        // of some lower bound. One equality branch per feasible offset.
        let b_max = uppers.iter().map(|(b, _)| b.clone()).max().expect("has uppers");
        for (a, r) in &lowers {
            if a.is_one() {
                continue;
            }
            let j_max = (a * &b_max - a - &b_max).div_floor(&b_max);
            let mut j = BigInt::zero();
            while j <= j_max {
                self.spend()?;
                // a * var = R + j
                let eq = r.add_const(&j).sub(&LinExpr::from_var(&var).scale(a));
                if let Some(m) = self.solve(vec![eq], ineqs.clone())? {
                    return Ok(Some(m));
                }
                j += &one;
            }
        }
        Ok(None)
    }
}

/// Value for a variable with the given bounds, nearest zero, under `m`.
fn bounded_choice(
    lowers: &[(BigInt, LinExpr)],
    uppers: &[(BigInt, LinExpr)],
    m: &IntModel,
) -> Result<BigInt, SolverError> {
    let lo = lowers
        .iter()
        .map(|(a, r)| ceil_div(&r.eval(m), a))
        .max();
    let hi = uppers
        .iter()
        .map(|(b, u)| u.eval(m).div_floor(b))
        .min();
    match (lo, hi) {
        (Some(lo), Some(hi)) => {
            if lo > hi {
                return Err(SolverError::Internal(format!(
                    "empty feasible interval [{lo}, {hi}] after projection"
                )));
            }
            Ok(clamp_zero(lo, hi))
        }
        (Some(lo), None) => Ok(lo.max(BigInt::zero())),
        (None, Some(hi)) => Ok(hi.min(BigInt::zero())),
        (None, None) => Ok(BigInt::zero()),
    }
}

fn clamp_zero(lo: BigInt, hi: BigInt) -> BigInt {
    if lo.is_positive() {
        lo
    } else if hi.is_negative() {
        hi
    } else {
        BigInt::zero()
    }
}

pub fn check_sat(formula: &GroundFormula, config: &SolverConfig) -> Result<SatResult, SolverError> {
    let mut search = Search {
        formula,
        budget: config.budget,
        fresh: 0,
    };
    let mut asg = vec![None; formula.atoms.len()];
    match search.dpll(&mut asg)? {
        Some(model) => Ok(SatResult::Sat(model)),
        None => Ok(SatResult::Unsat),
    }
}

/// Convenience wrapper lowering a term first.
pub fn check_sat_term(term: &Term, config: &SolverConfig) -> Result<SatResult, SolverError> {
    check_sat(&GroundFormula::new(term.clone())?, config)
}

/// Model of the negation, if any: a point where `property` fails.
pub fn find_counterexample(
    property: &Term,
    config: &SolverConfig,
) -> Result<Option<Assignment>, SolverError> {
    let negated = GroundFormula::new(Term::not(property.clone()))?;
    match check_sat(&negated, config)? {
        SatResult::Sat(model) => Ok(Some(model)),
        SatResult::Unsat => Ok(None),
    }
}
