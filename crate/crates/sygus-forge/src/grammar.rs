//! Candidate-program grammars as families of algebraic datatypes.
//!
//! Each datatype lists constructors; a constructor either denotes a builtin
//! operator applied to subterms drawn from the named argument datatypes, or
//! is a leaf denoting an input variable or an integer numeral. A program is
//! a constructor tree; [`denote`] maps it homomorphically to a [`Term`] and
//! [`eval_program`] interprets it directly, visiting each node at most once.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;

use crate::term::{Assignment, Op, Sort, Term, TermError, Value};

/// What a constructor stands for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Denotation {
    Builtin(Op),
    InputVar(String),
    Numeral(BigInt),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constructor {
    pub name: String,
    /// Argument datatype names; empty for leaf constructors.
    pub args: Vec<String>,
    pub denotation: Denotation,
}

impl Constructor {
    pub fn builtin(op: Op, args: &[&str]) -> Self {
        Constructor {
            name: op.symbol().to_string(),
            args: args.iter().map(|s| s.to_string()).collect(),
            denotation: Denotation::Builtin(op),
        }
    }

    pub fn input_var(name: &str) -> Self {
        Constructor {
            name: name.to_string(),
            args: Vec::new(),
            denotation: Denotation::InputVar(name.to_string()),
        }
    }

    pub fn numeral(n: i64) -> Self {
        Constructor {
            name: n.to_string(),
            args: Vec::new(),
            denotation: Denotation::Numeral(BigInt::from(n)),
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.args.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatatypeDef {
    pub name: String,
    pub sort: Sort,
    pub constructors: Vec<Constructor>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GrammarError {
    #[error("grammar has no datatypes")]
    Empty,
    #[error("duplicate datatype `{0}`")]
    DuplicateDatatype(String),
    #[error("duplicate constructor `{1}` in datatype `{0}`")]
    DuplicateConstructor(String, String),
    #[error("datatype `{0}` references unknown datatype `{1}`")]
    UnknownDatatype(String, String),
    #[error("start symbol `{0}` is not a declared datatype")]
    UnknownStart(String),
    #[error("constructor `{1}` of `{0}`: {2}")]
    BadConstructor(String, String, String),
    #[error("datatype `{0}` produces no finite term")]
    Unproductive(String),
    #[error("program node `{0}` does not conform to the grammar: {1}")]
    NonConforming(String, String),
}

/// A validated grammar.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrammarSpec {
    datatypes: Vec<DatatypeDef>,
    start: String,
    result_sort: Sort,
    /// Input variables that leaf constructors may denote.
    inputs: Vec<(String, Sort)>,
    index: BTreeMap<String, usize>,
    /// Smallest size of a term of each datatype.
    min_size: BTreeMap<String, usize>,
    /// Largest program size when the language is finite.
    max_size: Option<usize>,
    /// Condition datatype of an `ite` constructor on the start symbol.
    ite_condition: Option<String>,
}

impl GrammarSpec {
    /// Validate and index the declarations. Checks constructor arities
    /// against denotations, sort agreement, that referenced datatypes and
    /// input variables exist, and that every datatype produces at least one
    /// finite term.
    pub fn new(
        datatypes: Vec<DatatypeDef>,
        start: &str,
        inputs: &[(String, Sort)],
    ) -> Result<Self, GrammarError> {
        if datatypes.is_empty() {
            return Err(GrammarError::Empty);
        }
        let mut index = BTreeMap::new();
        for (i, dt) in datatypes.iter().enumerate() {
            if index.insert(dt.name.clone(), i).is_some() {
                return Err(GrammarError::DuplicateDatatype(dt.name.clone()));
            }
        }
        if !index.contains_key(start) {
            return Err(GrammarError::UnknownStart(start.to_string()));
        }
        let input_sorts: BTreeMap<&str, &Sort> =
            inputs.iter().map(|(n, s)| (n.as_str(), s)).collect();

        for dt in &datatypes {
            let mut names = BTreeMap::new();
            for c in &dt.constructors {
                if names.insert(c.name.clone(), ()).is_some() {
                    return Err(GrammarError::DuplicateConstructor(
                        dt.name.clone(),
                        c.name.clone(),
                    ));
                }
                for a in &c.args {
                    if !index.contains_key(a) {
                        return Err(GrammarError::UnknownDatatype(dt.name.clone(), a.clone()));
                    }
                }
                let bad = |msg: String| {
                    Err(GrammarError::BadConstructor(
                        dt.name.clone(),
                        c.name.clone(),
                        msg,
                    ))
                };
                match &c.denotation {
                    Denotation::Builtin(op) => {
                        if c.args.len() != op.arity() {
                            return bad(format!(
                                "`{}` takes {} arguments, got {}",
                                op.symbol(),
                                op.arity(),
                                c.args.len()
                            ));
                        }
                        let arg_sort = |i: usize| -> &Sort {
                            let def = &datatypes[index[&c.args[i]]];
                            &def.sort
                        };
                        let check = |expected: &[Sort], result: Sort| -> Result<(), String> {
                            for (i, want) in expected.iter().enumerate() {
                                if arg_sort(i) != want {
                                    return Err(format!(
                                        "argument {i} must have sort {want}, datatype `{}` has sort {}",
                                        c.args[i],
                                        arg_sort(i)
                                    ));
                                }
                            }
                            if dt.sort != result {
                                return Err(format!(
                                    "result sort is {result} but datatype has sort {}",
                                    dt.sort
                                ));
                            }
                            Ok(())
                        };
                        let result = match op {
                            Op::Add | Op::Sub => check(&[Sort::Int, Sort::Int], Sort::Int),
                            Op::Leq | Op::Eq => check(&[Sort::Int, Sort::Int], Sort::Bool),
                            Op::And | Op::Or => check(&[Sort::Bool, Sort::Bool], Sort::Bool),
                            Op::Not => check(&[Sort::Bool], Sort::Bool),
                            Op::Ite => {
                                let mut r = check(&[Sort::Bool], dt.sort.clone());
                                if r.is_ok() {
                                    if *arg_sort(1) != dt.sort || *arg_sort(2) != dt.sort {
                                        r = Err("branches must match the datatype sort".into());
                                    }
                                }
                                r
                            }
                        };
                        if let Err(msg) = result {
                            return bad(msg);
                        }
                    }
                    Denotation::InputVar(v) => {
                        if !c.args.is_empty() {
                            return bad("variable constructors take no arguments".into());
                        }
                        match input_sorts.get(v.as_str()) {
                            None => return bad(format!("unknown input variable `{v}`")),
                            Some(s) if **s != dt.sort => {
                                return bad(format!(
                                    "input `{v}` has sort {s}, datatype has sort {}",
                                    dt.sort
                                ))
                            }
                            Some(_) => {}
                        }
                    }
                    Denotation::Numeral(_) => {
                        if !c.args.is_empty() {
                            return bad("numeral constructors take no arguments".into());
                        }
                        if dt.sort != Sort::Int {
                            return bad("numerals require an Int datatype".into());
                        }
                    }
                }
            }
        }

        let min_size = compute_min_sizes(&datatypes, &index)?;
        let max_size = compute_max_size(&datatypes, &index, start);
        let start_def = &datatypes[index[start]];
        let result_sort = start_def.sort.clone();
        let ite_condition = start_def
            .constructors
            .iter()
            .find(|c| c.denotation == Denotation::Builtin(Op::Ite))
            .map(|c| c.args[0].clone());

        Ok(GrammarSpec {
            datatypes,
            start: start.to_string(),
            result_sort,
            inputs: inputs.to_vec(),
            index,
            min_size,
            max_size,
            ite_condition,
        })
    }

    pub fn start(&self) -> &str {
        &self.start
    }

    pub fn result_sort(&self) -> &Sort {
        &self.result_sort
    }

    pub fn inputs(&self) -> &[(String, Sort)] {
        &self.inputs
    }

    pub fn datatypes(&self) -> &[DatatypeDef] {
        &self.datatypes
    }

    pub fn datatype(&self, name: &str) -> Option<&DatatypeDef> {
        self.index.get(name).map(|&i| &self.datatypes[i])
    }

    /// Smallest term size the datatype can produce.
    pub fn min_size(&self, datatype: &str) -> Option<usize> {
        self.min_size.get(datatype).copied()
    }

    /// `Some(k)` if the whole program space is finite with largest size `k`.
    pub fn finite_max_size(&self) -> Option<usize> {
        self.max_size
    }

    /// Whether the start datatype has an `ite` constructor; required by the
    /// syntax-guided instantiation engine.
    pub fn ite_capable(&self) -> bool {
        self.ite_condition.is_some()
    }

    /// Condition datatype of the start symbol's `ite` constructor.
    pub fn ite_condition_datatype(&self) -> Option<&str> {
        self.ite_condition.as_deref()
    }

    pub fn constructor(&self, datatype: &str, name: &str) -> Option<&Constructor> {
        self.datatype(datatype)
            .and_then(|d| d.constructors.iter().find(|c| c.name == name))
    }

    /// Check that a program is a well-formed tree over this grammar.
    pub fn conforms(&self, p: &ProgramTerm) -> Result<(), GrammarError> {
        let ctor = self
            .constructor(&p.datatype, &p.constructor)
            .ok_or_else(|| {
                GrammarError::NonConforming(
                    p.constructor.clone(),
                    format!("no such constructor in datatype `{}`", p.datatype),
                )
            })?;
        if ctor.args.len() != p.children.len() {
            return Err(GrammarError::NonConforming(
                p.constructor.clone(),
                format!(
                    "expected {} children, found {}",
                    ctor.args.len(),
                    p.children.len()
                ),
            ));
        }
        for (child, expected) in p.children.iter().zip(ctor.args.iter()) {
            if child.datatype != *expected {
                return Err(GrammarError::NonConforming(
                    child.constructor.clone(),
                    format!("expected datatype `{expected}`, found `{}`", child.datatype),
                ));
            }
            self.conforms(child)?;
        }
        Ok(())
    }
}

/// Least fixpoint of minimal term sizes; errors if a datatype never
/// terminates (no finite term reachable).
fn compute_min_sizes(
    datatypes: &[DatatypeDef],
    index: &BTreeMap<String, usize>,
) -> Result<BTreeMap<String, usize>, GrammarError> {
    let mut min: BTreeMap<String, usize> = BTreeMap::new();
    loop {
        let mut changed = false;
        for dt in datatypes {
            for c in &dt.constructors {
                let candidate = if c.is_leaf() {
                    Some(0)
                } else {
                    let mut total = 1usize;
                    let mut known = true;
                    for a in &c.args {
                        match min.get(a) {
                            Some(s) => total += s,
                            None => {
                                known = false;
                                break;
                            }
                        }
                    }
                    known.then_some(total)
                };
                if let Some(size) = candidate {
                    let entry = min.entry(dt.name.clone()).or_insert(usize::MAX);
                    if size < *entry {
                        *entry = size;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    for dt in datatypes {
        if !min.contains_key(&dt.name) {
            return Err(GrammarError::Unproductive(dt.name.clone()));
        }
    }
    let _ = index;
    Ok(min)
}

/// Largest size of a start-datatype program, if the space is finite. A
/// datatype is bounded when every constructor has only bounded arguments;
/// the fixpoint grows the bounded set until stable.
fn compute_max_size(
    datatypes: &[DatatypeDef],
    index: &BTreeMap<String, usize>,
    start: &str,
) -> Option<usize> {
    let mut max: BTreeMap<&str, usize> = BTreeMap::new();
    loop {
        let mut changed = false;
        for dt in datatypes {
            if max.contains_key(dt.name.as_str()) {
                continue;
            }
            let mut worst = 0usize;
            let mut all_bounded = true;
            for c in &dt.constructors {
                let size = if c.is_leaf() {
                    Some(0)
                } else {
                    let mut total = 1usize;
                    let mut known = true;
                    for a in &c.args {
                        match max.get(a.as_str()) {
                            Some(s) => total += s,
                            None => {
                                known = false;
                                break;
                            }
                        }
                    }
                    known.then_some(total)
                };
                match size {
                    Some(s) => worst = worst.max(s),
                    None => {
                        all_bounded = false;
                        break;
                    }
                }
            }
            if all_bounded {
                max.insert(&dt.name, worst);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let _ = index;
    max.get(start).copied()
}

/// A program: a tree of grammar constructors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProgramTerm {
    pub constructor: String,
    pub datatype: String,
    pub children: Vec<ProgramTerm>,
}

impl ProgramTerm {
    pub fn leaf(constructor: &str, datatype: &str) -> Self {
        ProgramTerm {
            constructor: constructor.to_string(),
            datatype: datatype.to_string(),
            children: Vec::new(),
        }
    }

    pub fn node(constructor: &str, datatype: &str, children: Vec<ProgramTerm>) -> Self {
        ProgramTerm {
            constructor: constructor.to_string(),
            datatype: datatype.to_string(),
            children,
        }
    }

    /// Number of non-leaf constructor applications.
    pub fn size(&self) -> usize {
        let own = usize::from(!self.children.is_empty());
        own + self.children.iter().map(ProgramTerm::size).sum::<usize>()
    }

    /// Total number of constructor nodes, leaves included.
    pub fn node_count(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(ProgramTerm::node_count)
            .sum::<usize>()
    }
}

impl fmt::Display for ProgramTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.children.is_empty() {
            write!(f, "{}", self.constructor)
        } else {
            write!(f, "({}", self.constructor)?;
            for c in &self.children {
                write!(f, " {c}")?;
            }
            write!(f, ")")
        }
    }
}

/// Map a program to the term it denotes: constructors become their builtin
/// operators, variable leaves become variables, numerals become literals.
pub fn denote(p: &ProgramTerm, g: &GrammarSpec) -> Result<Term, GrammarError> {
    let ctor = g.constructor(&p.datatype, &p.constructor).ok_or_else(|| {
        GrammarError::NonConforming(
            p.constructor.clone(),
            format!("no such constructor in datatype `{}`", p.datatype),
        )
    })?;
    match &ctor.denotation {
        Denotation::Builtin(op) => {
            let mut args = Vec::with_capacity(p.children.len());
            for c in &p.children {
                args.push(denote(c, g)?);
            }
            Ok(Term::App(*op, args))
        }
        Denotation::InputVar(v) => {
            let sort = g
                .inputs()
                .iter()
                .find(|(n, _)| n == v)
                .map(|(_, s)| s.clone())
                .unwrap_or(Sort::Int);
            Ok(Term::Var(v.clone(), sort))
        }
        Denotation::Numeral(n) => Ok(Term::Int(n.clone())),
    }
}

/// Run a program on concrete inputs without materializing its denotation.
pub fn eval_program(
    p: &ProgramTerm,
    g: &GrammarSpec,
    inputs: &Assignment,
) -> Result<Value, TermError> {
    eval_program_counted(p, g, inputs).map(|(v, _)| v)
}

/// As [`eval_program`], also reporting how many program nodes were visited.
/// `ite` skips the untaken branch, so the count never exceeds the node
/// count of the program.
pub fn eval_program_counted(
    p: &ProgramTerm,
    g: &GrammarSpec,
    inputs: &Assignment,
) -> Result<(Value, usize), TermError> {
    let mut visited = 0usize;
    let v = eval_node(p, g, inputs, &mut visited)?;
    Ok((v, visited))
}

fn eval_node(
    p: &ProgramTerm,
    g: &GrammarSpec,
    inputs: &Assignment,
    visited: &mut usize,
) -> Result<Value, TermError> {
    *visited += 1;
    let ctor = g
        .constructor(&p.datatype, &p.constructor)
        .ok_or_else(|| TermError::IllSorted(format!("unknown constructor `{}`", p.constructor)))?;
    let ill = || TermError::IllSorted(format!("constructor `{}`", p.constructor));
    match &ctor.denotation {
        Denotation::Numeral(n) => Ok(Value::Int(n.clone())),
        Denotation::InputVar(v) => inputs
            .get(v)
            .cloned()
            .ok_or_else(|| TermError::UnboundVariable(v.clone())),
        Denotation::Builtin(op) => match op {
            Op::Ite => {
                let c = eval_node(&p.children[0], g, inputs, visited)?
                    .as_bool()
                    .ok_or_else(ill)?;
                let taken = if c { &p.children[1] } else { &p.children[2] };
                eval_node(taken, g, inputs, visited)
            }
            Op::Not => {
                let v = eval_node(&p.children[0], g, inputs, visited)?
                    .as_bool()
                    .ok_or_else(ill)?;
                Ok(Value::Bool(!v))
            }
            Op::Add | Op::Sub => {
                let x = eval_node(&p.children[0], g, inputs, visited)?;
                let y = eval_node(&p.children[1], g, inputs, visited)?;
                let (x, y) = (x.as_int().ok_or_else(ill)?, y.as_int().ok_or_else(ill)?);
                Ok(Value::Int(if *op == Op::Add { x + y } else { x - y }))
            }
            Op::Leq | Op::Eq => {
                let x = eval_node(&p.children[0], g, inputs, visited)?;
                let y = eval_node(&p.children[1], g, inputs, visited)?;
                let (x, y) = (x.as_int().ok_or_else(ill)?, y.as_int().ok_or_else(ill)?);
                Ok(Value::Bool(if *op == Op::Leq { x <= y } else { x == y }))
            }
            Op::And | Op::Or => {
                let x = eval_node(&p.children[0], g, inputs, visited)?
                    .as_bool()
                    .ok_or_else(ill)?;
                let y = eval_node(&p.children[1], g, inputs, visited)?
                    .as_bool()
                    .ok_or_else(ill)?;
                Ok(Value::Bool(if *op == Op::And { x && y } else { x || y }))
            }
        },
    }
}
