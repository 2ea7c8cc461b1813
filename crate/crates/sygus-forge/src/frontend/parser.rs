//! Problem-file parser.
//!
//! A problem is a sequence of commands: `(set-logic LIA)`, one
//! `(synth-fun name ((p Sort)...) Sort grammar?)`, any number of
//! `(declare-var name Sort)`, at least one `(constraint term)`, and a
//! closing `(check-synth)`. The format is documented in `docs/format.md`.

use num_bigint::BigInt;

use super::sexp::{read_all, Pos, Sexp};
use super::ProblemFile;
use crate::grammar::{Constructor, DatatypeDef, Denotation, GrammarSpec};
use crate::term::{check_sorts, FunSig, Op, Sort, Term};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{path}: {msg}")]
    Sort { path: String, msg: String },
    #[error("{line}:{col}: unknown symbol `{symbol}`")]
    UnknownSymbol {
        line: usize,
        col: usize,
        symbol: String,
    },
}

fn syntax(pos: Pos, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line: pos.line,
        col: pos.col,
        msg: msg.into(),
    }
}

fn unknown(pos: Pos, symbol: &str) -> ParseError {
    ParseError::UnknownSymbol {
        line: pos.line,
        col: pos.col,
        symbol: symbol.to_string(),
    }
}

pub fn parse_problem(text: &str) -> Result<ProblemFile, ParseError> {
    let forms = read_all(text).map_err(|(pos, msg)| syntax(pos, msg))?;

    let mut logic: Option<String> = None;
    let mut synth: Option<(String, Vec<(String, Sort)>, Sort, Option<GrammarSpec>)> = None;
    let mut declared: Vec<(String, Sort)> = Vec::new();
    let mut raw_constraints: Vec<&Sexp> = Vec::new();
    let mut checked = false;

    for form in &forms {
        let pos = form.pos();
        let items = form
            .list()
            .ok_or_else(|| syntax(pos, format!("expected a command, found `{form}`")))?;
        let head = items
            .first()
            .and_then(|h| h.atom())
            .ok_or_else(|| syntax(pos, "expected a command name"))?;
        if checked {
            return Err(syntax(pos, "command after (check-synth)"));
        }
        match head {
            "set-logic" => {
                if logic.is_some() {
                    return Err(syntax(pos, "repeated set-logic"));
                }
                let [_, name] = items else {
                    return Err(syntax(pos, "set-logic takes one argument"));
                };
                match name.atom() {
                    Some("LIA") => logic = Some("LIA".to_string()),
                    Some(other) => {
                        return Err(syntax(name.pos(), format!("unsupported logic `{other}`")))
                    }
                    None => return Err(syntax(name.pos(), "expected a logic name")),
                }
            }
            "synth-fun" => {
                if synth.is_some() {
                    return Err(syntax(pos, "a problem declares exactly one synth-fun"));
                }
                synth = Some(parse_synth_fun(items, pos)?);
            }
            "declare-var" => {
                let [_, name, sort] = items else {
                    return Err(syntax(pos, "declare-var takes a name and a sort"));
                };
                let name = name
                    .atom()
                    .ok_or_else(|| syntax(name.pos(), "expected a variable name"))?;
                let sort = parse_sort(sort)?;
                if declared.iter().any(|(n, _)| n == name) {
                    return Err(syntax(pos, format!("variable `{name}` declared twice")));
                }
                declared.push((name.to_string(), sort));
            }
            "constraint" => {
                let [_, body] = items else {
                    return Err(syntax(pos, "constraint takes one term"));
                };
                raw_constraints.push(body);
            }
            "check-synth" => {
                if items.len() != 1 {
                    return Err(syntax(pos, "check-synth takes no arguments"));
                }
                checked = true;
            }
            other => return Err(syntax(pos, format!("unknown command `{other}`"))),
        }
    }

    if logic.is_none() {
        return Err(syntax(Pos { line: 1, col: 1 }, "missing (set-logic LIA)"));
    }
    let Some((fun_name, params, result_sort, grammar)) = synth else {
        return Err(syntax(Pos { line: 1, col: 1 }, "missing synth-fun"));
    };
    if !checked {
        return Err(syntax(Pos { line: 1, col: 1 }, "missing (check-synth)"));
    }
    if raw_constraints.is_empty() {
        return Err(syntax(Pos { line: 1, col: 1 }, "at least one constraint is required"));
    }

    let sig = FunSig {
        name: fun_name.clone(),
        params: params.iter().map(|(_, s)| s.clone()).collect(),
        result: result_sort.clone(),
    };
    let mut constraints = Vec::with_capacity(raw_constraints.len());
    for (i, raw) in raw_constraints.iter().enumerate() {
        let term = parse_term(raw, &declared, &sig)?;
        let path = format!("constraint {}", i + 1);
        match check_sorts(&term, Some(&sig)) {
            Ok(Sort::Bool) => {}
            Ok(s) => {
                return Err(ParseError::Sort {
                    path,
                    msg: format!("has sort {s}, expected Bool"),
                })
            }
            Err(e) => {
                return Err(ParseError::Sort {
                    path,
                    msg: e.to_string(),
                })
            }
        }
        constraints.push(term);
    }

    Ok(ProblemFile {
        fun_name,
        params,
        result_sort,
        grammar,
        declared_vars: declared,
        constraints,
    })
}

fn parse_sort(s: &Sexp) -> Result<Sort, ParseError> {
    match s.atom() {
        Some("Int") => Ok(Sort::Int),
        Some("Bool") => Ok(Sort::Bool),
        Some(other) => Err(syntax(s.pos(), format!("unknown sort `{other}`"))),
        None => Err(syntax(s.pos(), "expected a sort")),
    }
}

fn parse_params(s: &Sexp) -> Result<Vec<(String, Sort)>, ParseError> {
    let items = s
        .list()
        .ok_or_else(|| syntax(s.pos(), "expected a parameter list"))?;
    let mut params = Vec::with_capacity(items.len());
    for p in items {
        let pair = p
            .list()
            .ok_or_else(|| syntax(p.pos(), "expected (name Sort)"))?;
        let [name, sort] = pair else {
            return Err(syntax(p.pos(), "expected (name Sort)"));
        };
        let name = name
            .atom()
            .ok_or_else(|| syntax(name.pos(), "expected a parameter name"))?;
        if params.iter().any(|(n, _)| n == name) {
            return Err(syntax(p.pos(), format!("repeated parameter `{name}`")));
        }
        params.push((name.to_string(), parse_sort(sort)?));
    }
    Ok(params)
}

fn parse_synth_fun(
    items: &[Sexp],
    pos: Pos,
) -> Result<(String, Vec<(String, Sort)>, Sort, Option<GrammarSpec>), ParseError> {
    if items.len() != 4 && items.len() != 5 {
        return Err(syntax(
            pos,
            "synth-fun takes a name, parameters, a result sort, and an optional grammar",
        ));
    }
    let name = items[1]
        .atom()
        .ok_or_else(|| syntax(items[1].pos(), "expected a function name"))?
        .to_string();
    let params = parse_params(&items[2])?;
    let result_sort = parse_sort(&items[3])?;
    let grammar = match items.get(4) {
        None => None,
        Some(block) => Some(parse_grammar(block, &params)?),
    };
    Ok((name, params, result_sort, grammar))
}

fn numeral(atom: &str) -> Option<BigInt> {
    if atom == "-" || atom.is_empty() {
        return None;
    }
    let digits = atom.strip_prefix('-').unwrap_or(atom);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    atom.parse().ok()
}

fn op_of(symbol: &str) -> Option<Op> {
    Some(match symbol {
        "+" => Op::Add,
        "-" => Op::Sub,
        "<=" => Op::Leq,
        "=" => Op::Eq,
        "and" => Op::And,
        "or" => Op::Or,
        "not" => Op::Not,
        "ite" => Op::Ite,
        _ => return None,
    })
}

fn parse_grammar(block: &Sexp, params: &[(String, Sort)]) -> Result<GrammarSpec, ParseError> {
    let groups = block
        .list()
        .ok_or_else(|| syntax(block.pos(), "expected a grammar block"))?;
    if groups.is_empty() {
        return Err(syntax(block.pos(), "grammar block is empty"));
    }
    let nt_names: Vec<&str> = groups
        .iter()
        .map(|g| {
            g.list()
                .and_then(|items| items.first())
                .and_then(|n| n.atom())
                .ok_or_else(|| syntax(g.pos(), "expected (Name Sort (productions...))"))
        })
        .collect::<Result<_, _>>()?;

    let mut datatypes = Vec::with_capacity(groups.len());
    for g in groups {
        let items = g.list().expect("checked above");
        let [name, sort, prods] = items else {
            return Err(syntax(g.pos(), "expected (Name Sort (productions...))"));
        };
        let nt = name.atom().expect("checked above").to_string();
        let sort = parse_sort(sort)?;
        let prod_list = prods
            .list()
            .ok_or_else(|| syntax(prods.pos(), "expected a production list"))?;
        let mut constructors = Vec::with_capacity(prod_list.len());
        for prod in prod_list {
            constructors.push(parse_production(prod, &nt_names)?);
        }
        datatypes.push(DatatypeDef {
            name: nt,
            sort,
            constructors,
        });
    }
    let start = datatypes[0].name.clone();
    GrammarSpec::new(datatypes, &start, params).map_err(|e| ParseError::Sort {
        path: "synth-fun grammar".to_string(),
        msg: e.to_string(),
    })
}

fn parse_production(prod: &Sexp, nt_names: &[&str]) -> Result<Constructor, ParseError> {
    let items = prod
        .list()
        .ok_or_else(|| syntax(prod.pos(), "expected a production form"))?;
    let head = items
        .first()
        .and_then(|h| h.atom())
        .ok_or_else(|| syntax(prod.pos(), "expected a production head"))?;
    match head {
        "Constant" => {
            let [_, value] = items else {
                return Err(syntax(prod.pos(), "Constant takes one numeral"));
            };
            let atom = value
                .atom()
                .ok_or_else(|| syntax(value.pos(), "expected a numeral"))?;
            let n = numeral(atom)
                .ok_or_else(|| syntax(value.pos(), format!("`{atom}` is not a numeral")))?;
            Ok(Constructor {
                name: atom.to_string(),
                args: Vec::new(),
                denotation: Denotation::Numeral(n),
            })
        }
        "Variable" => {
            let [_, var] = items else {
                return Err(syntax(prod.pos(), "Variable takes one parameter name"));
            };
            let var = var
                .atom()
                .ok_or_else(|| syntax(var.pos(), "expected a parameter name"))?;
            Ok(Constructor {
                name: var.to_string(),
                args: Vec::new(),
                denotation: Denotation::InputVar(var.to_string()),
            })
        }
        other => {
            let op = op_of(other).ok_or_else(|| {
                syntax(
                    prod.pos(),
                    format!(
                        "unknown production `{other}` (>=, >, < are written \
                         with <= and not in grammars)"
                    ),
                )
            })?;
            if items.len() - 1 != op.arity() {
                return Err(syntax(
                    prod.pos(),
                    format!("`{other}` takes {} nonterminals", op.arity()),
                ));
            }
            let mut args = Vec::with_capacity(items.len() - 1);
            for child in &items[1..] {
                let nt = child
                    .atom()
                    .ok_or_else(|| syntax(child.pos(), "expected a nonterminal name"))?;
                if !nt_names.contains(&nt) {
                    return Err(unknown(child.pos(), nt));
                }
                args.push(nt.to_string());
            }
            Ok(Constructor {
                name: other.to_string(),
                args,
                denotation: Denotation::Builtin(op),
            })
        }
    }
}

/// Terms over declared variables, numerals, `true`/`false`, the builtin
/// operators (with `>=`, `>`, `<` normalized away), and applications of
/// the function being synthesized.
fn parse_term(s: &Sexp, vars: &[(String, Sort)], sig: &FunSig) -> Result<Term, ParseError> {
    match s {
        Sexp::Atom(atom, pos) => {
            if let Some(n) = numeral(atom) {
                return Ok(Term::Int(n));
            }
            match atom.as_str() {
                "true" => Ok(Term::Bool(true)),
                "false" => Ok(Term::Bool(false)),
                _ => match vars.iter().find(|(n, _)| n == atom) {
                    Some((name, sort)) => Ok(Term::Var(name.clone(), sort.clone())),
                    None => Err(unknown(*pos, atom)),
                },
            }
        }
        Sexp::List(items, pos) => {
            let head = items
                .first()
                .and_then(|h| h.atom())
                .ok_or_else(|| syntax(*pos, "expected an operator or function name"))?;
            let args: Vec<Term> = items[1..]
                .iter()
                .map(|a| parse_term(a, vars, sig))
                .collect::<Result<_, _>>()?;
            let arity = |n: usize| -> Result<(), ParseError> {
                if args.len() == n {
                    Ok(())
                } else {
                    Err(syntax(
                        *pos,
                        format!("`{head}` takes {n} arguments, found {}", args.len()),
                    ))
                }
            };
            match head {
                "+" => {
                    arity(2)?;
                    Ok(Term::add(args[0].clone(), args[1].clone()))
                }
                "-" => match args.len() {
                    1 => Ok(Term::neg(args[0].clone())),
                    2 => Ok(Term::sub(args[0].clone(), args[1].clone())),
                    n => Err(syntax(*pos, format!("`-` takes 1 or 2 arguments, found {n}"))),
                },
                "<=" => {
                    arity(2)?;
                    Ok(Term::leq(args[0].clone(), args[1].clone()))
                }
                ">=" => {
                    arity(2)?;
                    Ok(Term::geq(args[0].clone(), args[1].clone()))
                }
                "<" => {
                    arity(2)?;
                    Ok(Term::lt(args[0].clone(), args[1].clone()))
                }
                ">" => {
                    arity(2)?;
                    Ok(Term::gt(args[0].clone(), args[1].clone()))
                }
                "=" => {
                    arity(2)?;
                    Ok(Term::eq(args[0].clone(), args[1].clone()))
                }
                "not" => {
                    arity(1)?;
                    Ok(Term::not(args[0].clone()))
                }
                "ite" => {
                    arity(3)?;
                    Ok(Term::ite(args[0].clone(), args[1].clone(), args[2].clone()))
                }
                "and" | "or" => {
                    if args.len() < 2 {
                        return Err(syntax(
                            *pos,
                            format!("`{head}` takes at least 2 arguments"),
                        ));
                    }
                    let mut it = args.into_iter().rev();
                    let last = it.next().expect("len >= 2");
                    Ok(it.fold(last, |acc, a| {
                        if head == "and" {
                            Term::and(a, acc)
                        } else {
                            Term::or(a, acc)
                        }
                    }))
                }
                name if name == sig.name => {
                    if args.len() != sig.params.len() {
                        return Err(syntax(
                            *pos,
                            format!(
                                "`{name}` takes {} arguments, found {}",
                                sig.params.len(),
                                args.len()
                            ),
                        ));
                    }
                    Ok(Term::Call(name.to_string(), args))
                }
                other => Err(unknown(*pos, other)),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

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
    fn parses_the_max_problem() {
        let p = parse_problem(MAX_PROBLEM).unwrap();
        assert_eq!(p.fun_name, "f");
        assert_eq!(p.result_sort, Sort::Int);
        assert_eq!(p.constraints.len(), 3);
        // >= is stored as flipped <=; the printer restores it.
        assert_eq!(p.constraints[0].to_string(), "(>= (f x y) x)");
        let g = p.grammar.as_ref().unwrap();
        assert_eq!(g.start(), "S");
        assert!(g.ite_capable());
        assert!(p.conjecture().unwrap().single_invocation());
    }

    #[test]
    fn rejects_malformed_files() {
        let two_funs = format!(
            "{}(synth-fun g ((x Int)) Int)\n",
            MAX_PROBLEM.replace("(check-synth)\n", "")
        ) + "(check-synth)\n";
        assert!(matches!(
            parse_problem(&two_funs),
            Err(ParseError::Syntax { msg, .. }) if msg.contains("exactly one synth-fun")
        ));

        let undeclared = MAX_PROBLEM.replace("(f x y) x)", "(f x y) z)");
        assert!(matches!(
            parse_problem(&undeclared),
            Err(ParseError::UnknownSymbol { symbol, .. }) if symbol == "z"
        ));

        let ill_sorted = MAX_PROBLEM.replace("(constraint (>= (f x y) x))", "(constraint (+ x y))");
        assert!(matches!(
            parse_problem(&ill_sorted),
            Err(ParseError::Sort { path, .. }) if path == "constraint 1"
        ));

        let no_constraint = "(set-logic LIA)\n(synth-fun f ((x Int)) Int)\n(check-synth)\n";
        assert!(parse_problem(no_constraint).is_err());

        let bad_logic = MAX_PROBLEM.replace("LIA", "NRA");
        assert!(parse_problem(&bad_logic).is_err());

        let geq_production = MAX_PROBLEM.replace("(<= S S)", "(>= S S)");
        assert!(matches!(
            parse_problem(&geq_production),
            Err(ParseError::Syntax { msg, .. }) if msg.contains(">=")
        ));
    }

    #[test]
    fn accepts_surface_sugar() {
        let text = "\
(set-logic LIA)
(synth-fun f ((x Int)) Int)
(declare-var x Int)
(declare-var b Bool)
(constraint (or b (> (f x) (- 5)) (< x -2)))
(constraint (= (f x) (- x)))
(check-synth)
";
        let p = parse_problem(text).unwrap();
        // n-ary or folds to the right; unary minus and negative numerals
        // both parse. `(- 5)` is a subtraction application, so comparison
        // orientation treats it as compound and puts it on the left.
        assert_eq!(
            p.constraints[0].to_string(),
            "(or b (or (< (- 5) (f x)) (< x (- 2))))"
        );
        assert_eq!(p.constraints[1].to_string(), "(= (f x) (- x))");
    }
}
