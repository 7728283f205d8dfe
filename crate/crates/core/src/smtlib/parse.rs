use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::algebra::rat::parse_decimal;
use crate::algebra::{Poly, Rat, Var};
use crate::formula::{Formula, Rel, Spec};

use super::sexp::{parse_sexps, Loc, Sexp};
use super::SmtError;

/// Input/output designation stored next to a script.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sidecar {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

impl Sidecar {
    pub fn from_json(text: &str) -> Result<Sidecar, SmtError> {
        serde_json::from_str(text).map_err(|e| SmtError::Sidecar(e.to_string()))
    }
}

/// The assertions of a script together with its declarations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Script {
    pub logic: Option<String>,
    pub declared: Vec<Var>,
    pub formula: Formula,
}

#[derive(Clone, Debug)]
enum Val {
    Num(Poly),
    Bool(Formula),
}

struct Ctx<'a> {
    declared: &'a BTreeSet<String>,
    scopes: Vec<BTreeMap<String, Val>>,
}

fn unsupported(what: impl Into<String>, loc: Loc) -> SmtError {
    SmtError::UnsupportedConstruct { what: what.into(), loc }
}

fn sort_error(what: impl Into<String>, loc: Loc) -> SmtError {
    SmtError::SortError { what: what.into(), loc }
}

fn numeral(s: &str) -> Option<Rat> {
    if s.is_empty() || !s.chars().all(|c| c.is_ascii_digit() || c == '.') || s.starts_with('.') || s.ends_with('.') {
        return None;
    }
    parse_decimal(s)
}

impl Ctx<'_> {
    fn lookup(&self, name: &str) -> Option<Val> {
        self.scopes.iter().rev().find_map(|s| s.get(name).cloned())
    }

    fn num(&mut self, e: &Sexp) -> Result<Poly, SmtError> {
        match self.term(e)? {
            Val::Num(p) => Ok(p),
            Val::Bool(_) => Err(sort_error(format!("expected a Real term, found `{e}`"), e.loc())),
        }
    }

    fn boolean(&mut self, e: &Sexp) -> Result<Formula, SmtError> {
        match self.term(e)? {
            Val::Bool(f) => Ok(f),
            Val::Num(_) => Err(sort_error(format!("expected a Bool term, found `{e}`"), e.loc())),
        }
    }

    fn term(&mut self, e: &Sexp) -> Result<Val, SmtError> {
        match e {
            Sexp::Atom(s, loc) => {
                if let Some(v) = self.lookup(s) {
                    return Ok(v);
                }
                match s.as_str() {
                    "true" => return Ok(Val::Bool(Formula::True)),
                    "false" => return Ok(Val::Bool(Formula::False)),
                    _ => {}
                }
                if let Some(r) = numeral(s) {
                    return Ok(Val::Num(Poly::constant(r)));
                }
                if self.declared.contains(s) {
                    return Ok(Val::Num(Poly::var(&Var::new(s))));
                }
                Err(unsupported(format!("unknown symbol `{s}`"), *loc))
            }
            Sexp::List(items, loc) => {
                let Some(head) = items.first().and_then(|h| h.as_atom()) else {
                    return Err(unsupported(format!("`{e}`"), *loc));
                };
                let args = &items[1..];
                match head {
                    "let" => self.let_term(args, *loc),
                    "+" => {
                        let mut acc = Poly::zero();
                        for a in args {
                            acc = &acc + &self.num(a)?;
                        }
                        Ok(Val::Num(acc))
                    }
                    "-" => {
                        if args.is_empty() {
                            return Err(unsupported("`-` without arguments", *loc));
                        }
                        let first = self.num(&args[0])?;
                        if args.len() == 1 {
                            return Ok(Val::Num(-first));
                        }
                        let mut acc = first;
                        for a in &args[1..] {
                            acc = &acc - &self.num(a)?;
                        }
                        Ok(Val::Num(acc))
                    }
                    "*" => {
                        let mut acc = Poly::one();
                        for a in args {
                            let p = self.num(a)?;
                            acc = acc.try_mul(&p).map_err(|_| unsupported("degree overflow", a.loc()))?;
                        }
                        Ok(Val::Num(acc))
                    }
                    "/" => {
                        if args.len() < 2 {
                            return Err(unsupported("`/` needs two arguments", *loc));
                        }
                        let mut acc = self.num(&args[0])?;
                        for a in &args[1..] {
                            let d = self.num(a)?;
                            match d.constant_value() {
                                Some(c) if !num_traits::Zero::is_zero(&c) => acc = acc.scale(&c.recip()),
                                Some(_) => return Err(unsupported("division by zero", a.loc())),
                                None => return Err(unsupported("division by a non-constant term", a.loc())),
                            }
                        }
                        Ok(Val::Num(acc))
                    }
                    "<" | "<=" | ">" | ">=" | "=" | "distinct" => self.comparison(head, args, *loc),
                    "and" => {
                        let fs = args.iter().map(|a| self.boolean(a)).collect::<Result<Vec<_>, _>>()?;
                        Ok(Val::Bool(Formula::and(fs)))
                    }
                    "or" => {
                        let fs = args.iter().map(|a| self.boolean(a)).collect::<Result<Vec<_>, _>>()?;
                        Ok(Val::Bool(Formula::or(fs)))
                    }
                    "not" => {
                        if args.len() != 1 {
                            return Err(unsupported("`not` takes one argument", *loc));
                        }
                        Ok(Val::Bool(Formula::not(self.boolean(&args[0])?)))
                    }
                    "=>" => {
                        if args.len() < 2 {
                            return Err(unsupported("`=>` needs two arguments", *loc));
                        }
                        let mut fs = args.iter().map(|a| self.boolean(a)).collect::<Result<Vec<_>, _>>()?;
                        let mut acc = fs.pop().expect("nonempty");
                        while let Some(prev) = fs.pop() {
                            acc = Formula::or([Formula::not(prev), acc]);
                        }
                        Ok(Val::Bool(acc))
                    }
                    "!" => match args.first() {
                        Some(t) => self.term(t),
                        None => Err(unsupported("empty annotation", *loc)),
                    },
                    other => Err(unsupported(format!("operator `{other}`"), *loc)),
                }
            }
        }
    }

    fn let_term(&mut self, args: &[Sexp], loc: Loc) -> Result<Val, SmtError> {
        let [Sexp::List(bindings, _), body] = args else {
            return Err(unsupported("malformed `let`", loc));
        };
        let mut scope = BTreeMap::new();
        for b in bindings {
            match b {
                Sexp::List(pair, l) if pair.len() == 2 => {
                    let name = pair[0].as_atom().ok_or_else(|| unsupported("malformed binding", *l))?;
                    let v = self.term(&pair[1])?;
                    scope.insert(name.to_string(), v);
                }
                other => return Err(unsupported("malformed binding", other.loc())),
            }
        }
        self.scopes.push(scope);
        let r = self.term(body);
        self.scopes.pop();
        r
    }

    fn comparison(&mut self, op: &str, args: &[Sexp], loc: Loc) -> Result<Val, SmtError> {
        if args.len() < 2 {
            return Err(unsupported(format!("`{op}` needs two arguments"), loc));
        }
        if op == "=" {
            if let Val::Bool(first) = self.term(&args[0])? {
                let mut parts = Vec::new();
                for a in &args[1..] {
                    let g = self.boolean(a)?;
                    parts.push(Formula::or([
                        Formula::and([first.clone(), g.clone()]),
                        Formula::and([Formula::not(first.clone()), Formula::not(g)]),
                    ]));
                }
                return Ok(Val::Bool(Formula::and(parts)));
            }
        }
        let ts = args.iter().map(|a| self.num(a)).collect::<Result<Vec<_>, _>>()?;
        let rel = match op {
            "<" => Rel::Lt,
            "<=" => Rel::Le,
            ">" => Rel::Gt,
            ">=" => Rel::Ge,
            "=" => Rel::Eq,
            _ => Rel::Ne,
        };
        let mut parts = Vec::new();
        if rel == Rel::Ne {
            for i in 0..ts.len() {
                for j in i + 1..ts.len() {
                    parts.push(Formula::atom(&ts[i] - &ts[j], Rel::Ne));
                }
            }
        } else {
            for w in ts.windows(2) {
                parts.push(Formula::atom(&w[0] - &w[1], rel));
            }
        }
        Ok(Val::Bool(Formula::and(parts)))
    }
}

fn expect_real_sort(s: &Sexp) -> Result<(), SmtError> {
    match s.as_atom() {
        Some("Real") => Ok(()),
        _ => Err(sort_error(format!("sort `{s}` is not Real"), s.loc())),
    }
}

/// Reads declarations and assertions of an SMT-LIB 2 QF_NRA script.
pub fn parse_script(text: &str) -> Result<Script, SmtError> {
    let cmds = parse_sexps(text)?;
    let mut logic = None;
    let mut declared: Vec<Var> = Vec::new();
    let mut names: BTreeSet<String> = BTreeSet::new();
    let mut asserts = Vec::new();
    for c in &cmds {
        let Sexp::List(items, loc) = c else {
            return Err(unsupported(format!("top-level `{c}`"), c.loc()));
        };
        let head = items.first().and_then(|h| h.as_atom()).unwrap_or("");
        match head {
            "set-logic" => {
                let l = items.get(1).and_then(|s| s.as_atom()).unwrap_or("").to_string();
                if l != "QF_NRA" && l != "QF_NIRA" && l != "QF_LRA" && l != "ALL" {
                    return Err(unsupported(format!("logic {l}"), *loc));
                }
                logic = Some(l);
            }
            "set-info" | "set-option" | "check-sat" | "exit" | "get-model" | "get-value" | "push" | "pop" => {}
            "declare-const" | "declare-fun" => {
                let name = items.get(1).and_then(|s| s.as_atom()).ok_or_else(|| unsupported("malformed declaration", *loc))?;
                let sort = if head == "declare-const" {
                    items.get(2)
                } else {
                    match items.get(2) {
                        Some(Sexp::List(ps, _)) if ps.is_empty() => items.get(3),
                        _ => return Err(unsupported("function with arguments", *loc)),
                    }
                };
                expect_real_sort(sort.ok_or_else(|| unsupported("missing sort", *loc))?)?;
                if names.insert(name.to_string()) {
                    declared.push(Var::new(name));
                }
            }
            "define-fun" => {
                return Err(unsupported("define-fun", *loc));
            }
            "assert" => {
                let body = items.get(1).ok_or_else(|| unsupported("empty assert", *loc))?;
                asserts.push(body.clone());
            }
            other => return Err(unsupported(format!("command `{other}`"), *loc)),
        }
    }
    let mut ctx = Ctx { declared: &names, scopes: vec![] };
    let mut fs = Vec::new();
    for a in &asserts {
        fs.push(ctx.boolean(a)?);
    }
    Ok(Script { logic, declared, formula: Formula::and(fs) })
}

/// Script plus input/output designation as a specification.
pub fn parse_problem(text: &str, inputs: &[String], outputs: &[String]) -> Result<Spec, SmtError> {
    let script = parse_script(text)?;
    let known: BTreeSet<&str> = script.declared.iter().map(|v| v.name()).collect();
    for n in inputs.iter().chain(outputs) {
        if !known.contains(n.as_str()) {
            return Err(SmtError::UnknownVariable(n.clone()));
        }
    }
    let ins: Vec<Var> = inputs.iter().map(|n| Var::new(n)).collect();
    let outs: Vec<Var> = outputs.iter().map(|n| Var::new(n)).collect();
    Ok(Spec::new(script.formula, ins, outs)?)
}
