use std::collections::BTreeMap;

use num_traits::{One, Signed};

use crate::algebra::{Monomial, Poly, Rat, Var};
use crate::formula::{Atom, Formula, Rel};

fn symbol(name: &str) -> String {
    let simple = !name.is_empty()
        && !name.starts_with(|c: char| c.is_ascii_digit())
        && name.chars().all(|c| c.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/".contains(c));
    if simple {
        name.to_string()
    } else {
        format!("|{name}|")
    }
}

/// `3`, `(- 3)`, `(/ 1 2)`, `(/ (- 127) 128)`.
pub fn print_rat(r: &Rat) -> String {
    let n = r.numer().abs();
    let num = if r.is_negative() { format!("(- {n})") } else { n.to_string() };
    if r.denom().is_one() {
        num
    } else {
        format!("(/ {num} {})", r.denom())
    }
}

fn print_monomial_factors(m: &Monomial) -> Vec<String> {
    let mut out = Vec::new();
    for (v, e) in m.factors() {
        for _ in 0..*e {
            out.push(symbol(v.name()));
        }
    }
    out
}

fn print_term(m: &Monomial, c: &Rat) -> String {
    let mut factors = print_monomial_factors(m);
    if factors.is_empty() {
        return print_rat(c);
    }
    if c.is_one() {
        if factors.len() == 1 {
            return factors.pop().unwrap();
        }
        return format!("(* {})", factors.join(" "));
    }
    if (-c).is_one() {
        let inner = if factors.len() == 1 { factors.pop().unwrap() } else { format!("(* {})", factors.join(" ")) };
        return format!("(- {inner})");
    }
    format!("(* {} {})", print_rat(c), factors.join(" "))
}

/// Polynomial as a sum of terms in canonical order; `(- a b c)` when every
/// term after the first is negative.
pub fn print_poly(p: &Poly) -> String {
    let terms: Vec<(&Monomial, &Rat)> = p.terms().rev().collect();
    match terms.len() {
        0 => "0".into(),
        1 => print_term(terms[0].0, terms[0].1),
        _ => {
            if terms[1..].iter().all(|(_, c)| c.is_negative()) {
                let rest: Vec<String> = terms[1..].iter().map(|(m, c)| print_term(m, &-(*c).clone())).collect();
                format!("(- {} {})", print_term(terms[0].0, terms[0].1), rest.join(" "))
            } else {
                let all: Vec<String> = terms.iter().map(|(m, c)| print_term(m, c)).collect();
                format!("(+ {})", all.join(" "))
            }
        }
    }
}

fn print_atom(a: &Atom) -> String {
    let op = match a.rel {
        Rel::Ne => "distinct",
        r => r.symbol(),
    };
    format!("({op} {} 0)", print_poly(&a.poly))
}

pub fn print_formula(f: &Formula) -> String {
    match f {
        Formula::True => "true".into(),
        Formula::False => "false".into(),
        Formula::Atom(a) => print_atom(a),
        Formula::Not(g) => format!("(not {})", print_formula(g)),
        Formula::And(gs) => format!("(and {})", gs.iter().map(print_formula).collect::<Vec<_>>().join(" ")),
        Formula::Or(gs) => format!("(or {})", gs.iter().map(print_formula).collect::<Vec<_>>().join(" ")),
    }
}

pub fn print_model(m: &BTreeMap<Var, Rat>) -> String {
    m.iter()
        .map(|(v, r)| format!("(define-fun {} () Real {})", symbol(v.name()), print_rat(r)))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Complete script: declarations, one assertion, `check-sat`.
pub fn print_script(f: &Formula, vars: &[Var], get_values: bool) -> String {
    let mut s = String::from("(set-logic QF_NRA)\n");
    for v in vars {
        s.push_str(&format!("(declare-const {} Real)\n", symbol(v.name())));
    }
    s.push_str(&format!("(assert {})\n(check-sat)\n", print_formula(f)));
    if get_values && !vars.is_empty() {
        let names: Vec<String> = vars.iter().map(|v| symbol(v.name())).collect();
        s.push_str(&format!("(get-value ({}))\n", names.join(" ")));
    }
    s
}
