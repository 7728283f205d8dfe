//! SMT-LIB 2 (QF_NRA subset) reading and printing, and an external solver client.

pub mod parse;
pub mod print;
pub mod sexp;
pub mod solver;

pub use parse::{parse_problem, parse_script, Script, Sidecar};
pub use print::{print_formula, print_model, print_poly, print_rat, print_script};
pub use sexp::{parse_sexps, Loc, Sexp};
pub use solver::{external_solve, parse_answer, SolverAnswer};

use crate::formula::FormulaError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SmtError {
    #[error("{loc}: {msg}")]
    Parse { msg: String, loc: Loc },
    #[error("{loc}: unsupported construct: {what}")]
    UnsupportedConstruct { what: String, loc: Loc },
    #[error("{loc}: sort error: {what}")]
    SortError { what: String, loc: Loc },
    #[error("unknown variable `{0}` in the input/output designation")]
    UnknownVariable(String),
    #[error("bad sidecar: {0}")]
    Sidecar(String),
    #[error("external solver failure: {0}")]
    ExternalSolverFailure(String),
    #[error("external solver timed out")]
    Timeout,
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::{cst, var};
    use crate::algebra::rat::{int, rat};
    use crate::algebra::{Rat, Var};
    use crate::formula::{normalize, Formula, Rel};
    use std::collections::BTreeMap;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn decimal_bound_is_exact() {
        let text = "(set-logic QF_NRA)(declare-const x Real)(declare-const y Real)\n(assert (<= 0.9 (+ (* x x) (* y y))))(check-sat)";
        let spec = parse_problem(text, &s(&["x"]), &s(&["y"])).unwrap();
        let want = &(&(&var("x") * &var("x")) + &(&var("y") * &var("y"))) - &cst(rat(9, 10));
        let Formula::Atom(a) = &spec.formula else { panic!() };
        assert_eq!(a.poly, -want.clone());
        assert_eq!(a.rel, Rel::Le);
        let other = Formula::atom(want, Rel::Ge);
        for (x, y) in [(rat(3, 10), rat(9, 10)), (int(0), rat(-949, 1000)), (int(0), rat(-948, 1000)), (int(1), int(0))] {
            let a: crate::algebra::Assignment = [(Var::new("x"), x), (Var::new("y"), y)].into_iter().collect();
            assert_eq!(normalize(&spec.formula).eval(&a).unwrap(), other.eval(&a).unwrap());
        }
    }

    #[test]
    fn equality_and_let_and_division() {
        let text = "(declare-fun x () Real)(declare-fun y () Real)(assert (let ((p (* x y))) (= p 1)))(assert (< (/ x 4) 2))";
        let spec = parse_problem(text, &s(&["x"]), &s(&["y"])).unwrap();
        let n = normalize(&spec.formula);
        let xy = &var("x") * &var("y");
        assert!(n.atoms().iter().filter(|a| a.poly.contains_var(&Var::new("y"))).count() == 2);
        let a: crate::algebra::Assignment =
            [(Var::new("x"), int(2)), (Var::new("y"), rat(1, 2))].into_iter().collect();
        assert!(n.eval(&a).unwrap());
        assert!(xy.eval(&a).unwrap() == int(1));
        let bad = "(declare-const x Real)(assert (< (/ 1 x) 2))";
        assert!(matches!(parse_script(bad), Err(SmtError::UnsupportedConstruct { .. })));
        let sort = "(declare-const b Bool)";
        assert!(matches!(parse_script(sort), Err(SmtError::SortError { .. })));
    }

    #[test]
    fn designated_output() {
        let text = "(declare-const a Real)(declare-const b Real)(assert (> (* a b) 1))";
        let spec = parse_problem(text, &s(&["a"]), &s(&["b"])).unwrap();
        assert_eq!(spec.outputs, vec![Var::new("b")]);
        assert!(matches!(parse_problem(text, &s(&["a"]), &s(&["c"])), Err(SmtError::UnknownVariable(_))));
    }

    #[test]
    fn printing() {
        let f = Formula::atom(&(&var("x") * &var("x")) - &cst(int(1)), Rel::Lt);
        assert_eq!(print_formula(&f), "(< (- (* x x) 1) 0)");
        assert_eq!(print_formula(&Formula::True), "true");
        let m: BTreeMap<Var, Rat> = [(Var::new("x"), rat(-127, 128))].into_iter().collect();
        assert_eq!(print_model(&m), "(define-fun x () Real (/ (- 127) 128))");
        let back = parse_script(&print_script(&f, &[Var::new("x")], false)).unwrap();
        assert_eq!(back.formula, f);
    }

    #[test]
    fn solver_answers() {
        let vars = [Var::new("x"), Var::new("y")];
        let a = parse_answer("sat\n((x (/ (- 1) 2)) (y 3.0))", &vars).unwrap();
        let SolverAnswer::Sat { values, irrational } = a else { panic!() };
        assert_eq!(values[&Var::new("x")], rat(-1, 2));
        assert_eq!(values[&Var::new("y")], int(3));
        assert!(irrational.is_empty());
        let b = parse_answer("sat ((x 1) (y (root-obj (+ (^ y 2) (- 2)) 1)))", &vars).unwrap();
        let SolverAnswer::Sat { irrational, .. } = b else { panic!() };
        assert!(irrational.contains(&Var::new("y")));
        let c = parse_answer("sat ((x 1) (y 1.41421356?))", &vars).unwrap();
        assert!(matches!(c, SolverAnswer::Sat { irrational, .. } if irrational.len() == 1));
        assert_eq!(parse_answer("unsat", &vars).unwrap(), SolverAnswer::Unsat);
        assert!(parse_answer("error", &vars).is_err());
    }
}
