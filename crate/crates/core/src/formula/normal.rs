use std::collections::BTreeSet;

use crate::algebra::{Poly, Var};

use super::ast::{Atom, Formula, Rel};
use super::FormulaError;

pub const DEFAULT_DNF_BUDGET: usize = 4096;

/// A conjunction of atoms.
pub type Clause = Vec<Atom>;

/// Negation normal form over `<, >, <=, >=` with constant atoms folded.
pub fn normalize(f: &Formula) -> Formula {
    nnf(f, false)
}

fn expand_atom(a: &Atom, negated: bool) -> Formula {
    let rel = if negated { a.rel.negate() } else { a.rel };
    let lit = |r: Rel| {
        let at = Atom::new(a.poly.clone(), r);
        match at.constant_truth() {
            Some(true) => Formula::True,
            Some(false) => Formula::False,
            None => Formula::Atom(at),
        }
    };
    match rel {
        Rel::Eq => Formula::and([lit(Rel::Le), lit(Rel::Ge)]),
        Rel::Ne => Formula::or([lit(Rel::Lt), lit(Rel::Gt)]),
        r => lit(r),
    }
}

fn nnf(f: &Formula, negated: bool) -> Formula {
    match f {
        Formula::True => {
            if negated {
                Formula::False
            } else {
                Formula::True
            }
        }
        Formula::False => {
            if negated {
                Formula::True
            } else {
                Formula::False
            }
        }
        Formula::Atom(a) => expand_atom(a, negated),
        Formula::Not(g) => nnf(g, !negated),
        Formula::And(gs) => {
            let parts: Vec<_> = gs.iter().map(|g| nnf(g, negated)).collect();
            if negated {
                Formula::or(parts)
            } else {
                Formula::and(parts)
            }
        }
        Formula::Or(gs) => {
            let parts: Vec<_> = gs.iter().map(|g| nnf(g, negated)).collect();
            if negated {
                Formula::and(parts)
            } else {
                Formula::or(parts)
            }
        }
    }
}

/// Disjunctive normal form of a normalized formula. `True` is `[[]]`, `False` is `[]`.
pub fn to_dnf(f: &Formula, budget: usize) -> Result<Vec<Clause>, FormulaError> {
    let out = dnf(f, budget)?;
    Ok(out)
}

fn push_unique(c: &mut Clause, a: &Atom) {
    if !c.contains(a) {
        c.push(a.clone());
    }
}

fn dnf(f: &Formula, budget: usize) -> Result<Vec<Clause>, FormulaError> {
    match f {
        Formula::True => Ok(vec![vec![]]),
        Formula::False => Ok(vec![]),
        Formula::Atom(a) => Ok(vec![vec![a.clone()]]),
        Formula::Not(g) => dnf(&normalize(&Formula::Not(g.clone())), budget),
        Formula::Or(gs) => {
            let mut out: Vec<Clause> = Vec::new();
            for g in gs {
                for c in dnf(g, budget)? {
                    if !out.contains(&c) {
                        out.push(c);
                    }
                }
                if out.len() > budget {
                    return Err(FormulaError::DnfBudgetExceeded(budget));
                }
            }
            Ok(out)
        }
        Formula::And(gs) => {
            let mut acc: Vec<Clause> = vec![vec![]];
            for g in gs {
                let part = dnf(g, budget)?;
                if acc.len().saturating_mul(part.len()) > budget {
                    return Err(FormulaError::DnfBudgetExceeded(budget));
                }
                let mut next: Vec<Clause> = Vec::with_capacity(acc.len() * part.len());
                for c in &acc {
                    for d in &part {
                        let mut merged = c.clone();
                        for a in d {
                            push_unique(&mut merged, a);
                        }
                        if !next.contains(&merged) {
                            next.push(merged);
                        }
                    }
                }
                acc = next;
                if acc.is_empty() {
                    break;
                }
            }
            Ok(acc)
        }
    }
}

pub fn clause_formula(c: &[Atom]) -> Formula {
    Formula::and(c.iter().cloned().map(Formula::Atom).collect::<Vec<_>>())
}

pub fn dnf_formula(cs: &[Clause]) -> Formula {
    Formula::or(cs.iter().map(|c| clause_formula(c)).collect::<Vec<_>>())
}

/// Makes every non-strict atom mentioning `y` strict.
pub fn hat_transform(f: &Formula, y: &Var) -> Formula {
    f.map_atoms(&mut |a| {
        let rel = match a.rel {
            Rel::Le if a.poly.contains_var(y) => Rel::Lt,
            Rel::Ge if a.poly.contains_var(y) => Rel::Gt,
            r => r,
        };
        Formula::Atom(Atom::new(a.poly.clone(), rel))
    })
}

/// Polynomials mentioning `y` in non-strict atoms, deduplicated up to a
/// nonzero constant factor and returned in canonical order.
pub fn nonstrict_polys(f: &Formula, y: &Var) -> Vec<Poly> {
    let mut set = BTreeSet::new();
    f.for_each_atom(&mut |a| {
        if matches!(a.rel, Rel::Le | Rel::Ge | Rel::Eq) && a.poly.contains_var(y) {
            set.insert(a.poly.normalize_up_to_constant());
        }
    });
    set.into_iter().collect()
}
