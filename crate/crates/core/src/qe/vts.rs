//! Virtual term substitution for atoms of degree at most two in the
//! eliminated variable.

use crate::algebra::rat::int;
use crate::algebra::{Poly, Var};
use crate::formula::{Atom, Formula, Rel};

use super::{lit, QeError};

/// Test term `(alpha + beta*sqrt(delta)) / gamma`, optionally shifted by a
/// positive infinitesimal.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Term {
    MinusInfinity,
    Root { alpha: Poly, beta: i8, delta: Poly, gamma: Poly, eps: bool },
}

fn coeffs(p: &Poly, y: &Var) -> [Poly; 3] {
    let mut c = p.coeffs_in(y);
    c.resize(3, Poly::zero());
    [c[0].clone(), c[1].clone(), c[2].clone()]
}

/// Sign condition `P + Q*sqrt(delta) rel 0` for `delta >= 0`.
fn sqrt_sign(p: &Poly, q: &Poly, delta: &Poly, rel: Rel) -> Formula {
    if q.is_zero() || delta.is_zero() {
        return lit(p.clone(), rel);
    }
    let norm = &(p * p) - &(&(q * q) * delta);
    match rel {
        Rel::Eq => Formula::and([lit(p * q, Rel::Le), lit(norm.clone(), Rel::Le), lit(norm, Rel::Ge)]),
        Rel::Ne => Formula::not(sqrt_sign(p, q, delta, Rel::Eq)),
        Rel::Lt => Formula::or([
            Formula::and([lit(p.clone(), Rel::Lt), lit(norm.clone(), Rel::Gt)]),
            Formula::and([
                lit(q.clone(), Rel::Le),
                Formula::or([lit(p.clone(), Rel::Lt), lit(norm, Rel::Lt)]),
            ]),
        ]),
        Rel::Le => Formula::or([
            Formula::and([lit(p.clone(), Rel::Le), lit(norm.clone(), Rel::Ge)]),
            Formula::and([lit(q.clone(), Rel::Le), lit(norm, Rel::Le)]),
        ]),
        Rel::Gt => sqrt_sign(&-p.clone(), &-q.clone(), delta, Rel::Lt),
        Rel::Ge => sqrt_sign(&-p.clone(), &-q.clone(), delta, Rel::Le),
    }
}

/// `q(t) rel 0` for a root term without infinitesimal, `deg_y q <= 2`.
fn at_root(q: &Poly, y: &Var, alpha: &Poly, beta: i8, delta: &Poly, gamma: &Poly, rel: Rel) -> Formula {
    let [c, b, a] = coeffs(q, y);
    let beta_sq = Poly::constant(int((beta * beta) as i64));
    let beta_p = Poly::constant(int(beta as i64));
    // gamma^2 q(t) = P + Q sqrt(delta)
    let p = &(&(&a * &(&(alpha * alpha) + &(&beta_sq * delta))) + &(&(&b * gamma) * alpha)) + &(&c * &(gamma * gamma));
    let qq = &beta_p * &(&(&a * alpha).scale(&int(2)) + &(&b * gamma));
    sqrt_sign(&p, &qq, delta, rel)
}

/// `q(t + eps) rel 0` for strict `rel`, recursing through derivatives.
fn at_root_eps_strict(q: &Poly, y: &Var, t: (&Poly, i8, &Poly, &Poly), rel: Rel) -> Formula {
    if !q.contains_var(y) {
        return lit(q.clone(), rel);
    }
    let (alpha, beta, delta, gamma) = t;
    Formula::or([
        at_root(q, y, alpha, beta, delta, gamma, rel),
        Formula::and([
            at_root(q, y, alpha, beta, delta, gamma, Rel::Eq),
            at_root_eps_strict(&q.derivative(y), y, t, rel),
        ]),
    ])
}

fn all_zero(q: &Poly, y: &Var) -> Formula {
    Formula::and(
        q.coeffs_in(y)
            .into_iter()
            .flat_map(|c| [lit(c.clone(), Rel::Le), lit(c, Rel::Ge)])
            .collect::<Vec<_>>(),
    )
}

fn at_root_eps(q: &Poly, y: &Var, t: (&Poly, i8, &Poly, &Poly), rel: Rel) -> Formula {
    match rel {
        Rel::Lt | Rel::Gt => at_root_eps_strict(q, y, t, rel),
        Rel::Le => Formula::or([at_root_eps_strict(q, y, t, Rel::Lt), all_zero(q, y)]),
        Rel::Ge => Formula::or([at_root_eps_strict(q, y, t, Rel::Gt), all_zero(q, y)]),
        Rel::Eq => all_zero(q, y),
        Rel::Ne => Formula::not(all_zero(q, y)),
    }
}

/// `q(-inf) rel 0` from the coefficient signs.
fn at_minus_infinity(q: &Poly, y: &Var, rel: Rel) -> Formula {
    let cs = q.coeffs_in(y);
    let strict = |r: Rel| {
        let mut alts = Vec::new();
        for k in (0..cs.len()).rev() {
            let c = if k % 2 == 1 { -cs[k].clone() } else { cs[k].clone() };
            let mut conj: Vec<Formula> = cs[k + 1..]
                .iter()
                .flat_map(|h| [lit(h.clone(), Rel::Le), lit(h.clone(), Rel::Ge)])
                .collect();
            conj.push(lit(c, r));
            alts.push(Formula::and(conj));
        }
        Formula::or(alts)
    };
    match rel {
        Rel::Lt | Rel::Gt => strict(rel),
        Rel::Le => Formula::or([strict(Rel::Lt), all_zero(q, y)]),
        Rel::Ge => Formula::or([strict(Rel::Gt), all_zero(q, y)]),
        Rel::Eq => all_zero(q, y),
        Rel::Ne => Formula::not(all_zero(q, y)),
    }
}

fn substitute(a: &Atom, y: &Var, t: &Term) -> Formula {
    if !a.poly.contains_var(y) {
        return lit(a.poly.clone(), a.rel);
    }
    match t {
        Term::MinusInfinity => at_minus_infinity(&a.poly, y, a.rel),
        Term::Root { alpha, beta, delta, gamma, eps: false } => {
            at_root(&a.poly, y, alpha, *beta, delta, gamma, a.rel)
        }
        Term::Root { alpha, beta, delta, gamma, eps: true } => {
            at_root_eps(&a.poly, y, (alpha, *beta, delta, gamma), a.rel)
        }
    }
}

fn test_terms(phi: &Formula, y: &Var) -> Result<Vec<(Formula, Term)>, QeError> {
    let mut out: Vec<(Formula, Term)> = vec![(Formula::True, Term::MinusInfinity)];
    let push = |guard: Formula, t: Term, out: &mut Vec<(Formula, Term)>| {
        if guard != Formula::False && !out.iter().any(|(_, u)| *u == t) {
            out.push((guard, t));
        }
    };
    for at in phi.atoms() {
        let d = at.poly.degree_in(y);
        if d == 0 {
            continue;
        }
        if d > 2 {
            return Err(QeError::DegreeTooHigh);
        }
        let eps = at.rel.is_strict();
        let [c, b, a] = coeffs(&at.poly, y);
        if d == 2 {
            let delta = &(&b * &b) - &(&a * &c).scale(&int(4));
            let guard = Formula::and([
                Formula::or([lit(a.clone(), Rel::Lt), lit(a.clone(), Rel::Gt)]),
                lit(delta.clone(), Rel::Ge),
            ]);
            for beta in [1i8, -1] {
                let t = Term::Root { alpha: -b.clone(), beta, delta: delta.clone(), gamma: a.scale(&int(2)), eps };
                push(guard.clone(), t, &mut out);
            }
        }
        if !b.is_zero() {
            let guard = Formula::and([
                lit(a.clone(), Rel::Le),
                lit(a.clone(), Rel::Ge),
                Formula::or([lit(b.clone(), Rel::Lt), lit(b.clone(), Rel::Gt)]),
            ]);
            let t = Term::Root { alpha: -c.clone(), beta: 0, delta: Poly::zero(), gamma: b.clone(), eps };
            push(guard, t, &mut out);
        }
    }
    Ok(out)
}

/// Quantifier-free equivalent of `exists y. phi` for a positive formula whose
/// atoms have degree at most two in `y`.
pub fn vts_quadratic(phi: &Formula, y: &Var) -> Result<Formula, QeError> {
    let terms = test_terms(phi, y)?;
    let mut disjuncts = Vec::with_capacity(terms.len());
    for (guard, t) in terms {
        let body = phi.map_atoms(&mut |a| substitute(a, y, &t));
        disjuncts.push(Formula::and([guard, body]));
        if disjuncts.last() == Some(&Formula::True) {
            return Ok(Formula::True);
        }
    }
    Ok(Formula::or(disjuncts))
}
