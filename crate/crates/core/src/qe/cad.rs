//! Cylindrical decomposition of the line of one parameter.

use std::collections::BTreeSet;

use crate::algebra::rat::sign;
use crate::algebra::{
    discriminant, gcd, resultant, square_free_part, square_free_part_in, Assignment, Poly, Rat,
    UniPoly, Var,
};
use crate::algebra::elim::content_in;
use crate::formula::{Formula, Rel};
use crate::realroots::{
    decide_exists_real, isolate_with_chain, rational_roots, samples_from_intervals, Interval, RootsError,
    SturmChain, DEFAULT_DIVISOR_BUDGET,
};

use super::{lit, QeError};

/// Projection degree above which the decomposition is refused.
pub const DEFAULT_MAX_PROJECTION_DEGREE: u64 = 160;

/// Splits polynomials into a pairwise coprime list with the same zero set.
fn coprime_basis(mut ps: Vec<Poly>, y: &Var) -> Vec<Poly> {
    loop {
        let mut changed = false;
        'outer: for i in 0..ps.len() {
            for j in i + 1..ps.len() {
                let g = gcd(&ps[i], &ps[j]);
                if g.contains_var(y) {
                    let a = ps[i].div_exact(&g).expect("gcd divides");
                    let b = ps[j].div_exact(&g).expect("gcd divides");
                    let mut next: Vec<Poly> = Vec::new();
                    for (k, p) in ps.iter().enumerate() {
                        if k != i && k != j {
                            next.push(p.clone());
                        }
                    }
                    for p in [g, a, b] {
                        if p.contains_var(y) {
                            let p = p.normalize_up_to_constant();
                            if !next.contains(&p) {
                                next.push(p);
                            }
                        }
                    }
                    ps = next;
                    changed = true;
                    break 'outer;
                }
            }
        }
        if !changed {
            return ps;
        }
    }
}

/// Upper bound on the `x`-degree of the resultant in `y`.
fn res_degree_bound(s: &Poly, t: &Poly, x: &Var, y: &Var) -> u64 {
    let (sy, sx) = (s.degree_in(y) as u64, s.degree_in(x) as u64);
    let (ty, tx) = (t.degree_in(y) as u64, t.degree_in(x) as u64);
    sy * tx + ty * sx
}

/// Projection polynomials in `x` whose real roots delimit the sign-invariant cells.
fn projection(phi: &Formula, x: &Var, y: &Var, max_degree: u64) -> Result<Vec<UniPoly>, QeError> {
    let mut xs: Vec<Poly> = Vec::new();
    let mut ys: Vec<Poly> = Vec::new();
    for a in phi.atoms() {
        if a.poly.contains_var(y) {
            let c = content_in(&a.poly, y);
            xs.push(c.clone());
            let g = a.poly.div_exact(&c).expect("content divides");
            let s = square_free_part_in(&g, y);
            if res_degree_bound(&s, &s.derivative(y), x, y) > 4 * max_degree {
                return Err(QeError::ProjectionTooLarge);
            }
            if !ys.contains(&s) {
                ys.push(s);
            }
        } else {
            xs.push(a.poly.clone());
        }
    }
    let ys = coprime_basis(ys, y);
    for (i, s) in ys.iter().enumerate() {
        xs.push(s.coeffs_in(y).pop().unwrap_or_default());
        xs.push(discriminant(s, y)?);
        for t in &ys[i + 1..] {
            if res_degree_bound(s, t, x, y) > 4 * max_degree {
                return Err(QeError::ProjectionTooLarge);
            }
            xs.push(resultant(s, t, y));
        }
    }
    let mut out: Vec<UniPoly> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut total = 0u64;
    for p in xs {
        if p.is_zero() || p.is_constant() {
            continue;
        }
        let u = p.to_unipoly(x).ok_or(QeError::TooManyFreeVariables)?;
        let s = square_free_part(&u)?;
        let key = s.to_poly().normalize_up_to_constant();
        if seen.insert(key.clone()) {
            total += s.degree() as u64;
            if total > max_degree {
                return Err(QeError::ProjectionTooLarge);
            }
            out.push(key.to_unipoly(x).expect("univariate"));
        }
    }
    Ok(out)
}

/// Replaces isolating intervals around rational roots by point intervals.
/// Gap midpoints stay off every root since each open interval held one root.
fn mark_rational_roots(roots: Vec<Interval>, factors: &[UniPoly]) -> Result<Vec<Interval>, QeError> {
    let mut rational = Vec::new();
    for f in factors {
        match rational_roots(f, DEFAULT_DIVISOR_BUDGET) {
            Ok(rs) => rational.extend(rs),
            Err(RootsError::DivisorBudgetExceeded) => return Err(QeError::ProjectionTooLarge),
            Err(e) => return Err(e.into()),
        }
    }
    let mut out: Vec<Interval> = Vec::with_capacity(roots.len());
    for iv in roots {
        match rational.iter().find(|r| !iv.is_point() && iv.contains(r)) {
            None => out.push(iv),
            Some(r) => out.push(Interval::point(r.clone())),
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
struct Section {
    iv: Interval,
    truth: bool,
}

fn holds_at(phi: &Formula, x: &Var, y: &Var, v: &Rat) -> Result<bool, QeError> {
    let a: Assignment = [(x.clone(), v.clone())].into_iter().collect();
    Ok(decide_exists_real(&phi.substitute(&a), y)?)
}

/// Quantifier-free formula in `x` equivalent to `exists y. phi` at every rational `x`.
///
/// Irrational section points are given the truth value of an adjacent true
/// sector (if any), so the description never needs algebraic endpoints.
pub fn cad_one_param(phi: &Formula, y: &Var, max_degree: u64) -> Result<Formula, QeError> {
    let free: Vec<Var> = phi.free_vars().into_iter().filter(|v| v != y).collect();
    if free.len() > 1 {
        return Err(QeError::TooManyFreeVariables);
    }
    if !phi.contains_var(y) {
        return Ok(phi.clone());
    }
    let Some(x) = free.into_iter().next() else {
        let t = decide_exists_real(phi, y)?;
        return Ok(if t { Formula::True } else { Formula::False });
    };
    let factors = projection(phi, &x, y, max_degree)?;
    let roots = match factors.iter().cloned().reduce(|a, b| a.mul(&b)) {
        None => vec![],
        Some(p) => isolate_with_chain(&SturmChain::from_square_free(square_free_part(&p)?), &Rat::from_integer(1.into()))?,
    };
    let roots = mark_rational_roots(roots, &factors)?;
    let samples = samples_from_intervals(&roots);
    let mut sectors = Vec::with_capacity(samples.len());
    for s in &samples {
        sectors.push(holds_at(phi, &x, y, s)?);
    }
    if roots.is_empty() {
        return Ok(if sectors[0] { Formula::True } else { Formula::False });
    }
    let mut sections = Vec::with_capacity(roots.len());
    for (j, iv) in roots.iter().enumerate() {
        let truth = if iv.is_point() {
            holds_at(phi, &x, y, &iv.lo)?
        } else {
            sectors[j] || sectors[j + 1]
        };
        sections.push(Section { iv: iv.clone(), truth });
    }
    if let Some(f) = single_condition(&factors, &samples, &sectors, &sections) {
        return Ok(f);
    }
    Ok(describe_runs(&factors, &x, &sectors, &sections))
}

/// A single sign condition on one projection factor matching every sector
/// sample and every rational section.
fn single_condition(
    factors: &[UniPoly],
    samples: &[Rat],
    sectors: &[bool],
    sections: &[Section],
) -> Option<Formula> {
    if sectors.iter().all(|t| *t) && sections.iter().all(|s| s.truth) {
        return Some(Formula::True);
    }
    if !sectors.iter().any(|t| *t) && !sections.iter().any(|s| s.truth) {
        return Some(Formula::False);
    }
    for rel in [Rel::Le, Rel::Ge, Rel::Lt, Rel::Gt] {
        for f in factors {
            let ok_sectors = samples
                .iter()
                .zip(sectors)
                .all(|(s, t)| rel.holds(f.sign_at(s)) == *t);
            let ok_sections = sections
                .iter()
                .filter(|s| s.iv.is_point())
                .all(|s| rel.holds(f.sign_at(&s.iv.lo)) == s.truth);
            if ok_sectors && ok_sections {
                return Some(Formula::atom(f.to_poly(), rel));
            }
        }
    }
    None
}

fn var_minus(x: &Var, r: &Rat) -> Poly {
    &Poly::var(x) - &Poly::constant(r.clone())
}

/// The factor with a simple root inside the open interval.
fn vanishing_factor<'a>(factors: &'a [UniPoly], iv: &Interval) -> &'a UniPoly {
    factors
        .iter()
        .find(|f| f.sign_at(&iv.lo) * f.sign_at(&iv.hi) < 0)
        .expect("isolating interval of the product holds a root of some factor")
}

/// `x` above (`above = true`) or below the irrational root isolated by `iv`.
fn beyond_irrational(factors: &[UniPoly], x: &Var, iv: &Interval, above: bool) -> Formula {
    let f = vanishing_factor(factors, iv);
    let fp = f.to_poly();
    if above {
        let s = sign(&f.eval(&iv.hi));
        Formula::and([
            lit(var_minus(x, &iv.lo), Rel::Gt),
            Formula::or([
                lit(var_minus(x, &iv.hi), Rel::Ge),
                lit(fp.scale(&Rat::from_integer(s.into())), Rel::Ge),
            ]),
        ])
    } else {
        let s = sign(&f.eval(&iv.lo));
        Formula::and([
            lit(var_minus(x, &iv.hi), Rel::Lt),
            Formula::or([
                lit(var_minus(x, &iv.lo), Rel::Le),
                lit(fp.scale(&Rat::from_integer(s.into())), Rel::Ge),
            ]),
        ])
    }
}

/// Disjunction over maximal runs of true cells, each bounded by rational
/// comparisons or by sign conditions near irrational endpoints.
fn describe_runs(factors: &[UniPoly], x: &Var, sectors: &[bool], sections: &[Section]) -> Formula {
    // cells: sector 0, section 0, sector 1, ..., section k-1, sector k
    let k = sections.len();
    let truth = |c: usize| if c % 2 == 0 { sectors[c / 2] } else { sections[c / 2].truth };
    let n = 2 * k + 1;
    let mut runs = Vec::new();
    let mut c = 0;
    while c < n {
        if !truth(c) {
            c += 1;
            continue;
        }
        let start = c;
        while c + 1 < n && truth(c + 1) {
            c += 1;
        }
        runs.push((start, c));
        c += 1;
    }
    let mut disjuncts = Vec::new();
    for (a, b) in runs {
        let mut conj = Vec::new();
        if a > 0 {
            if a % 2 == 0 {
                // left neighbour is a false section, necessarily rational
                conj.push(lit(var_minus(x, &sections[a / 2 - 1].iv.lo), Rel::Gt));
            } else {
                let iv = &sections[a / 2].iv;
                if iv.is_point() {
                    conj.push(lit(var_minus(x, &iv.lo), Rel::Ge));
                } else {
                    conj.push(beyond_irrational(factors, x, iv, true));
                }
            }
        }
        if b < n - 1 {
            if b % 2 == 0 {
                conj.push(lit(var_minus(x, &sections[b / 2].iv.lo), Rel::Lt));
            } else {
                let iv = &sections[b / 2].iv;
                if iv.is_point() {
                    conj.push(lit(var_minus(x, &iv.lo), Rel::Le));
                } else {
                    conj.push(beyond_irrational(factors, x, iv, false));
                }
            }
        }
        disjuncts.push(Formula::and(conj));
    }
    Formula::or(disjuncts)
}
