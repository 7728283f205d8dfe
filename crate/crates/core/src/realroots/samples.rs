use crate::algebra::rat::sign;
use crate::algebra::{square_free_part, Assignment, Rat, UniPoly, Var};
use crate::formula::{Atom, Formula};

use super::sturm::{isolate_with_chain, Interval, SturmChain};
use super::RootsError;

/// Univariate view of an atom: `None` for constant atoms.
fn atom_unipoly(a: &Atom, y: &Var) -> Result<Option<UniPoly>, RootsError> {
    if a.poly.is_zero() {
        return Err(RootsError::ZeroPolynomial);
    }
    if a.poly.is_constant() {
        return Ok(None);
    }
    a.poly
        .to_unipoly(y)
        .map(Some)
        .ok_or_else(|| RootsError::NotUnivariate(a.to_string()))
}

/// Square-free part of the product of all non-constant atom polynomials.
pub fn boundary_poly(chi: &Formula, y: &Var) -> Result<Option<UniPoly>, RootsError> {
    let mut prod: Option<UniPoly> = None;
    let mut seen: Vec<UniPoly> = Vec::new();
    for a in chi.atoms() {
        if let Some(p) = atom_unipoly(a, y)? {
            let s = square_free_part(&p)?;
            if seen.contains(&s) {
                continue;
            }
            prod = Some(match prod {
                None => s.clone(),
                Some(q) => q.mul(&s),
            });
            seen.push(s);
        }
    }
    match prod {
        None => Ok(None),
        Some(p) => Ok(Some(square_free_part(&p)?)),
    }
}

/// `{l1 - 1} ∪ {gap midpoints} ∪ {uk + 1}` for sorted isolating intervals; `{0}` when empty.
pub fn samples_from_intervals(ivs: &[Interval]) -> Vec<Rat> {
    let one = Rat::from_integer(1.into());
    let two = Rat::from_integer(2.into());
    match (ivs.first(), ivs.last()) {
        (Some(first), Some(last)) => {
            let mut out = vec![&first.lo - &one];
            for w in ivs.windows(2) {
                out.push((&w[0].hi + &w[1].lo) / &two);
            }
            out.push(&last.hi + &one);
            out
        }
        _ => vec![Rat::from_integer(0.into())],
    }
}

/// Isolating intervals of every real root of any atom polynomial.
pub fn formula_roots(chi: &Formula, y: &Var) -> Result<Vec<Interval>, RootsError> {
    formula_roots_eps(chi, y, &Rat::from_integer(1.into()))
}

pub fn formula_roots_eps(chi: &Formula, y: &Var, eps0: &Rat) -> Result<Vec<Interval>, RootsError> {
    match boundary_poly(chi, y)? {
        None => Ok(vec![]),
        Some(p) => isolate_with_chain(&SturmChain::from_square_free(p), eps0),
    }
}

/// Rational points meeting every sign-invariant open region of the atoms.
pub fn rational_samples(chi: &Formula, y: &Var) -> Result<Vec<Rat>, RootsError> {
    Ok(samples_from_intervals(&formula_roots(chi, y)?))
}

/// [`rational_samples`] with isolating intervals refined to width `eps0`.
pub fn rational_samples_eps(chi: &Formula, y: &Var, eps0: &Rat) -> Result<Vec<Rat>, RootsError> {
    Ok(samples_from_intervals(&formula_roots_eps(chi, y, eps0)?))
}

/// Sign of `p` at the unique root of a square-free multiple of `p` inside `iv`.
/// Open endpoints of `iv` must not be roots of `p`.
pub fn sign_at_isolated_root(p: &UniPoly, iv: &Interval) -> i8 {
    if iv.is_point() {
        return p.sign_at(&iv.lo);
    }
    let s = square_free_part(p).expect("nonzero polynomial");
    let (a, b) = (s.sign_at(&iv.lo), s.sign_at(&iv.hi));
    if a * b < 0 {
        0
    } else {
        // no root of p between lo and the isolated root
        p.sign_at(&iv.lo)
    }
}

/// Evaluates `chi` at the root isolated by `iv` (a point or an open interval).
pub fn eval_at_root(chi: &Formula, y: &Var, iv: &Interval) -> Result<bool, RootsError> {
    if iv.is_point() {
        let a: Assignment = [(y.clone(), iv.lo.clone())].into_iter().collect();
        return Ok(chi.eval(&a)?);
    }
    chi.eval_with(&mut |at: &Atom| -> Result<bool, RootsError> {
        let s = match atom_unipoly(at, y)? {
            None => sign(&at.poly.constant_value().unwrap_or_default()),
            Some(p) => sign_at_isolated_root(&p, iv),
        };
        Ok(at.rel.holds(s))
    })
}

/// Whether some real `y` satisfies `chi`.
pub fn decide_exists_real(chi: &Formula, y: &Var) -> Result<bool, RootsError> {
    Ok(find_real_witness(chi, y)?.is_some())
}

/// A real witness of `chi`: a rational sample or an isolated root cell.
pub fn find_real_witness(chi: &Formula, y: &Var) -> Result<Option<Interval>, RootsError> {
    let ivs = formula_roots(chi, y)?;
    for s in samples_from_intervals(&ivs) {
        let a: Assignment = [(y.clone(), s.clone())].into_iter().collect();
        if chi.eval(&a)? {
            return Ok(Some(Interval::point(s)));
        }
    }
    for iv in ivs {
        if eval_at_root(chi, y, &iv)? {
            return Ok(Some(iv));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::{cst, var};
    use crate::algebra::rat::{int, rat};
    use crate::formula::Rel;

    fn at(p: crate::algebra::Poly, r: Rel) -> Formula {
        Formula::atom(p, r)
    }

    fn y2() -> crate::algebra::Poly {
        &var("y") * &var("y")
    }

    #[test]
    fn circle_slice_samples() {
        let y = Var::new("y");
        let chi = Formula::and([
            at(&y2() - &cst(rat(13, 20)), Rel::Gt),
            at(&y2() - &cst(rat(3, 4)), Rel::Lt),
        ]);
        let ss = rational_samples(&chi, &y).unwrap();
        assert!(ss.windows(2).all(|w| w[0] < w[1]));
        assert!(ss.iter().any(|s| {
            let sq = s * s;
            sq > rat(13, 20) && sq < rat(3, 4)
        }));
    }

    #[test]
    fn infeasible_and_boundary() {
        let y = Var::new("y");
        let chi = at(&y2() + &cst(int(1)), Rel::Lt);
        let ss = rational_samples(&chi, &y).unwrap();
        assert_eq!(ss, vec![int(0)]);
        let pos = at(var("y"), Rel::Gt);
        assert!(rational_samples(&pos, &y).unwrap().contains(&int(1)));
    }

    #[test]
    fn existence_examples() {
        let y = Var::new("y");
        let ring = Formula::and([
            at(&y2() - &cst(rat(9, 10)), Rel::Gt),
            at(&y2() - &cst(int(1)), Rel::Lt),
        ]);
        assert!(decide_exists_real(&ring, &y).unwrap());
        let zero = Formula::and([
            at(var("y"), Rel::Ge),
            at(var("y"), Rel::Le),
            at(&y2() - &cst(int(2)), Rel::Le),
        ]);
        assert!(decide_exists_real(&zero, &y).unwrap());
        assert!(!decide_exists_real(&at(&y2() + &cst(int(1)), Rel::Le), &y).unwrap());
        // only the irrational point sqrt(2)
        let root2 = Formula::and([at(&y2() - &cst(int(2)), Rel::Ge), at(&y2() - &cst(int(2)), Rel::Le), at(var("y"), Rel::Gt)]);
        let w = find_real_witness(&root2, &y).unwrap().unwrap();
        assert!(!w.is_point());
        assert!(&w.lo * &w.lo < int(2) && &w.hi * &w.hi > int(2) && w.lo > int(0));
    }

    #[test]
    fn zero_atom_rejected() {
        let y = Var::new("y");
        let bad = at(crate::algebra::Poly::zero(), Rel::Lt);
        assert!(matches!(rational_samples(&bad, &y), Err(RootsError::ZeroPolynomial)));
    }
}
