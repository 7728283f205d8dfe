use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::algebra::rat::sign;
use crate::algebra::{Assignment, Poly, Rat, Var};

use super::ast::{Atom, Rel};
use super::FormulaError;

/// Witness variables introduced for one atom `q rel' 0` rewritten with `q >= 0` / `q > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedAtom {
    pub atom_index: usize,
    /// The atom rewritten so that the relation is against `0` from above.
    pub q: Poly,
    pub squares: Option<[Var; 4]>,
    pub reciprocal: Option<Var>,
}

/// `clause <=> exists fresh_vars. equation = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionResult {
    pub equation: Poly,
    pub fresh_vars: Vec<Var>,
    pub origin: BTreeMap<Var, usize>,
    pub parts: Vec<ReducedAtom>,
}

struct Fresh {
    used: BTreeSet<String>,
}

impl Fresh {
    fn make(&mut self, base: String) -> Var {
        let mut name = base;
        while self.used.contains(&name) {
            name.push('_');
        }
        self.used.insert(name.clone());
        Var::new(&name)
    }
}

fn sum_of_squares(vs: &[Var; 4]) -> Poly {
    vs.iter().fold(Poly::zero(), |acc, v| {
        let p = Poly::var(v);
        &acc + &(&p * &p)
    })
}

/// Reduces a conjunction to a single polynomial equation over the original
/// variables plus fresh witnesses.
pub fn htp_reduce(clause: &[Atom]) -> ReductionResult {
    let mut fresh = Fresh {
        used: clause
            .iter()
            .flat_map(|a| a.poly.vars())
            .map(|v| v.name().to_string())
            .collect(),
    };
    let mut equation = Poly::zero();
    let mut fresh_vars = Vec::new();
    let mut origin = BTreeMap::new();
    let mut parts = Vec::new();
    let add_eq = |e: Poly, eq: &mut Poly| *eq = &*eq + &(&e * &e);

    for (i, a) in clause.iter().enumerate() {
        let q = match a.rel {
            Rel::Gt | Rel::Ge | Rel::Eq | Rel::Ne => a.poly.clone(),
            Rel::Lt | Rel::Le => -a.poly.clone(),
        };
        let needs_squares = !matches!(a.rel, Rel::Eq | Rel::Ne);
        let needs_recip = a.rel.is_strict();
        let squares = needs_squares.then(|| {
            let vs: [Var; 4] = std::array::from_fn(|k| fresh.make(format!("zs{i}_{}", k + 1)));
            vs
        });
        let reciprocal = needs_recip.then(|| fresh.make(format!("zr{i}")));
        match &squares {
            Some(vs) => {
                add_eq(&q - &sum_of_squares(vs), &mut equation);
                for v in vs {
                    fresh_vars.push(v.clone());
                    origin.insert(v.clone(), i);
                }
            }
            None if a.rel == Rel::Eq => add_eq(q.clone(), &mut equation),
            None => {}
        }
        if let Some(z) = &reciprocal {
            add_eq(&(&q * &Poly::var(z)) - &Poly::one(), &mut equation);
            fresh_vars.push(z.clone());
            origin.insert(z.clone(), i);
        }
        parts.push(ReducedAtom { atom_index: i, q, squares, reciprocal });
    }
    ReductionResult { equation, fresh_vars, origin, parts }
}

/// Extends a rational clause witness to a rational root of the reduced equation.
pub fn lift_witness(
    r: &ReductionResult,
    witness: &Assignment,
    search_bound: u64,
) -> Result<Assignment, FormulaError> {
    let mut out = witness.clone();
    for part in &r.parts {
        let v = part.q.eval(witness)?;
        if let Some(vs) = &part.squares {
            let zs = four_square_decompose(&v, search_bound)?;
            for (var, z) in vs.iter().zip(zs) {
                out.insert(var.clone(), z);
            }
        }
        if let Some(z) = &part.reciprocal {
            if v.is_zero() {
                return Err(FormulaError::NotAWitness);
            }
            out.insert(z.clone(), v.recip());
        }
    }
    Ok(out)
}

/// Writes `q = a/b` as a sum of four rational squares by decomposing the
/// integer `a*b` and dividing by `b`.
pub fn four_square_decompose(q: &Rat, search_bound: u64) -> Result<[Rat; 4], FormulaError> {
    if q.is_negative() {
        return Err(FormulaError::NegativeInput);
    }
    let b = q.denom().clone();
    let n = q.numer() * &b;
    let mut steps: u64 = 0;
    let budget = search_bound.saturating_mul(search_bound).max(1 << 16);
    let ws = search(&n, 4, &n.sqrt(), BigInt::from(search_bound), &mut steps, budget)
        .ok_or(FormulaError::NotFoundWithinBound)?;
    let den = Rat::from_integer(b);
    let mut out: [Rat; 4] = Default::default();
    for (k, w) in ws.into_iter().enumerate() {
        out[k] = Rat::from_integer(w) / &den;
    }
    Ok(out)
}

/// Descending search for `k` squares with nonincreasing entries `<= cap` summing to `n`.
fn search(n: &BigInt, k: usize, cap: &BigInt, bound: BigInt, steps: &mut u64, budget: u64) -> Option<Vec<BigInt>> {
    if n.is_zero() {
        return Some(vec![BigInt::zero(); k]);
    }
    if k == 0 {
        return None;
    }
    let root = n.sqrt();
    if k == 1 {
        *steps += 1;
        return (&root * &root == *n && root <= *cap && root <= bound).then(|| vec![root]);
    }
    let mut w = root.min(cap.clone()).min(bound.clone());
    // the largest of k squares summing to n is at least sqrt(n/k)
    let floor = (n / BigInt::from(k)).sqrt();
    while w >= floor && w >= BigInt::one() {
        *steps += 1;
        if *steps > budget {
            return None;
        }
        let rest = n - &w * &w;
        if let Some(mut tail) = search(&rest, k - 1, &w, bound.clone(), steps, budget) {
            tail.insert(0, w);
            return Some(tail);
        }
        w -= 1;
    }
    None
}

/// True when every atom of the clause holds at `a`.
pub fn clause_holds(clause: &[Atom], a: &Assignment) -> Result<bool, FormulaError> {
    for at in clause {
        if !at.rel.holds(sign(&at.poly.eval(a)?)) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::{cst, var};
    use crate::algebra::rat::{int, rat};

    fn check_sum(q: &Rat, zs: &[Rat; 4]) {
        let s: Rat = zs.iter().map(|z| z * z).sum();
        assert_eq!(&s, q);
    }

    #[test]
    fn four_squares() {
        assert_eq!(four_square_decompose(&int(0), 3).unwrap(), [int(0), int(0), int(0), int(0)]);
        assert_eq!(four_square_decompose(&int(7), 3).unwrap(), [int(2), int(1), int(1), int(1)]);
        assert_eq!(
            four_square_decompose(&rat(3, 2), 3).unwrap(),
            [int(1), rat(1, 2), rat(1, 2), int(0)]
        );
        assert!(matches!(four_square_decompose(&int(-1), 3), Err(FormulaError::NegativeInput)));
        assert!(matches!(four_square_decompose(&int(100), 2), Err(FormulaError::NotFoundWithinBound)));
        for q in [rat(1234, 567), rat(1, 3), int(15), int(23), rat(-127, -128)] {
            check_sum(&q, &four_square_decompose(&q, 1 << 20).unwrap());
        }
    }

    #[test]
    fn reduce_strict_positive() {
        let clause = vec![Atom::new(var("x"), Rel::Gt)];
        let r = htp_reduce(&clause);
        assert_eq!(r.fresh_vars.len(), 5);
        let zs: Vec<Poly> = r.fresh_vars[..4].iter().map(Poly::var).collect();
        let sq = zs.iter().fold(Poly::zero(), |a, z| &a + &(z * z));
        let e1 = &var("x") - &sq;
        let e2 = &(&var("x") * &Poly::var(&r.fresh_vars[4])) - &Poly::one();
        assert_eq!(r.equation, &(&e1 * &e1) + &(&e2 * &e2));
        assert!(r.origin.values().all(|&i| i == 0));

        let w: Assignment = [(Var::new("x"), rat(7, 3))].into_iter().collect();
        let lifted = lift_witness(&r, &w, 1 << 16).unwrap();
        assert!(r.equation.eval(&lifted).unwrap().is_zero());
    }

    #[test]
    fn reduce_two_nonstrict_and_empty() {
        let clause = vec![
            Atom::new(&var("x") - &cst(int(1)), Rel::Le),
            Atom::new(var("y"), Rel::Le),
        ];
        let r = htp_reduce(&clause);
        assert_eq!(r.fresh_vars.len(), 8);
        let w: Assignment = [(Var::new("x"), int(-4)), (Var::new("y"), rat(-5, 2))].into_iter().collect();
        let lifted = lift_witness(&r, &w, 1 << 16).unwrap();
        assert!(r.equation.eval(&lifted).unwrap().is_zero());

        let e = htp_reduce(&[]);
        assert!(e.equation.is_zero());
        assert!(e.fresh_vars.is_empty());
    }

    #[test]
    fn fresh_names_avoid_clause_vars() {
        let clause = vec![Atom::new(var("zr0"), Rel::Gt)];
        let r = htp_reduce(&clause);
        assert!(!r.fresh_vars.contains(&Var::new("zr0")));
    }
}
