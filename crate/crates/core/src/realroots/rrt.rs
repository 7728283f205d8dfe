use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::algebra::{clear_denominators, Rat, UniPoly};

use super::RootsError;

pub const DEFAULT_DIVISOR_BUDGET: u64 = 1 << 22;

/// Prime factorization by trial division, spending at most `*steps` trial divisions.
fn factor(n: &BigInt, steps: &mut u64) -> Result<Vec<(BigInt, u32)>, RootsError> {
    let mut n = n.abs();
    let mut out = Vec::new();
    if n.is_zero() {
        return Ok(out);
    }
    let mut d = BigInt::from(2);
    while &d * &d <= n {
        if *steps == 0 {
            return Err(RootsError::DivisorBudgetExceeded);
        }
        *steps -= 1;
        let mut e = 0;
        loop {
            let (q, r) = n.div_rem(&d);
            if !r.is_zero() {
                break;
            }
            n = q;
            e += 1;
        }
        if e > 0 {
            out.push((d.clone(), e));
        }
        d += if d == BigInt::from(2) { 1 } else { 2 };
    }
    if n > BigInt::one() {
        out.push((n, 1));
    }
    Ok(out)
}

/// All positive divisors of `n != 0`, ascending.
pub fn divisors(n: &BigInt, steps: &mut u64) -> Result<Vec<BigInt>, RootsError> {
    let mut ds = vec![BigInt::one()];
    for (p, e) in factor(n, steps)? {
        let mut next = Vec::with_capacity(ds.len() * (e as usize + 1));
        for d in &ds {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        ds = next;
    }
    ds.sort();
    Ok(ds)
}

/// Finite superset of the rational roots of `p`, ascending.
pub fn cand_rat_roots(p: &UniPoly, budget: u64) -> Result<Vec<Rat>, RootsError> {
    if p.is_zero() {
        return Err(RootsError::ZeroPolynomial);
    }
    let (q, _) = clear_denominators(p)?;
    let k = q.trailing_zeros();
    let q = q.shift_down(k);
    let mut out = BTreeSet::new();
    if k > 0 {
        out.insert(Rat::zero());
    }
    if !q.is_constant() {
        let mut steps = budget;
        let us = divisors(q.coeff(0).numer(), &mut steps)?;
        let vs = divisors(q.lc().numer(), &mut steps)?;
        for u in &us {
            for v in &vs {
                let r = Rat::new(u.clone(), v.clone());
                out.insert(-r.clone());
                out.insert(r);
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// Rational roots of `p`, ascending.
pub fn rational_roots(p: &UniPoly, budget: u64) -> Result<Vec<Rat>, RootsError> {
    Ok(cand_rat_roots(p, budget)?
        .into_iter()
        .filter(|c| p.sign_at(c) == 0)
        .collect())
}
