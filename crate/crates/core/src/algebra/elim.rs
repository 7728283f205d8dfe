//! Elimination tools: pseudo-remainders, subresultant resultants, discriminants
//! and multivariate gcd via primitive remainder sequences.

use num_traits::{One, Zero};

use super::poly::{Poly, Var};
use super::rat::Rat;
use super::AlgebraError;

type Coeffs = Vec<Poly>;

fn trim(mut c: Coeffs) -> Coeffs {
    while c.last().map(|p| p.is_zero()).unwrap_or(false) {
        c.pop();
    }
    c
}

fn deg(c: &Coeffs) -> isize {
    c.len() as isize - 1
}

fn lc(c: &Coeffs) -> Poly {
    c.last().cloned().unwrap_or_default()
}

/// `lc(b)^(deg a - deg b + 1) * a mod b`, all coefficients polynomial.
fn prem(a: &Coeffs, b: &Coeffs) -> Coeffs {
    let db = deg(b);
    let mut r = a.clone();
    if deg(&r) < db {
        return r;
    }
    let lb = lc(b);
    let mut steps = deg(a) - db + 1;
    while deg(&r) >= db && !r.is_empty() {
        let lr = lc(&r);
        let shift = (deg(&r) - db) as usize;
        let mut next: Coeffs = r.iter().map(|c| c * &lb).collect();
        for (j, bc) in b.iter().enumerate() {
            next[j + shift] = &next[j + shift] - &(&lr * bc);
        }
        r = trim(next);
        steps -= 1;
    }
    if steps > 0 {
        let f = lb.pow(steps as u32);
        r = r.iter().map(|c| c * &f).collect();
    }
    trim(r)
}

fn div_all(c: &Coeffs, d: &Poly) -> Coeffs {
    c.iter()
        .map(|p| p.div_exact(d).expect("subresultant division is exact"))
        .collect()
}

fn pow_div(num: &Poly, num_exp: u32, den: &Poly, den_exp: u32) -> Poly {
    num.pow(num_exp)
        .div_exact(&den.pow(den_exp))
        .expect("subresultant division is exact")
}

/// Resultant of `p` and `q` with respect to `v`, via the subresultant PRS.
pub fn resultant(p: &Poly, q: &Poly, v: &Var) -> Poly {
    let mut a = trim(p.coeffs_in(v));
    let mut b = trim(q.coeffs_in(v));
    if a.is_empty() || b.is_empty() {
        return Poly::zero();
    }
    let mut s = Rat::one();
    if deg(&a) < deg(&b) {
        if deg(&a) % 2 == 1 && deg(&b) % 2 == 1 {
            s = -s;
        }
        std::mem::swap(&mut a, &mut b);
    }
    if deg(&b) == 0 {
        return lc(&b).pow(deg(&a) as u32).scale(&s);
    }
    let mut g = Poly::one();
    let mut h = Poly::one();
    loop {
        let delta = (deg(&a) - deg(&b)) as u32;
        if deg(&a) % 2 == 1 && deg(&b) % 2 == 1 {
            s = -s;
        }
        let r = prem(&a, &b);
        a = b;
        let denom = &g * &h.pow(delta);
        b = div_all(&r, &denom);
        g = lc(&a);
        h = if delta == 0 {
            h
        } else {
            pow_div(&g, delta, &h, delta - 1)
        };
        if b.is_empty() {
            return Poly::zero();
        }
        if deg(&b) == 0 {
            let da = deg(&a) as u32;
            let hb = if da == 0 { h.clone() } else { pow_div(&lc(&b), da, &h, da - 1) };
            return hb.scale(&s);
        }
    }
}

/// `(-1)^(n(n-1)/2) / lc(p) * res(p, dp/dv)` for `n = deg_v p >= 1`.
pub fn discriminant(p: &Poly, v: &Var) -> Result<Poly, AlgebraError> {
    if p.is_zero() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    let n = p.degree_in(v) as u64;
    if n == 0 {
        return Ok(Poly::zero());
    }
    let r = resultant(p, &p.derivative(v), v);
    let lcp = p.coeffs_in(v).pop().unwrap_or_default();
    let mut d = r.div_exact(&lcp).expect("leading coefficient divides the resultant");
    if (n * (n - 1) / 2) % 2 == 1 {
        d = -d;
    }
    Ok(d)
}

/// Greatest variable (by name) occurring in either polynomial.
fn main_var(p: &Poly, q: &Poly) -> Option<Var> {
    p.vars().into_iter().chain(q.vars()).max()
}

fn content_of(coeffs: &[Poly]) -> Poly {
    coeffs
        .iter()
        .filter(|c| !c.is_zero())
        .fold(Poly::zero(), |acc, c| gcd(&acc, c))
}

/// Multivariate gcd over Q, normalized to a primitive integer polynomial with
/// positive leading coefficient; `gcd(0, 0) = 0`, and coprime inputs give 1.
pub fn gcd(p: &Poly, q: &Poly) -> Poly {
    if p.is_zero() {
        return q.normalize_up_to_constant();
    }
    if q.is_zero() {
        return p.normalize_up_to_constant();
    }
    let v = match main_var(p, q) {
        Some(v) => v,
        None => return Poly::one(),
    };
    let pc = trim(p.coeffs_in(&v));
    let qc = trim(q.coeffs_in(&v));
    let cont_p = content_of(&pc);
    let cont_q = content_of(&qc);
    let cont = gcd(&cont_p, &cont_q);
    let mut a: Coeffs = div_all(&pc, &cont_p);
    let mut b: Coeffs = div_all(&qc, &cont_q);
    if deg(&a) < deg(&b) {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let r = prem(&a, &b);
        a = b;
        if r.is_empty() {
            break;
        }
        let c = content_of(&r);
        b = div_all(&r, &c);
    }
    let g = if deg(&a) <= 0 {
        Poly::one()
    } else {
        let ca = content_of(&a);
        Poly::from_coeffs_in(&v, &div_all(&a, &ca))
    };
    (&g * &cont).normalize_up_to_constant()
}

/// `p / gcd(p, dp/dv)`: removes repeated factors involving `v` (and any factor
/// free of `v`).
pub fn square_free_part_in(p: &Poly, v: &Var) -> Poly {
    if p.is_zero() || !p.contains_var(v) {
        return Poly::one();
    }
    let g = gcd(p, &p.derivative(v));
    p.div_exact(&g).expect("gcd divides").normalize_up_to_constant()
}

/// Polynomial content with respect to `v` (gcd of the coefficients).
pub fn content_in(p: &Poly, v: &Var) -> Poly {
    content_of(&trim(p.coeffs_in(v)))
}

pub fn is_zero_rat(p: &Poly) -> bool {
    p.constant_value().map(|c| c.is_zero()).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::{cst, var};
    use crate::algebra::rat::int;

    #[test]
    fn discriminant_of_parabola() {
        let y = Var::new("y");
        let p = &(&var("y") * &var("y")) - &var("x");
        assert_eq!(discriminant(&p, &y).unwrap(), var("x").scale(&int(4)));
    }

    #[test]
    fn discriminant_quadratic_general() {
        // a y^2 + b y + c has discriminant b^2 - 4ac
        let y = Var::new("y");
        let (a, b, c) = (var("a"), var("b"), var("c"));
        let p = &(&(&a * &(&var("y") * &var("y"))) + &(&b * &var("y"))) + &c;
        let d = discriminant(&p, &y).unwrap();
        assert_eq!(d, &(&b * &b) - &(&a * &c).scale(&int(4)));
    }

    #[test]
    fn resultant_common_root() {
        let y = Var::new("y");
        // (y - x)(y + 1) and (y - 2): resultant vanishes at x = 2
        let p = &(&var("y") - &var("x")) * &(&var("y") + &Poly::one());
        let q = &var("y") - &cst(int(2));
        let r = resultant(&p, &q, &y);
        assert_eq!(r, (&cst(int(2)) - &var("x")).scale(&int(3)));
    }

    #[test]
    fn multivariate_gcd() {
        let x = var("x");
        let y = var("y");
        let f = &(&x + &y) * &(&x - &Poly::one());
        let g = &(&x + &y) * &(&y + &cst(int(2)));
        assert_eq!(gcd(&f, &g), &x + &y);
        assert_eq!(gcd(&x, &y), Poly::one());
        let sq = &(&(&y - &x) * &(&y - &x)) * &(&y + &Poly::one());
        let sf = square_free_part_in(&sq, &Var::new("y"));
        assert_eq!(sf, (&(&y - &x) * &(&y + &Poly::one())).normalize_up_to_constant());
    }
}
