//! Dense univariate polynomials over exact rationals.

use std::fmt;

use num_traits::{One, Signed, Zero};

use super::poly::{Monomial, Poly, Var};
use super::rat::{gcd_of_numerators, lcm_of_denominators, Rat};
use super::AlgebraError;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UniPoly {
    var: Var,
    /// `coeffs[i]` multiplies `var^i`; trailing zeros are trimmed.
    coeffs: Vec<Rat>,
}

impl UniPoly {
    pub fn new(var: Var, mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        UniPoly { var, coeffs }
    }

    pub fn zero(var: Var) -> Self {
        UniPoly::new(var, vec![])
    }

    pub fn constant(var: Var, c: Rat) -> Self {
        UniPoly::new(var, vec![c])
    }

    pub fn from_ints(var: &str, coeffs: &[i64]) -> Self {
        UniPoly::new(Var::new(var), coeffs.iter().map(|c| Rat::from_integer((*c).into())).collect())
    }

    pub fn var(&self) -> &Var {
        &self.var
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lc(&self) -> Rat {
        self.coeffs.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Sign of `p(x)`, computed over the integers as `q^n * L * p(x)` with
    /// `x = p/q` and `L` the common denominator.
    pub fn sign_at(&self, x: &Rat) -> i8 {
        let Some(lead) = self.coeffs.last() else { return 0 };
        let l = lcm_of_denominators(&self.coeffs);
        let int_coeff = |c: &Rat| c.numer() * (&l / c.denom());
        let (num, den) = (x.numer(), x.denom());
        let mut acc = int_coeff(lead);
        let mut qpow = num_bigint::BigInt::one();
        for c in self.coeffs.iter().rev().skip(1) {
            qpow *= den;
            acc = acc * num + int_coeff(c) * &qpow;
        }
        match acc.sign() {
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Plus => 1,
        }
    }

    pub fn to_poly(&self) -> Poly {
        Poly::from_terms(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| (Monomial::var(&self.var, i as u32), c.clone())),
        )
    }

    fn with(&self, coeffs: Vec<Rat>) -> UniPoly {
        UniPoly::new(self.var.clone(), coeffs)
    }

    pub fn add(&self, o: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        self.with((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        self.with((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn neg(&self) -> UniPoly {
        self.with(self.coeffs.iter().map(|c| -c.clone()).collect())
    }

    pub fn scale(&self, c: &Rat) -> UniPoly {
        self.with(self.coeffs.iter().map(|k| k * c).collect())
    }

    pub fn mul(&self, o: &UniPoly) -> UniPoly {
        if self.is_zero() || o.is_zero() {
            return UniPoly::zero(self.var.clone());
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        self.with(out)
    }

    pub fn derivative(&self) -> UniPoly {
        self.with(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rat::from_integer(i.into()))
                .collect(),
        )
    }

    /// Euclidean division over Q.
    pub fn div_rem(&self, d: &UniPoly) -> Result<(UniPoly, UniPoly), AlgebraError> {
        if d.is_zero() {
            return Err(AlgebraError::ZeroPolynomial);
        }
        let mut rem = self.coeffs.clone();
        let dd = d.degree();
        let lc = d.lc();
        if rem.len() < d.coeffs.len() {
            return Ok((UniPoly::zero(self.var.clone()), self.clone()));
        }
        let mut quot = vec![Rat::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lc;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * dc;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        Ok((self.with(quot), self.with(rem)))
    }

    pub fn rem(&self, d: &UniPoly) -> Result<UniPoly, AlgebraError> {
        Ok(self.div_rem(d)?.1)
    }

    pub fn monic(&self) -> UniPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lc().recip())
    }

    /// Scales by a positive rational to integer coefficients with unit content.
    pub fn primitive(&self) -> UniPoly {
        if self.is_zero() {
            return self.clone();
        }
        let l = lcm_of_denominators(self.coeffs.iter());
        let scaled = self.scale(&Rat::from_integer(l));
        let g = gcd_of_numerators(scaled.coeffs.iter());
        scaled.scale(&Rat::new(One::one(), g))
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Cauchy bound `1 + max|c_i|/|c_n|`: every real root lies strictly inside.
    pub fn cauchy_bound(&self) -> Rat {
        let lc = self.lc().abs();
        let m = self.coeffs[..self.coeffs.len().saturating_sub(1)]
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Rat::zero);
        Rat::one() + m / lc
    }

    /// Number of leading zero coefficients, i.e. the multiplicity of 0 as a root.
    pub fn trailing_zeros(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    pub fn shift_down(&self, k: usize) -> UniPoly {
        self.with(self.coeffs[k.min(self.coeffs.len())..].to_vec())
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_poly())
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UniPoly({})", self.to_poly())
    }
}

/// Returns `(q, m)` with `q = m * p`, `q` integral and primitive, and `m > 0`.
pub fn clear_denominators(p: &UniPoly) -> Result<(UniPoly, Rat), AlgebraError> {
    if p.is_zero() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    let q = p.primitive();
    let m = q.lc() / p.lc();
    Ok((q, m))
}

/// Monic gcd over Q; gcd(0, 0) is the zero polynomial.
pub fn gcd_uni(a: &UniPoly, b: &UniPoly) -> UniPoly {
    let mut x = a.clone();
    let mut y = b.clone();
    while !y.is_zero() {
        let r = x.rem(&y).expect("nonzero divisor");
        x = y;
        y = r.primitive();
    }
    x.monic()
}

/// `p / gcd(p, p')`, scaled to a primitive integer polynomial with the sign of `p`.
pub fn square_free_part(p: &UniPoly) -> Result<UniPoly, AlgebraError> {
    if p.is_zero() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    if p.is_constant() {
        return Ok(p.primitive());
    }
    let g = gcd_uni(p, &p.derivative());
    let (q, r) = p.div_rem(&g)?;
    debug_assert!(r.is_zero());
    let q = q.primitive();
    Ok(if q.lc().is_negative() != p.lc().is_negative() { q.neg() } else { q })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat::{int, rat};

    fn y(c: &[i64]) -> UniPoly {
        UniPoly::from_ints("y", c)
    }

    #[test]
    fn clear_denominators_examples() {
        // y^2 - 9/10
        let p = UniPoly::new(Var::new("y"), vec![rat(-9, 10), int(0), int(1)]);
        let (q, m) = clear_denominators(&p).unwrap();
        assert_eq!(q, y(&[-9, 0, 10]));
        assert_eq!(m, int(10));
        // 2y + 4
        let (q, m) = clear_denominators(&y(&[4, 2])).unwrap();
        assert_eq!(q, y(&[2, 1]));
        assert_eq!(m, rat(1, 2));
        // y^2/4 + y/6
        let p = UniPoly::new(Var::new("y"), vec![int(0), rat(1, 6), rat(1, 4)]);
        let (q, m) = clear_denominators(&p).unwrap();
        assert_eq!(q, y(&[0, 2, 3]));
        assert_eq!(m, int(12));
        assert_eq!(p.scale(&m), q);
        assert!(matches!(
            clear_denominators(&UniPoly::zero(Var::new("y"))),
            Err(AlgebraError::ZeroPolynomial)
        ));
    }

    #[test]
    fn negative_leading_sign_kept() {
        let (q, m) = clear_denominators(&y(&[3, -6])).unwrap();
        assert_eq!(q, y(&[1, -2]));
        assert_eq!(m, rat(1, 3));
    }

    #[test]
    fn gcd_and_square_free() {
        assert_eq!(gcd_uni(&y(&[-1, 0, 1]), &y(&[-1, 1])), y(&[-1, 1]));
        // (y-1)^2 (y+2) = y^3 - 3y + 2
        let p = y(&[2, -3, 0, 1]);
        let s = square_free_part(&p).unwrap();
        // (y-1)(y+2) = y^2 + y - 2
        assert_eq!(s, y(&[-2, 1, 1]));
        let (_, r) = p.div_rem(&s).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn division_identity() {
        let a = y(&[5, -3, 0, 2, 7]);
        let b = y(&[1, 0, 3]);
        let (q, r) = a.div_rem(&b).unwrap();
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree() < b.degree());
    }
}
