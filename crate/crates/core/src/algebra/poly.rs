//! Sparse multivariate polynomials over exact rationals.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rat::{format_rat, parse_rat, pow_rat, Rat};
use super::unipoly::UniPoly;
use super::AlgebraError;

/// Largest exponent a monomial may carry.
pub const MAX_EXPONENT: u64 = (1 << 31) - 1;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: &str) -> Self {
        Var(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var::new(s)
    }
}

/// Variable assignment used for evaluation and substitution.
pub type Assignment = BTreeMap<Var, Rat>;

/// Power product with variables sorted by name and no zero exponents.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: &Var, exp: u32) -> Self {
        if exp == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(v.clone(), exp)])
        }
    }

    /// Builds a monomial from arbitrary (variable, exponent) pairs, merging repeats.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, u32)>) -> Result<Self, AlgebraError> {
        let mut map: BTreeMap<Var, u64> = BTreeMap::new();
        for (v, e) in pairs {
            *map.entry(v).or_insert(0) += e as u64;
        }
        let mut out = Vec::with_capacity(map.len());
        for (v, e) in map {
            if e > MAX_EXPONENT {
                return Err(AlgebraError::DegreeOverflow);
            }
            if e > 0 {
                out.push((v, e as u32));
            }
        }
        Ok(Monomial(out))
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|(_, e)| *e as u64).sum()
    }

    pub fn exponent(&self, v: &Var) -> u32 {
        self.0
            .iter()
            .find(|(w, _)| w == v)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.0.iter().map(|(v, _)| v)
    }

    pub fn try_mul(&self, other: &Monomial) -> Result<Monomial, AlgebraError> {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            let ord = match (self.0.get(i), other.0.get(j)) {
                (Some(a), Some(b)) => a.0.cmp(&b.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            match ord {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let e = self.0[i].1 as u64 + other.0[j].1 as u64;
                    if e > MAX_EXPONENT {
                        return Err(AlgebraError::DegreeOverflow);
                    }
                    out.push((self.0[i].0.clone(), e as u32));
                    i += 1;
                    j += 1;
                }
            }
        }
        Ok(Monomial(out))
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::new();
        let mut j = 0;
        for (v, e) in &self.0 {
            let mut sub = 0;
            if let Some((w, f)) = other.0.get(j) {
                if w == v {
                    sub = *f;
                    j += 1;
                } else if w < v {
                    return None;
                }
            }
            if sub > *e {
                return None;
            }
            if e - sub > 0 {
                out.push((v.clone(), e - sub));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Removes variable `v`, returning its exponent.
    pub fn without(&self, v: &Var) -> (Monomial, u32) {
        let mut e = 0;
        let rest = self
            .0
            .iter()
            .filter(|(w, f)| {
                if w == v {
                    e = *f;
                    false
                } else {
                    true
                }
            })
            .cloned()
            .collect();
        (Monomial(rest), e)
    }

    pub fn eval(&self, a: &Assignment) -> Result<Rat, AlgebraError> {
        let mut acc = Rat::one();
        for (v, e) in &self.0 {
            let val = a
                .get(v)
                .ok_or_else(|| AlgebraError::UnassignedVariable(v.name().to_string()))?;
            acc *= pow_rat(val, *e);
        }
        Ok(acc)
    }
}

/// Graded lexicographic order: total degree first, then lexicographic on the
/// exponent vectors with variables ranked by name.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            match a.0.cmp(&b.0) {
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => match a.1.cmp(&b.1) {
                    Ordering::Equal => {}
                    o => return o,
                },
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(v, e)| if *e == 1 { v.to_string() } else { format!("{v}^{e}") })
            .collect();
        f.write_str(&parts.join("*"))
    }
}

/// Sparse polynomial: monomial to nonzero coefficient, iterated in graded-lex order.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn var(v: &Var) -> Self {
        Poly::monomial(Monomial::var(v, 1), Rat::one())
    }

    pub fn monomial(m: Monomial, c: Rat) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rat)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn constant_value(&self) -> Option<Rat> {
        if self.is_constant() {
            Some(self.terms.values().next().cloned().unwrap_or_else(Rat::zero))
        } else {
            None
        }
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Rat)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> u64 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.vars().cloned()).collect()
    }

    pub fn contains_var(&self, v: &Var) -> bool {
        self.terms.keys().any(|m| m.exponent(v) > 0)
    }

    pub fn degree_in(&self, v: &Var) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly, AlgebraError> {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.try_mul(mb)?, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn try_pow(&self, exp: u32) -> Result<Poly, AlgebraError> {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = result.try_mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.try_mul(&base)?;
            }
        }
        Ok(result)
    }

    pub fn pow(&self, exp: u32) -> Poly {
        self.try_pow(exp).expect("polynomial degree overflow")
    }

    pub fn eval(&self, a: &Assignment) -> Result<Rat, AlgebraError> {
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            acc += c * m.eval(a)?;
        }
        Ok(acc)
    }

    /// Substitutes rational values for a subset of the variables.
    pub fn substitute(&self, bindings: &Assignment) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut coef = c.clone();
            let mut rest = Vec::new();
            for (v, e) in m.factors() {
                match bindings.get(v) {
                    Some(val) => coef *= pow_rat(val, *e),
                    None => rest.push((v.clone(), *e)),
                }
            }
            out.add_term(Monomial(rest), coef);
        }
        out
    }

    /// Replaces variable `v` by the polynomial `q`.
    pub fn compose(&self, v: &Var, q: &Poly) -> Poly {
        let coeffs = self.coeffs_in(v);
        let mut out = Poly::zero();
        for c in coeffs.into_iter().rev() {
            out = &(&out * q) + &c;
        }
        out
    }

    /// Renames variables according to `map` (unmapped names are kept).
    pub fn rename(&self, map: &BTreeMap<Var, Var>) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(m, c)| {
            let pairs = m
                .factors()
                .iter()
                .map(|(v, e)| (map.get(v).cloned().unwrap_or_else(|| v.clone()), *e));
            (Monomial::from_pairs(pairs).expect("rename keeps degrees"), c.clone())
        }))
    }

    /// Coefficients with respect to `v`: `self = sum_i coeffs[i] * v^i`.
    pub fn coeffs_in(&self, v: &Var) -> Vec<Poly> {
        let deg = self.degree_in(v) as usize;
        let mut out = vec![Poly::zero(); deg + 1];
        if self.is_zero() {
            return vec![];
        }
        for (m, c) in &self.terms {
            let (rest, e) = m.without(v);
            out[e as usize].add_term(rest, c.clone());
        }
        out
    }

    pub fn from_coeffs_in(v: &Var, coeffs: &[Poly]) -> Poly {
        let mut out = Poly::zero();
        for (i, c) in coeffs.iter().enumerate() {
            let vm = Monomial::var(v, i as u32);
            for (m, k) in &c.terms {
                out.add_term(m.try_mul(&vm).expect("degree within bounds"), k.clone());
            }
        }
        out
    }

    pub fn derivative(&self, v: &Var) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e == 0 {
                continue;
            }
            let (rest, _) = m.without(v);
            let nm = rest.try_mul(&Monomial::var(v, e - 1)).expect("lower degree");
            out.add_term(nm, c * Rat::from_integer(e.into()));
        }
        out
    }

    /// Views the polynomial as univariate in `v`; fails if other variables occur.
    pub fn to_unipoly(&self, v: &Var) -> Option<UniPoly> {
        let mut coeffs = vec![Rat::zero(); self.degree_in(v) as usize + 1];
        for (m, c) in &self.terms {
            let (rest, e) = m.without(v);
            if !rest.is_one() {
                return None;
            }
            coeffs[e as usize] = c.clone();
        }
        Some(UniPoly::new(v.clone(), coeffs))
    }

    /// Exact division; `None` when `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        if divisor.is_zero() {
            return None;
        }
        if let Some(c) = divisor.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        let (lm, lc) = divisor.leading_term().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((m, c)) = rem.leading_term().map(|(m, c)| (m.clone(), c.clone())) {
            let qm = m.div(&lm)?;
            let qc = &c / &lc;
            let t = Poly::monomial(qm, qc);
            rem = &rem - &(&t * divisor);
            quot = &quot + &t;
        }
        Some(quot)
    }

    /// Scales by a positive rational to integer coefficients with unit content.
    pub fn primitive_integer(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let l = super::rat::lcm_of_denominators(self.terms.values());
        let scaled: Vec<Rat> = self
            .terms
            .values()
            .map(|c| c * Rat::from_integer(l.clone()))
            .collect();
        let g = super::rat::gcd_of_numerators(scaled.iter());
        self.scale(&Rat::new(l, g))
    }

    /// Canonical representative up to a nonzero constant factor: primitive,
    /// integral, positive leading coefficient.
    pub fn normalize_up_to_constant(&self) -> Poly {
        let p = self.primitive_integer();
        if p.leading_term().map(|(_, c)| c.is_negative()).unwrap_or(false) {
            -p
        } else {
            p
        }
    }

    /// Canonical representative up to a positive constant factor.
    pub fn normalize_positive(&self) -> Poly {
        self.primitive_integer()
    }
}

/// Total order: compares term lists leading term first.
impl Ord for Poly {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.terms.iter().rev().cmp(other.terms.iter().rev())
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// Panics on exponent overflow past [`MAX_EXPONENT`]; use [`Poly::try_mul`] to handle it.
impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.try_mul(rhs).expect("polynomial degree overflow")
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl From<Rat> for Poly {
    fn from(c: Rat) -> Self {
        Poly::constant(c)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if m.is_one() {
                write!(f, "{}", format_rat(&abs))?;
            } else if abs.is_one() {
                write!(f, "{m:?}")?;
            } else {
                write!(f, "{}*{m:?}", format_rat(&abs))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    vars: BTreeMap<String, u32>,
    coeff: String,
}

/// Serialized as an ordered term list, leading term first:
/// `[{"vars":{"x":2},"coeff":"1"}, ...]`.
impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let terms: Vec<TermRepr> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| TermRepr {
                vars: m
                    .factors()
                    .iter()
                    .map(|(v, e)| (v.name().to_string(), *e))
                    .collect(),
                coeff: format_rat(c),
            })
            .collect();
        terms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let terms = Vec::<TermRepr>::deserialize(d)?;
        let mut p = Poly::zero();
        for t in terms {
            let c = parse_rat(&t.coeff).map_err(serde::de::Error::custom)?;
            let m = Monomial::from_pairs(t.vars.iter().map(|(v, e)| (Var::new(v), *e)))
                .map_err(serde::de::Error::custom)?;
            p.add_term(m, c);
        }
        Ok(p)
    }
}

/// Convenience constructors for tests and generators.
pub fn var(name: &str) -> Poly {
    Poly::var(&Var::new(name))
}

pub fn cst(c: Rat) -> Poly {
    Poly::constant(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat::{int, rat};

    fn assign(pairs: &[(&str, Rat)]) -> Assignment {
        pairs.iter().map(|(k, v)| (Var::new(k), v.clone())).collect()
    }

    #[test]
    fn grlex_order() {
        let x = Var::new("x");
        let y = Var::new("y");
        let x2 = Monomial::var(&x, 2);
        let xy = Monomial::from_pairs([(x.clone(), 1), (y.clone(), 1)]).unwrap();
        let y2 = Monomial::var(&y, 2);
        let x1 = Monomial::var(&x, 1);
        assert!(x2 > xy && xy > y2 && y2 > x1 && x1 > Monomial::one());
    }

    #[test]
    fn eval_basic() {
        let x = var("x");
        let y = var("y");
        let p = &(&x * &x) + &(&y * &y);
        let a = assign(&[("x", rat(3, 5)), ("y", rat(4, 5))]);
        assert_eq!(p.eval(&a).unwrap(), int(1));
        assert_eq!(Poly::zero().eval(&a).unwrap(), int(0));
        assert!(matches!(
            p.eval(&assign(&[("x", int(1))])),
            Err(AlgebraError::UnassignedVariable(_))
        ));
    }

    #[test]
    fn substitute_examples() {
        let x = var("x");
        let y = var("y");
        let z = var("z");
        let p = &(&x * &x) + &(&y * &y);
        let s = p.substitute(&assign(&[("x", int(1))]));
        assert_eq!(s, &(&y * &y) + &Poly::one());
        let xy = &x * &y;
        assert!(xy.substitute(&assign(&[("x", int(0))])).is_zero());
        let ell = &(&(&(&x * &x) + &(&y * &y).scale(&rat(1, 9))) + &(&z * &z).scale(&rat(1, 16)))
            - &Poly::one();
        let s = ell.substitute(&assign(&[("z", int(-3))]));
        let expect = &(&(&x * &x) + &(&y * &y).scale(&rat(1, 9))) - &cst(rat(7, 16));
        assert_eq!(s, expect);
    }

    #[test]
    fn exact_division() {
        let x = var("x");
        let y = var("y");
        let a = &x + &y;
        let b = &x - &y;
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&a).unwrap(), b);
        assert!(prod.div_exact(&(&x + &Poly::one())).is_none());
    }

    #[test]
    fn degree_overflow() {
        let x = Var::new("x");
        let m = Monomial::var(&x, (MAX_EXPONENT) as u32);
        assert!(matches!(m.try_mul(&Monomial::var(&x, 1)), Err(AlgebraError::DegreeOverflow)));
    }

    #[test]
    fn json_term_list() {
        let p = &(&var("x") * &var("x")) - &Poly::one();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"[{"vars":{"x":2},"coeff":"1"},{"vars":{},"coeff":"-1"}]"#);
        let back: Poly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
