//! Interval constraint propagation over variables and monomials, used as a
//! sound unsatisfiability certificate for conjunctions.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::algebra::{Monomial, Poly, Rat, Var};
use crate::formula::{Atom, Rel};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Refutation {
    Refuted,
    Unknown,
}

pub const MAX_ROUNDS: usize = 64;

/// One endpoint; `None` is infinite.
#[derive(Clone, Debug, PartialEq, Eq)]
struct End {
    v: Option<Rat>,
    open: bool,
}

impl End {
    fn inf() -> End {
        End { v: None, open: true }
    }
    fn at(v: Rat, open: bool) -> End {
        End { v: Some(v), open }
    }
}

/// Real interval with optional infinite ends.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Iv {
    lo: End,
    hi: End,
}

impl Iv {
    pub fn full() -> Iv {
        Iv { lo: End::inf(), hi: End::inf() }
    }

    fn nonneg() -> Iv {
        Iv { lo: End::at(Rat::zero(), false), hi: End::inf() }
    }

    fn point(r: Rat) -> Iv {
        Iv { lo: End::at(r.clone(), false), hi: End::at(r, false) }
    }

    pub fn is_empty(&self) -> bool {
        match (&self.lo.v, &self.hi.v) {
            (Some(l), Some(h)) => l > h || (l == h && (self.lo.open || self.hi.open)),
            _ => false,
        }
    }

    /// Target set of `p rel 0`.
    fn of_rel(rel: Rel) -> Iv {
        let z = || Rat::zero();
        match rel {
            Rel::Lt => Iv { lo: End::inf(), hi: End::at(z(), true) },
            Rel::Le => Iv { lo: End::inf(), hi: End::at(z(), false) },
            Rel::Gt => Iv { lo: End::at(z(), true), hi: End::inf() },
            Rel::Ge => Iv { lo: End::at(z(), false), hi: End::inf() },
            Rel::Eq => Iv::point(z()),
            Rel::Ne => Iv::full(),
        }
    }

    fn meet(&self, o: &Iv) -> Iv {
        let lo = match (&self.lo.v, &o.lo.v) {
            (None, _) => o.lo.clone(),
            (_, None) => self.lo.clone(),
            (Some(a), Some(b)) => {
                if a > b {
                    self.lo.clone()
                } else if b > a {
                    o.lo.clone()
                } else {
                    End::at(a.clone(), self.lo.open || o.lo.open)
                }
            }
        };
        let hi = match (&self.hi.v, &o.hi.v) {
            (None, _) => o.hi.clone(),
            (_, None) => self.hi.clone(),
            (Some(a), Some(b)) => {
                if a < b {
                    self.hi.clone()
                } else if b < a {
                    o.hi.clone()
                } else {
                    End::at(a.clone(), self.hi.open || o.hi.open)
                }
            }
        };
        Iv { lo, hi }
    }

    fn add(&self, o: &Iv) -> Iv {
        let f = |a: &End, b: &End| match (&a.v, &b.v) {
            (Some(x), Some(y)) => End::at(x + y, a.open || b.open),
            _ => End::inf(),
        };
        Iv { lo: f(&self.lo, &o.lo), hi: f(&self.hi, &o.hi) }
    }

    fn neg(&self) -> Iv {
        let f = |e: &End| End { v: e.v.as_ref().map(|x| -x.clone()), open: e.open };
        Iv { lo: f(&self.hi), hi: f(&self.lo) }
    }

    fn scale(&self, c: &Rat) -> Iv {
        if c.is_zero() {
            return Iv::point(Rat::zero());
        }
        let f = |e: &End| End { v: e.v.as_ref().map(|x| x * c), open: e.open };
        if c.is_positive() {
            Iv { lo: f(&self.lo), hi: f(&self.hi) }
        } else {
            Iv { lo: f(&self.hi), hi: f(&self.lo) }
        }
    }

    fn mul(&self, o: &Iv) -> Iv {
        if self.is_empty() || o.is_empty() {
            return self.clone();
        }
        // extended value: Some(r) finite, None with sign for infinities
        #[derive(Clone)]
        struct X {
            v: Option<Rat>,
            s: i8,
            open: bool,
        }
        let ends = |iv: &Iv| {
            [
                X { v: iv.lo.v.clone(), s: -1, open: iv.lo.open },
                X { v: iv.hi.v.clone(), s: 1, open: iv.hi.open },
            ]
        };
        let prod = |a: &X, b: &X| -> X {
            match (&a.v, &b.v) {
                (Some(x), Some(y)) => {
                    let closed_zero = (x.is_zero() && !a.open) || (y.is_zero() && !b.open);
                    X { v: Some(x * y), s: 0, open: !closed_zero && (a.open || b.open) }
                }
                (Some(x), None) | (None, Some(x)) => {
                    let (fin, inf) = if a.v.is_some() { (a, b) } else { (b, a) };
                    if x.is_zero() {
                        X { v: Some(Rat::zero()), s: 0, open: fin.open }
                    } else {
                        let s = if x.is_positive() { inf.s } else { -inf.s };
                        X { v: None, s, open: true }
                    }
                }
                (None, None) => X { v: None, s: a.s * b.s, open: true },
            }
        };
        let mut cands = Vec::new();
        for a in ends(self) {
            for b in ends(o) {
                cands.push(prod(&a, &b));
            }
        }
        let key = |x: &X| -> (i8, Option<Rat>) { (x.s, x.v.clone()) };
        let lt = |a: &X, b: &X| -> bool {
            match (&a.v, &b.v) {
                (Some(x), Some(y)) => x < y,
                (None, Some(_)) => a.s < 0,
                (Some(_), None) => b.s > 0,
                (None, None) => a.s < b.s,
            }
        };
        let mut lo = cands[0].clone();
        let mut hi = cands[0].clone();
        for c in &cands[1..] {
            if lt(c, &lo) {
                lo = c.clone();
            } else if key(c) == key(&lo) {
                lo.open &= c.open;
            }
            if lt(&hi, c) {
                hi = c.clone();
            } else if key(c) == key(&hi) {
                hi.open &= c.open;
            }
        }
        let to_end = |x: &X| match &x.v {
            Some(v) => End::at(v.clone(), x.open),
            None => End::inf(),
        };
        Iv { lo: to_end(&lo), hi: to_end(&hi) }
    }

    fn pow(&self, k: u32) -> Iv {
        if k == 0 {
            return Iv::point(Rat::one());
        }
        if k % 2 == 1 {
            let f = |e: &End| End { v: e.v.as_ref().map(|x| num_traits::pow(x.clone(), k as usize)), open: e.open };
            return Iv { lo: f(&self.lo), hi: f(&self.hi) };
        }
        let abs_end = |e: &End| End { v: e.v.as_ref().map(|x| num_traits::pow(x.abs(), k as usize)), open: e.open };
        let lo_nonneg = self.lo.v.as_ref().map(|l| !l.is_negative()).unwrap_or(false);
        let hi_nonpos = self.hi.v.as_ref().map(|h| !h.is_positive()).unwrap_or(false);
        if lo_nonneg {
            Iv { lo: abs_end(&self.lo), hi: abs_end(&self.hi) }
        } else if hi_nonpos {
            Iv { lo: abs_end(&self.hi), hi: abs_end(&self.lo) }
        } else {
            let (a, b) = (abs_end(&self.lo), abs_end(&self.hi));
            let hi = match (&a.v, &b.v) {
                (Some(x), Some(y)) => {
                    if x > y {
                        a.clone()
                    } else if y > x {
                        b.clone()
                    } else {
                        End::at(x.clone(), a.open && b.open)
                    }
                }
                _ => End::inf(),
            };
            Iv { lo: End::at(Rat::zero(), false), hi }
        }
    }
}

/// Outward rational bounds `(below, above, exact)` on the `k`-th root of `r >= 0`.
fn root_bounds(r: &Rat, k: u32) -> (Rat, Rat, bool) {
    let exact = |n: &BigInt| {
        let s = n.nth_root(k);
        (num_traits::pow(s.clone(), k as usize) == *n).then_some(s)
    };
    if let (Some(a), Some(b)) = (exact(r.numer()), exact(r.denom())) {
        let v = Rat::new(a, b);
        return (v.clone(), v, true);
    }
    let mut lo = Rat::zero();
    let mut hi = if r > &Rat::one() { r.clone() } else { Rat::one() };
    let two = Rat::from_integer(2.into());
    for _ in 0..40 {
        let m = (&lo + &hi) / &two;
        if &num_traits::pow(m.clone(), k as usize) <= r {
            lo = m;
        } else {
            hi = m;
        }
    }
    (lo, hi, false)
}

/// Sound enclosure of `{ v : v^k in m }` intersected with the current `v` range.
fn invert_pow(m: &Iv, k: u32, cur: &Iv) -> Iv {
    if k == 1 {
        return m.clone();
    }
    if k % 2 == 1 {
        let f = |e: &End, lower: bool| match &e.v {
            None => End::inf(),
            Some(x) => {
                let (b, a, ex) = root_bounds(&x.abs(), k);
                let r = if x.is_negative() { if lower { -a } else { -b } } else if lower { b } else { a };
                End::at(r, e.open && ex)
            }
        };
        return Iv { lo: f(&m.lo, true), hi: f(&m.hi, false) };
    }
    let hi = match &m.hi.v {
        None => End::inf(),
        Some(h) if h.is_negative() => return Iv { lo: End::at(Rat::one(), false), hi: End::at(Rat::zero(), false) },
        Some(h) => {
            let (_, a, ex) = root_bounds(h, k);
            End::at(a, m.hi.open && ex)
        }
    };
    let mut out = Iv { lo: End { v: hi.v.as_ref().map(|x| -x.clone()), open: hi.open }, hi: hi.clone() };
    // exclusion of (-r, r) when the monomial is bounded away from zero
    if let Some(l) = &m.lo.v {
        if l.is_positive() || (l.is_zero() && m.lo.open) {
            let (b, _, ex) = root_bounds(l, k);
            let bound_open = m.lo.open && ex;
            let cur_nonneg = cur.lo.v.as_ref().map(|x| !x.is_negative()).unwrap_or(false);
            let cur_nonpos = cur.hi.v.as_ref().map(|x| !x.is_positive()).unwrap_or(false);
            if cur_nonneg {
                out = out.meet(&Iv { lo: End::at(b, bound_open), hi: End::inf() });
            } else if cur_nonpos {
                out = out.meet(&Iv { lo: End::inf(), hi: End::at(-b, bound_open) });
            }
        }
    }
    out
}

/// Summand of an atom: a monomial, or a univariate quadratic `a*v^2 + b*v`
/// whose range is computed exactly by completing the square.
#[derive(Clone, Debug)]
enum Piece {
    Mono(Monomial, Rat),
    Quad(Var, Rat, Rat),
}

fn pieces(p: &Poly) -> Vec<Piece> {
    let mut quads: BTreeMap<Var, (Rat, Rat)> = BTreeMap::new();
    for (m, c) in p.terms() {
        if let [(v, e)] = m.factors() {
            if *e <= 2 {
                let q = quads.entry(v.clone()).or_insert((Rat::zero(), Rat::zero()));
                if *e == 2 { q.0 = c.clone() } else { q.1 = c.clone() }
            }
        }
    }
    quads.retain(|_, (a, b)| !a.is_zero() && !b.is_zero());
    let mut out: Vec<Piece> = quads.iter().map(|(v, (a, b))| Piece::Quad(v.clone(), a.clone(), b.clone())).collect();
    for (m, c) in p.terms() {
        let grouped = match m.factors() {
            [(v, e)] => *e <= 2 && quads.contains_key(v),
            _ => false,
        };
        if !grouped {
            out.push(Piece::Mono(m.clone(), c.clone()));
        }
    }
    out
}

type QuadKey = (Var, Rat, Rat);

struct Store {
    vars: BTreeMap<Var, Iv>,
    monos: BTreeMap<Monomial, Iv>,
    quads: BTreeMap<QuadKey, Iv>,
}

/// `(shift, offset)` with `a*v^2 + b*v = a*(v + shift)^2 + offset`.
fn complete_square(a: &Rat, b: &Rat) -> (Rat, Rat) {
    let shift = b / (a * Rat::from_integer(2.into()));
    let offset = -(b * b) / (a * Rat::from_integer(4.into()));
    (shift, offset)
}

impl Store {
    fn var(&self, v: &Var) -> Iv {
        self.vars.get(v).cloned().unwrap_or_else(Iv::full)
    }

    /// Enclosure of a monomial from its stored range and its variables.
    fn mono(&self, m: &Monomial) -> Iv {
        let mut acc = Iv::point(Rat::one());
        for (v, e) in m.factors() {
            acc = acc.mul(&self.var(v).pow(*e));
        }
        match self.monos.get(m) {
            Some(s) => acc.meet(s),
            None => acc,
        }
    }

    fn quad(&self, k: &QuadKey) -> Iv {
        let (v, a, b) = k;
        let (shift, offset) = complete_square(a, b);
        let exact = self.var(v).add(&Iv::point(shift)).pow(2).scale(a).add(&Iv::point(offset));
        match self.quads.get(k) {
            Some(s) => exact.meet(s),
            None => exact,
        }
    }

    fn piece(&self, p: &Piece) -> Iv {
        match p {
            Piece::Mono(m, c) => self.mono(m).scale(c),
            Piece::Quad(v, a, b) => self.quad(&(v.clone(), a.clone(), b.clone())),
        }
    }

    fn tighten_var(&mut self, v: &Var, iv: &Iv) -> bool {
        let cur = self.var(v);
        let next = cur.meet(iv);
        if next != cur {
            self.vars.insert(v.clone(), next);
            true
        } else {
            false
        }
    }

    fn tighten_mono(&mut self, m: &Monomial, iv: &Iv) -> bool {
        let cur = self.mono(m);
        let next = cur.meet(iv);
        let mut changed = false;
        if self.monos.get(m) != Some(&next) && next != cur {
            self.monos.insert(m.clone(), next.clone());
            changed = true;
        }
        if let [(v, k)] = m.factors() {
            let cur_v = self.var(v);
            changed |= self.tighten_var(v, &invert_pow(&next, *k, &cur_v));
        }
        changed
    }

    fn tighten_quad(&mut self, k: &QuadKey, iv: &Iv) -> bool {
        let cur = self.quad(k);
        let next = cur.meet(iv);
        let mut changed = false;
        if self.quads.get(k) != Some(&next) && next != cur {
            self.quads.insert(k.clone(), next.clone());
            changed = true;
        }
        if next.is_empty() {
            return changed;
        }
        let (v, a, b) = k;
        let (shift, offset) = complete_square(a, b);
        let square = next.add(&Iv::point(-offset)).scale(&a.recip());
        let cur_u = self.var(v).add(&Iv::point(shift.clone()));
        let u = invert_pow(&square, 2, &cur_u);
        changed |= self.tighten_var(v, &u.add(&Iv::point(-shift)));
        changed
    }

    /// Narrows piece `p` (already scaled by its coefficient) to `iv`.
    fn tighten_piece(&mut self, p: &Piece, iv: &Iv) -> bool {
        match p {
            Piece::Mono(m, c) => self.tighten_mono(m, &iv.scale(&c.recip())),
            Piece::Quad(v, a, b) => self.tighten_quad(&(v.clone(), a.clone(), b.clone()), iv),
        }
    }
}

/// Sound refutation: `Refuted` only if the conjunction has no real solution.
pub fn interval_refute(clause: &[Atom]) -> Refutation {
    let mut st = Store { vars: BTreeMap::new(), monos: BTreeMap::new(), quads: BTreeMap::new() };
    let split: Vec<(Rel, Vec<Piece>)> = clause.iter().map(|a| (a.rel, pieces(&a.poly))).collect();
    for a in clause {
        for (m, _) in a.poly.terms() {
            if m.factors().len() > 1 || m.factors().iter().any(|(_, e)| *e > 1) {
                let even = m.factors().iter().all(|(_, e)| e % 2 == 0);
                st.monos.entry(m.clone()).or_insert_with(|| if even { Iv::nonneg() } else { Iv::full() });
            }
        }
    }
    for _ in 0..MAX_ROUNDS {
        let mut changed = false;
        for (rel, ps) in &split {
            let target = Iv::of_rel(*rel);
            let encl: Vec<Iv> = ps.iter().map(|p| st.piece(p)).collect();
            let whole = encl.iter().fold(Iv::point(Rat::zero()), |acc, t| acc.add(t));
            if whole.meet(&target).is_empty() || encl.iter().any(Iv::is_empty) {
                return Refutation::Refuted;
            }
            for (i, p) in ps.iter().enumerate() {
                if matches!(p, Piece::Mono(m, _) if m.is_one()) {
                    continue;
                }
                let rest = ps
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .fold(Iv::point(Rat::zero()), |acc, (_, q)| acc.add(&st.piece(q)));
                changed |= st.tighten_piece(p, &target.add(&rest.neg()));
                if st.piece(p).is_empty() {
                    return Refutation::Refuted;
                }
            }
        }
        if st.vars.values().any(|iv| iv.is_empty()) {
            return Refutation::Refuted;
        }
        if !changed {
            break;
        }
    }
    Refutation::Unknown
}
