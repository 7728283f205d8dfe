use std::fmt;

use num_traits::Signed;

use crate::algebra::rat::{format_rat, sign};
use crate::algebra::{square_free_part, Rat, UniPoly};

use super::RootsError;

/// Rational interval with endpoint openness flags.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Rat,
    pub hi: Rat,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Interval {
    pub fn open(lo: Rat, hi: Rat) -> Self {
        Interval { lo, hi, lo_open: true, hi_open: true }
    }

    pub fn closed(lo: Rat, hi: Rat) -> Self {
        Interval { lo, hi, lo_open: false, hi_open: false }
    }

    pub fn point(r: Rat) -> Self {
        Interval::closed(r.clone(), r)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi && !self.lo_open && !self.hi_open
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rat) -> bool {
        let above = if self.lo_open { x > &self.lo } else { x >= &self.lo };
        let below = if self.hi_open { x < &self.hi } else { x <= &self.hi };
        above && below
    }

    /// No common point.
    pub fn disjoint(&self, o: &Interval) -> bool {
        let (a, b) = if self.lo <= o.lo { (self, o) } else { (o, self) };
        a.hi < b.lo || (a.hi == b.lo && (a.hi_open || b.lo_open))
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_open { '(' } else { '[' },
            format_rat(&self.lo),
            format_rat(&self.hi),
            if self.hi_open { ')' } else { ']' }
        )
    }
}

/// Sturm sequence of a square-free polynomial: `p, p', -rem(...), ...`.
#[derive(Clone, Debug)]
pub struct SturmChain {
    seq: Vec<UniPoly>,
}

impl SturmChain {
    /// Builds the chain of the square-free part of `p`.
    pub fn new(p: &UniPoly) -> Result<Self, RootsError> {
        if p.is_zero() {
            return Err(RootsError::ZeroPolynomial);
        }
        Ok(Self::from_square_free(square_free_part(p)?))
    }

    pub fn from_square_free(p: UniPoly) -> Self {
        let mut seq = vec![p.clone()];
        if !p.is_constant() {
            let mut a = p;
            let mut b = a.derivative().primitive();
            while !b.is_zero() {
                seq.push(b.clone());
                let r = a.rem(&b).expect("nonzero divisor");
                a = b;
                // positive scaling keeps sign variations intact
                b = r.neg().primitive();
            }
        }
        SturmChain { seq }
    }

    pub fn polys(&self) -> &[UniPoly] {
        &self.seq
    }

    pub fn poly(&self) -> &UniPoly {
        &self.seq[0]
    }

    fn variations(signs: impl Iterator<Item = i8>) -> usize {
        let mut last = 0i8;
        let mut v = 0;
        for s in signs.filter(|s| *s != 0) {
            if last != 0 && s != last {
                v += 1;
            }
            last = s;
        }
        v
    }

    pub fn variations_at(&self, x: &Rat) -> usize {
        Self::variations(self.seq.iter().map(|p| p.sign_at(x)))
    }

    pub fn variations_at_infinity(&self, positive: bool) -> usize {
        Self::variations(self.seq.iter().map(|p| {
            let s = sign(&p.lc());
            if positive || p.degree() % 2 == 0 {
                s
            } else {
                -s
            }
        }))
    }

    /// Distinct roots in `(a, b]`.
    pub fn count_half_open(&self, a: &Rat, b: &Rat) -> usize {
        if a >= b {
            return 0;
        }
        self.variations_at(a) - self.variations_at(b)
    }

    /// Distinct roots in the interval, honoring endpoint openness.
    pub fn count(&self, iv: &Interval) -> usize {
        let p = self.poly();
        if iv.lo > iv.hi {
            return 0;
        }
        if iv.lo == iv.hi {
            return usize::from(!iv.lo_open && !iv.hi_open && p.sign_at(&iv.lo) == 0);
        }
        let mut n = self.count_half_open(&iv.lo, &iv.hi);
        if !iv.lo_open && p.sign_at(&iv.lo) == 0 {
            n += 1;
        }
        if iv.hi_open && p.sign_at(&iv.hi) == 0 {
            n -= 1;
        }
        n
    }

    pub fn count_all(&self) -> usize {
        self.variations_at_infinity(false) - self.variations_at_infinity(true)
    }
}

/// Number of distinct real roots of `p` in `iv`.
pub fn count_roots(p: &UniPoly, iv: &Interval) -> Result<usize, RootsError> {
    Ok(SturmChain::new(p)?.count(iv))
}

/// Isolating intervals for the distinct real roots of `p`, in increasing order.
///
/// Roots that land exactly on a bisection point come back as point intervals;
/// every other interval is open, holds one root and has width at most the
/// final `eps` (which starts at `eps0` and halves until the list is disjoint).
pub fn isolate_roots(p: &UniPoly, eps0: &Rat) -> Result<Vec<Interval>, RootsError> {
    let chain = SturmChain::new(p)?;
    isolate_with_chain(&chain, eps0)
}

pub fn isolate_with_chain(chain: &SturmChain, eps0: &Rat) -> Result<Vec<Interval>, RootsError> {
    if !eps0.is_positive() {
        return Err(RootsError::NonPositiveEpsilon);
    }
    let q = chain.poly();
    if q.is_constant() {
        return Ok(vec![]);
    }
    let b = q.cauchy_bound();
    let mut eps = eps0.clone();
    loop {
        let mut out = Vec::new();
        bisect(chain, -b.clone(), b.clone(), &eps, &mut out);
        if out.windows(2).all(|w| w[0].disjoint(&w[1])) {
            return Ok(out);
        }
        eps /= Rat::from_integer(2.into());
    }
}

/// `a` and `b` are never roots.
fn bisect(chain: &SturmChain, a: Rat, b: Rat, eps: &Rat, out: &mut Vec<Interval>) {
    let n = chain.count_half_open(&a, &b);
    if n == 0 {
        return;
    }
    if n == 1 && &(&b - &a) <= eps {
        out.push(Interval::open(a, b));
        return;
    }
    let two = Rat::from_integer(2.into());
    let m = (&a + &b) / &two;
    let p = chain.poly();
    if p.sign_at(&m) != 0 {
        bisect(chain, a, m.clone(), eps, out);
        bisect(chain, m, b, eps, out);
        return;
    }
    // keep the point root away from its neighbours' intervals
    let mut d = (&b - &a) / Rat::from_integer(4.into());
    loop {
        let (l, u) = (&m - &d, &m + &d);
        if p.sign_at(&l) != 0 && p.sign_at(&u) != 0 && chain.count_half_open(&l, &u) == 1 {
            bisect(chain, a, l, eps, out);
            out.push(Interval::point(m));
            bisect(chain, u, b, eps, out);
            return;
        }
        d /= &two;
    }
}

/// Shrinks an open isolating interval of `chain`'s polynomial below `width`.
pub fn refine(chain: &SturmChain, iv: &Interval, width: &Rat) -> Interval {
    let mut cur = iv.clone();
    let two = Rat::from_integer(2.into());
    while !cur.is_point() && &cur.width() > width {
        let m = (&cur.lo + &cur.hi) / &two;
        if chain.poly().sign_at(&m) == 0 {
            return Interval::point(m);
        }
        if chain.count(&Interval::open(cur.lo.clone(), m.clone())) == 1 {
            cur.hi = m;
        } else {
            cur.lo = m;
        }
    }
    cur
}
