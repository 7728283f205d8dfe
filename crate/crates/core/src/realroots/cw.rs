use num_integer::Integer;
use num_traits::{One, Zero};

use crate::algebra::Rat;

/// The Calkin–Wilf enumeration of the positive rationals: 1, 1/2, 2, 1/3, 3/2, ...
#[derive(Clone, Debug)]
pub struct CalkinWilf {
    next: Rat,
}

impl Default for CalkinWilf {
    fn default() -> Self {
        CalkinWilf { next: Rat::one() }
    }
}

impl Iterator for CalkinWilf {
    type Item = Rat;

    fn next(&mut self) -> Option<Rat> {
        let cur = self.next.clone();
        let fl = cur.numer().div_floor(cur.denom());
        let two_floor = Rat::from_integer(fl * 2);
        self.next = (two_floor - &cur + Rat::one()).recip();
        Some(cur)
    }
}

/// Every rational exactly once: 0, 1, -1, 1/2, -1/2, 2, -2, ...
#[derive(Clone, Debug, Default)]
pub struct SignedRationals {
    inner: CalkinWilf,
    started: bool,
    pending: Option<Rat>,
}

impl Iterator for SignedRationals {
    type Item = Rat;

    fn next(&mut self) -> Option<Rat> {
        if !self.started {
            self.started = true;
            return Some(Rat::zero());
        }
        if let Some(n) = self.pending.take() {
            return Some(n);
        }
        let p = self.inner.next()?;
        self.pending = Some(-p.clone());
        Some(p)
    }
}

/// The first `n` entries of [`SignedRationals`].
pub fn signed_rationals(n: usize) -> Vec<Rat> {
    SignedRationals::default().take(n).collect()
}
