//! Real roots of univariate polynomials: counting, isolation, rational
//! samples, rational-root candidates and an exact existence decider.

pub mod cw;
pub mod rrt;
pub mod samples;
pub mod sturm;

pub use cw::{signed_rationals, CalkinWilf, SignedRationals};
pub use rrt::{cand_rat_roots, divisors, rational_roots, DEFAULT_DIVISOR_BUDGET};
pub use samples::{
    boundary_poly, decide_exists_real, eval_at_root, find_real_witness, formula_roots,
    rational_samples, rational_samples_eps, samples_from_intervals, sign_at_isolated_root,
};
pub use sturm::{count_roots, isolate_roots, isolate_with_chain, refine, Interval, SturmChain};

use crate::algebra::AlgebraError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RootsError {
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("divisor enumeration exceeded its trial-division budget")]
    DivisorBudgetExceeded,
    #[error("atom `{0}` is not univariate in the solved variable")]
    NotUnivariate(String),
    #[error("isolation width must be positive")]
    NonPositiveEpsilon,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat::{int, rat};
    use crate::algebra::UniPoly;

    fn y(c: &[i64]) -> UniPoly {
        UniPoly::from_ints("y", c)
    }

    #[test]
    fn counting() {
        assert_eq!(count_roots(&y(&[-2, 0, 1]), &Interval::open(int(-2), int(2))).unwrap(), 2);
        assert_eq!(count_roots(&y(&[1, 0, 1]), &Interval::open(int(-10), int(10))).unwrap(), 0);
        assert_eq!(count_roots(&y(&[1, -2, 1]), &Interval::open(int(0), int(2))).unwrap(), 1);
        assert_eq!(count_roots(&y(&[-1, 1]), &Interval::open(int(0), int(1))).unwrap(), 0);
        assert_eq!(count_roots(&y(&[-1, 1]), &Interval::closed(int(0), int(1))).unwrap(), 1);
        assert!(matches!(count_roots(&y(&[]), &Interval::open(int(0), int(1))), Err(RootsError::ZeroPolynomial)));
    }

    #[test]
    fn isolation_examples() {
        let p = y(&[-2, 0, 1]);
        let ivs = isolate_roots(&p, &int(1)).unwrap();
        assert_eq!(ivs.len(), 2);
        for iv in &ivs {
            assert_eq!(count_roots(&p, iv).unwrap(), 1);
            assert!(iv.width() <= int(1));
        }
        assert!(ivs[1].lo > int(0));
        assert!(isolate_roots(&y(&[1, 0, 1]), &int(1)).unwrap().is_empty());
        let q = y(&[2, -3, 1]);
        let ivs = isolate_roots(&q, &int(4)).unwrap();
        assert_eq!(ivs.len(), 2);
        assert!(ivs[0].disjoint(&ivs[1]));
        assert!(ivs[0].contains(&int(1)) && ivs[1].contains(&int(2)));
    }

    #[test]
    fn exact_root_on_bisection_point() {
        // y (y - 1/2): both roots are dyadic
        let p = UniPoly::new(crate::algebra::Var::new("y"), vec![int(0), rat(-1, 2), int(1)]);
        let ivs = isolate_roots(&p, &int(1)).unwrap();
        assert_eq!(ivs.len(), 2);
        let ss = samples_from_intervals(&ivs);
        // one sample strictly between the roots
        assert!(ss.iter().any(|s| s > &int(0) && s < &rat(1, 2)));
    }
}
