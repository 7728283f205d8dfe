//! Elimination of one existential quantifier, plus an interval refuter.

pub mod cad;
pub mod interval;
pub mod vts;

pub use cad::{cad_one_param, DEFAULT_MAX_PROJECTION_DEGREE};
pub use interval::{interval_refute, Refutation};
pub use vts::vts_quadratic;

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraError, Poly, Var};
use crate::formula::{normalize, Atom, Formula, Rel};
use crate::realroots::RootsError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QeError {
    #[error("an atom has degree above two in the eliminated variable")]
    DegreeTooHigh,
    #[error("more than one parameter remains")]
    TooManyFreeVariables,
    #[error("projection exceeds the degree budget")]
    ProjectionTooLarge,
    #[error(transparent)]
    Roots(#[from] RootsError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Vts2,
    Cad1,
    None,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QEResult {
    pub psi: Formula,
    pub engine_used: Engine,
    /// When set, `psi` agrees with `exists y. phi` at every rational point.
    pub exact: bool,
}

/// Atom in canonical scaling, folded to a constant where possible.
pub(crate) fn lit(p: Poly, rel: Rel) -> Formula {
    let a = Atom::new(p, rel);
    match a.constant_truth() {
        Some(true) => Formula::True,
        Some(false) => Formula::False,
        None => Formula::Atom(a.canonical()),
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QeConfig {
    pub max_projection_degree: u64,
}

impl Default for QeConfig {
    fn default() -> Self {
        QeConfig { max_projection_degree: DEFAULT_MAX_PROJECTION_DEGREE }
    }
}

/// `exists y. phi` for a normalized `phi`.
///
/// With at most one parameter the cylindrical decomposition is used (its
/// output is a short condition on the parameter); otherwise virtual
/// substitution when every atom is at most quadratic in `y`; otherwise the
/// result is `False` and marked inexact.
pub fn eliminate_exists(phi: &Formula, y: &Var) -> QEResult {
    eliminate_exists_with(phi, y, &QeConfig::default())
}

pub fn eliminate_exists_with(phi: &Formula, y: &Var, cfg: &QeConfig) -> QEResult {
    let phi = normalize(phi);
    if !phi.contains_var(y) {
        return QEResult { psi: phi, engine_used: Engine::None, exact: true };
    }
    let params = phi.free_vars().into_iter().filter(|v| v != y).count();
    if params <= 1 {
        if let Ok(psi) = cad_one_param(&phi, y, cfg.max_projection_degree) {
            return QEResult { psi: normalize(&psi), engine_used: Engine::Cad1, exact: true };
        }
    }
    let quadratic = phi.atoms().iter().all(|a| a.poly.degree_in(y) <= 2);
    if quadratic {
        if let Ok(psi) = vts_quadratic(&phi, y) {
            return QEResult { psi: normalize(&psi), engine_used: Engine::Vts2, exact: true };
        }
    }
    QEResult { psi: Formula::False, engine_used: Engine::None, exact: false }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::{cst, var};
    use crate::algebra::rat::{int, rat};
    use crate::algebra::{Assignment, Rat};
    use crate::realroots::{decide_exists_real, signed_rationals};

    fn sq(p: &Poly) -> Poly {
        p * p
    }

    fn at(p: Poly, r: Rel) -> Formula {
        Formula::atom(p, r)
    }

    fn agree_1d(phi: &Formula, psi: &Formula, pts: &[Rat]) {
        let y = Var::new("y");
        for p in pts {
            let a: Assignment = [(Var::new("x"), p.clone())].into_iter().collect();
            let want = decide_exists_real(&phi.substitute(&a), &y).unwrap();
            assert_eq!(psi.eval(&a).unwrap(), want, "x = {p}");
        }
    }

    fn pts() -> Vec<Rat> {
        let mut v = signed_rationals(300);
        v.extend([rat(1, 1), rat(-1, 1), rat(3, 4), rat(-3, 4), rat(19, 20), rat(-19, 20), rat(2, 1)]);
        v
    }

    fn circle_hat() -> Formula {
        let s = &sq(&var("x")) + &sq(&var("y"));
        Formula::and([at(&s - &cst(rat(9, 10)), Rel::Gt), at(&s - &cst(int(1)), Rel::Lt)])
    }

    #[test]
    fn circle_both_engines() {
        let phi = circle_hat();
        let y = Var::new("y");
        let r = eliminate_exists(&phi, &y);
        assert!(r.exact);
        assert_eq!(r.engine_used, Engine::Cad1);
        agree_1d(&phi, &r.psi, &pts());
        let v = vts_quadratic(&phi, &y).unwrap();
        agree_1d(&phi, &v, &pts());
        // psi is x^2 < 1 on rationals
        for p in pts() {
            let a: Assignment = [(Var::new("x"), p.clone())].into_iter().collect();
            assert_eq!(r.psi.eval(&a).unwrap(), &p * &p < int(1));
        }
    }

    #[test]
    fn ellipsoid_slice() {
        // x^2 + y^2/9 - 7/16 <= 0 together with the (always true) second atom at z = -3
        let e = &(&sq(&var("x")) + &sq(&var("y")).scale(&rat(1, 9))) - &cst(rat(7, 16));
        let f = &(&(&sq(&var("x")).scale(&rat(-1, 9)) - &sq(&var("y")).scale(&rat(1, 16))) - &cst(int(9))) - &cst(int(14));
        let phi = Formula::and([at(e, Rel::Le), at(f, Rel::Lt)]);
        let r = eliminate_exists(&phi, &Var::new("y"));
        assert_eq!(r.psi, at(&sq(&var("x")).scale(&int(16)) - &cst(int(7)), Rel::Le));
        agree_1d(&phi, &r.psi, &pts());
    }

    #[test]
    fn parabola_and_vts_examples() {
        let y = Var::new("y");
        let phi = at(&sq(&var("y")) - &var("x"), Rel::Le);
        let r = eliminate_exists(&phi, &y);
        agree_1d(&phi, &r.psi, &pts());
        let v = vts_quadratic(&phi, &y).unwrap();
        agree_1d(&phi, &v, &pts());
        // (y - x)^2 < 1 holds for every x
        let shifted = at(&sq(&(&var("y") - &var("x"))) - &cst(int(1)), Rel::Lt);
        let v = normalize(&vts_quadratic(&shifted, &y).unwrap());
        agree_1d(&shifted, &v, &pts());
        // y^2 + x <= 0
        let g = at(&sq(&var("y")) + &var("x"), Rel::Le);
        agree_1d(&g, &vts_quadratic(&g, &y).unwrap(), &pts());
        // linear equality 3y - 2 = 0
        let lin = normalize(&at(&var("y").scale(&int(3)) - &cst(int(2)), Rel::Eq));
        assert_eq!(vts_quadratic(&lin, &y).unwrap(), Formula::True);
    }

    #[test]
    fn dispatch_limits() {
        let y = Var::new("y");
        let no_y = at(var("x"), Rel::Gt);
        assert_eq!(eliminate_exists(&no_y, &y).psi, no_y);
        // three parameters, quartic in y
        let hard = at(&(&sq(&sq(&var("y"))) - &(&var("a") * &var("b"))) - &var("c"), Rel::Lt);
        let r = eliminate_exists(&hard, &y);
        assert!(!r.exact);
        assert_eq!(r.engine_used, Engine::None);
        assert_eq!(r.psi, Formula::False);
    }

    #[test]
    fn two_parameter_vts() {
        // exists z. x^2 + y^2 + z^2 < 1
        let phi = at(&(&(&sq(&var("x")) + &sq(&var("y"))) + &sq(&var("z"))) - &cst(int(1)), Rel::Lt);
        let r = eliminate_exists(&phi, &Var::new("z"));
        assert_eq!(r.engine_used, Engine::Vts2);
        for (a, b) in [(0, 0), (1, 0), (0, 1), (2, 3)] {
            for d in [1, 2, 3] {
                let asg: Assignment = [(Var::new("x"), rat(a, d)), (Var::new("y"), rat(b, d))].into_iter().collect();
                let want = rat(a * a + b * b, d * d) < int(1);
                assert_eq!(r.psi.eval(&asg).unwrap(), want);
            }
        }
    }
}
