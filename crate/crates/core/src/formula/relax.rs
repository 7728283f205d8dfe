use crate::algebra::{Poly, Var};

use super::ast::{Atom, Formula, Rel, Spec};
use super::FormulaError;

/// Replaces every equality `p = 0` by `(d >= 0) & (p - d <= 0) & (p + d >= 0)`
/// with one shared fresh input `d`.
pub fn delta_relax(s: &Spec, delta: &Var) -> Result<Spec, FormulaError> {
    if s.inputs.contains(delta) || s.outputs.contains(delta) || s.formula.contains_var(delta) {
        return Err(FormulaError::VariableClash(delta.name().to_string()));
    }
    let d = Poly::var(delta);
    let formula = s.formula.map_atoms(&mut |a| {
        if a.rel != Rel::Eq {
            return Formula::Atom(a.clone());
        }
        Formula::And(vec![
            Formula::Atom(Atom::new(d.clone(), Rel::Ge)),
            Formula::Atom(Atom::new(&a.poly - &d, Rel::Le)),
            Formula::Atom(Atom::new(&a.poly + &d, Rel::Ge)),
        ])
    });
    let mut inputs = s.inputs.clone();
    inputs.push(delta.clone());
    Ok(Spec { formula, inputs, outputs: s.outputs.clone() })
}
