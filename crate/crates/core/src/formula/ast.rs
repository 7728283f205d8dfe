use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::rat::sign;
use crate::algebra::{AlgebraError, Assignment, Poly, Rat, Var};

impl Serialize for Var {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Var {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Var::new(&String::deserialize(d)?))
    }
}

/// Relation of an atom `p rel 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rel {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = "!=")]
    Ne,
}

impl Rel {
    pub fn holds(self, s: i8) -> bool {
        match self {
            Rel::Lt => s < 0,
            Rel::Gt => s > 0,
            Rel::Le => s <= 0,
            Rel::Ge => s >= 0,
            Rel::Eq => s == 0,
            Rel::Ne => s != 0,
        }
    }

    pub fn negate(self) -> Rel {
        match self {
            Rel::Lt => Rel::Ge,
            Rel::Gt => Rel::Le,
            Rel::Le => Rel::Gt,
            Rel::Ge => Rel::Lt,
            Rel::Eq => Rel::Ne,
            Rel::Ne => Rel::Eq,
        }
    }

    /// Relation obtained after multiplying the polynomial by -1.
    pub fn flip(self) -> Rel {
        match self {
            Rel::Lt => Rel::Gt,
            Rel::Gt => Rel::Lt,
            Rel::Le => Rel::Ge,
            Rel::Ge => Rel::Le,
            r => r,
        }
    }

    pub fn is_strict(self) -> bool {
        matches!(self, Rel::Lt | Rel::Gt | Rel::Ne)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Lt => "<",
            Rel::Gt => ">",
            Rel::Le => "<=",
            Rel::Ge => ">=",
            Rel::Eq => "=",
            Rel::Ne => "!=",
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub poly: Poly,
    pub rel: Rel,
}

impl Atom {
    pub fn new(poly: Poly, rel: Rel) -> Self {
        Atom { poly, rel }
    }

    pub fn eval(&self, a: &Assignment) -> Result<bool, AlgebraError> {
        Ok(self.rel.holds(sign(&self.poly.eval(a)?)))
    }

    pub fn negate(&self) -> Atom {
        Atom::new(self.poly.clone(), self.rel.negate())
    }

    /// Folds atoms over constant polynomials to a truth value.
    pub fn constant_truth(&self) -> Option<bool> {
        self.poly
            .constant_value()
            .map(|c| self.rel.holds(sign(&c)))
    }

    /// Same truth set, with the polynomial scaled to primitive integer form
    /// (relation flipped if the scaling was negative).
    pub fn canonical(&self) -> Atom {
        let p = self.poly.normalize_up_to_constant();
        if p.is_zero() {
            return self.clone();
        }
        let same_sign = {
            let (m, c) = self.poly.leading_term().expect("nonzero");
            sign(c) == sign(&p.coeff(m))
        };
        Atom::new(p, if same_sign { self.rel } else { self.rel.flip() })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} 0", self.poly, self.rel.symbol())
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    pub fn atom(poly: Poly, rel: Rel) -> Formula {
        Formula::Atom(Atom::new(poly, rel))
    }

    /// Conjunction with flattening, unit removal and duplicate elimination.
    pub fn and(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out: Vec<Formula> = Vec::new();
        for p in parts {
            match p {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(inner) => {
                    for q in inner {
                        if !out.contains(&q) {
                            out.push(q);
                        }
                    }
                }
                q => {
                    if !out.contains(&q) {
                        out.push(q);
                    }
                }
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().unwrap(),
            _ => Formula::And(out),
        }
    }

    pub fn or(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out: Vec<Formula> = Vec::new();
        for p in parts {
            match p {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(inner) => {
                    for q in inner {
                        if !out.contains(&q) {
                            out.push(q);
                        }
                    }
                }
                q => {
                    if !out.contains(&q) {
                        out.push(q);
                    }
                }
            }
        }
        match out.len() {
            0 => Formula::False,
            1 => out.pop().unwrap(),
            _ => Formula::Or(out),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        match f {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(inner) => *inner,
            g => Formula::Not(Box::new(g)),
        }
    }

    pub fn eval(&self, a: &Assignment) -> Result<bool, AlgebraError> {
        Ok(match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(at) => at.eval(a)?,
            Formula::Not(f) => !f.eval(a)?,
            Formula::And(fs) => {
                for f in fs {
                    if !f.eval(a)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(fs) => {
                for f in fs {
                    if f.eval(a)? {
                        return Ok(true);
                    }
                }
                false
            }
        })
    }

    /// Evaluates with a caller-provided atom oracle.
    pub fn eval_with<E>(&self, atom: &mut impl FnMut(&Atom) -> Result<bool, E>) -> Result<bool, E> {
        Ok(match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(at) => atom(at)?,
            Formula::Not(f) => !f.eval_with(atom)?,
            Formula::And(fs) => {
                for f in fs {
                    if !f.eval_with(atom)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(fs) => {
                for f in fs {
                    if f.eval_with(atom)? {
                        return Ok(true);
                    }
                }
                false
            }
        })
    }

    /// Rebuilds the formula with each atom replaced, folding constants.
    pub fn map_atoms(&self, f: &mut impl FnMut(&Atom) -> Formula) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(a) => f(a),
            Formula::Not(g) => Formula::not(g.map_atoms(f)),
            Formula::And(gs) => Formula::and(gs.iter().map(|g| g.map_atoms(f)).collect::<Vec<_>>()),
            Formula::Or(gs) => Formula::or(gs.iter().map(|g| g.map_atoms(f)).collect::<Vec<_>>()),
        }
    }

    pub fn for_each_atom<'a>(&'a self, f: &mut impl FnMut(&'a Atom)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => f(a),
            Formula::Not(g) => g.for_each_atom(f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.for_each_atom(f)),
        }
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.for_each_atom(&mut |a| out.push(a));
        out
    }

    /// Substitutes rational values and folds atoms that became constant.
    pub fn substitute(&self, bindings: &Assignment) -> Formula {
        self.map_atoms(&mut |a| {
            let at = Atom::new(a.poly.substitute(bindings), a.rel);
            match at.constant_truth() {
                Some(true) => Formula::True,
                Some(false) => Formula::False,
                None => Formula::Atom(at),
            }
        })
    }

    /// Folds constant atoms without substituting anything.
    pub fn fold_constants(&self) -> Formula {
        self.map_atoms(&mut |a| match a.constant_truth() {
            Some(true) => Formula::True,
            Some(false) => Formula::False,
            None => Formula::Atom(a.clone()),
        })
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.for_each_atom(&mut |a| out.extend(a.poly.vars()));
        out
    }

    pub fn contains_var(&self, v: &Var) -> bool {
        let mut found = false;
        self.for_each_atom(&mut |a| found |= a.poly.contains_var(v));
        found
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 1,
            Formula::Not(g) => 1 + g.size(),
            Formula::And(gs) | Formula::Or(gs) => 1 + gs.iter().map(|g| g.size()).sum::<usize>(),
        }
    }

    pub fn rename(&self, map: &BTreeMap<Var, Var>) -> Formula {
        self.map_atoms(&mut |a| Formula::Atom(Atom::new(a.poly.rename(map), a.rel)))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom(a) => write!(f, "({a})"),
            Formula::Not(g) => write!(f, "!{g}"),
            Formula::And(gs) | Formula::Or(gs) => {
                let sep = if matches!(self, Formula::And(_)) { " & " } else { " | " };
                f.write_str("(")?;
                for (i, g) in gs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    write!(f, "{g}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Specification `phi(X, Y)` with designated inputs and outputs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Spec {
    pub formula: Formula,
    pub inputs: Vec<Var>,
    pub outputs: Vec<Var>,
}

impl Spec {
    /// Checks disjointness of inputs/outputs and that every free variable is declared.
    pub fn new(formula: Formula, inputs: Vec<Var>, outputs: Vec<Var>) -> Result<Spec, super::FormulaError> {
        let ins: BTreeSet<_> = inputs.iter().cloned().collect();
        let outs: BTreeSet<_> = outputs.iter().cloned().collect();
        if ins.len() != inputs.len() || outs.len() != outputs.len() {
            return Err(super::FormulaError::DuplicateVariable);
        }
        if let Some(v) = ins.intersection(&outs).next() {
            return Err(super::FormulaError::VariableClash(v.name().to_string()));
        }
        for v in formula.free_vars() {
            if !ins.contains(&v) && !outs.contains(&v) {
                return Err(super::FormulaError::UndeclaredVariable(v.name().to_string()));
            }
        }
        Ok(Spec { formula, inputs, outputs })
    }

    pub fn all_vars(&self) -> Vec<Var> {
        self.inputs.iter().chain(self.outputs.iter()).cloned().collect()
    }
}

/// Builds an assignment from parallel slices.
pub fn assignment(vars: &[Var], values: &[Rat]) -> Assignment {
    vars.iter().cloned().zip(values.iter().cloned()).collect()
}

pub fn is_zero_poly(p: &Poly) -> bool {
    p.constant_value().map(|c| c.is_zero()).unwrap_or(false)
}
