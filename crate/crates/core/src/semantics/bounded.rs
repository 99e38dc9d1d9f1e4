//! One-sided witness search over `F_q(t)`: quantifiers range over rational
//! functions of bounded height. A failed search is never read as falsity.

use std::collections::HashMap;

use serde::Serialize;

use super::engine::{CFormula, Compiler, Evaluator};
use super::state_cap;
use crate::error::{Error, Result};
use crate::field::{Arith, FunctionField, RatFunc};
use crate::formula::{free_variables, raw_quantifier_count, ConstSym, Formula, VarName};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum BoundedVerdict {
    /// Holds; for a formula with an outer quantifier block the values found
    /// for that block are listed.
    True {
        witness: Vec<(VarName, RatFunc)>,
    },
    NoWitnessUpToBound {
        bound: usize,
    },
}

impl BoundedVerdict {
    pub fn is_true(&self) -> bool {
        matches!(self, BoundedVerdict::True { .. })
    }
}

/// The bounded domain of `F_q(t)` with its cap.
#[derive(Clone, Debug)]
pub struct BoundedDomain {
    pub field: FunctionField,
    pub bound: usize,
    elements: Vec<RatFunc>,
}

impl BoundedDomain {
    pub fn new(field: FunctionField, bound: usize) -> Result<Self> {
        let cap = state_cap();
        let estimate = field.bounded_count_estimate(bound);
        if estimate > cap as u128 {
            return Err(Error::CapExceeded {
                requested: estimate,
                cap,
            });
        }
        let elements = field.enumerate_bounded(bound);
        Ok(BoundedDomain {
            field,
            bound,
            elements,
        })
    }

    pub fn elements(&self) -> &[RatFunc] {
        &self.elements
    }
}

/// Searches for witnesses with numerator and denominator degrees at most the
/// domain bound.
pub fn eval_bounded_ratfunc(
    f: &Formula,
    assignment: &HashMap<VarName, RatFunc>,
    dom: &BoundedDomain,
) -> Result<BoundedVerdict> {
    let k = &dom.field;
    let m = raw_quantifier_count(f);
    let cap = state_cap();
    let requested = (dom.elements.len() as u128).saturating_pow(m as u32);
    if requested > cap as u128 {
        return Err(Error::CapExceeded { requested, cap });
    }
    let free = free_variables(f);
    let consts = |c: &ConstSym| k.named_constant(c.as_str());
    let mut comp = Compiler::new(k, &consts, &free);
    let (block, cf) = match f {
        Formula::Exists(vs, body) => {
            let (slots, body) = comp.formula_with_bound(vs, body)?;
            (Some((vs.clone(), slots)), body)
        }
        _ => (None, comp.formula(f)?),
    };
    let prog = comp.finish();
    let mut ev = Evaluator::new(k, &prog, dom.elements());
    for (i, v) in free.iter().enumerate() {
        let x = assignment
            .get(v)
            .ok_or_else(|| Error::MissingAssignment(v.to_string()))?;
        ev.set(i as u32, x.clone());
    }
    let found = match &block {
        Some((vs, slots)) => ev
            .witness(slots, &cf)
            .map(|w| vs.iter().cloned().zip(w).collect::<Vec<_>>()),
        None => ev.holds(&cf).then(Vec::new),
    };
    Ok(match found {
        Some(witness) => BoundedVerdict::True { witness },
        None => BoundedVerdict::NoWitnessUpToBound { bound: dom.bound },
    })
}

/// Exact truth of a quantifier-free formula at a point of `F_q(t)`.
pub fn eval_qf_ratfunc(
    f: &Formula,
    assignment: &HashMap<VarName, RatFunc>,
    k: &FunctionField,
) -> Result<bool> {
    if !f.is_quantifier_free() {
        return Err(Error::InvalidConfig(
            "exact evaluation over F_q(t) needs a quantifier-free formula".into(),
        ));
    }
    let free = free_variables(f);
    let consts = |c: &ConstSym| k.named_constant(c.as_str());
    let mut comp = Compiler::new(k, &consts, &free);
    let cf: CFormula = comp.formula(f)?;
    let prog = comp.finish();
    let mut ev = Evaluator::new(k, &prog, &[]);
    for (i, v) in free.iter().enumerate() {
        let x = assignment
            .get(v)
            .ok_or_else(|| Error::MissingAssignment(v.to_string()))?;
        ev.set(i as u32, x.clone());
    }
    Ok(ev.holds(&cf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FiniteField;
    use crate::formula::parse_formula;

    fn f2t() -> FunctionField {
        FunctionField::new(FiniteField::new(2, 1).unwrap())
    }

    #[test]
    fn square_search() {
        let k = f2t();
        let f = parse_formula("E y . x = y^2", false).unwrap();
        let dom = BoundedDomain::new(k.clone(), 1).unwrap();
        let mut a = HashMap::new();
        a.insert(VarName::new("x"), k.pow(&k.t(), 2));
        let v = eval_bounded_ratfunc(&f, &a, &dom).unwrap();
        assert_eq!(
            v,
            BoundedVerdict::True {
                witness: vec![(VarName::new("y"), k.t())]
            }
        );
        let dom4 = BoundedDomain::new(k.clone(), 4).unwrap();
        a.insert(VarName::new("x"), k.t());
        assert_eq!(
            eval_bounded_ratfunc(&f, &a, &dom4).unwrap(),
            BoundedVerdict::NoWitnessUpToBound { bound: 4 }
        );
    }

    #[test]
    fn monotone_in_bound() {
        let k = f2t();
        let f = parse_formula("E y . x = y^2 + y", false).unwrap();
        let x = k.add(&k.pow(&k.t(), 2), &k.t());
        let mut a = HashMap::new();
        a.insert(VarName::new("x"), x);
        let mut seen = false;
        for b in 0..4 {
            let dom = BoundedDomain::new(k.clone(), b).unwrap();
            let v = eval_bounded_ratfunc(&f, &a, &dom).unwrap().is_true();
            assert!(!seen || v);
            seen |= v;
        }
        assert!(seen);
    }

    #[test]
    fn quantifier_free_exact() {
        let k = f2t();
        let f = parse_formula("x*c:t = 1", false).unwrap();
        let mut a = HashMap::new();
        a.insert(VarName::new("x"), k.inv(&k.t()).unwrap());
        assert!(eval_qf_ratfunc(&f, &a, &k).unwrap());
        a.insert(VarName::new("x"), k.t());
        assert!(!eval_qf_ratfunc(&f, &a, &k).unwrap());
    }
}
