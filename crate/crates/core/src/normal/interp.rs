//! Quantifier-free definitions of arbitrary subsets of `F_q^n`.

use crate::field::element_term;
use crate::field::Fq;
use crate::formula::{Formula, Term, VarName};
use crate::semantics::FiniteStructure;

/// The formula `sum_{a in D} prod_i (1 - (X_i - a_i)^(q-1)) = 1`, which
/// defines exactly `D` over `F_q`.
pub fn qf_interpolation_finite(d: &[Vec<Fq>], vars: &[VarName], s: &FiniteStructure) -> Formula {
    let q = s.size();
    let mut points: Vec<&Vec<Fq>> = d.iter().collect();
    points.sort();
    points.dedup();
    let indicators = points.into_iter().map(|a| {
        Term::product(vars.iter().zip(a).map(|(x, &ai)| {
            let diff = if ai.is_zero() {
                Term::Var(x.clone())
            } else {
                Term::sub(Term::Var(x.clone()), element_term(&s.field, ai))
            };
            Term::sub(Term::one(), Term::pow_simplified(diff, q - 1))
        }))
    });
    Formula::eq(Term::sum(indicators), Term::one())
}
