//! Prenex existential form and the disjunction/conjunction combinators.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{free_variables, substitute, Formula, FreshNames, Term, VarName};

/// `E bound . matrix` with a quantifier-free matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrenexFormula {
    pub bound: Vec<VarName>,
    pub matrix: Formula,
}

impl PrenexFormula {
    pub fn new(bound: Vec<VarName>, matrix: Formula) -> Self {
        PrenexFormula { bound, matrix }
    }

    pub fn quantifier_free(matrix: Formula) -> Self {
        PrenexFormula {
            bound: Vec::new(),
            matrix,
        }
    }

    pub fn count(&self) -> usize {
        self.bound.len()
    }

    pub fn to_formula(&self) -> Formula {
        Formula::exists(self.bound.clone(), self.matrix.clone())
    }

    pub fn free_variables(&self) -> Vec<VarName> {
        free_variables(&self.to_formula())
    }

    /// Reads a formula that is already of the shape `E ys . qf`.
    pub fn from_prenex_formula(f: &Formula) -> Option<Self> {
        let mut bound = Vec::new();
        let mut cur = f;
        while let Formula::Exists(vs, body) = cur {
            bound.extend(vs.iter().cloned());
            cur = body;
        }
        let distinct = bound
            .iter()
            .enumerate()
            .all(|(i, v)| !bound[..i].contains(v));
        (cur.is_quantifier_free() && distinct).then(|| PrenexFormula::new(bound, cur.clone()))
    }
}

impl fmt::Display for PrenexFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_formula())
    }
}

/// `y1, y2, ...` skipping the names in `avoid`.
fn canonical_block(count: usize, avoid: &[VarName]) -> Vec<VarName> {
    let mut fresh = FreshNames::avoiding(avoid.iter());
    (0..count).map(|_| fresh.fresh_indexed("y")).collect()
}

fn rename(matrix: &Formula, from: &[VarName], to: &[VarName]) -> Formula {
    let map: HashMap<VarName, Term> = from
        .iter()
        .zip(to)
        .filter(|(a, b)| a != b)
        .map(|(a, b)| (a.clone(), Term::Var(b.clone())))
        .collect();
    substitute(matrix, &map)
}

fn union(a: &[VarName], b: &[VarName]) -> Vec<VarName> {
    let mut out = a.to_vec();
    for v in b {
        if !out.contains(v) {
            out.push(v.clone());
        }
    }
    out
}

fn simplify_or(a: Formula, b: Formula) -> Formula {
    match (a, b) {
        (Formula::False, x) | (x, Formula::False) => x,
        (Formula::True, _) | (_, Formula::True) => Formula::True,
        (a, b) => Formula::or(a, b),
    }
}

fn simplify_and(a: Formula, b: Formula) -> Formula {
    match (a, b) {
        (Formula::True, x) | (x, Formula::True) => x,
        (Formula::False, _) | (_, Formula::False) => Formula::False,
        (a, b) => Formula::and(a, b),
    }
}

/// Shares the quantifier blocks of two disjuncts position by position; the
/// result has exactly `max(m1, m2)` bound variables.
pub fn merge_disjunction(f1: &PrenexFormula, f2: &PrenexFormula) -> PrenexFormula {
    let free = union(&f1.free_variables(), &f2.free_variables());
    let ys = canonical_block(f1.count().max(f2.count()), &free);
    let m1 = rename(&f1.matrix, &f1.bound, &ys[..f1.count()]);
    let m2 = rename(&f2.matrix, &f2.bound, &ys[..f2.count()]);
    PrenexFormula::new(ys, simplify_or(m1, m2))
}

/// Concatenates the quantifier blocks of two conjuncts; the result has
/// exactly `m1 + m2` bound variables.
pub fn merge_conjunction(f1: &PrenexFormula, f2: &PrenexFormula) -> PrenexFormula {
    let free = union(&f1.free_variables(), &f2.free_variables());
    let ys = canonical_block(f1.count() + f2.count(), &free);
    let m1 = rename(&f1.matrix, &f1.bound, &ys[..f1.count()]);
    let m2 = rename(&f2.matrix, &f2.bound, &ys[f1.count()..]);
    PrenexFormula::new(ys, simplify_and(m1, m2))
}

/// Puts `outer` in front of an already prenex body.
fn prefix_block(outer: &[VarName], inner: &PrenexFormula) -> PrenexFormula {
    let inner_free = inner.free_variables();
    let free: Vec<VarName> = inner_free
        .into_iter()
        .filter(|v| !outer.contains(v))
        .collect();
    let ys = canonical_block(outer.len() + inner.count(), &free);
    // inner binders shadow outer ones of the same name
    let mut map: HashMap<VarName, Term> = HashMap::new();
    for (v, y) in outer.iter().zip(&ys) {
        map.insert(v.clone(), Term::Var(y.clone()));
    }
    for (v, y) in inner.bound.iter().zip(&ys[outer.len()..]) {
        map.insert(v.clone(), Term::Var(y.clone()));
    }
    map.retain(|k, v| !matches!(v, Term::Var(n) if n == k));
    PrenexFormula::new(ys, substitute(&inner.matrix, &map))
}

/// Logically equivalent prenex form, sharing quantifiers across disjuncts.
pub fn to_prenex_existential(f: &Formula) -> Result<PrenexFormula> {
    if let Some(why) = f.existential_violation() {
        return Err(Error::NotExistential(why));
    }
    prenex_rec(f)
}

/// As [`to_prenex_existential`] but treating `<` atoms as ordinary atoms.
pub(crate) fn prenex_with_order(f: &Formula) -> Result<PrenexFormula> {
    prenex_rec(f)
}

fn prenex_rec(f: &Formula) -> Result<PrenexFormula> {
    Ok(match f {
        Formula::Eq(..) | Formula::Ne(..) | Formula::Lt(..) | Formula::True | Formula::False => {
            PrenexFormula::quantifier_free(f.clone())
        }
        Formula::Not(a) => {
            if a.is_quantifier_free() {
                PrenexFormula::quantifier_free(f.clone())
            } else {
                return Err(Error::NotExistential(format!("negation of `{a}`")));
            }
        }
        Formula::And(a, b) => merge_conjunction(&prenex_rec(a)?, &prenex_rec(b)?),
        Formula::Or(a, b) => merge_disjunction(&prenex_rec(a)?, &prenex_rec(b)?),
        Formula::Exists(vs, body) => prefix_block(vs, &prenex_rec(body)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn p(s: &str) -> Formula {
        parse_formula(s, false).unwrap()
    }

    fn pre(s: &str) -> PrenexFormula {
        to_prenex_existential(&p(s)).unwrap()
    }

    #[test]
    fn disjunction_shares() {
        let r = pre("(E y . x = y^2) | (E y . x = y^3)");
        assert_eq!(r.count(), 1);
        assert_eq!(r.to_string(), "E y1 . x = y1^2 | x = y1^3");
    }

    #[test]
    fn conjunction_concatenates() {
        let r = pre("(E y . x = y^2) & (E y . x = y^3)");
        assert_eq!(r.count(), 2);
        assert_eq!(r.to_string(), "E y1 y2 . x = y1^2 & x = y2^3");
    }

    #[test]
    fn quantifier_free_input() {
        let r = pre("x != 0 | x = 1");
        assert!(r.bound.is_empty());
        assert_eq!(r.matrix, p("x != 0 | x = 1"));
    }

    #[test]
    fn free_names_are_skipped() {
        let r = pre("E a . y1 = a^2 & (E b . y2 = b)");
        assert_eq!(r.to_string(), "E y3 y4 . y1 = y3^2 & y2 = y4");
    }

    #[test]
    fn shadowed_binders() {
        let r = pre("E a . E a . a = 0");
        assert_eq!(r.to_string(), "E y1 y2 . y2 = 0");
        let r = pre("E a . (a = 1 & (E a . a = 2))");
        assert_eq!(r.to_string(), "E y1 y2 . y1 = 1 & y2 = 2");
    }

    #[test]
    fn merges_count_exactly() {
        let a = pre("E y . x1 = y^2");
        let b = pre("E y1 y2 . x1 = y1^3 + y2^3");
        assert_eq!(merge_disjunction(&a, &b).count(), 2);
        assert_eq!(merge_conjunction(&a, &b).count(), 3);
        let f = PrenexFormula::quantifier_free(Formula::False);
        let m = merge_disjunction(&a, &f);
        assert_eq!(m.to_string(), "E y1 . x1 = y1^2");
        let pair = merge_conjunction(&a, &pre("E y . x2 = y^2"));
        assert_eq!(pair.to_string(), "E y1 y2 . x1 = y1^2 & x2 = y2^2");
    }

    #[test]
    fn rejects_non_existential() {
        assert!(to_prenex_existential(&p("!(E y . x = y^2)")).is_err());
    }
}
