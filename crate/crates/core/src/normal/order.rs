//! Elimination of order atoms in real closed fields, where `0 <= s` iff `s`
//! is a square.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::formula::{free_variables, Formula, FreshNames, Term, VarName};

use super::pp::difference;
use super::prenex::{prenex_with_order, PrenexFormula};

/// A caller-certified formula with one quantifier defining the `n`-tuples
/// of squares, over the listed free variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareTuple {
    pub vars: Vec<VarName>,
    pub formula: PrenexFormula,
}

impl SquareTuple {
    pub fn new(vars: Vec<VarName>, formula: PrenexFormula) -> Result<Self> {
        if formula.count() != 1 {
            return Err(Error::InvalidConfig(format!(
                "square-tuple formula must have exactly one quantifier, found {}",
                formula.count()
            )));
        }
        if let Some(v) = formula.free_variables().iter().find(|v| !vars.contains(v)) {
            return Err(Error::UnknownVariable(v.to_string()));
        }
        Ok(SquareTuple { vars, formula })
    }
}

pub fn count_order_atoms(f: &Formula) -> usize {
    match f {
        Formula::Lt(..) => 1,
        Formula::And(a, b) | Formula::Or(a, b) => count_order_atoms(a) + count_order_atoms(b),
        Formula::Not(a) | Formula::Exists(_, a) => count_order_atoms(a),
        _ => 0,
    }
}

/// Replaces `x < y` by `E z . (y - x = z^2 & !(x = y))` and `!(x < y)` by
/// `E z . x - y = z^2`. Without `square_tuple` every order atom costs one
/// quantifier; with it the whole pass costs exactly one.
pub fn eliminate_order(
    f: &Formula,
    has_order: bool,
    square_tuple: Option<&SquareTuple>,
) -> Result<Formula> {
    let n = count_order_atoms(f);
    if n == 0 {
        return Ok(f.clone());
    }
    if !has_order {
        return Err(Error::UnsupportedProfile(
            "order atoms need a profile with order".into(),
        ));
    }
    match square_tuple {
        None => {
            let names = f.all_names();
            let mut fresh = FreshNames::avoiding(names.iter());
            replace_each(f, &mut fresh)
        }
        Some(psi) => route_through(f, psi),
    }
}

fn replace_each(f: &Formula, fresh: &mut FreshNames) -> Result<Formula> {
    Ok(match f {
        Formula::Lt(a, b) => {
            let z = fresh.fresh("z");
            Formula::exists(
                vec![z.clone()],
                Formula::and(
                    Formula::eq(difference(b, a), Term::pow(Term::Var(z), 2)),
                    Formula::not(Formula::eq(a.clone(), b.clone())),
                ),
            )
        }
        Formula::Not(inner) => match inner.as_ref() {
            Formula::Lt(a, b) => {
                let z = fresh.fresh("z");
                Formula::exists(
                    vec![z.clone()],
                    Formula::eq(difference(a, b), Term::pow(Term::Var(z), 2)),
                )
            }
            g if count_order_atoms(g) == 0 => f.clone(),
            _ => {
                return Err(Error::NotExistential(format!(
                    "order atom under negation of `{inner}`"
                )))
            }
        },
        Formula::And(a, b) => Formula::and(replace_each(a, fresh)?, replace_each(b, fresh)?),
        Formula::Or(a, b) => Formula::or(replace_each(a, fresh)?, replace_each(b, fresh)?),
        Formula::Exists(vs, body) => {
            Formula::Exists(vs.clone(), Box::new(replace_each(body, fresh)?))
        }
        _ => f.clone(),
    })
}

/// Collects the order literals of a quantifier-free matrix as
/// `(a, b, positive)` for `a < b` or `!(a < b)`.
fn order_literals(m: &Formula, out: &mut Vec<(Term, Term, bool)>) -> Result<()> {
    match m {
        Formula::Lt(a, b) => out.push((a.clone(), b.clone(), true)),
        Formula::Not(inner) => match inner.as_ref() {
            Formula::Lt(a, b) => out.push((a.clone(), b.clone(), false)),
            g if count_order_atoms(g) == 0 => {}
            _ => {
                return Err(Error::NotExistential(format!(
                    "order atom under negation of `{inner}`"
                )))
            }
        },
        Formula::And(a, b) | Formula::Or(a, b) => {
            order_literals(a, out)?;
            order_literals(b, out)?;
        }
        _ => {}
    }
    Ok(())
}

/// The matrix with the `i`-th order literal decided by the sign pattern:
/// sign `+` means `b - a` is a square, sign `-` means `a - b` is one.
fn specialise(m: &Formula, signs: &[bool], next: &mut usize) -> Formula {
    match m {
        Formula::Lt(a, b) => {
            let plus = signs[*next];
            *next += 1;
            if plus {
                Formula::ne(a.clone(), b.clone())
            } else {
                Formula::False
            }
        }
        Formula::Not(inner) if matches!(inner.as_ref(), Formula::Lt(..)) => {
            let Formula::Lt(a, b) = inner.as_ref() else {
                unreachable!()
            };
            let plus = signs[*next];
            *next += 1;
            if plus {
                Formula::eq(a.clone(), b.clone())
            } else {
                Formula::True
            }
        }
        Formula::And(a, b) => Formula::and(specialise(a, signs, next), specialise(b, signs, next)),
        Formula::Or(a, b) => Formula::or(specialise(a, signs, next), specialise(b, signs, next)),
        _ => m.clone(),
    }
}

/// Maximum number of order atoms routed through a square-tuple formula.
pub const MAX_ROUTED_ATOMS: usize = 16;

fn route_through(f: &Formula, psi: &SquareTuple) -> Result<Formula> {
    let pre = prenex_with_order(f)?;
    let mut lits = Vec::new();
    order_literals(&pre.matrix, &mut lits)?;
    let n = lits.len();
    if n != psi.vars.len() {
        return Err(Error::InvalidConfig(format!(
            "square-tuple formula has {} variables but there are {n} order atoms",
            psi.vars.len()
        )));
    }
    if n > MAX_ROUTED_ATOMS {
        return Err(Error::InvalidConfig(format!(
            "at most {MAX_ROUTED_ATOMS} order atoms can be routed, found {n}"
        )));
    }
    let mut names = pre.to_formula().all_names();
    names.extend(free_variables(f));
    names.extend(psi.formula.to_formula().all_names());
    names.extend(psi.vars.iter().cloned());
    let mut fresh = FreshNames::avoiding(names.iter());
    let w = fresh.fresh("w");
    let psi_matrix = {
        let map: HashMap<VarName, Term> =
            std::iter::once((psi.formula.bound[0].clone(), Term::Var(w.clone()))).collect();
        crate::formula::substitute(&psi.formula.matrix, &map)
    };
    let mut branches = Vec::with_capacity(1 << n);
    for mask in 0..(1u32 << n) {
        let signs: Vec<bool> = (0..n).map(|i| mask & (1 << (n - 1 - i)) == 0).collect();
        let map: HashMap<VarName, Term> = psi
            .vars
            .iter()
            .zip(&lits)
            .zip(&signs)
            .map(|((v, (a, b, _)), &plus)| {
                let s = if plus {
                    difference(b, a)
                } else {
                    difference(a, b)
                };
                (v.clone(), s)
            })
            .collect();
        let guard = crate::formula::substitute(&psi_matrix, &map);
        let mut next = 0;
        branches.push(Formula::and(
            guard,
            specialise(&pre.matrix, &signs, &mut next),
        ));
    }
    let mut bound = pre.bound.clone();
    bound.push(w);
    Ok(Formula::exists(bound, Formula::disj(branches)))
}
