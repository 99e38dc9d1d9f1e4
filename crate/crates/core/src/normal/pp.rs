//! Positive-primitive conversion and the single-equation fold.

use crate::error::{Error, Result};
use crate::field::{check_rootless_finite, FieldProfile, FiniteField, ProfileKind, ZPoly};
use crate::formula::{Formula, FreshNames, Term};

use super::prenex::PrenexFormula;

/// Default bound on the number of literal occurrences in a DNF.
pub const DEFAULT_DNF_LIMIT: usize = 100_000;

/// `a - b`, or `a` when `b` is the literal 0.
pub fn difference(a: &Term, b: &Term) -> Term {
    if b.is_int(0) {
        a.clone()
    } else {
        Term::sub(a.clone(), b.clone())
    }
}

/// True for a conjunction of equations (including the empty conjunction `T`).
pub fn is_positive_primitive_matrix(m: &Formula) -> bool {
    match m {
        Formula::True | Formula::Eq(..) => true,
        Formula::And(a, b) => is_positive_primitive_matrix(a) && is_positive_primitive_matrix(b),
        _ => false,
    }
}

/// The equations of a positive-primitive matrix as terms `f_i` meaning `f_i = 0`.
pub fn equations(m: &Formula) -> Result<Vec<Term>> {
    let mut out = Vec::new();
    collect_equations(m, &mut out)?;
    Ok(out)
}

fn collect_equations(m: &Formula, out: &mut Vec<Term>) -> Result<()> {
    match m {
        Formula::True => Ok(()),
        Formula::Eq(a, b) => {
            out.push(difference(a, b));
            Ok(())
        }
        Formula::And(a, b) => {
            collect_equations(a, out)?;
            collect_equations(b, out)
        }
        _ => Err(Error::NotPositivePrimitive(m.to_string())),
    }
}

/// Conjunction of `f_i = 0`; `T` for no equations.
pub fn equations_to_matrix(eqs: Vec<Term>) -> Formula {
    Formula::conj(eqs.into_iter().map(|t| Formula::eq(t, Term::zero())))
}

#[derive(Clone, Debug, Default)]
struct Disjunct {
    eqs: Vec<Term>,
    nes: Vec<Term>,
}

fn nnf(f: &Formula, negate: bool) -> Result<Formula> {
    Ok(match (f, negate) {
        (Formula::Eq(a, b), false) | (Formula::Ne(a, b), true) => Formula::Eq(a.clone(), b.clone()),
        (Formula::Ne(a, b), false) | (Formula::Eq(a, b), true) => Formula::Ne(a.clone(), b.clone()),
        (Formula::True, false) | (Formula::False, true) => Formula::True,
        (Formula::False, false) | (Formula::True, true) => Formula::False,
        (Formula::Not(a), n) => nnf(a, !n)?,
        (Formula::And(a, b), false) | (Formula::Or(a, b), true) => {
            Formula::and(nnf(a, negate)?, nnf(b, negate)?)
        }
        (Formula::Or(a, b), false) | (Formula::And(a, b), true) => {
            Formula::or(nnf(a, negate)?, nnf(b, negate)?)
        }
        (Formula::Lt(..), _) => {
            return Err(Error::InvalidConfig(
                "order atoms must be eliminated before positive-primitive conversion".into(),
            ))
        }
        (Formula::Exists(..), _) => {
            return Err(Error::NotExistential("quantifier inside a matrix".into()))
        }
    })
}

fn dnf(f: &Formula, limit: usize) -> Result<Vec<Disjunct>> {
    let size =
        |ds: &[Disjunct]| -> usize { ds.iter().map(|d| d.eqs.len() + d.nes.len() + 1).sum() };
    let out = match f {
        Formula::True => vec![Disjunct::default()],
        Formula::False => Vec::new(),
        Formula::Eq(a, b) => vec![Disjunct {
            eqs: vec![difference(a, b)],
            nes: Vec::new(),
        }],
        Formula::Ne(a, b) => vec![Disjunct {
            eqs: Vec::new(),
            nes: vec![difference(a, b)],
        }],
        Formula::Or(a, b) => {
            let mut l = dnf(a, limit)?;
            l.extend(dnf(b, limit)?);
            l
        }
        Formula::And(a, b) => {
            let l = dnf(a, limit)?;
            let r = dnf(b, limit)?;
            let est = l.len().saturating_mul(r.len());
            if est > limit {
                return Err(Error::DnfTooLarge(limit));
            }
            let mut out = Vec::with_capacity(est);
            for x in &l {
                for y in &r {
                    out.push(Disjunct {
                        eqs: x.eqs.iter().chain(&y.eqs).cloned().collect(),
                        nes: x.nes.iter().chain(&y.nes).cloned().collect(),
                    });
                }
                if size(&out) > limit {
                    return Err(Error::DnfTooLarge(limit));
                }
            }
            out
        }
        _ => unreachable!("input is in negation normal form"),
    };
    if size(&out) > limit {
        return Err(Error::DnfTooLarge(limit));
    }
    Ok(out)
}

/// Converts the matrix to a conjunction of equations `f_i = 0`, adding at
/// most one quantifier (a single inversion variable shared by all
/// disjuncts). Inputs whose matrix is already a conjunction of equations
/// are returned unchanged.
pub fn to_positive_primitive(f: &PrenexFormula, _profile: &FieldProfile) -> Result<PrenexFormula> {
    to_positive_primitive_with_limit(f, DEFAULT_DNF_LIMIT)
}

pub fn to_positive_primitive_with_limit(f: &PrenexFormula, limit: usize) -> Result<PrenexFormula> {
    if is_positive_primitive_matrix(&f.matrix) {
        return Ok(f.clone());
    }
    let disjuncts = dnf(&nnf(&f.matrix, false)?, limit)?;
    let mut bound = f.bound.clone();
    let needs_inverse = disjuncts.iter().any(|d| !d.nes.is_empty());
    let z = needs_inverse.then(|| {
        let names = f.to_formula().all_names();
        let mut fresh = FreshNames::avoiding(names.iter());
        let z = fresh.fresh("z");
        bound.push(z.clone());
        z
    });
    // each disjunct becomes a list of equations
    let blocks: Vec<Vec<Term>> = disjuncts
        .into_iter()
        .map(|d| {
            let mut eqs = d.eqs;
            if !d.nes.is_empty() {
                let g = Term::product(d.nes);
                let z = Term::Var(z.clone().unwrap());
                eqs.push(Term::sub(Term::mul(g, z), Term::one()));
            }
            eqs
        })
        .collect();
    // a disjunction of conjunctions: distribute with products
    let matrix = if blocks.is_empty() {
        Formula::eq(Term::one(), Term::zero())
    } else if blocks.iter().any(|b| b.is_empty()) {
        Formula::True
    } else {
        let mut acc: Vec<Term> = blocks[0].clone();
        for b in &blocks[1..] {
            if acc.len().saturating_mul(b.len()) > limit {
                return Err(Error::DnfTooLarge(limit));
            }
            acc = acc
                .iter()
                .flat_map(|x| b.iter().map(move |y| Term::mul(x.clone(), y.clone())))
                .collect();
        }
        equations_to_matrix(acc)
    };
    Ok(PrenexFormula::new(bound, matrix))
}

/// `g*(A, B) = sum_k g_k A^k B^(d-k)`, the homogenization of `g` at `(A, B)`.
pub fn homogenize(g: &ZPoly, a: &Term, b: &Term) -> Term {
    let d = g.degree();
    let mut acc: Option<Term> = None;
    for (k, c) in g.coeffs.iter().enumerate().rev() {
        if c.is_int(0) {
            continue;
        }
        let (neg, mag) = match c {
            Term::Int(n) if n.sign() == num_bigint::Sign::Minus => (true, Term::Int(-n)),
            Term::Sub(z, m) if z.is_int(0) => (true, m.as_ref().clone()),
            _ => (false, c.clone()),
        };
        let pa = Term::pow_simplified(a.clone(), k as u32);
        let pb = Term::pow_simplified(b.clone(), (d - k) as u32);
        let mono = Term::mul_simplified(Term::mul_simplified(mag, pa), pb);
        acc = Some(match (acc, neg) {
            (None, false) => mono,
            (None, true) => Term::sub(Term::zero(), mono),
            (Some(x), false) => Term::add(x, mono),
            (Some(x), true) => Term::sub(x, mono),
        });
    }
    acc.unwrap_or_else(Term::zero)
}

/// Folds the equations of a positive-primitive formula into one equation
/// using a polynomial `g` without roots. For finite profiles the absence of
/// roots is checked exhaustively.
pub fn to_single_equation(
    f: &PrenexFormula,
    g: &ZPoly,
    profile: &FieldProfile,
) -> Result<PrenexFormula> {
    let eqs = equations(&f.matrix)?;
    if g.degree() == 0 {
        return Err(Error::ConstantPolynomial);
    }
    if let ProfileKind::Finite { p, d } = profile.kind {
        check_rootless_finite(g, &FiniteField::new(p, d)?, &profile.name)?;
    }
    if eqs.len() <= 1 {
        return Ok(f.clone());
    }
    let mut it = eqs.into_iter();
    let first = it.next().unwrap();
    let folded = it.fold(first, |acc, next| homogenize(g, &acc, &next));
    Ok(PrenexFormula::new(
        f.bound.clone(),
        Formula::eq(folded, Term::zero()),
    ))
}
