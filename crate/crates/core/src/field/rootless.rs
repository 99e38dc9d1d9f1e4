//! Univariate polynomials without roots in a given structure, used to fold
//! conjunctions of equations into a single equation.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::arith::Arith;
use super::gf::{FiniteField, Fq};
use super::profile::{FieldProfile, ProfileKind};
use crate::error::{Error, Result};
use crate::formula::{format_term, ConstSym, Term};

/// `g(Z) = sum_k coeffs[k] Z^k` with closed coefficient terms (integers and
/// named constants).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ZPoly {
    pub coeffs: Vec<Term>,
}

impl ZPoly {
    pub fn new(coeffs: Vec<Term>) -> Self {
        let mut coeffs = coeffs;
        while coeffs.last().is_some_and(|c| c.is_int(0)) {
            coeffs.pop();
        }
        ZPoly { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        ZPoly::new(c.iter().map(|&x| Term::int(x)).collect())
    }

    /// Degree; zero polynomial counts as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// The polynomial as a term in the variable `var`.
    pub fn to_term(&self, var: &str) -> Term {
        let mut acc: Option<Term> = None;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_int(0) {
                continue;
            }
            let (neg, mag) = match c {
                Term::Int(n) if n < &BigInt::from(0) => (true, Term::Int(-n)),
                Term::Sub(z, m) if z.is_int(0) => (true, m.as_ref().clone()),
                _ => (false, c.clone()),
            };
            let mono = match k {
                0 => mag,
                _ => Term::mul_simplified(mag, Term::pow_simplified(Term::var(var), k as u32)),
            };
            acc = Some(match (acc, neg) {
                (None, false) => mono,
                (None, true) => Term::sub(Term::zero(), mono),
                (Some(a), false) => Term::add(a, mono),
                (Some(a), true) => Term::sub(a, mono),
            });
        }
        acc.unwrap_or_else(Term::zero)
    }

    /// Coefficient values in a structure.
    pub fn values<A: Arith>(
        &self,
        arith: &A,
        consts: &dyn Fn(&ConstSym) -> Option<A::Elem>,
    ) -> Result<Vec<A::Elem>> {
        self.coeffs
            .iter()
            .map(|c| {
                crate::semantics::engine::eval_term_with(arith, c, &Default::default(), consts)
            })
            .collect()
    }

    /// Evaluates `g` at `z` by Horner's rule.
    pub fn eval_at<A: Arith>(arith: &A, coeffs: &[A::Elem], z: &A::Elem) -> A::Elem {
        coeffs
            .iter()
            .rev()
            .fold(arith.zero(), |acc, c| arith.add(&arith.mul(&acc, z), c))
    }
}

impl std::fmt::Display for ZPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&format_term(&self.to_term("Z")))
    }
}

/// A closed term denoting a finite field element: an integer for prime
/// fields, a polynomial in the constant `a` otherwise.
pub fn element_term(field: &FiniteField, x: Fq) -> Term {
    let c = field.coefficients(x);
    if field.degree() == 1 {
        return Term::int(c[0] as i64);
    }
    let terms: Vec<Term> = c
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != 0)
        .map(|(i, &v)| {
            let mono = Term::pow_simplified(Term::constant("a"), i as u32);
            if i == 0 {
                Term::int(v as i64)
            } else {
                Term::mul_simplified(Term::int(v as i64), mono)
            }
        })
        .collect();
    if terms.is_empty() {
        Term::zero()
    } else {
        Term::sum(terms)
    }
}

/// The first monic quadratic `Z^2 + bZ + c`, in lexicographic order of
/// `(b, c)`, with no root in `field`.
pub fn rootless_quadratic(field: &FiniteField) -> (Fq, Fq) {
    for b in field.elements() {
        for c in field.elements() {
            let has_root = field.elements().any(|z| {
                field
                    .add(field.add(field.mul(z, z), field.mul(b, z)), c)
                    .is_zero()
            });
            if !has_root {
                return (b, c);
            }
        }
    }
    unreachable!("every finite field has an irreducible quadratic")
}

/// A polynomial without roots in the profile's structure.
pub fn rootless_default(profile: &FieldProfile) -> Result<ZPoly> {
    if let Some(g) = &profile.rootless {
        return Ok(g.clone());
    }
    match profile.kind {
        ProfileKind::Rationals | ProfileKind::Rcf => Ok(ZPoly::from_ints(&[1, 0, 1])),
        ProfileKind::Finite { p, d } => {
            let f = FiniteField::new(p, d)?;
            let (b, c) = rootless_quadratic(&f);
            Ok(ZPoly::new(vec![
                element_term(&f, c),
                element_term(&f, b),
                Term::one(),
            ]))
        }
        ProfileKind::RationalFunction { p, .. } => {
            let t = Term::constant("t");
            if p == 2 {
                Ok(ZPoly::new(vec![t, Term::one(), Term::one()]))
            } else {
                Ok(ZPoly::new(vec![
                    Term::sub(Term::zero(), t),
                    Term::zero(),
                    Term::one(),
                ]))
            }
        }
        ProfileKind::AbstractChar { .. } => Err(Error::UnsupportedProfile(format!(
            "no canonical rootless polynomial for {}",
            profile.name
        ))),
    }
}

/// Exhaustive root check over a finite field.
pub fn check_rootless_finite(g: &ZPoly, field: &FiniteField, profile_name: &str) -> Result<()> {
    if g.degree() == 0 {
        return Err(Error::ConstantPolynomial);
    }
    let consts = |c: &ConstSym| field.named_constant(c.as_str());
    let cs = g.values(field, &consts)?;
    if cs.iter().skip(1).all(|c| c.is_zero()) {
        return Err(Error::ConstantPolynomial);
    }
    for z in field.elements() {
        if ZPoly::eval_at(field, &cs, &z).is_zero() {
            return Err(Error::HasRoot {
                poly: g.to_string(),
                root: field.format(z),
                profile: profile_name.to_string(),
            });
        }
    }
    Ok(())
}
