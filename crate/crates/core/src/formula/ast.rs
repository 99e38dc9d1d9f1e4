//! Terms and formulas of the language of rings extended with constant symbols.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

/// A variable name. Cheap to clone.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VarName(Arc<str>);

impl VarName {
    pub fn new(name: impl AsRef<str>) -> Self {
        let name = name.as_ref();
        debug_assert!(!name.is_empty());
        VarName(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for VarName {
    fn from(s: &str) -> Self {
        VarName::new(s)
    }
}

/// A constant symbol, written `c:<name>` in the concrete syntax.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConstSym(Arc<str>);

impl ConstSym {
    pub fn new(name: impl AsRef<str>) -> Self {
        ConstSym(Arc::from(name.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for ConstSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c:{}", self.0)
    }
}

impl fmt::Display for ConstSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A ring term. Subterms are reference counted so that large constructions
/// (nested substitutions) can share structure.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Term {
    Var(VarName),
    Const(ConstSym),
    Int(BigInt),
    Add(Arc<Term>, Arc<Term>),
    Sub(Arc<Term>, Arc<Term>),
    Mul(Arc<Term>, Arc<Term>),
    Pow(Arc<Term>, u32),
}

impl Term {
    pub fn var(name: impl AsRef<str>) -> Term {
        Term::Var(VarName::new(name))
    }

    pub fn constant(name: impl AsRef<str>) -> Term {
        Term::Const(ConstSym::new(name))
    }

    pub fn int(n: impl Into<BigInt>) -> Term {
        Term::Int(n.into())
    }

    pub fn zero() -> Term {
        Term::int(0)
    }

    pub fn one() -> Term {
        Term::int(1)
    }

    pub fn add(a: Term, b: Term) -> Term {
        Term::Add(Arc::new(a), Arc::new(b))
    }

    pub fn sub(a: Term, b: Term) -> Term {
        Term::Sub(Arc::new(a), Arc::new(b))
    }

    pub fn mul(a: Term, b: Term) -> Term {
        Term::Mul(Arc::new(a), Arc::new(b))
    }

    pub fn pow(a: Term, e: u32) -> Term {
        Term::Pow(Arc::new(a), e)
    }

    pub fn is_int(&self, n: i64) -> bool {
        matches!(self, Term::Int(v) if *v == BigInt::from(n))
    }

    /// Product that skips multiplication by the literal 1.
    pub fn mul_simplified(a: Term, b: Term) -> Term {
        if a.is_int(1) {
            b
        } else if b.is_int(1) {
            a
        } else {
            Term::mul(a, b)
        }
    }

    /// Power that folds exponents 0 and 1.
    pub fn pow_simplified(a: Term, e: u32) -> Term {
        match e {
            0 => Term::one(),
            1 => a,
            _ => Term::pow(a, e),
        }
    }

    /// Sum of a list of terms, left associated; empty sums are 0.
    pub fn sum(terms: impl IntoIterator<Item = Term>) -> Term {
        terms
            .into_iter()
            .reduce(Term::add)
            .unwrap_or_else(Term::zero)
    }

    /// Product of a list of terms, left associated; empty products are 1.
    pub fn product(terms: impl IntoIterator<Item = Term>) -> Term {
        terms
            .into_iter()
            .reduce(Term::mul)
            .unwrap_or_else(Term::one)
    }

    /// Number of nodes of the term viewed as a tree (shared subterms counted
    /// once per occurrence). Saturates at `u64::MAX`.
    pub fn tree_size(&self) -> u64 {
        match self {
            Term::Var(_) | Term::Const(_) | Term::Int(_) => 1,
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => 1u64
                .saturating_add(a.tree_size())
                .saturating_add(b.tree_size()),
            Term::Pow(a, _) => 1u64.saturating_add(a.tree_size()),
        }
    }

    pub fn visit_vars<'a>(&'a self, out: &mut dyn FnMut(&'a VarName)) {
        match self {
            Term::Var(v) => out(v),
            Term::Const(_) | Term::Int(_) => {}
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => {
                a.visit_vars(out);
                b.visit_vars(out);
            }
            Term::Pow(a, _) => a.visit_vars(out),
        }
    }

    pub fn visit_consts<'a>(&'a self, out: &mut dyn FnMut(&'a ConstSym)) {
        match self {
            Term::Const(c) => out(c),
            Term::Var(_) | Term::Int(_) => {}
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => {
                a.visit_consts(out);
                b.visit_consts(out);
            }
            Term::Pow(a, _) => a.visit_consts(out),
        }
    }

    /// Variables in first-occurrence order, without duplicates.
    pub fn variables(&self) -> Vec<VarName> {
        let mut out: Vec<VarName> = Vec::new();
        self.visit_vars(&mut |v| {
            if !out.contains(v) {
                out.push(v.clone());
            }
        });
        out
    }

    pub fn mentions(&self, var: &VarName) -> bool {
        let mut found = false;
        self.visit_vars(&mut |v| found |= v == var);
        found
    }

    /// Replaces variables according to `map`, sharing untouched subterms.
    pub fn replace_vars(&self, map: &dyn Fn(&VarName) -> Option<Term>) -> Term {
        match self {
            Term::Var(v) => map(v).unwrap_or_else(|| self.clone()),
            Term::Const(_) | Term::Int(_) => self.clone(),
            Term::Add(a, b) => Term::add(a.replace_vars(map), b.replace_vars(map)),
            Term::Sub(a, b) => Term::sub(a.replace_vars(map), b.replace_vars(map)),
            Term::Mul(a, b) => Term::mul(a.replace_vars(map), b.replace_vars(map)),
            Term::Pow(a, e) => Term::pow(a.replace_vars(map), *e),
        }
    }

    /// Replaces constants according to `map`.
    pub fn replace_consts(&self, map: &dyn Fn(&ConstSym) -> Option<Term>) -> Term {
        match self {
            Term::Const(c) => map(c).unwrap_or_else(|| self.clone()),
            Term::Var(_) | Term::Int(_) => self.clone(),
            Term::Add(a, b) => Term::add(a.replace_consts(map), b.replace_consts(map)),
            Term::Sub(a, b) => Term::sub(a.replace_consts(map), b.replace_consts(map)),
            Term::Mul(a, b) => Term::mul(a.replace_consts(map), b.replace_consts(map)),
            Term::Pow(a, e) => Term::pow(a.replace_consts(map), *e),
        }
    }
}

/// A formula of the language of rings. `Lt` is only produced by the parser
/// when order is enabled.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formula {
    Eq(Term, Term),
    Ne(Term, Term),
    Lt(Term, Term),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    Exists(Vec<VarName>, Box<Formula>),
    True,
    False,
}

impl Formula {
    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    pub fn ne(a: Term, b: Term) -> Formula {
        Formula::Ne(a, b)
    }

    pub fn lt(a: Term, b: Term) -> Formula {
        Formula::Lt(a, b)
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Formula {
        Formula::Not(Box::new(a))
    }

    /// `∃ vars . body`; an empty variable list yields `body` itself.
    pub fn exists(vars: Vec<VarName>, body: Formula) -> Formula {
        if vars.is_empty() {
            body
        } else {
            Formula::Exists(vars, Box::new(body))
        }
    }

    /// Left-associated conjunction; the empty conjunction is `T`.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Formula {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Left-associated disjunction; the empty disjunction is `F`.
    pub fn disj(items: impl IntoIterator<Item = Formula>) -> Formula {
        items
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::False)
    }

    pub fn is_atom(&self) -> bool {
        matches!(
            self,
            Formula::Eq(..) | Formula::Ne(..) | Formula::Lt(..) | Formula::True | Formula::False
        )
    }

    /// True iff the formula contains no `<` and every negation applies to an
    /// atom. Computed on demand.
    pub fn is_existential(&self) -> bool {
        self.existential_violation().is_none()
    }

    /// Describes the first reason the formula is not existential.
    pub fn existential_violation(&self) -> Option<String> {
        match self {
            Formula::Lt(..) => Some("contains an order atom".into()),
            Formula::Eq(..) | Formula::Ne(..) | Formula::True | Formula::False => None,
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Lt(..) => Some("contains an order atom".into()),
                a if a.is_atom() => None,
                _ => Some("negation applied to a non-atomic formula".into()),
            },
            Formula::And(a, b) | Formula::Or(a, b) => a
                .existential_violation()
                .or_else(|| b.existential_violation()),
            Formula::Exists(_, body) => body.existential_violation(),
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Exists(..) => false,
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.is_quantifier_free() && b.is_quantifier_free()
            }
            Formula::Not(a) => a.is_quantifier_free(),
            _ => true,
        }
    }

    pub fn contains_order(&self) -> bool {
        match self {
            Formula::Lt(..) => true,
            Formula::Eq(..) | Formula::Ne(..) | Formula::True | Formula::False => false,
            Formula::And(a, b) | Formula::Or(a, b) => a.contains_order() || b.contains_order(),
            Formula::Not(a) | Formula::Exists(_, a) => a.contains_order(),
        }
    }

    /// Number of nodes of the formula tree including term nodes.
    pub fn tree_size(&self) -> u64 {
        match self {
            Formula::Eq(a, b) | Formula::Ne(a, b) | Formula::Lt(a, b) => 1u64
                .saturating_add(a.tree_size())
                .saturating_add(b.tree_size()),
            Formula::And(a, b) | Formula::Or(a, b) => 1u64
                .saturating_add(a.tree_size())
                .saturating_add(b.tree_size()),
            Formula::Not(a) | Formula::Exists(_, a) => 1u64.saturating_add(a.tree_size()),
            Formula::True | Formula::False => 1,
        }
    }

    /// Calls `out` on every term occurring in an atom.
    pub fn visit_terms<'a>(&'a self, out: &mut dyn FnMut(&'a Term)) {
        match self {
            Formula::Eq(a, b) | Formula::Ne(a, b) | Formula::Lt(a, b) => {
                out(a);
                out(b);
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.visit_terms(out);
                b.visit_terms(out);
            }
            Formula::Not(a) | Formula::Exists(_, a) => a.visit_terms(out),
            Formula::True | Formula::False => {}
        }
    }

    /// All variable names occurring anywhere (free, bound or binder).
    pub fn all_names(&self) -> Vec<VarName> {
        let mut out: Vec<VarName> = Vec::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut Vec<VarName>) {
        match self {
            Formula::Eq(a, b) | Formula::Ne(a, b) | Formula::Lt(a, b) => {
                for t in [a, b] {
                    t.visit_vars(&mut |v| {
                        if !out.contains(v) {
                            out.push(v.clone());
                        }
                    });
                }
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_names(out);
                b.collect_names(out);
            }
            Formula::Not(a) => a.collect_names(out),
            Formula::Exists(vs, a) => {
                for v in vs {
                    if !out.contains(v) {
                        out.push(v.clone());
                    }
                }
                a.collect_names(out);
            }
            Formula::True | Formula::False => {}
        }
    }

    /// Constant symbols in first-occurrence order.
    pub fn constants(&self) -> Vec<ConstSym> {
        let mut out: Vec<ConstSym> = Vec::new();
        self.visit_terms(&mut |t| {
            t.visit_consts(&mut |c| {
                if !out.contains(c) {
                    out.push(c.clone());
                }
            })
        });
        out
    }

    /// Applies `f` to every term of every atom, keeping the formula shape.
    pub fn map_terms(&self, f: &dyn Fn(&Term) -> Term) -> Formula {
        match self {
            Formula::Eq(a, b) => Formula::Eq(f(a), f(b)),
            Formula::Ne(a, b) => Formula::Ne(f(a), f(b)),
            Formula::Lt(a, b) => Formula::Lt(f(a), f(b)),
            Formula::And(a, b) => Formula::and(a.map_terms(f), b.map_terms(f)),
            Formula::Or(a, b) => Formula::or(a.map_terms(f), b.map_terms(f)),
            Formula::Not(a) => Formula::not(a.map_terms(f)),
            Formula::Exists(vs, a) => Formula::Exists(vs.clone(), Box::new(a.map_terms(f))),
            Formula::True => Formula::True,
            Formula::False => Formula::False,
        }
    }
}
