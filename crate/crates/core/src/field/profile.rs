//! Field profiles: which structure or theory a formula is read in, and the
//! concrete model used to evaluate it.

use std::collections::HashMap;
use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::arith::{Arith, Rationals};
use super::gf::{prime_power, FiniteField, Fq};
use super::ratfunc::{FunctionField, RatFunc};
use super::rootless::ZPoly;
use crate::error::{Error, Result};
use crate::formula::{parse_fraction, ConstSym, Term, VarName};
use crate::semantics::engine::eval_term_with;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ProfileKind {
    Finite { p: u32, d: u32 },
    Rationals,
    RationalFunction { p: u32, d: u32 },
    AbstractChar { p: u32 },
    Rcf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CollapseMode {
    None,
    UfdPDivisibleUnits,
    General { r: u32 },
}

impl fmt::Display for CollapseMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CollapseMode::None => f.write_str("none"),
            CollapseMode::UfdPDivisibleUnits => f.write_str("ufd"),
            CollapseMode::General { r } => write!(f, "general(r={r})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldProfile {
    pub name: String,
    pub kind: ProfileKind,
    pub perfect: bool,
    pub has_order: bool,
    pub collapse_mode: CollapseMode,
    /// Overrides the default rootless polynomial.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rootless: Option<ZPoly>,
}

impl FieldProfile {
    fn build(name: String, kind: ProfileKind) -> Self {
        let (perfect, has_order, collapse_mode) = match kind {
            ProfileKind::Finite { .. } | ProfileKind::Rationals => {
                (true, false, CollapseMode::None)
            }
            ProfileKind::Rcf => (true, true, CollapseMode::None),
            ProfileKind::RationalFunction { .. } => {
                (false, false, CollapseMode::UfdPDivisibleUnits)
            }
            ProfileKind::AbstractChar { p } => (p == 0, false, CollapseMode::None),
        };
        FieldProfile {
            name,
            kind,
            perfect,
            has_order,
            collapse_mode,
            rootless: None,
        }
    }

    pub fn finite(q: u32) -> Result<Self> {
        let (p, d) = prime_power(q as u64)
            .ok_or_else(|| Error::InvalidProfile(format!("{q} is not a prime power")))?;
        Ok(Self::build(format!("F{q}"), ProfileKind::Finite { p, d }))
    }

    pub fn rational_function(q: u32) -> Result<Self> {
        let (p, d) = prime_power(q as u64)
            .ok_or_else(|| Error::InvalidProfile(format!("{q} is not a prime power")))?;
        Ok(Self::build(
            format!("F{q}t"),
            ProfileKind::RationalFunction { p, d },
        ))
    }

    pub fn rationals() -> Self {
        Self::build("Q".into(), ProfileKind::Rationals)
    }

    pub fn rcf() -> Self {
        Self::build("RCF".into(), ProfileKind::Rcf)
    }

    pub fn abstract_char(p: u32) -> Result<Self> {
        if p != 0 && prime_power(p as u64) != Some((p, 1)) {
            return Err(Error::InvalidProfile(format!(
                "characteristic {p} is not prime"
            )));
        }
        Ok(Self::build(
            format!("Char{p}"),
            ProfileKind::AbstractChar { p },
        ))
    }

    /// Parses `Q`, `RCF`, `F<q>`, `F<q>t` or `Char<p>`.
    pub fn parse(text: &str) -> Result<Self> {
        let s = text.trim();
        let bad = || Error::InvalidProfile(format!("unknown profile `{s}`"));
        match s {
            "Q" => return Ok(Self::rationals()),
            "RCF" => return Ok(Self::rcf()),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("Char") {
            return Self::abstract_char(rest.parse().map_err(|_| bad())?);
        }
        let rest = s.strip_prefix('F').ok_or_else(bad)?;
        if let Some(q) = rest.strip_suffix('t') {
            Self::rational_function(q.parse().map_err(|_| bad())?)
        } else {
            Self::finite(rest.parse().map_err(|_| bad())?)
        }
    }

    pub fn with_collapse_mode(mut self, mode: CollapseMode) -> Result<Self> {
        if let CollapseMode::General { r } = mode {
            let p = self.characteristic();
            if r == 0 || (p != 0 && r % p == 0) {
                return Err(Error::InvalidConfig(format!(
                    "r = {r} must be positive and prime to the characteristic {p}"
                )));
            }
        }
        self.collapse_mode = mode;
        Ok(self)
    }

    pub fn with_rootless(mut self, g: ZPoly) -> Self {
        self.rootless = Some(g);
        self
    }

    pub fn characteristic(&self) -> u32 {
        match self.kind {
            ProfileKind::Finite { p, .. }
            | ProfileKind::RationalFunction { p, .. }
            | ProfileKind::AbstractChar { p } => p,
            ProfileKind::Rationals | ProfileKind::Rcf => 0,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.kind, ProfileKind::Finite { .. })
    }

    /// The theory the profile's symbolic results are asserted in.
    pub fn theory_tag(&self) -> String {
        match self.kind {
            ProfileKind::Rcf => "RCF".into(),
            _ if self.characteristic() > 0 => format!("char_p({})", self.characteristic()),
            _ => "T_fields".into(),
        }
    }

    /// A concrete structure with exact arithmetic.
    pub fn model(&self) -> Result<Model> {
        match self.kind {
            ProfileKind::Finite { p, d } => Ok(Model::Finite(FiniteField::new(p, d)?)),
            ProfileKind::Rationals => Ok(Model::Rationals(Rationals)),
            ProfileKind::RationalFunction { p, d } => {
                Ok(Model::Function(FunctionField::new(FiniteField::new(p, d)?)))
            }
            ProfileKind::AbstractChar { .. } | ProfileKind::Rcf => Err(Error::UnsupportedProfile(
                format!("{} supports symbolic passes only", self.name),
            )),
        }
    }
}

impl fmt::Display for FieldProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Model {
    Finite(FiniteField),
    Rationals(Rationals),
    Function(FunctionField),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Element {
    Fq(Fq),
    Rat(BigRational),
    RatFunc(RatFunc),
}

fn literal_error(lit: &str, reason: impl Into<String>) -> Error {
    Error::InvalidLiteral {
        literal: lit.to_string(),
        reason: reason.into(),
    }
}

/// Parses a literal as a quotient of terms. `names` gives the meaning of
/// bare identifiers such as `a` and `t`.
pub fn parse_literal<A: Arith>(arith: &A, text: &str, names: &[&str]) -> Result<A::Elem> {
    let trimmed = text.trim();
    let inner = trimmed
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .unwrap_or(trimmed);
    let (num, den) = parse_fraction(inner).map_err(|e| literal_error(text, e.to_string()))?;
    let mut env = HashMap::new();
    for n in names {
        if let Some(v) = arith.named_constant(n) {
            env.insert(VarName::new(n), v);
        }
    }
    let consts = |c: &ConstSym| arith.named_constant(c.as_str());
    let eval = |t: &Term| {
        eval_term_with(arith, t, &env, &consts).map_err(|e| literal_error(text, e.to_string()))
    };
    let n = eval(&num)?;
    match den {
        None => Ok(n),
        Some(d) => {
            let d = eval(&d)?;
            let inv = arith
                .inv(&d)
                .ok_or_else(|| literal_error(text, "division by zero"))?;
            Ok(arith.mul(&n, &inv))
        }
    }
}

impl Model {
    pub fn parse_element(&self, text: &str) -> Result<Element> {
        Ok(match self {
            Model::Finite(f) => Element::Fq(parse_literal(f, text, &["a"])?),
            Model::Rationals(q) => Element::Rat(parse_literal(q, text, &[])?),
            Model::Function(k) => Element::RatFunc(parse_literal(k, text, &["t", "a"])?),
        })
    }

    pub fn format_element(&self, e: &Element) -> String {
        match (self, e) {
            (Model::Finite(f), Element::Fq(x)) => f.format(*x),
            (Model::Rationals(_), Element::Rat(x)) => x.to_string(),
            (Model::Function(k), Element::RatFunc(x)) => k.format(x),
            _ => format!("{e:?}"),
        }
    }

    /// Evaluates a term under an assignment of its variables.
    pub fn eval_term(&self, t: &Term, assignment: &HashMap<VarName, Element>) -> Result<Element> {
        fn unwrap<E: Clone>(
            a: &HashMap<VarName, Element>,
            pick: impl Fn(&Element) -> Option<E>,
        ) -> Result<HashMap<VarName, E>> {
            a.iter()
                .map(|(k, v)| {
                    pick(v)
                        .map(|x| (k.clone(), x))
                        .ok_or_else(|| Error::InvalidLiteral {
                            literal: k.to_string(),
                            reason: "element of another structure".into(),
                        })
                })
                .collect()
        }
        Ok(match self {
            Model::Finite(f) => {
                let env = unwrap(assignment, |e| match e {
                    Element::Fq(x) => Some(*x),
                    _ => None,
                })?;
                Element::Fq(eval_term_with(f, t, &env, &|c| {
                    f.named_constant(c.as_str())
                })?)
            }
            Model::Rationals(q) => {
                let env = unwrap(assignment, |e| match e {
                    Element::Rat(x) => Some(x.clone()),
                    _ => None,
                })?;
                Element::Rat(eval_term_with(q, t, &env, &|c| {
                    q.named_constant(c.as_str())
                })?)
            }
            Model::Function(k) => {
                let env = unwrap(assignment, |e| match e {
                    Element::RatFunc(x) => Some(x.clone()),
                    _ => None,
                })?;
                Element::RatFunc(eval_term_with(k, t, &env, &|c| {
                    k.named_constant(c.as_str())
                })?)
            }
        })
    }
}
