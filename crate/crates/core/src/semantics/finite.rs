//! Exhaustive semantics over finite fields.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::engine::{Compiler, Evaluator};
use super::state_cap;
use crate::error::{Error, Result};
use crate::field::{Arith, FieldProfile, FiniteField, Fq, ProfileKind};
use crate::formula::{free_variables, raw_quantifier_count, ConstSym, Formula, VarName};

/// A finite field together with its enumeration, every quantifier ranging
/// over all of it.
#[derive(Clone, Debug)]
pub struct FiniteStructure {
    pub name: String,
    pub field: FiniteField,
    elements: Vec<Fq>,
    cap: u64,
    extra_consts: HashMap<ConstSym, Fq>,
}

impl FiniteStructure {
    pub fn new(field: FiniteField) -> Self {
        let elements = field.elements().collect();
        FiniteStructure {
            name: format!("F{}", field.size()),
            field,
            elements,
            cap: state_cap(),
            extra_consts: HashMap::new(),
        }
    }

    pub fn of_size(q: u32) -> Result<Self> {
        Self::from_profile(&FieldProfile::finite(q)?)
    }

    pub fn from_profile(profile: &FieldProfile) -> Result<Self> {
        match profile.kind {
            ProfileKind::Finite { p, d } => Ok(Self::new(FiniteField::new(p, d)?)),
            _ => Err(Error::UnsupportedProfile(format!(
                "{} is not a finite field",
                profile.name
            ))),
        }
    }

    /// Overrides the state-space cap.
    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    /// Interprets extra constant symbols (for example promoted variables).
    pub fn with_constants(mut self, consts: HashMap<ConstSym, Fq>) -> Self {
        self.extra_consts = consts;
        self
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn elements(&self) -> &[Fq] {
        &self.elements
    }

    pub fn size(&self) -> u32 {
        self.field.size()
    }

    pub fn format(&self, x: Fq) -> String {
        self.field.format(x)
    }

    pub fn parse_element(&self, text: &str) -> Result<Fq> {
        crate::field::parse_literal(&self.field, text, &["a"])
    }

    pub(crate) fn constant(&self, c: &ConstSym) -> Option<Fq> {
        self.extra_consts
            .get(c)
            .copied()
            .or_else(|| self.field.named_constant(c.as_str()))
    }

    /// Checks `q^(free + bound)` against the cap.
    pub fn check_states(&self, free: usize, bound: usize) -> Result<()> {
        let q = self.size() as u128;
        let requested = q.saturating_pow((free + bound) as u32);
        if requested > self.cap as u128 {
            return Err(Error::CapExceeded {
                requested,
                cap: self.cap,
            });
        }
        Ok(())
    }

    /// All `n`-tuples in enumeration order (first coordinate slowest).
    pub fn tuple(&self, mut index: u64, n: usize) -> Vec<Fq> {
        let q = self.elements.len() as u64;
        let mut out = vec![Fq::ZERO; n];
        for slot in out.iter_mut().rev() {
            *slot = self.elements[(index % q) as usize];
            index /= q;
        }
        out
    }
}

/// The tuples of a finite field satisfying a formula, in enumeration order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DefinableSet {
    pub vars: Vec<VarName>,
    pub tuples: Vec<Vec<Fq>>,
}

impl DefinableSet {
    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, t: &[Fq]) -> bool {
        self.tuples.iter().any(|x| x == t)
    }

    /// Single-variable sets as a list of raw element codes.
    pub fn codes(&self) -> Vec<u32> {
        self.tuples
            .iter()
            .flat_map(|t| t.iter().map(|x| x.0))
            .collect()
    }

    pub fn render(&self, s: &FiniteStructure) -> Vec<String> {
        self.tuples
            .iter()
            .map(|t| {
                let parts: Vec<String> = t.iter().map(|&x| s.format(x)).collect();
                if parts.len() == 1 {
                    parts[0].clone()
                } else {
                    format!("({})", parts.join(", "))
                }
            })
            .collect()
    }
}

/// Truth of `f` under an assignment of its free variables.
pub fn eval_formula_finite(
    f: &Formula,
    assignment: &HashMap<VarName, Fq>,
    s: &FiniteStructure,
) -> Result<bool> {
    let free = free_variables(f);
    s.check_states(0, raw_quantifier_count(f))?;
    let consts = |c: &ConstSym| s.constant(c);
    let mut comp = Compiler::new(&s.field, &consts, &free);
    let cf = comp.formula(f)?;
    let prog = comp.finish();
    let mut ev = Evaluator::new(&s.field, &prog, s.elements());
    for (i, v) in free.iter().enumerate() {
        let x = assignment
            .get(v)
            .ok_or_else(|| Error::MissingAssignment(v.to_string()))?;
        ev.set(i as u32, *x);
    }
    Ok(ev.holds(&cf))
}

/// The set defined by `f`, over its free variables in first-occurrence order.
pub fn definable_set(f: &Formula, s: &FiniteStructure) -> Result<DefinableSet> {
    definable_set_over(f, &free_variables(f), s)
}

/// The set defined by `f` as a subset of `F_q^vars`; `vars` must include
/// every free variable of `f` and may list extra (unconstrained) ones.
pub fn definable_set_over(
    f: &Formula,
    vars: &[VarName],
    s: &FiniteStructure,
) -> Result<DefinableSet> {
    if let Some(v) = free_variables(f).into_iter().find(|v| !vars.contains(v)) {
        return Err(Error::MissingAssignment(v.to_string()));
    }
    let n = vars.len();
    s.check_states(n, raw_quantifier_count(f))?;
    let consts = |c: &ConstSym| s.constant(c);
    let mut comp = Compiler::new(&s.field, &consts, vars);
    let cf = comp.formula(f)?;
    let prog = comp.finish();
    let total = (s.size() as u64).pow(n as u32);
    let hits: Vec<u64> = (0..total)
        .into_par_iter()
        .map_init(
            || Evaluator::new(&s.field, &prog, s.elements()),
            |ev, idx| {
                for (i, x) in s.tuple(idx, n).into_iter().enumerate() {
                    ev.set(i as u32, x);
                }
                ev.holds(&cf).then_some(idx)
            },
        )
        .flatten()
        .collect();
    Ok(DefinableSet {
        vars: vars.to_vec(),
        tuples: hits.into_iter().map(|i| s.tuple(i, n)).collect(),
    })
}

/// A subfield of a finite structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubStructure {
    pub elements: Vec<Fq>,
    pub size: u32,
    /// `size = p^degree`.
    pub degree: u32,
}

/// The subfield generated by `gens`: the closure of `gens ∪ {0, 1}` under
/// the ring operations. In `F_{p^d}` this is `F_{p^e}` for the least `e | d`
/// such that every generator is fixed by `x -> x^(p^e)`.
pub fn generated_subfield(s: &FiniteStructure, gens: &[Fq]) -> SubStructure {
    let f = &s.field;
    let (p, d) = (f.characteristic(), f.degree());
    let e = (1..=d)
        .filter(|e| d % e == 0)
        .find(|&e| {
            let pe = (p as u64).pow(e);
            gens.iter().all(|&x| f.pow(x, pe) == x)
        })
        .unwrap_or(d);
    let pe = (p as u64).pow(e);
    let elements: Vec<Fq> = s
        .elements()
        .iter()
        .copied()
        .filter(|&x| f.pow(x, pe) == x)
        .collect();
    SubStructure {
        size: elements.len() as u32,
        elements,
        degree: e,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use std::collections::BTreeSet;

    fn set(f: &str, q: u32) -> Vec<u32> {
        let s = FiniteStructure::of_size(q).unwrap();
        definable_set(&parse_formula(f, false).unwrap(), &s)
            .unwrap()
            .codes()
    }

    #[test]
    fn squares_and_cubes() {
        assert_eq!(set("E y . x = y^2", 5), vec![0, 1, 4]);
        assert_eq!(set("E y . x = y^2", 7), vec![0, 1, 2, 4]);
        assert_eq!(set("E y . x = y^3", 4), vec![0, 1]);
        assert_eq!(set("F | x = x & F", 3), Vec::<u32>::new());
    }

    #[test]
    fn point_evaluation() {
        let s = FiniteStructure::of_size(5).unwrap();
        let f = parse_formula("E y . x = y^2", false).unwrap();
        let at = |v: i64| {
            let mut a = HashMap::new();
            a.insert(VarName::new("x"), s.field.from_i64(v));
            eval_formula_finite(&f, &a, &s).unwrap()
        };
        assert!(at(4));
        assert!(!at(2));
        assert!(!eval_formula_finite(&Formula::False, &HashMap::new(), &s).unwrap());
        assert!(matches!(
            eval_formula_finite(&f, &HashMap::new(), &s),
            Err(Error::MissingAssignment(_))
        ));
    }

    #[test]
    fn two_point_truth_tables() {
        let s = FiniteStructure::of_size(2).unwrap();
        for text in [
            "x = 0",
            "x != 0 | x = 1",
            "E y . x*y = 1",
            "E y z . x = y*z + 1",
        ] {
            let f = parse_formula(text, false).unwrap();
            let ds = definable_set(&f, &s).unwrap();
            for x in [0u32, 1] {
                let mut a = HashMap::new();
                a.insert(VarName::new("x"), Fq(x));
                let truth = eval_formula_finite(&f, &a, &s).unwrap();
                assert_eq!(ds.contains(&[Fq(x)]), truth, "{text} at {x}");
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let s = FiniteStructure::of_size(7).unwrap().with_cap(100);
        let f = parse_formula("E y . x1 + x2 + x3 = y", false).unwrap();
        assert!(matches!(
            definable_set(&f, &s),
            Err(Error::CapExceeded { .. })
        ));
    }

    fn naive_closure(s: &FiniteStructure, gens: &[Fq]) -> BTreeSet<Fq> {
        let f = &s.field;
        let mut set: BTreeSet<Fq> = gens.iter().copied().chain([Fq::ZERO, Fq::ONE]).collect();
        loop {
            let cur: Vec<Fq> = set.iter().copied().collect();
            let mut grew = false;
            for &a in &cur {
                for &b in &cur {
                    for c in [f.add(a, b), f.sub(a, b), f.mul(a, b)] {
                        grew |= set.insert(c);
                    }
                }
            }
            if !grew {
                return set;
            }
        }
    }

    #[test]
    fn subfields_of_f16() {
        let s = FiniteStructure::of_size(16).unwrap();
        let f = &s.field;
        assert_eq!(generated_subfield(&s, &[Fq::ONE]).size, 2);
        let order3 = s
            .elements()
            .iter()
            .copied()
            .find(|&x| f.mult_order(x) == Some(3))
            .unwrap();
        assert_eq!(generated_subfield(&s, &[order3]).size, 4);
        let prim = s
            .elements()
            .iter()
            .copied()
            .find(|&x| f.mult_order(x) == Some(15))
            .unwrap();
        assert_eq!(generated_subfield(&s, &[prim]).size, 16);
        for &x in s.elements() {
            let sub = generated_subfield(&s, &[x]);
            let naive: Vec<Fq> = naive_closure(&s, &[x]).into_iter().collect();
            assert_eq!(sub.elements, naive);
            assert_eq!(4 % sub.degree, 0);
        }
    }
}
