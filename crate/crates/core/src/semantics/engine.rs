//! Compiled evaluation of terms and formulas over any [`Arith`] structure.
//!
//! Terms are flattened into a straight-line program with common
//! subexpressions shared (by node identity), so that the deeply nested terms
//! produced by the collapse construction stay cheap. Values are memoised and
//! invalidated per variable slot. Quantifier search uses three-valued partial
//! evaluation to prune assignments early.

use std::collections::HashMap;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::field::Arith;
use crate::formula::{ConstSym, Formula, Term, VarName};

#[derive(Clone, Debug)]
enum Op<E> {
    Slot(u32),
    Lit(E),
    Add(u32, u32),
    Sub(u32, u32),
    Mul(u32, u32),
    Pow(u32, u32),
}

/// Straight-line code for a set of terms.
#[derive(Clone, Debug)]
pub struct Program<E> {
    ops: Vec<Op<E>>,
    deps: Vec<Box<[u32]>>,
    nslots: usize,
}

impl<E> Program<E> {
    pub fn slot_count(&self) -> usize {
        self.nslots
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

/// A formula over a [`Program`]. Atoms refer to program values.
#[derive(Clone, Debug)]
pub enum CFormula {
    Const(bool),
    Atom {
        negated: bool,
        lhs: u32,
        rhs: u32,
        deps: Box<[u32]>,
    },
    And(Vec<CFormula>),
    Or(Vec<CFormula>),
    Not(Box<CFormula>),
    Exists {
        slots: Vec<u32>,
        body: Box<CFormula>,
        free_deps: Box<[u32]>,
    },
}

impl CFormula {
    fn free_deps(&self) -> Vec<u32> {
        match self {
            CFormula::Const(_) => Vec::new(),
            CFormula::Atom { deps, .. } => deps.to_vec(),
            CFormula::Exists { free_deps, .. } => free_deps.to_vec(),
            CFormula::Not(a) => a.free_deps(),
            CFormula::And(xs) | CFormula::Or(xs) => {
                let mut out: Vec<u32> = xs.iter().flat_map(|x| x.free_deps()).collect();
                out.sort_unstable();
                out.dedup();
                out
            }
        }
    }
}

fn merge_deps(a: &[u32], b: &[u32]) -> Box<[u32]> {
    let mut v: Vec<u32> = a.iter().chain(b).copied().collect();
    v.sort_unstable();
    v.dedup();
    v.into_boxed_slice()
}

pub struct Compiler<'a, A: Arith> {
    arith: &'a A,
    consts: &'a dyn Fn(&ConstSym) -> Option<A::Elem>,
    ops: Vec<Op<A::Elem>>,
    deps: Vec<Box<[u32]>>,
    nslots: u32,
    scope: Vec<(VarName, u32)>,
    memo: HashMap<(usize, u32), u32>,
    epoch: u32,
    slot_ops: HashMap<u32, u32>,
}

impl<'a, A: Arith> Compiler<'a, A> {
    /// Free variables get slots `0..free.len()` in the given order.
    pub fn new(
        arith: &'a A,
        consts: &'a dyn Fn(&ConstSym) -> Option<A::Elem>,
        free: &[VarName],
    ) -> Self {
        let mut c = Compiler {
            arith,
            consts,
            ops: Vec::new(),
            deps: Vec::new(),
            nslots: 0,
            scope: Vec::new(),
            memo: HashMap::new(),
            epoch: 0,
            slot_ops: HashMap::new(),
        };
        for v in free {
            c.bind(v.clone());
        }
        c
    }

    fn bind(&mut self, v: VarName) -> u32 {
        let s = self.nslots;
        self.nslots += 1;
        self.scope.push((v, s));
        self.epoch += 1;
        s
    }

    fn unbind(&mut self, n: usize) {
        let keep = self.scope.len() - n;
        self.scope.truncate(keep);
        self.epoch += 1;
    }

    fn push(&mut self, op: Op<A::Elem>, deps: Box<[u32]>) -> u32 {
        self.ops.push(op);
        self.deps.push(deps);
        (self.ops.len() - 1) as u32
    }

    fn lit(&self, i: u32) -> Option<&A::Elem> {
        match &self.ops[i as usize] {
            Op::Lit(e) => Some(e),
            _ => None,
        }
    }

    fn binary(&mut self, kind: u8, a: u32, b: u32) -> u32 {
        if let (Some(x), Some(y)) = (self.lit(a), self.lit(b)) {
            let v = match kind {
                0 => self.arith.add(x, y),
                1 => self.arith.sub(x, y),
                _ => self.arith.mul(x, y),
            };
            return self.push(Op::Lit(v), Box::new([]));
        }
        let deps = merge_deps(&self.deps[a as usize], &self.deps[b as usize]);
        let op = match kind {
            0 => Op::Add(a, b),
            1 => Op::Sub(a, b),
            _ => Op::Mul(a, b),
        };
        self.push(op, deps)
    }

    pub fn term(&mut self, t: &Term) -> Result<u32> {
        let key = (t as *const Term as usize, self.epoch);
        if let Some(&i) = self.memo.get(&key) {
            return Ok(i);
        }
        let i = match t {
            Term::Var(v) => {
                let s = self
                    .scope
                    .iter()
                    .rev()
                    .find(|(n, _)| n == v)
                    .map(|(_, s)| *s)
                    .ok_or_else(|| Error::MissingAssignment(v.to_string()))?;
                match self.slot_ops.get(&s) {
                    Some(&i) => i,
                    None => {
                        let i = self.push(Op::Slot(s), Box::new([s]));
                        self.slot_ops.insert(s, i);
                        i
                    }
                }
            }
            Term::Const(c) => {
                let v =
                    (self.consts)(c).ok_or_else(|| Error::MissingAssignment(format!("c:{c}")))?;
                self.push(Op::Lit(v), Box::new([]))
            }
            Term::Int(n) => {
                let v = self.arith.from_int(n);
                self.push(Op::Lit(v), Box::new([]))
            }
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => {
                let x = self.term(a)?;
                let y = self.term(b)?;
                let kind = match t {
                    Term::Add(..) => 0,
                    Term::Sub(..) => 1,
                    _ => 2,
                };
                self.binary(kind, x, y)
            }
            Term::Pow(a, e) => {
                let x = self.term(a)?;
                if let Some(v) = self.lit(x) {
                    let v = self.arith.pow(v, *e);
                    self.push(Op::Lit(v), Box::new([]))
                } else {
                    let deps = self.deps[x as usize].clone();
                    self.push(Op::Pow(x, *e), deps)
                }
            }
        };
        self.memo.insert(key, i);
        Ok(i)
    }

    pub fn formula(&mut self, f: &Formula) -> Result<CFormula> {
        Ok(match f {
            Formula::True => CFormula::Const(true),
            Formula::False => CFormula::Const(false),
            Formula::Eq(a, b) | Formula::Ne(a, b) => {
                let lhs = self.term(a)?;
                let rhs = self.term(b)?;
                let deps = merge_deps(&self.deps[lhs as usize], &self.deps[rhs as usize]);
                if deps.is_empty() {
                    let eq = self.lit(lhs) == self.lit(rhs);
                    return Ok(CFormula::Const(eq == matches!(f, Formula::Eq(..))));
                }
                CFormula::Atom {
                    negated: matches!(f, Formula::Ne(..)),
                    lhs,
                    rhs,
                    deps,
                }
            }
            Formula::Lt(..) => {
                return Err(Error::UnsupportedProfile(
                    "order atoms cannot be evaluated in a field without order".into(),
                ))
            }
            Formula::And(..) => {
                let mut items = Vec::new();
                collect(f, true, &mut items);
                CFormula::And(
                    items
                        .into_iter()
                        .map(|g| self.formula(g))
                        .collect::<Result<_>>()?,
                )
            }
            Formula::Or(..) => {
                let mut items = Vec::new();
                collect(f, false, &mut items);
                CFormula::Or(
                    items
                        .into_iter()
                        .map(|g| self.formula(g))
                        .collect::<Result<_>>()?,
                )
            }
            Formula::Not(a) => CFormula::Not(Box::new(self.formula(a)?)),
            Formula::Exists(vs, body) => {
                let slots: Vec<u32> = vs.iter().map(|v| self.bind(v.clone())).collect();
                let body = self.formula(body);
                self.unbind(vs.len());
                let body = body?;
                let free_deps: Box<[u32]> = body
                    .free_deps()
                    .into_iter()
                    .filter(|s| !slots.contains(s))
                    .collect();
                CFormula::Exists {
                    slots,
                    body: Box::new(body),
                    free_deps,
                }
            }
        })
    }

    /// Binds fresh slots for `vars` (for callers that search over them
    /// directly) and compiles `f` in that scope.
    pub fn formula_with_bound(
        &mut self,
        vars: &[VarName],
        f: &Formula,
    ) -> Result<(Vec<u32>, CFormula)> {
        let slots: Vec<u32> = vars.iter().map(|v| self.bind(v.clone())).collect();
        let body = self.formula(f);
        self.unbind(vars.len());
        Ok((slots, body?))
    }

    pub fn finish(self) -> Program<A::Elem> {
        Program {
            ops: self.ops,
            deps: self.deps,
            nslots: self.nslots as usize,
        }
    }
}

fn collect<'f>(f: &'f Formula, and: bool, out: &mut Vec<&'f Formula>) {
    match (f, and) {
        (Formula::And(a, b), true) | (Formula::Or(a, b), false) => {
            collect(a, and, out);
            collect(b, and, out);
        }
        _ => out.push(f),
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Tv {
    T,
    F,
    U,
}

/// Mutable evaluation state for one thread.
pub struct Evaluator<'p, A: Arith> {
    arith: &'p A,
    prog: &'p Program<A::Elem>,
    domain: &'p [A::Elem],
    slots: Vec<Option<A::Elem>>,
    slot_epoch: Vec<u64>,
    clock: u64,
    vals: Vec<Option<A::Elem>>,
    val_epoch: Vec<u64>,
}

impl<'p, A: Arith> Evaluator<'p, A> {
    /// `domain` is the range of every quantifier.
    pub fn new(arith: &'p A, prog: &'p Program<A::Elem>, domain: &'p [A::Elem]) -> Self {
        Evaluator {
            arith,
            prog,
            domain,
            slots: vec![None; prog.nslots],
            slot_epoch: vec![0; prog.nslots],
            clock: 0,
            vals: vec![None; prog.ops.len()],
            val_epoch: vec![0; prog.ops.len()],
        }
    }

    pub fn set(&mut self, slot: u32, v: A::Elem) {
        self.clock += 1;
        self.slots[slot as usize] = Some(v);
        self.slot_epoch[slot as usize] = self.clock;
    }

    fn unset(&mut self, slot: u32) {
        self.slots[slot as usize] = None;
    }

    fn assigned(&self, deps: &[u32]) -> bool {
        deps.iter().all(|&s| self.slots[s as usize].is_some())
    }

    /// Value of a program node; all its slots must be assigned.
    pub fn value(&mut self, i: u32) -> A::Elem {
        let iu = i as usize;
        if let Op::Lit(v) = &self.prog.ops[iu] {
            return v.clone();
        }
        if let Some(v) = &self.vals[iu] {
            let e = self.val_epoch[iu];
            if self.prog.deps[iu]
                .iter()
                .all(|&s| self.slot_epoch[s as usize] <= e)
            {
                return v.clone();
            }
        }
        let v = match &self.prog.ops[iu] {
            Op::Lit(_) => unreachable!(),
            Op::Slot(s) => self.slots[*s as usize]
                .clone()
                .expect("evaluating an unassigned slot"),
            Op::Add(a, b) => {
                let (x, y) = (self.value(*a), self.value(*b));
                self.arith.add(&x, &y)
            }
            Op::Sub(a, b) => {
                let (x, y) = (self.value(*a), self.value(*b));
                self.arith.sub(&x, &y)
            }
            Op::Mul(a, b) => {
                let x = self.value(*a);
                if self.arith.is_zero(&x) {
                    x
                } else {
                    let y = self.value(*b);
                    self.arith.mul(&x, &y)
                }
            }
            Op::Pow(a, e) => {
                let x = self.value(*a);
                self.arith.pow(&x, *e)
            }
        };
        self.vals[iu] = Some(v.clone());
        self.val_epoch[iu] = self.clock;
        v
    }

    fn eval3(&mut self, f: &CFormula) -> Tv {
        match f {
            CFormula::Const(b) => tv(*b),
            CFormula::Atom {
                negated,
                lhs,
                rhs,
                deps,
            } => {
                if !self.assigned(deps) {
                    return Tv::U;
                }
                let a = self.value(*lhs);
                let b = self.value(*rhs);
                tv((a == b) != *negated)
            }
            CFormula::And(xs) => {
                let mut unknown = false;
                for x in xs {
                    match self.eval3(x) {
                        Tv::F => return Tv::F,
                        Tv::U => unknown = true,
                        Tv::T => {}
                    }
                }
                if unknown {
                    Tv::U
                } else {
                    Tv::T
                }
            }
            CFormula::Or(xs) => {
                let mut unknown = false;
                for x in xs {
                    match self.eval3(x) {
                        Tv::T => return Tv::T,
                        Tv::U => unknown = true,
                        Tv::F => {}
                    }
                }
                if unknown {
                    Tv::U
                } else {
                    Tv::F
                }
            }
            CFormula::Not(a) => match self.eval3(a) {
                Tv::T => Tv::F,
                Tv::F => Tv::T,
                Tv::U => Tv::U,
            },
            CFormula::Exists {
                slots,
                body,
                free_deps,
            } => {
                if !self.assigned(free_deps) {
                    return Tv::U;
                }
                tv(self.search(slots, body, None))
            }
        }
    }

    /// Searches assignments of `slots` (all currently unassigned) making
    /// `body` true. On success the witness is written to `witness` if given;
    /// slots left unconstrained get the first domain element.
    fn search(
        &mut self,
        slots: &[u32],
        body: &CFormula,
        mut witness: Option<&mut Vec<A::Elem>>,
    ) -> bool {
        let Some((&s, rest)) = slots.split_first() else {
            return self.eval3(body) == Tv::T;
        };
        let domain = self.domain;
        let mut found = false;
        for v in domain {
            self.set(s, v.clone());
            let hit = match self.eval3(body) {
                Tv::T => {
                    if let Some(w) = witness.as_deref_mut() {
                        w.clear();
                        w.push(v.clone());
                        w.extend(rest.iter().map(|_| domain[0].clone()));
                    }
                    true
                }
                Tv::F => false,
                Tv::U => {
                    let mut sub = Vec::new();
                    let ok = self.search(rest, body, witness.is_some().then_some(&mut sub));
                    if ok {
                        if let Some(w) = witness.as_deref_mut() {
                            w.clear();
                            w.push(v.clone());
                            w.extend(sub);
                        }
                    }
                    ok
                }
            };
            if hit {
                found = true;
                break;
            }
        }
        self.unset(s);
        found
    }

    /// Truth value of a formula whose free slots are all assigned.
    pub fn holds(&mut self, f: &CFormula) -> bool {
        match self.eval3(f) {
            Tv::T => true,
            Tv::F => false,
            Tv::U => panic!("formula evaluated with unassigned free variables"),
        }
    }

    /// Searches `slots` for values making `body` true and returns them.
    pub fn witness(&mut self, slots: &[u32], body: &CFormula) -> Option<Vec<A::Elem>> {
        let mut w = Vec::new();
        self.search(slots, body, Some(&mut w)).then_some(w)
    }

    pub fn domain(&self) -> &'p [A::Elem] {
        self.domain
    }
}

fn tv(b: bool) -> Tv {
    if b {
        Tv::T
    } else {
        Tv::F
    }
}

/// Constant lookup using only the structure's built-in names.
pub fn builtin_consts<A: Arith>(a: &A) -> impl Fn(&ConstSym) -> Option<A::Elem> + '_ {
    move |c| a.named_constant(c.as_str())
}

/// Evaluates a term under an assignment of its variables.
pub fn eval_term_with<A: Arith>(
    arith: &A,
    t: &Term,
    assignment: &HashMap<VarName, A::Elem>,
    consts: &dyn Fn(&ConstSym) -> Option<A::Elem>,
) -> Result<A::Elem> {
    let vars = t.variables();
    let mut comp = Compiler::new(arith, consts, &vars);
    let root = comp.term(t)?;
    let prog = comp.finish();
    let mut ev = Evaluator::new(arith, &prog, &[]);
    for (i, v) in vars.iter().enumerate() {
        let val = assignment
            .get(v)
            .ok_or_else(|| Error::MissingAssignment(v.to_string()))?;
        ev.set(i as u32, val.clone());
    }
    Ok(ev.value(root))
}

/// Evaluates a formula under an assignment of its free variables, with
/// quantifiers ranging over `domain`.
pub fn eval_formula_with<A: Arith>(
    arith: &A,
    f: &Formula,
    assignment: &HashMap<VarName, A::Elem>,
    consts: &dyn Fn(&ConstSym) -> Option<A::Elem>,
    domain: &[A::Elem],
) -> Result<bool> {
    let free = crate::formula::free_variables(f);
    let mut comp = Compiler::new(arith, consts, &free);
    let cf = comp.formula(f)?;
    let prog = comp.finish();
    let mut ev = Evaluator::new(arith, &prog, domain);
    for (i, v) in free.iter().enumerate() {
        let val = assignment
            .get(v)
            .ok_or_else(|| Error::MissingAssignment(v.to_string()))?;
        ev.set(i as u32, val.clone());
    }
    Ok(ev.holds(&cf))
}

/// Integer literal helper for callers building constants.
pub fn int_elem<A: Arith>(a: &A, n: i64) -> A::Elem {
    a.from_int(&BigInt::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FiniteField;
    use crate::formula::{parse_formula, parse_term};

    #[test]
    fn term_values() {
        let f5 = FiniteField::new(5, 1).unwrap();
        let t = parse_term("(x + 1)^2").unwrap();
        let mut a = HashMap::new();
        a.insert(VarName::new("x"), f5.from_i64(2));
        let v = eval_term_with(&f5, &t, &a, &builtin_consts(&f5)).unwrap();
        assert_eq!(v, f5.from_i64(4));
    }

    #[test]
    fn squares_mod_five() {
        let f5 = FiniteField::new(5, 1).unwrap();
        let dom: Vec<_> = f5.elements().collect();
        let f = parse_formula("E y . x = y^2", false).unwrap();
        let res: Vec<u32> = dom
            .iter()
            .filter(|&&x| {
                let mut a = HashMap::new();
                a.insert(VarName::new("x"), x);
                eval_formula_with(&f5, &f, &a, &builtin_consts(&f5), &dom).unwrap()
            })
            .map(|x| x.0)
            .collect();
        assert_eq!(res, vec![0, 1, 4]);
    }

    #[test]
    fn shadowing_and_sharing() {
        let f3 = FiniteField::new(3, 1).unwrap();
        let dom: Vec<_> = f3.elements().collect();
        let f = parse_formula("E a . a = 1 & (E a . a = 2) & a != 2", false).unwrap();
        let a = HashMap::new();
        assert!(eval_formula_with(&f3, &f, &a, &builtin_consts(&f3), &dom).unwrap());
        let g = parse_formula("E a b . a*b = 1 & a = b & a != 1", false).unwrap();
        assert!(eval_formula_with(&f3, &g, &a, &builtin_consts(&f3), &dom).unwrap());
        let h = parse_formula("E a b . a*b = 1 & a + b = 0", false).unwrap();
        assert!(!eval_formula_with(&f3, &h, &a, &builtin_consts(&f3), &dom).unwrap());
    }

    #[test]
    fn witness_search() {
        let f7 = FiniteField::new(7, 1).unwrap();
        let dom: Vec<_> = f7.elements().collect();
        let body = parse_formula("y1^2 + y2^2 = 3 & y1 != 0", false).unwrap();
        let vars = [VarName::new("y1"), VarName::new("y2")];
        let consts = builtin_consts(&f7);
        let mut comp = Compiler::new(&f7, &consts, &[]);
        let (slots, cf) = comp.formula_with_bound(&vars, &body).unwrap();
        let prog = comp.finish();
        let mut ev = Evaluator::new(&f7, &prog, &dom);
        let w = ev.witness(&slots, &cf).unwrap();
        let s = f7.add(f7.mul(w[0], w[0]), f7.mul(w[1], w[1]));
        assert_eq!(s, f7.from_i64(3));
        assert!(!w[0].is_zero());
    }
}
