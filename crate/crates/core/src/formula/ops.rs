//! Structural utilities: free variables, quantifier counting, substitution,
//! promotion of free variables to constants and binder canonicalisation.

use std::collections::{HashMap, HashSet};

use super::ast::{ConstSym, Formula, Term, VarName};
use crate::error::{Error, Result};

/// Free variables in first-occurrence order.
pub fn free_variables(f: &Formula) -> Vec<VarName> {
    let mut out = Vec::new();
    let mut bound = Vec::new();
    collect_free(f, &mut bound, &mut out);
    out
}

fn collect_free(f: &Formula, bound: &mut Vec<VarName>, out: &mut Vec<VarName>) {
    match f {
        Formula::Eq(a, b) | Formula::Ne(a, b) | Formula::Lt(a, b) => {
            for t in [a, b] {
                t.visit_vars(&mut |v| {
                    if !bound.contains(v) && !out.contains(v) {
                        out.push(v.clone());
                    }
                });
            }
        }
        Formula::And(a, b) | Formula::Or(a, b) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
        }
        Formula::Not(a) => collect_free(a, bound, out),
        Formula::Exists(vs, body) => {
            let n = bound.len();
            bound.extend(vs.iter().cloned());
            collect_free(body, bound, out);
            bound.truncate(n);
        }
        Formula::True | Formula::False => {}
    }
}

/// Raw number of existentially bound variables.
pub fn quantifier_count(f: &Formula) -> Result<usize> {
    if let Some(why) = f.existential_violation() {
        return Err(Error::NotExistential(why));
    }
    Ok(raw_quantifier_count(f))
}

/// Counts bound variables without checking that `f` is existential.
pub fn raw_quantifier_count(f: &Formula) -> usize {
    match f {
        Formula::Exists(vs, body) => vs.len() + raw_quantifier_count(body),
        Formula::And(a, b) | Formula::Or(a, b) => raw_quantifier_count(a) + raw_quantifier_count(b),
        Formula::Not(a) => raw_quantifier_count(a),
        _ => 0,
    }
}

/// Generates names that avoid a given set, trying `base`, then `base1`, `base2`, ...
#[derive(Clone, Debug, Default)]
pub struct FreshNames {
    taken: HashSet<VarName>,
}

impl FreshNames {
    pub fn avoiding<'a>(names: impl IntoIterator<Item = &'a VarName>) -> Self {
        FreshNames {
            taken: names.into_iter().cloned().collect(),
        }
    }

    pub fn reserve(&mut self, v: &VarName) {
        self.taken.insert(v.clone());
    }

    pub fn is_taken(&self, v: &VarName) -> bool {
        self.taken.contains(v)
    }

    /// Returns `base` itself when free, otherwise the first free `base<i>`.
    pub fn fresh(&mut self, base: &str) -> VarName {
        let plain = VarName::new(base);
        if !self.taken.contains(&plain) {
            self.taken.insert(plain.clone());
            return plain;
        }
        self.fresh_indexed(base)
    }

    /// Always returns an indexed name `base<i>` with the smallest free `i >= 1`.
    pub fn fresh_indexed(&mut self, base: &str) -> VarName {
        let mut i = 1usize;
        loop {
            let v = VarName::new(format!("{base}{i}"));
            if !self.taken.contains(&v) {
                self.taken.insert(v.clone());
                return v;
            }
            i += 1;
        }
    }
}

/// Simultaneous capture-avoiding substitution of free variables.
pub fn substitute(f: &Formula, map: &HashMap<VarName, Term>) -> Formula {
    if map.is_empty() {
        return f.clone();
    }
    let mut avoid: Vec<VarName> = f.all_names();
    for (k, t) in map {
        avoid.push(k.clone());
        avoid.extend(t.variables());
    }
    let mut fresh = FreshNames::avoiding(avoid.iter());
    subst_rec(f, map, &mut fresh)
}

fn subst_term(t: &Term, map: &HashMap<VarName, Term>) -> Term {
    t.replace_vars(&|v| map.get(v).cloned())
}

fn subst_rec(f: &Formula, map: &HashMap<VarName, Term>, fresh: &mut FreshNames) -> Formula {
    match f {
        Formula::Eq(a, b) => Formula::Eq(subst_term(a, map), subst_term(b, map)),
        Formula::Ne(a, b) => Formula::Ne(subst_term(a, map), subst_term(b, map)),
        Formula::Lt(a, b) => Formula::Lt(subst_term(a, map), subst_term(b, map)),
        Formula::And(a, b) => Formula::and(subst_rec(a, map, fresh), subst_rec(b, map, fresh)),
        Formula::Or(a, b) => Formula::or(subst_rec(a, map, fresh), subst_rec(b, map, fresh)),
        Formula::Not(a) => Formula::not(subst_rec(a, map, fresh)),
        Formula::True => Formula::True,
        Formula::False => Formula::False,
        Formula::Exists(vs, body) => {
            // binders shadow the map; the remaining entries may need renaming of binders
            let mut inner: HashMap<VarName, Term> = map
                .iter()
                .filter(|(k, _)| !vs.contains(k))
                .map(|(k, t)| (k.clone(), t.clone()))
                .collect();
            let body_free = free_variables(body);
            let incoming: HashSet<VarName> = inner
                .iter()
                .filter(|(k, _)| body_free.contains(k))
                .flat_map(|(_, t)| t.variables())
                .collect();
            let mut new_vs = Vec::with_capacity(vs.len());
            for v in vs {
                if incoming.contains(v) {
                    let renamed = fresh.fresh_indexed(v.as_str());
                    inner.insert(v.clone(), Term::Var(renamed.clone()));
                    new_vs.push(renamed);
                } else {
                    new_vs.push(v.clone());
                }
            }
            if inner.is_empty() {
                return Formula::Exists(new_vs, body.clone());
            }
            Formula::Exists(new_vs, Box::new(subst_rec(body, &inner, fresh)))
        }
    }
}

/// Turns the listed free variables into constant symbols of the same name
/// (suffixed when a constant of that name already occurs).
pub fn promote_free_vars(f: &Formula, vars: &[VarName]) -> Result<Formula> {
    let free = free_variables(f);
    let mut existing: HashSet<ConstSym> = f.constants().into_iter().collect();
    let mut map: HashMap<VarName, Term> = HashMap::new();
    for v in vars {
        if !free.contains(v) {
            return Err(Error::UnknownVariable(v.to_string()));
        }
        let mut name = v.as_str().to_string();
        let mut i = 1;
        while existing.contains(&ConstSym::new(&name)) {
            name = format!("{}_{i}", v.as_str());
            i += 1;
        }
        let c = ConstSym::new(&name);
        existing.insert(c.clone());
        map.insert(v.clone(), Term::Const(c));
    }
    Ok(substitute(f, &map))
}

/// Replaces constant symbols by terms (used to undo a promotion).
pub fn instantiate_constants(f: &Formula, map: &HashMap<ConstSym, Term>) -> Formula {
    f.map_terms(&|t| t.replace_consts(&|c| map.get(c).cloned()))
}

/// Flattens directly nested quantifier blocks and renames every binder to
/// `y1, y2, ...` in order of appearance, skipping names that are free.
pub fn canonicalize(f: &Formula) -> Formula {
    let free = free_variables(f);
    let mut fresh = FreshNames::avoiding(free.iter());
    canon_rec(f, &HashMap::new(), &mut fresh)
}

fn canon_rec(f: &Formula, ren: &HashMap<VarName, VarName>, fresh: &mut FreshNames) -> Formula {
    let rt = |t: &Term| t.replace_vars(&|v| ren.get(v).map(|n| Term::Var(n.clone())));
    match f {
        Formula::Eq(a, b) => Formula::Eq(rt(a), rt(b)),
        Formula::Ne(a, b) => Formula::Ne(rt(a), rt(b)),
        Formula::Lt(a, b) => Formula::Lt(rt(a), rt(b)),
        Formula::And(a, b) => Formula::and(canon_rec(a, ren, fresh), canon_rec(b, ren, fresh)),
        Formula::Or(a, b) => Formula::or(canon_rec(a, ren, fresh), canon_rec(b, ren, fresh)),
        Formula::Not(a) => Formula::not(canon_rec(a, ren, fresh)),
        Formula::True => Formula::True,
        Formula::False => Formula::False,
        Formula::Exists(..) => {
            let mut inner = ren.clone();
            let mut vars = Vec::new();
            let mut cur = f;
            while let Formula::Exists(vs, body) = cur {
                for v in vs {
                    let n = fresh.fresh_indexed("y");
                    inner.insert(v.clone(), n.clone());
                    vars.push(n);
                }
                cur = body;
            }
            Formula::Exists(vars, Box::new(canon_rec(cur, &inner, fresh)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse::parse_formula;

    fn p(s: &str) -> Formula {
        parse_formula(s, false).unwrap()
    }

    fn names(vs: &[&str]) -> Vec<VarName> {
        vs.iter().map(|s| VarName::new(s)).collect()
    }

    #[test]
    fn free_variable_examples() {
        assert_eq!(
            free_variables(&p("E y1 y2 . x1 = y1^3 & x2 = y2^3")),
            names(&["x1", "x2"])
        );
        assert_eq!(free_variables(&p("x = x")), names(&["x"]));
        assert!(free_variables(&p("E y . y = y")).is_empty());
    }

    #[test]
    fn quantifier_count_examples() {
        assert_eq!(
            quantifier_count(&p("E y1 y2 . x1 = y1^3 & x2 = y2^3")).unwrap(),
            2
        );
        assert_eq!(quantifier_count(&p("x != 0 & x = 1")).unwrap(), 0);
        assert_eq!(
            quantifier_count(&p("(E y . x = y^2) | (E y1 y2 . x = y1^2 + y2^2)")).unwrap(),
            3
        );
        assert!(matches!(
            quantifier_count(&p("!(E y . x = y)")),
            Err(Error::NotExistential(_))
        ));
    }

    #[test]
    fn promotion_examples() {
        let f = p("E y . x1 = y^2");
        let g = promote_free_vars(&f, &names(&["x1"])).unwrap();
        assert_eq!(g.to_string(), "E y . c:x1 = y^2");
        assert!(free_variables(&g).is_empty());
        assert_eq!(promote_free_vars(&f, &[]).unwrap(), f);
        assert!(matches!(
            promote_free_vars(&f, &names(&["z"])),
            Err(Error::UnknownVariable(_))
        ));
        let back =
            instantiate_constants(&g, &HashMap::from([(ConstSym::new("x1"), Term::var("x1"))]));
        assert_eq!(back, f);
    }

    #[test]
    fn promotion_avoids_existing_constants() {
        let f = p("c:x = x");
        let g = promote_free_vars(&f, &names(&["x"])).unwrap();
        assert_eq!(g.to_string(), "c:x = c:x_1");
    }

    #[test]
    fn substitution_replaces_free_occurrences() {
        let f = p("E y . x = y^2");
        let g = substitute(&f, &HashMap::from([(VarName::new("x"), Term::var("z"))]));
        assert_eq!(g.to_string(), "E y . z = y^2");
        let id = substitute(&f, &HashMap::new());
        assert_eq!(id, f);
    }

    #[test]
    fn substitution_lifts_powers() {
        let f = p("x = y^2");
        let g = substitute(
            &f,
            &HashMap::from([(VarName::new("y"), Term::pow(Term::var("y"), 2))]),
        );
        assert_eq!(g.to_string(), "x = (y^2)^2");
    }

    #[test]
    fn substitution_avoids_capture() {
        let f = p("E y . x = y^2");
        let g = substitute(&f, &HashMap::from([(VarName::new("x"), Term::var("y"))]));
        assert_eq!(g.to_string(), "E y1 . y = y1^2");
        // bound occurrences are untouched
        let h = substitute(&f, &HashMap::from([(VarName::new("y"), Term::int(3))]));
        assert_eq!(h, f);
    }

    #[test]
    fn canonical_binders() {
        let f = p("E a . (E b . a = b) & x = a");
        assert_eq!(
            canonicalize(&f).to_string(),
            "E y1 . (E y2 . y1 = y2) & x = y1"
        );
        let g = p("E a . E b . y1 = a + b");
        assert_eq!(canonicalize(&g).to_string(), "E y2 y3 . y1 = y2 + y3");
    }
}
