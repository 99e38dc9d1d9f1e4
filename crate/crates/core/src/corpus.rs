//! Seeded random existential formulas for property and preservation tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formula::{raw_quantifier_count, Formula, Term, VarName};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusConfig {
    pub max_free: usize,
    pub max_bound: usize,
    /// Maximal nesting of connectives.
    pub max_depth: u32,
    /// Maximal depth of terms.
    pub max_term_depth: u32,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            max_free: 3,
            max_bound: 3,
            max_depth: 3,
            max_term_depth: 2,
        }
    }
}

struct Gen<'a> {
    rng: ChaCha8Rng,
    cfg: &'a CorpusConfig,
    budget: usize,
}

impl Gen<'_> {
    fn term(&mut self, scope: &[VarName], depth: u32) -> Term {
        let leaf = depth == 0 || self.rng.gen_bool(0.35);
        if leaf {
            if scope.is_empty() || self.rng.gen_bool(0.25) {
                return Term::int(self.rng.gen_range(0..3));
            }
            return Term::Var(scope[self.rng.gen_range(0..scope.len())].clone());
        }
        match self.rng.gen_range(0..8) {
            0..=2 => Term::add(self.term(scope, depth - 1), self.term(scope, depth - 1)),
            3 => Term::sub(self.term(scope, depth - 1), self.term(scope, depth - 1)),
            4..=5 => Term::mul(self.term(scope, depth - 1), self.term(scope, depth - 1)),
            _ => Term::pow(self.term(scope, depth - 1), self.rng.gen_range(2..=3)),
        }
    }

    fn atom(&mut self, scope: &[VarName]) -> Formula {
        let d = self.cfg.max_term_depth;
        let a = self.term(scope, d);
        let b = if self.rng.gen_bool(0.4) {
            Term::zero()
        } else {
            self.term(scope, d)
        };
        match self.rng.gen_range(0..10) {
            0..=5 => Formula::eq(a, b),
            6..=8 => Formula::ne(a, b),
            _ => Formula::not(Formula::eq(a, b)),
        }
    }

    fn formula(&mut self, scope: &[VarName], depth: u32) -> Formula {
        if depth == 0 {
            return self.atom(scope);
        }
        let roll = self.rng.gen_range(0..10);
        match roll {
            0..=3 if self.budget > 0 => {
                let k = self.rng.gen_range(1..=self.budget.min(2));
                self.budget -= k;
                let mut inner = scope.to_vec();
                let mut bound = Vec::new();
                for _ in 0..k {
                    // occasionally reuse a name already in scope to exercise shadowing
                    let v = if !scope.is_empty() && self.rng.gen_bool(0.15) {
                        scope[self.rng.gen_range(0..scope.len())].clone()
                    } else {
                        VarName::new(format!("y{}", self.rng.gen_range(1..=3)))
                    };
                    if !bound.contains(&v) {
                        bound.push(v.clone());
                    }
                    inner.push(v);
                }
                Formula::exists(bound, self.formula(&inner, depth - 1))
            }
            4..=5 => Formula::and(
                self.formula(scope, depth - 1),
                self.formula(scope, depth - 1),
            ),
            6..=7 => Formula::or(
                self.formula(scope, depth - 1),
                self.formula(scope, depth - 1),
            ),
            8 => Formula::not(Formula::eq(self.term(scope, 2), self.term(scope, 2))),
            _ => self.atom(scope),
        }
    }
}

/// `count` existential formulas with free variables among `x1..x{max_free}`
/// and at most `max_bound` quantifiers, reproducible from `seed`.
pub fn generate_corpus(seed: u64, count: usize, cfg: &CorpusConfig) -> Vec<Formula> {
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        cfg,
        budget: 0,
    };
    (0..count)
        .map(|_| {
            let nfree = g
                .rng
                .gen_range(1..=cfg.max_free.max(1))
                .max(g.rng.gen_range(1..=cfg.max_free.max(1)));
            let free: Vec<VarName> = (1..=nfree).map(|i| VarName::new(format!("x{i}"))).collect();
            g.budget = g.rng.gen_range(0..=cfg.max_bound);
            let mut f = g.formula(&free, cfg.max_depth);
            if g.budget > 0 && g.rng.gen_bool(0.7) {
                // spend the rest of the budget on an outer block
                let taken = f.all_names();
                let bound: Vec<VarName> = (1..)
                    .map(|i| VarName::new(format!("w{i}")))
                    .filter(|v| !taken.contains(v))
                    .take(g.budget)
                    .collect();
                let mut scope = free.clone();
                scope.extend(bound.iter().cloned());
                let extra = g.atom(&scope);
                f = Formula::exists(bound, Formula::and(extra, f));
                g.budget = 0;
            }
            debug_assert!(raw_quantifier_count(&f) <= cfg.max_bound);
            f
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::free_variables;

    #[test]
    fn corpus_shape() {
        let cfg = CorpusConfig::default();
        let c = generate_corpus(11, 300, &cfg);
        assert_eq!(c.len(), 300);
        for f in &c {
            assert!(f.is_existential(), "{f}");
            assert!(raw_quantifier_count(f) <= 3);
            assert!(free_variables(f).len() <= 3);
            assert!(free_variables(f)
                .iter()
                .all(|v| v.as_str().starts_with('x')));
        }
        assert!(c.iter().any(|f| raw_quantifier_count(f) == 3));
        assert!(c.iter().any(|f| f.is_quantifier_free()));
        assert_eq!(c, generate_corpus(11, 300, &cfg));
    }
}
