//! Worked examples that need more machinery than a unit test.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use erank_core::collapse::{
    fin_gen_pipeline, matrix_holds, pi_formula, synth_witness, CollapseConfig,
};
use erank_core::equiv::{check_equiv_finite, refute_equivalence, Verdict};
use erank_core::field::{CollapseMode, FiniteField, FunctionField, Poly, RatFunc};
use erank_core::formula::{parse_formula, Formula, Term, VarName};
use erank_core::normal::{merge_disjunction, PrenexFormula};
use erank_core::semantics::{eval_bounded_ratfunc, BoundedDomain, FiniteStructure};

fn random_poly_term(rng: &mut ChaCha8Rng, vars: &[&str], terms: usize) -> Term {
    let mut acc: Vec<Term> = Vec::new();
    for _ in 0..terms {
        let mut mono = vec![Term::int(rng.gen_range(1..3))];
        for v in vars {
            let e = rng.gen_range(0..3u32);
            if e > 0 {
                mono.push(Term::pow(Term::var(*v), e));
            }
        }
        acc.push(Term::product(mono));
    }
    acc.push(Term::int(rng.gen_range(0..3)));
    Term::sum(acc)
}

#[test]
fn disjunction_of_zeros_is_zero_product_over_f3() {
    let s = FiniteStructure::of_size(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let f = random_poly_term(&mut rng, &["x", "y"], 3);
        let g = random_poly_term(&mut rng, &["x", "y"], 3);
        let or = Formula::or(
            Formula::eq(f.clone(), Term::int(0)),
            Formula::eq(g.clone(), Term::int(0)),
        );
        let prod = Formula::eq(Term::mul(f, g), Term::int(0));
        assert!(
            check_equiv_finite(&or, &prod, &s).unwrap(),
            "{or} vs {prod}"
        );
    }
}

/// Boolean combinations of polynomial equations in one variable.
fn random_qf_candidate(rng: &mut ChaCha8Rng) -> Formula {
    let atoms = rng.gen_range(1..4);
    let mut out: Option<Formula> = None;
    for _ in 0..atoms {
        let deg = rng.gen_range(1..5u32);
        let coeffs: Vec<Term> = (0..=deg)
            .map(|i| {
                Term::mul(
                    Term::int(rng.gen_range(0..101)),
                    Term::pow(Term::var("x1"), i.max(1)),
                )
            })
            .collect();
        let lhs = Term::add(Term::sum(coeffs), Term::int(rng.gen_range(0..101)));
        let mut atom = Formula::eq(lhs, Term::int(0));
        if rng.gen_bool(0.5) {
            atom = Formula::not(atom);
        }
        out = Some(match out {
            None => atom,
            Some(prev) if rng.gen_bool(0.5) => Formula::and(prev, atom),
            Some(prev) => Formula::or(prev, atom),
        });
    }
    out.unwrap()
}

#[test]
fn squares_are_not_quantifier_free_over_large_prime_fields() {
    let s = FiniteStructure::of_size(101).unwrap();
    let squares: Vec<u32> = (0..101u32)
        .map(|y| y * y % 101)
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    assert_eq!(squares.len(), 51);
    let pi = pi_formula(1, 2).to_formula();
    let battery = vec![s];
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..200 {
        let cand = random_qf_candidate(&mut rng);
        let r = refute_equivalence(&pi, &cand, &battery).unwrap();
        assert!(matches!(r.verdict, Verdict::Refuted { .. }), "{cand}");
    }
    // a cofinite candidate
    let nonzero = parse_formula("x1 != 0", false).unwrap();
    assert!(matches!(
        refute_equivalence(&pi, &nonzero, &battery).unwrap().verdict,
        Verdict::Refuted { .. }
    ));
}

fn poly(k: &FunctionField, coeffs: &[u32]) -> RatFunc {
    k.poly(Poly::from_coeffs(
        coeffs
            .iter()
            .map(|&c| k.base().from_u64(c as u64))
            .collect(),
    ))
}

#[test]
fn collapse_witness_found_by_bounded_search_at_its_degree() {
    let k = FunctionField::new(FiniteField::new(2, 1).unwrap());
    let cfg = CollapseConfig::new(2, 2, 1, CollapseMode::UfdPDivisibleUnits).unwrap();
    let phi = fin_gen_pipeline(&cfg).unwrap();
    let xs = vec![poly(&k, &[0, 0, 1]), poly(&k, &[1, 0, 1])];
    let y = synth_witness(&xs, &cfg, &k).unwrap().unwrap();
    // t^7 + t^6 + t^4 + t^3 + t^2 + t
    assert_eq!(y, poly(&k, &[0, 1, 1, 1, 1, 0, 1, 1]));
    assert!(matrix_holds(&phi, &xs, &y, &k).unwrap());

    let f = phi.to_formula();
    let assignment: HashMap<VarName, RatFunc> = [
        (VarName::new("x1"), xs[0].clone()),
        (VarName::new("x2"), xs[1].clone()),
    ]
    .into_iter()
    .collect();
    let low = BoundedDomain::new(k.clone(), 5).unwrap();
    assert!(!eval_bounded_ratfunc(&f, &assignment, &low)
        .unwrap()
        .is_true());
    let high = BoundedDomain::new(k.clone(), 7).unwrap();
    assert!(eval_bounded_ratfunc(&f, &assignment, &high)
        .unwrap()
        .is_true());
}

#[test]
fn merging_with_falsity_is_identity() {
    let f = PrenexFormula::from_prenex_formula(&parse_formula("E y . x = y^2", false).unwrap())
        .unwrap();
    let bottom = PrenexFormula::new(Vec::new(), Formula::False);
    let merged = merge_disjunction(&f, &bottom);
    assert_eq!(merged.count(), 1);
    let s = FiniteStructure::of_size(7).unwrap();
    assert!(check_equiv_finite(&merged.to_formula(), &f.to_formula(), &s).unwrap());
}
