//! Equivalence checks over finite fields, sound refutation, and the
//! semantic harness for the characteristic-`p` collapse.

use std::collections::{BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::collapse::{fin_gen_pipeline, matrix_holds, synth_witness, CollapseConfig};
use crate::error::{Error, Result};
use crate::field::{Arith, Fq, FunctionField, Poly, RatFunc};
use crate::formula::{free_variables, Formula, VarName};
use crate::semantics::{definable_set_over, eval_formula_finite, DefinableSet, FiniteStructure};

/// Field sizes of the default battery.
pub const DEFAULT_BATTERY: [u32; 7] = [2, 3, 4, 5, 7, 8, 9];

pub fn default_battery() -> Result<Vec<FiniteStructure>> {
    DEFAULT_BATTERY
        .iter()
        .map(|&q| FiniteStructure::of_size(q))
        .collect()
}

/// A point at which two formulas (or a claim) disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub profile: String,
    pub assignment: Vec<(String, String)>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    /// Agreement on every battery member; not a proof of equivalence.
    EquivalentOnBattery,
    Refuted {
        counterexample: Counterexample,
    },
    PositiveDirectionVerified,
    Unknown,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EquivStats {
    pub tuples_checked: u64,
    pub witnesses_synthesized: u64,
    pub samples_drawn: u64,
    /// Draws with at least one input that is not a `p^k`-th power.
    pub non_power_draws: u64,
    pub satisfying_samples: u64,
    pub violations: u64,
    pub completeness_failures: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivReport {
    pub verdict: Verdict,
    pub battery: Vec<String>,
    pub stats: EquivStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub notes: Vec<String>,
}

fn union_vars(f1: &Formula, f2: &Formula) -> Vec<VarName> {
    let mut vars = free_variables(f1);
    for v in free_variables(f2) {
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    vars
}

/// Exhaustive comparison of the sets defined by `f1` and `f2` over `s`,
/// both read as subsets of `F_q^V` for the union `V` of their free variables.
pub fn check_equiv_finite(f1: &Formula, f2: &Formula, s: &FiniteStructure) -> Result<bool> {
    let vars = union_vars(f1, f2);
    Ok(definable_set_over(f1, &vars, s)? == definable_set_over(f2, &vars, s)?)
}

fn first_difference(a: &DefinableSet, b: &DefinableSet) -> Option<Vec<Fq>> {
    let sa: BTreeSet<&Vec<Fq>> = a.tuples.iter().collect();
    let sb: BTreeSet<&Vec<Fq>> = b.tuples.iter().collect();
    sa.symmetric_difference(&sb).min().map(|t| (*t).clone())
}

/// The first member of `battery` (in order) on which the formulas define
/// different sets, with the least disagreeing tuple; a reported
/// counterexample has been replayed with [`eval_formula_finite`].
pub fn refute_equivalence(
    f1: &Formula,
    f2: &Formula,
    battery: &[FiniteStructure],
) -> Result<EquivReport> {
    let vars = union_vars(f1, f2);
    let per_field: Vec<Result<(u64, Option<Vec<Fq>>)>> = battery
        .par_iter()
        .map(|s| {
            let a = definable_set_over(f1, &vars, s)?;
            let b = definable_set_over(f2, &vars, s)?;
            let n = (s.size() as u64).saturating_pow(vars.len() as u32);
            Ok((n, first_difference(&a, &b)))
        })
        .collect();
    let mut stats = EquivStats::default();
    let names: Vec<String> = battery.iter().map(|s| s.name.clone()).collect();
    for (s, res) in battery.iter().zip(per_field) {
        let (n, diff) = res?;
        stats.tuples_checked += n;
        if let Some(t) = diff {
            let assignment: HashMap<VarName, Fq> =
                vars.iter().cloned().zip(t.iter().copied()).collect();
            let v1 = eval_formula_finite(f1, &assignment, s)?;
            let v2 = eval_formula_finite(f2, &assignment, s)?;
            if v1 == v2 {
                return Err(Error::InvalidConfig(format!(
                    "internal: counterexample on {} does not replay",
                    s.name
                )));
            }
            return Ok(EquivReport {
                verdict: Verdict::Refuted {
                    counterexample: Counterexample {
                        profile: s.name.clone(),
                        assignment: vars
                            .iter()
                            .zip(&t)
                            .map(|(v, &x)| (v.to_string(), s.format(x)))
                            .collect(),
                        detail: format!("f1 is {v1}, f2 is {v2}"),
                    },
                },
                battery: names,
                stats,
                seed: None,
                notes: vec![
                    "finite fields are models of the theory of fields, so the refutation is sound"
                        .into(),
                ],
            });
        }
    }
    Ok(EquivReport {
        verdict: Verdict::EquivalentOnBattery,
        battery: names,
        stats,
        seed: None,
        notes: vec![
            "agreement on finite fields does not imply equivalence modulo the theory of fields"
                .into(),
        ],
    })
}

/// The value set `{ sum_i c_i y_i^2 }` of a diagonal quadratic form over an
/// odd finite field, by enumeration.
pub fn value_set_quadratic(coeffs: &[Fq], s: &FiniteStructure) -> Result<DefinableSet> {
    if coeffs.is_empty() {
        return Err(Error::InvalidConfig(
            "a quadratic form needs at least one variable".into(),
        ));
    }
    if s.field.characteristic() == 2 {
        return Err(Error::UnsupportedProfile(
            "diagonal quadratic forms need odd characteristic".into(),
        ));
    }
    let m = coeffs.len();
    s.check_states(1, m)?;
    let f = &s.field;
    let squares: BTreeSet<Fq> = s.elements().iter().map(|&y| f.mul(y, y)).collect();
    let mut values: BTreeSet<Fq> = BTreeSet::from([f.zero()]);
    for &c in coeffs {
        let mut next = BTreeSet::new();
        for &v in &values {
            for &sq in &squares {
                next.insert(f.add(v, f.mul(c, sq)));
            }
        }
        values = next;
    }
    Ok(DefinableSet {
        vars: vec![VarName::new("x")],
        tuples: values.into_iter().map(|v| vec![v]).collect(),
    })
}

/// Sampling parameters for [`check_collapse_semantics`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CollapseCheck {
    /// Numerator and denominator degree bound of the inputs.
    pub degree_bound: usize,
    /// Number of satisfying `(tuple, y)` samples to collect.
    pub samples: u64,
    pub seed: u64,
    /// Give up after this many drawn tuples.
    pub max_draws: u64,
}

impl CollapseCheck {
    pub fn new(degree_bound: usize, samples: u64, seed: u64) -> Self {
        CollapseCheck {
            degree_bound,
            samples,
            seed,
            max_draws: samples.saturating_mul(50).max(1000),
        }
    }
}

fn random_poly(k: &FunctionField, rng: &mut ChaCha8Rng, deg: usize) -> Poly {
    let d = rng.gen_range(0..=deg);
    let q = k.base().size();
    Poly::from_coeffs((0..=d).map(|_| Fq(rng.gen_range(0..q))).collect())
}

fn random_ratfunc(k: &FunctionField, rng: &mut ChaCha8Rng, deg: usize) -> RatFunc {
    loop {
        let num = random_poly(k, rng, deg);
        let den = random_poly(k, rng, deg);
        if let Some(x) = k.fraction(num, den) {
            return x;
        }
    }
}

/// One component of a sampled tuple, from a mixture of shapes.
fn random_component(k: &FunctionField, rng: &mut ChaCha8Rng, deg: usize, ppow: u64) -> RatFunc {
    let base_deg = (deg / ppow as usize).max(1);
    match rng.gen_range(0..6) {
        0 => k.constant(Fq(rng.gen_range(0..k.base().size()))),
        1 => k.pow(&random_ratfunc(k, rng, base_deg), ppow),
        2 => k.mul(&k.t(), &k.pow(&random_ratfunc(k, rng, base_deg), ppow)),
        3 => k.poly(random_poly(k, rng, deg)),
        _ => random_ratfunc(k, rng, deg),
    }
}

fn random_tuple(
    k: &FunctionField,
    rng: &mut ChaCha8Rng,
    n: usize,
    deg: usize,
    ppow: u64,
) -> Vec<RatFunc> {
    if rng.gen_bool(0.4) {
        let base_deg = (deg / ppow as usize).max(1);
        (0..n)
            .map(|_| match rng.gen_range(0..4) {
                0 => k.constant(Fq(rng.gen_range(0..k.base().size()))),
                _ => k.pow(&random_ratfunc(k, rng, base_deg), ppow),
            })
            .collect()
    } else {
        (0..n)
            .map(|_| random_component(k, rng, deg, ppow))
            .collect()
    }
}

fn tuple_assignment(
    k: &FunctionField,
    xs: &[RatFunc],
    y: Option<&RatFunc>,
) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = xs
        .iter()
        .enumerate()
        .map(|(i, x)| (format!("x{}", i + 1), k.format(x)))
        .collect();
    if let Some(y) = y {
        out.push(("y".into(), k.format(y)));
    }
    out
}

enum SampleOutcome {
    NonPowerInput,
    Unsatisfied,
    Satisfied {
        violation: Option<Vec<(String, String)>>,
    },
}

/// Checks the collapse formula of `cfg` over `k = F_q(t)`:
/// completeness is exhaustive over all tuples of `p^k`-th powers of
/// elements with numerator and denominator degree at most
/// `degree_bound / p^k`; soundness is sampled, every satisfying `(tuple, y)`
/// having to consist of `p^k`-th powers.
pub fn check_collapse_semantics(
    cfg: &CollapseConfig,
    k: &FunctionField,
    check: &CollapseCheck,
) -> Result<EquivReport> {
    if k.characteristic() != cfg.p {
        return Err(Error::InvalidConfig(format!(
            "configuration is for p = {} but the field has characteristic {}",
            cfg.p,
            k.characteristic()
        )));
    }
    let phi = fin_gen_pipeline(cfg)?;
    let ppow = (cfg.p as u64).pow(cfg.k);
    let profile = format!("F{}t", k.base().size());
    let mut stats = EquivStats::default();
    let mut counterexample = None;

    let base_bound = check.degree_bound / ppow as usize;
    let bases = k.enumerate_bounded(base_bound);
    let powers: Vec<RatFunc> = bases.iter().map(|u| k.pow(u, ppow)).collect();
    let total = (powers.len() as u64).saturating_pow(cfg.n as u32);
    let failures: Vec<u64> = (0..total)
        .into_par_iter()
        .filter_map(|idx| {
            let mut i = idx;
            let xs: Vec<RatFunc> = (0..cfg.n)
                .map(|_| {
                    let x = powers[(i % powers.len() as u64) as usize].clone();
                    i /= powers.len() as u64;
                    x
                })
                .collect();
            let ok = match synth_witness(&xs, cfg, k) {
                Ok(Some(y)) => matrix_holds(&phi, &xs, &y, k).unwrap_or(false),
                _ => false,
            };
            (!ok).then_some(idx)
        })
        .collect();
    stats.tuples_checked = total;
    stats.witnesses_synthesized = total - failures.len() as u64;
    stats.completeness_failures = failures.len() as u64;
    if let Some(&idx) = failures.first() {
        let mut i = idx;
        let xs: Vec<RatFunc> = (0..cfg.n)
            .map(|_| {
                let x = powers[(i % powers.len() as u64) as usize].clone();
                i /= powers.len() as u64;
                x
            })
            .collect();
        counterexample = Some(Counterexample {
            profile: profile.clone(),
            assignment: tuple_assignment(k, &xs, None),
            detail: "tuple of powers without a verified witness".into(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(check.seed);
    while stats.satisfying_samples < check.samples && stats.samples_drawn < check.max_draws {
        let batch = 512.min(check.max_draws - stats.samples_drawn);
        let draws: Vec<(Vec<RatFunc>, RatFunc)> = (0..batch)
            .map(|_| {
                let xs = random_tuple(k, &mut rng, cfg.n, check.degree_bound, ppow);
                let y = random_ratfunc(k, &mut rng, check.degree_bound);
                (xs, y)
            })
            .collect();
        let outcomes: Vec<Result<Vec<SampleOutcome>>> = draws
            .par_iter()
            .map(|(xs, random_y)| {
                let all_powers = xs.iter().all(|x| k.is_ppow_power(x, cfg.k));
                let mut candidates = vec![random_y.clone()];
                if let Some(y) = k.pth_root_iter(&cfg.terminal_value(k, xs), cfg.k) {
                    candidates.push(y);
                }
                let mut out: Vec<SampleOutcome> = candidates
                    .iter()
                    .map(|y| {
                        if !matrix_holds(&phi, xs, y, k)? {
                            return Ok(SampleOutcome::Unsatisfied);
                        }
                        Ok(SampleOutcome::Satisfied {
                            violation: (!all_powers).then(|| tuple_assignment(k, xs, Some(y))),
                        })
                    })
                    .collect::<Result<_>>()?;
                if !all_powers {
                    out.push(SampleOutcome::NonPowerInput);
                }
                Ok(out)
            })
            .collect();
        stats.samples_drawn += batch;
        for o in outcomes {
            for s in o? {
                if let SampleOutcome::NonPowerInput = s {
                    stats.non_power_draws += 1;
                }
                if let SampleOutcome::Satisfied { violation } = s {
                    stats.satisfying_samples += 1;
                    if let Some(a) = violation {
                        stats.violations += 1;
                        if counterexample.is_none() {
                            counterexample = Some(Counterexample {
                                profile: profile.clone(),
                                assignment: a,
                                detail: "matrix holds but some input is not a power".into(),
                            });
                        }
                    }
                }
            }
        }
    }

    let verdict = match counterexample {
        Some(c) => Verdict::Refuted { counterexample: c },
        None if stats.satisfying_samples >= check.samples => Verdict::PositiveDirectionVerified,
        None => Verdict::Unknown,
    };
    Ok(EquivReport {
        verdict,
        battery: vec![profile],
        stats,
        seed: Some(check.seed),
        notes: vec![
            format!(
                "completeness exhaustive over p^k-th powers of elements of height <= {base_bound}"
            ),
            format!(
                "soundness sampled from inputs of height <= {}; bounded search never proves non-membership",
                check.degree_bound
            ),
        ],
    })
}
