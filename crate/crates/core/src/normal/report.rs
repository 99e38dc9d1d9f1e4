//! Rank reports: running a pipeline of passes and recording quantifier
//! counts as certified upper bounds.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{rootless_default, FieldProfile};
use crate::formula::{raw_quantifier_count, Formula};

use super::order::{count_order_atoms, eliminate_order, SquareTuple};
use super::pp::{to_positive_primitive, to_single_equation};
use super::prenex::{to_prenex_existential, PrenexFormula};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PassId {
    Prenex,
    Pp,
    SingleEq,
    OrderElim,
    Merge,
}

impl PassId {
    pub const ALL: [PassId; 5] = [
        PassId::OrderElim,
        PassId::Prenex,
        PassId::Merge,
        PassId::Pp,
        PassId::SingleEq,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PassId::Prenex => "prenex",
            PassId::Pp => "pp",
            PassId::SingleEq => "single_eq",
            PassId::OrderElim => "order_elim",
            PassId::Merge => "merge",
        }
    }

    pub fn rule(self) -> &'static str {
        match self {
            PassId::Prenex => {
                "prenex form; disjuncts share quantifiers (max), conjuncts add them (sum)"
            }
            PassId::Merge => "disjunction: max of counts; conjunction: sum of counts",
            PassId::Pp => "g != 0 iff E z g*z = 1 with one shared z; f = 0 | g = 0 iff f*g = 0",
            PassId::SingleEq => {
                "f1 = 0 & f2 = 0 iff g*(f1, f2) = 0 for the homogenization of a rootless g"
            }
            PassId::OrderElim => {
                "x < y iff E z (y - x = z^2 & x != y); !(x < y) iff E z x - y = z^2"
            }
        }
    }
}

impl fmt::Display for PassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PassId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PassId::ALL
            .into_iter()
            .find(|p| p.name() == s.trim())
            .ok_or_else(|| Error::InvalidConfig(format!("unknown pass `{s}`")))
    }
}

/// Parses a comma separated pipeline such as `prenex,pp,single_eq`.
pub fn parse_pipeline(s: &str) -> Result<Vec<PassId>> {
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(str::parse)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PassTraceEntry {
    pub pass: PassId,
    pub rule: String,
    pub before: usize,
    pub after: usize,
    pub delta: i64,
    pub scope: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankReport {
    pub profile: String,
    pub erk_upper: usize,
    pub perk_upper: usize,
    pub efd_upper: usize,
    pub assumptions: String,
    pub upper_bounds_only: bool,
    pub pass_trace: Vec<PassTraceEntry>,
    pub result: String,
    pub notes: Vec<String>,
}

impl RankReport {
    /// `erk <= perk <= erk + 1` and `efd = max(perk - 1, 0)`.
    pub fn is_consistent(&self) -> bool {
        self.erk_upper <= self.perk_upper
            && self.perk_upper <= self.erk_upper + 1
            && self.efd_upper == self.perk_upper.saturating_sub(1)
    }
}

/// A formula at some stage of a pipeline.
#[derive(Clone, Debug)]
pub enum Stage {
    Plain(Formula),
    Prenex(PrenexFormula),
}

impl Stage {
    pub fn formula(&self) -> Formula {
        match self {
            Stage::Plain(f) => f.clone(),
            Stage::Prenex(p) => p.to_formula(),
        }
    }

    fn count(&self) -> usize {
        match self {
            Stage::Plain(f) => raw_quantifier_count(f),
            Stage::Prenex(p) => p.count(),
        }
    }

    fn prenex(&self) -> Result<PrenexFormula> {
        match self {
            Stage::Plain(f) => to_prenex_existential(f),
            Stage::Prenex(p) => Ok(p.clone()),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct PipelineOptions {
    pub square_tuple: Option<SquareTuple>,
}

/// Runs one pass; returns the new stage and its validity scope.
pub fn run_pass(
    stage: &Stage,
    pass: PassId,
    profile: &FieldProfile,
    opts: &PipelineOptions,
) -> Result<(Stage, String)> {
    Ok(match pass {
        PassId::OrderElim => {
            let f = stage.formula();
            let scope = if count_order_atoms(&f) == 0 {
                "T_fields".to_string()
            } else if opts.square_tuple.is_some() {
                "RCF, caller-certified input".to_string()
            } else {
                "RCF".to_string()
            };
            let g = eliminate_order(&f, profile.has_order, opts.square_tuple.as_ref())?;
            (Stage::Plain(g), scope)
        }
        PassId::Prenex | PassId::Merge => (Stage::Prenex(stage.prenex()?), "T_fields".into()),
        PassId::Pp => (
            Stage::Prenex(to_positive_primitive(&stage.prenex()?, profile)?),
            "T_fields".into(),
        ),
        PassId::SingleEq => {
            let pre = stage.prenex()?;
            let pp = to_positive_primitive(&pre, profile)?;
            let g = rootless_default(profile)?;
            let scope = format!("{} (Z-polynomial {g} rootless)", profile.name);
            (Stage::Prenex(to_single_equation(&pp, &g, profile)?), scope)
        }
    })
}

fn is_positive(f: &Formula) -> bool {
    match f {
        Formula::Eq(..) | Formula::True | Formula::False => true,
        Formula::And(a, b) | Formula::Or(a, b) => is_positive(a) && is_positive(b),
        Formula::Exists(_, a) => is_positive(a),
        _ => false,
    }
}

/// Runs `pipeline` on `f` and reports upper bounds on the existential rank,
/// the positive existential rank and the essential fibre dimension.
pub fn rank_report(
    f: &Formula,
    profile: &FieldProfile,
    pipeline: &[PassId],
    opts: &PipelineOptions,
) -> Result<RankReport> {
    let mut stage = Stage::Plain(f.clone());
    let mut trace = Vec::new();
    let mut scopes: Vec<String> = Vec::new();
    let mut stages: Vec<Stage> = Vec::new();
    if f.existential_violation().is_none() {
        stages.push(stage.clone());
    }
    for &pass in pipeline {
        let before = stage.count();
        let (next, scope) = run_pass(&stage, pass, profile, opts)?;
        let after = next.count();
        trace.push(PassTraceEntry {
            pass,
            rule: pass.rule().to_string(),
            before,
            after,
            delta: after as i64 - before as i64,
            scope: scope.clone(),
        });
        if !scopes.contains(&scope) {
            scopes.push(scope);
        }
        stage = next;
        stages.push(stage.clone());
    }
    if let Some(why) = stage.formula().existential_violation() {
        return Err(Error::NotExistential(why));
    }
    let mut erk = usize::MAX;
    let mut perk = usize::MAX;
    for s in stages
        .iter()
        .filter(|s| s.formula().existential_violation().is_none())
    {
        let p = s.prenex()?;
        erk = erk.min(p.count());
        if is_positive(&p.matrix) {
            perk = perk.min(p.count());
        }
    }
    if perk == usize::MAX {
        let best = stages
            .iter()
            .filter(|s| s.formula().existential_violation().is_none())
            .map(|s| s.prenex())
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .min_by_key(|p| p.count())
            .expect("final stage is existential");
        perk = to_positive_primitive(&best, profile)?.count();
    }
    let mut assumptions = profile.theory_tag();
    let extra: Vec<&String> = scopes
        .iter()
        .filter(|s| s.as_str() != "T_fields" && **s != assumptions)
        .collect();
    if !extra.is_empty() {
        let joined: Vec<&str> = extra.iter().map(|s| s.as_str()).collect();
        assumptions = format!("{assumptions}; {}", joined.join("; "));
    }
    Ok(RankReport {
        profile: profile.name.clone(),
        erk_upper: erk,
        perk_upper: perk,
        efd_upper: perk.saturating_sub(1),
        assumptions,
        upper_bounds_only: true,
        pass_trace: trace,
        result: stage.formula().to_string(),
        notes: vec![
            "all figures are upper bounds; no lower bound is claimed".into(),
            "efd_upper certifies only the fibre-dimension <= direction".into(),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn report(s: &str, pipeline: &[PassId]) -> RankReport {
        let f = parse_formula(s, false).unwrap();
        rank_report(
            &f,
            &FieldProfile::rationals(),
            pipeline,
            &Default::default(),
        )
        .unwrap()
    }

    #[test]
    fn pi_formula_counts() {
        let r = report(
            "E y1 y2 y3 . x1 = y1^2 & x2 = y2^2 & x3 = y3^2",
            &[PassId::Prenex, PassId::Pp],
        );
        assert_eq!((r.erk_upper, r.perk_upper, r.efd_upper), (3, 3, 2));
        assert!(r.is_consistent());
    }

    #[test]
    fn inequality_counts() {
        let r = report("x != 0", &[PassId::Prenex, PassId::Pp]);
        assert_eq!((r.erk_upper, r.perk_upper, r.efd_upper), (0, 1, 0));
        assert_eq!(r.pass_trace[1].delta, 1);
        assert_eq!(r.result, "E z . x*z - 1 = 0");
        let r = report("x != 0", &[]);
        assert_eq!((r.erk_upper, r.perk_upper), (0, 1));
    }

    #[test]
    fn positive_quantifier_free() {
        let r = report(
            "x = 1 | x = 2",
            &[PassId::Prenex, PassId::Pp, PassId::SingleEq],
        );
        assert_eq!((r.erk_upper, r.perk_upper, r.efd_upper), (0, 0, 0));
    }

    #[test]
    fn pipeline_parsing() {
        assert_eq!(
            parse_pipeline("prenex, pp,single_eq").unwrap(),
            vec![PassId::Prenex, PassId::Pp, PassId::SingleEq]
        );
        assert!(parse_pipeline("prenex,bogus").is_err());
    }

    #[test]
    fn order_pipeline() {
        let f = parse_formula("x < y", true).unwrap();
        let r = rank_report(
            &f,
            &FieldProfile::rcf(),
            &[PassId::OrderElim, PassId::Prenex, PassId::Pp],
            &Default::default(),
        )
        .unwrap();
        assert_eq!(r.erk_upper, 1);
        assert!(r.perk_upper <= 2);
        assert!(r.is_consistent());
        assert!(r.assumptions.contains("RCF"));
        assert!(rank_report(
            &f,
            &FieldProfile::rationals(),
            &[PassId::Prenex],
            &Default::default()
        )
        .is_err());
    }
}
