use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use num_bigint::BigUint;
use serde::Serialize;

use erank_core::collapse::{
    fin_gen_pipeline, matrix_holds, synth_witness, CollapseConfig, FVariant,
};
use erank_core::equiv::{
    check_collapse_semantics, default_battery, refute_equivalence, CollapseCheck, Verdict,
};
use erank_core::field::{
    parse_literal, CollapseMode, Element, FieldProfile, FunctionField, Model, ProfileKind,
};
use erank_core::formula::{
    canonicalize, format_formula, free_variables, parse_formula, raw_quantifier_count,
    split_top_level, Formula, Term, VarName,
};
use erank_core::geometry::{
    fibre_dim_estimate, fibre_points, formula_to_system, image_over_finite, system_to_formula,
    VarietyPresentation,
};
use erank_core::normal::{
    parse_pipeline, rank_report, to_positive_primitive_with_limit, to_prenex_existential, PassId,
    PipelineOptions, PrenexFormula, RankReport, SquareTuple, DEFAULT_DNF_LIMIT,
};
use erank_core::semantics::{
    decode_pair_charp, decode_pair_nat, definable_set_over, encode_pair_charp, encode_pair_nat,
    eval_bounded_ratfunc, eval_formula_finite, state_cap, tuple_decode, tuple_encode,
    BoundedDomain, BoundedVerdict, DefinableSet, FiniteStructure,
};

use crate::cli::{
    CollapseArgs, CollapseCheckArgs, Command, EquivArgs, EvalArgs, FmtArgs, Format, FormulaInput,
    GeomCommand, ModeArg, PairCommand, PiCollapseArgs, RankArgs, SystemInput, VariantArg,
};

/// Largest formula (in tree nodes) the CLI prints.
pub const MAX_PRINTED_NODES: u64 = 1_000_000;

/// A request the toolkit declines: unsupported profile or a cap.
#[derive(Debug)]
pub struct Unsupported(pub String);

impl std::fmt::Display for Unsupported {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Unsupported {}

/// Standard output and exit code of a finished command.
pub struct Outcome {
    pub stdout: String,
    pub code: u8,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, code: 0 }
    }

    fn negative(stdout: String) -> Self {
        Outcome { stdout, code: 1 }
    }
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn read_formula(input: &FormulaInput) -> Result<Formula> {
    let text = match (&input.formula, &input.file) {
        (Some(t), _) => t.clone(),
        (None, Some(path)) => std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))?,
        (None, None) => bail!("no formula given"),
    };
    Ok(parse_formula(&text, input.order)?)
}

fn parse_profile(s: &str) -> Result<FieldProfile> {
    Ok(FieldProfile::parse(s)?)
}

fn finite_structure(profile: &str) -> Result<FiniteStructure> {
    let p = parse_profile(profile)?;
    if !p.is_finite() {
        return Err(Unsupported(format!("{} is not a finite field", p.name)).into());
    }
    Ok(FiniteStructure::from_profile(&p)?)
}

/// Tree size of `t`, giving up once `limit` is passed.
fn term_nodes(t: &Term, limit: u64, acc: &mut u64) {
    if *acc > limit {
        return;
    }
    *acc += 1;
    match t {
        Term::Var(_) | Term::Const(_) | Term::Int(_) => {}
        Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => {
            term_nodes(a, limit, acc);
            term_nodes(b, limit, acc);
        }
        Term::Pow(a, _) => term_nodes(a, limit, acc),
    }
}

fn formula_nodes(f: &Formula, limit: u64, acc: &mut u64) {
    if *acc > limit {
        return;
    }
    *acc += 1;
    match f {
        Formula::Eq(a, b) | Formula::Ne(a, b) | Formula::Lt(a, b) => {
            term_nodes(a, limit, acc);
            term_nodes(b, limit, acc);
        }
        Formula::And(a, b) | Formula::Or(a, b) => {
            formula_nodes(a, limit, acc);
            formula_nodes(b, limit, acc);
        }
        Formula::Not(a) | Formula::Exists(_, a) => formula_nodes(a, limit, acc),
        Formula::True | Formula::False => {}
    }
}

fn ensure_printable(f: &Formula) -> Result<()> {
    let mut n = 0;
    formula_nodes(f, MAX_PRINTED_NODES, &mut n);
    if n > MAX_PRINTED_NODES {
        return Err(Unsupported(format!(
            "formula has more than {MAX_PRINTED_NODES} nodes; refusing to print it"
        ))
        .into());
    }
    Ok(())
}

pub fn run(command: Command, format: Option<Format>) -> Result<Outcome> {
    let fmt = |default: Format| format.unwrap_or(default);
    match command {
        Command::Parse(input) => parse_cmd(&input, fmt(Format::Text)),
        Command::Fmt(args) => fmt_cmd(&args, fmt(Format::Text)),
        Command::Rank(args) => rank_cmd(&args, fmt(Format::Json)),
        Command::Transform(args) => transform_cmd(&args, fmt(Format::Text)),
        Command::PiCollapse(args) => pi_collapse_cmd(&args, fmt(Format::Text)),
        Command::CollapseCheck(args) => collapse_check_cmd(&args, fmt(Format::Json)),
        Command::Eval(args) => eval_cmd(&args, fmt(Format::Text)),
        Command::Equiv(args) => equiv_cmd(&args, fmt(Format::Json)),
        Command::Geom(g) => geom_cmd(g, format),
        Command::Pair(p) => pair_cmd(p, fmt(Format::Text)),
    }
}

#[derive(Serialize)]
struct ParseOut {
    formula: String,
    free_variables: Vec<String>,
    quantifier_count: usize,
    existential: bool,
    quantifier_free: bool,
    order_atoms: bool,
}

fn names(vs: &[VarName]) -> Vec<String> {
    vs.iter().map(|v| v.to_string()).collect()
}

fn parse_cmd(input: &FormulaInput, format: Format) -> Result<Outcome> {
    let f = read_formula(input)?;
    ensure_printable(&f)?;
    let out = ParseOut {
        formula: format_formula(&f),
        free_variables: names(&free_variables(&f)),
        quantifier_count: raw_quantifier_count(&f),
        existential: f.is_existential(),
        quantifier_free: f.is_quantifier_free(),
        order_atoms: f.contains_order(),
    };
    Ok(Outcome::ok(match format {
        Format::Json => json(&out)?,
        Format::Text => format!(
            "formula: {}\nfree variables: {}\nquantifiers: {}\nexistential: {}\nquantifier-free: {}\norder atoms: {}\n",
            out.formula,
            out.free_variables.join(", "),
            out.quantifier_count,
            out.existential,
            out.quantifier_free,
            out.order_atoms
        ),
    }))
}

fn fmt_cmd(args: &FmtArgs, format: Format) -> Result<Outcome> {
    let mut f = read_formula(&args.input)?;
    if args.canonical {
        f = canonicalize(&f);
    }
    ensure_printable(&f)?;
    let text = format_formula(&f);
    Ok(Outcome::ok(match format {
        Format::Json => json(&serde_json::json!({ "formula": text }))?,
        Format::Text => format!("{text}\n"),
    }))
}

fn pipeline_options(args: &RankArgs) -> Result<PipelineOptions> {
    let square_tuple = match &args.square_tuple {
        None => None,
        Some(text) => {
            let f = parse_formula(text, false)?;
            let pre = PrenexFormula::from_prenex_formula(&f)
                .map_or_else(|| to_prenex_existential(&f), Ok)?;
            let vars = args.square_vars.iter().map(VarName::new).collect();
            Some(SquareTuple::new(vars, pre)?)
        }
    };
    Ok(PipelineOptions { square_tuple })
}

fn report_for(args: &RankArgs) -> Result<RankReport> {
    let f = read_formula(&args.input)?;
    let profile = parse_profile(&args.profile)?;
    let pipeline = parse_pipeline(&args.pipeline)?;
    let opts = pipeline_options(args)?;
    Ok(rank_report(&f, &profile, &pipeline, &opts)?)
}

fn report_text(r: &RankReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "profile: {}", r.profile);
    let _ = writeln!(s, "erk_upper: {}", r.erk_upper);
    let _ = writeln!(s, "perk_upper: {}", r.perk_upper);
    let _ = writeln!(s, "efd_upper: {}", r.efd_upper);
    let _ = writeln!(s, "assumptions: {}", r.assumptions);
    for e in &r.pass_trace {
        let _ = writeln!(
            s,
            "pass {}: {} -> {} [{}]",
            e.pass, e.before, e.after, e.scope
        );
    }
    let _ = writeln!(s, "result: {}", r.result);
    for n in &r.notes {
        let _ = writeln!(s, "note: {n}");
    }
    s
}

fn rank_cmd(args: &RankArgs, format: Format) -> Result<Outcome> {
    let r = report_for(args)?;
    Ok(Outcome::ok(match format {
        Format::Json => json(&r)?,
        Format::Text => report_text(&r),
    }))
}

fn transform_cmd(args: &RankArgs, format: Format) -> Result<Outcome> {
    let r = report_for(args)?;
    Ok(Outcome::ok(match format {
        Format::Json => json(&serde_json::json!({
            "formula": r.result,
            "pass_trace": r.pass_trace,
            "assumptions": r.assumptions,
        }))?,
        Format::Text => format!("{}\n", r.result),
    }))
}

fn collapse_config(a: &CollapseArgs) -> Result<CollapseConfig> {
    let mode = match (a.mode, a.r) {
        (ModeArg::Ufd, None) => CollapseMode::UfdPDivisibleUnits,
        (ModeArg::Ufd, Some(_)) => bail!("--r only applies to --mode general"),
        (ModeArg::General, Some(r)) => CollapseMode::General { r },
        (ModeArg::General, None) => bail!("--mode general needs --r"),
    };
    let variant = match a.variant {
        VariantArg::Standard => FVariant::Standard,
        VariantArg::WithoutLinearTerm => FVariant::WithoutLinearTerm,
    };
    Ok(CollapseConfig::new(a.p, a.n, a.k, mode)?.with_variant(variant))
}

#[derive(Serialize)]
struct WitnessOut {
    inputs: Vec<String>,
    witness: Option<String>,
    matrix: Option<bool>,
}

#[derive(Serialize)]
struct PiCollapseOut {
    config: CollapseConfig,
    f: String,
    g: String,
    formula: String,
    report: RankReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<WitnessOut>,
}

fn pi_collapse_cmd(args: &PiCollapseArgs, format: Format) -> Result<Outcome> {
    let cfg = collapse_config(&args.collapse)?;
    let phi = fin_gen_pipeline(&cfg)?;
    let formula = phi.to_formula();
    ensure_printable(&formula)?;
    let profile = FieldProfile::rational_function(cfg.p)?.with_collapse_mode(cfg.mode)?;
    let report = rank_report(
        &formula,
        &profile,
        &[PassId::Prenex],
        &PipelineOptions::default(),
    )?;
    let k = FunctionField::new(erank_core::field::FiniteField::new(cfg.p, 1)?);
    let witness = match &args.witness {
        None => None,
        Some(text) => {
            let xs = split_top_level(text, ',')
                .iter()
                .map(|s| parse_literal(&k, s, &["t"]))
                .collect::<erank_core::Result<Vec<_>>>()?;
            if xs.len() != cfg.n {
                bail!("--witness lists {} elements, expected {}", xs.len(), cfg.n);
            }
            let y = synth_witness(&xs, &cfg, &k)?;
            let matrix = y
                .as_ref()
                .map(|y| matrix_holds(&phi, &xs, y, &k))
                .transpose()?;
            Some(WitnessOut {
                inputs: xs.iter().map(|x| k.format(x)).collect(),
                witness: y.map(|y| k.format(&y)),
                matrix,
            })
        }
    };
    let x = Arc::new(Term::var("X"));
    let out = PiCollapseOut {
        f: cfg.f_poly().to_string(),
        g: cfg.g_term(&x).to_string(),
        formula: format_formula(&formula),
        config: cfg,
        report,
        witness,
    };
    let negative = out.witness.as_ref().is_some_and(|w| w.matrix != Some(true));
    let text = match format {
        Format::Json => json(&out)?,
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "formula: {}", out.formula);
            let _ = writeln!(s, "f: {}", out.f);
            let _ = writeln!(s, "g: {}", out.g);
            s.push_str(&report_text(&out.report));
            if let Some(w) = &out.witness {
                let _ = writeln!(s, "inputs: {}", w.inputs.join(", "));
                match (&w.witness, w.matrix) {
                    (Some(y), Some(m)) => {
                        let _ = writeln!(s, "witness: {y}");
                        let _ = writeln!(s, "matrix: {m}");
                    }
                    _ => {
                        let _ = writeln!(s, "witness: none (some input is not a p^k-th power)");
                    }
                }
            }
            s
        }
    };
    Ok(if negative {
        Outcome::negative(text)
    } else {
        Outcome::ok(text)
    })
}

fn collapse_check_cmd(args: &CollapseCheckArgs, format: Format) -> Result<Outcome> {
    let cfg = collapse_config(&args.collapse)?;
    let k = FunctionField::new(erank_core::field::FiniteField::new(cfg.p, 1)?);
    let check = CollapseCheck::new(args.bound, args.samples, args.seed);
    let mut report = check_collapse_semantics(&cfg, &k, &check)?;
    report.seed = Some(args.seed);
    let refuted = matches!(report.verdict, Verdict::Refuted { .. });
    let text = match format {
        Format::Json => json(&report)?,
        Format::Text => equiv_text(&report),
    };
    Ok(if refuted {
        Outcome::negative(text)
    } else {
        Outcome::ok(text)
    })
}

fn equiv_text(r: &erank_core::equiv::EquivReport) -> String {
    let mut s = String::new();
    match &r.verdict {
        Verdict::EquivalentOnBattery => s.push_str("verdict: equivalent_on_battery\n"),
        Verdict::PositiveDirectionVerified => s.push_str("verdict: positive_direction_verified\n"),
        Verdict::Unknown => s.push_str("verdict: unknown\n"),
        Verdict::Refuted { counterexample: c } => {
            let _ = writeln!(s, "verdict: refuted");
            let _ = writeln!(s, "profile: {}", c.profile);
            for (v, x) in &c.assignment {
                let _ = writeln!(s, "  {v} = {x}");
            }
            let _ = writeln!(s, "detail: {}", c.detail);
        }
    }
    let _ = writeln!(s, "battery: {}", r.battery.join(", "));
    if let Some(seed) = r.seed {
        let _ = writeln!(s, "seed: {seed}");
    }
    let _ = writeln!(
        s,
        "stats: {}",
        serde_json::to_string(&r.stats).unwrap_or_default()
    );
    for n in &r.notes {
        let _ = writeln!(s, "note: {n}");
    }
    s
}

fn equiv_cmd(args: &EquivArgs, format: Format) -> Result<Outcome> {
    let f1 = parse_formula(&args.f1, false).context("in --f1")?;
    let f2 = parse_formula(&args.f2, false).context("in --f2")?;
    let battery = if args.battery.trim() == "default" {
        default_battery()?
    } else {
        args.battery
            .split(',')
            .map(|q| {
                let q: u32 = q
                    .trim()
                    .parse()
                    .with_context(|| format!("bad field size `{q}`"))?;
                Ok(FiniteStructure::of_size(q)?)
            })
            .collect::<Result<Vec<_>>>()?
    };
    let report = refute_equivalence(&f1, &f2, &battery)?;
    let refuted = matches!(report.verdict, Verdict::Refuted { .. });
    let text = match format {
        Format::Json => json(&report)?,
        Format::Text => equiv_text(&report),
    };
    Ok(if refuted {
        Outcome::negative(text)
    } else {
        Outcome::ok(text)
    })
}

#[derive(Serialize)]
struct SetOut {
    profile: String,
    vars: Vec<String>,
    count: usize,
    tuples: Vec<Vec<String>>,
}

fn set_out(set: &DefinableSet, s: &FiniteStructure) -> SetOut {
    SetOut {
        profile: s.name.clone(),
        vars: names(&set.vars),
        count: set.len(),
        tuples: set
            .tuples
            .iter()
            .map(|t| t.iter().map(|&x| s.format(x)).collect())
            .collect(),
    }
}

fn set_text(out: &SetOut) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "profile: {}", out.profile);
    let _ = writeln!(s, "vars: {}", out.vars.join(", "));
    let _ = writeln!(s, "count: {}", out.count);
    for t in &out.tuples {
        if t.len() == 1 {
            let _ = writeln!(s, "{}", t[0]);
        } else {
            let _ = writeln!(s, "({})", t.join(", "));
        }
    }
    s
}

fn render_set(set: &DefinableSet, s: &FiniteStructure, format: Format) -> Result<String> {
    let out = set_out(set, s);
    Ok(match format {
        Format::Json => json(&out)?,
        Format::Text => set_text(&out),
    })
}

fn parse_assignment(model: &Model, text: &str) -> Result<Vec<(VarName, Element)>> {
    split_top_level(text, ',')
        .iter()
        .filter(|s| !s.trim().is_empty())
        .map(|item| {
            let (v, x) = item
                .split_once('=')
                .ok_or_else(|| anyhow!("assignment `{item}` is not of the form name=value"))?;
            Ok((VarName::new(v.trim()), model.parse_element(x)?))
        })
        .collect()
}

#[derive(Serialize)]
struct Row {
    assignment: Vec<(String, String)>,
    verdict: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    witness: Vec<(String, String)>,
}

fn row_text(r: &Row) -> String {
    let a: Vec<String> = r
        .assignment
        .iter()
        .map(|(v, x)| format!("{v} = {x}"))
        .collect();
    let mut s = format!("{} : {}", a.join(", "), r.verdict);
    if !r.witness.is_empty() {
        let w: Vec<String> = r
            .witness
            .iter()
            .map(|(v, x)| format!("{v} = {x}"))
            .collect();
        let _ = write!(s, " ({})", w.join(", "));
    }
    s.push('\n');
    s
}

fn eval_cmd(args: &EvalArgs, format: Format) -> Result<Outcome> {
    let f = read_formula(&args.input)?;
    let profile = parse_profile(&args.profile)?;
    let model = profile.model().map_err(|e| Unsupported(e.to_string()))?;
    let free = free_variables(&f);
    let vars: Vec<VarName> = if args.vars.is_empty() {
        free.clone()
    } else {
        args.vars.iter().map(VarName::new).collect()
    };
    match &model {
        Model::Finite(_) => {
            let s = FiniteStructure::from_profile(&profile)?;
            match &args.assign {
                Some(text) if !args.table => {
                    let assignment: HashMap<VarName, _> = parse_assignment(&model, text)?
                        .into_iter()
                        .map(|(v, e)| match e {
                            Element::Fq(x) => (v, x),
                            _ => unreachable!("finite model yields Fq"),
                        })
                        .collect();
                    let b = eval_formula_finite(&f, &assignment, &s)?;
                    Ok(Outcome::ok(match format {
                        Format::Json => {
                            json(&serde_json::json!({ "profile": s.name, "value": b }))?
                        }
                        Format::Text => format!("{b}\n"),
                    }))
                }
                _ => {
                    let set = definable_set_over(&f, &vars, &s)?;
                    Ok(Outcome::ok(render_set(&set, &s, format)?))
                }
            }
        }
        Model::Rationals(_) => {
            let Some(text) = &args.assign else {
                return Err(
                    Unsupported("over Q only single assignments can be evaluated".into()).into(),
                );
            };
            if !f.is_quantifier_free() {
                return Err(Unsupported(
                    "existential truth over Q is not decided; only quantifier-free formulas are evaluated".into(),
                )
                .into());
            }
            let assignment: HashMap<VarName, _> = parse_assignment(&model, text)?
                .into_iter()
                .map(|(v, e)| match e {
                    Element::Rat(x) => (v, x),
                    _ => unreachable!("rational model yields rationals"),
                })
                .collect();
            let q = erank_core::field::Rationals;
            let consts = erank_core::semantics::engine::builtin_consts(&q);
            let b = erank_core::semantics::engine::eval_formula_with(
                &q,
                &f,
                &assignment,
                &consts,
                &[],
            )?;
            Ok(Outcome::ok(match format {
                Format::Json => json(&serde_json::json!({ "profile": profile.name, "value": b }))?,
                Format::Text => format!("{b}\n"),
            }))
        }
        Model::Function(k) => {
            let dom = BoundedDomain::new(k.clone(), args.bound)?;
            let assignments: Vec<HashMap<VarName, erank_core::field::RatFunc>> = match &args.assign
            {
                Some(text) => vec![parse_assignment(&model, text)?
                    .into_iter()
                    .map(|(v, e)| match e {
                        Element::RatFunc(x) => (v, x),
                        _ => unreachable!("function field yields rational functions"),
                    })
                    .collect()],
                None => {
                    let n = dom.elements().len() as u128;
                    let rows = n.saturating_pow(vars.len() as u32);
                    if rows > state_cap() as u128 {
                        return Err(erank_core::Error::CapExceeded {
                            requested: rows,
                            cap: state_cap(),
                        }
                        .into());
                    }
                    let mut out = vec![HashMap::new()];
                    for v in &vars {
                        out = out
                            .into_iter()
                            .flat_map(|a| {
                                dom.elements().iter().map(move |x| {
                                    let mut a = a.clone();
                                    a.insert(v.clone(), x.clone());
                                    a
                                })
                            })
                            .collect();
                    }
                    out
                }
            };
            let order: Vec<VarName> = if args.assign.is_some() {
                free.clone()
            } else {
                vars.clone()
            };
            let mut rows = Vec::new();
            for a in &assignments {
                let verdict = eval_bounded_ratfunc(&f, a, &dom)?;
                let assignment = order
                    .iter()
                    .filter_map(|v| a.get(v).map(|x| (v.to_string(), k.format(x))))
                    .collect();
                rows.push(match verdict {
                    BoundedVerdict::True { witness } => Row {
                        assignment,
                        verdict: "true".into(),
                        witness: witness
                            .iter()
                            .map(|(v, x)| (v.to_string(), k.format(x)))
                            .collect(),
                    },
                    BoundedVerdict::NoWitnessUpToBound { bound } => Row {
                        assignment,
                        verdict: format!("no_witness_up_to_bound({bound})"),
                        witness: Vec::new(),
                    },
                });
            }
            Ok(Outcome::ok(match format {
                Format::Json => json(&serde_json::json!({
                    "profile": profile.name,
                    "bound": args.bound,
                    "rows": rows,
                }))?,
                Format::Text => {
                    let mut s = format!("profile: {}\nbound: {}\n", profile.name, args.bound);
                    for r in &rows {
                        s.push_str(&row_text(r));
                    }
                    s
                }
            }))
        }
    }
}

fn read_system(input: &SystemInput) -> Result<VarietyPresentation> {
    let text = match (&input.system, &input.system_json) {
        (Some(path), _) => std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))?,
        (None, Some(t)) => t.clone(),
        (None, None) => bail!("no system given"),
    };
    serde_json::from_str(&text).context("invalid system file")
}

fn parse_point(s: &FiniteStructure, text: &str, n: usize) -> Result<Vec<erank_core::field::Fq>> {
    let xs = split_top_level(text, ',')
        .iter()
        .map(|x| s.parse_element(x))
        .collect::<erank_core::Result<Vec<_>>>()?;
    if xs.len() != n {
        bail!(
            "point has {} coordinates, the system has {} x variables",
            xs.len(),
            n
        );
    }
    Ok(xs)
}

#[derive(Serialize)]
struct FibreLevel {
    k: u32,
    field: String,
    count: usize,
    points: Vec<Vec<String>>,
}

fn geom_cmd(cmd: GeomCommand, format: Option<Format>) -> Result<Outcome> {
    match cmd {
        GeomCommand::ToSystem { input, pp } => {
            let f = read_formula(&input)?;
            let mut pre = match PrenexFormula::from_prenex_formula(&f) {
                Some(p) => p,
                None => to_prenex_existential(&f)?,
            };
            if pp {
                pre = to_positive_primitive_with_limit(&pre, DEFAULT_DNF_LIMIT)?;
            }
            let vp = formula_to_system(&pre)?;
            Ok(Outcome::ok(json(&vp)?))
        }
        GeomCommand::FromSystem { system } => {
            let vp = read_system(&system)?;
            let f = system_to_formula(&vp).to_formula();
            Ok(Outcome::ok(match format.unwrap_or(Format::Text) {
                Format::Json => json(&serde_json::json!({ "formula": format_formula(&f) }))?,
                Format::Text => format!("{}\n", format_formula(&f)),
            }))
        }
        GeomCommand::Image { system, profile } => {
            let vp = read_system(&system)?;
            let s = finite_structure(&profile)?;
            let set = image_over_finite(&vp, &s)?;
            Ok(Outcome::ok(render_set(
                &set,
                &s,
                format.unwrap_or(Format::Text),
            )?))
        }
        GeomCommand::Fibre {
            system,
            profile,
            point,
            max_k,
        } => {
            let vp = read_system(&system)?;
            let s = finite_structure(&profile)?;
            let x0 = parse_point(&s, &point, vp.x_vars.len())?;
            let mut levels = Vec::new();
            for k in 1..=max_k {
                let (ext, pts) = fibre_points(&vp, &x0, &s, k)?;
                let e = &ext.structure;
                levels.push(FibreLevel {
                    k,
                    field: e.name.clone(),
                    count: pts.len(),
                    points: pts
                        .iter()
                        .map(|p| p.iter().map(|&x| e.format(x)).collect())
                        .collect(),
                });
            }
            Ok(Outcome::ok(match format.unwrap_or(Format::Text) {
                Format::Json => json(&serde_json::json!({
                    "profile": s.name,
                    "point": point,
                    "y_vars": names(&vp.y_vars),
                    "levels": levels,
                }))?,
                Format::Text => {
                    let mut out = format!("y vars: {}\n", names(&vp.y_vars).join(", "));
                    for l in &levels {
                        let _ = writeln!(out, "k = {} ({}): {} points", l.k, l.field, l.count);
                        for p in &l.points {
                            let _ = writeln!(out, "  ({})", p.join(", "));
                        }
                    }
                    out
                }
            }))
        }
        GeomCommand::FibreDim {
            system,
            profile,
            point,
            max_k,
        } => {
            let vp = read_system(&system)?;
            let s = finite_structure(&profile)?;
            let x0 = parse_point(&s, &point, vp.x_vars.len())?;
            let est = fibre_dim_estimate(&vp, &x0, &s, max_k)?;
            Ok(Outcome::ok(match format.unwrap_or(Format::Json) {
                Format::Json => json(&est)?,
                Format::Text => format!(
                    "estimated_dim: {}\nrange: {}..{}\nslope: {:.4}\ncounts: {:?}\n{}\n",
                    est.estimated_dim, est.range.0, est.range.1, est.slope, est.counts, est.label
                ),
            }))
        }
    }
}

enum PairDomain {
    Nat,
    Charp(FunctionField),
}

fn pair_domain(profile: &str) -> Result<PairDomain> {
    if profile.trim() == "N" {
        return Ok(PairDomain::Nat);
    }
    let p = parse_profile(profile)?;
    match (p.model(), p.kind) {
        (Ok(Model::Function(k)), ProfileKind::RationalFunction { .. }) => Ok(PairDomain::Charp(k)),
        _ => Err(Unsupported(format!("pairing is defined on N and F<q>t, not {}", p.name)).into()),
    }
}

fn pair_cmd(cmd: PairCommand, format: Format) -> Result<Outcome> {
    let emit = |values: Vec<String>, key: &str| -> Result<String> {
        Ok(match (format, key) {
            (Format::Json, "code") => json(&serde_json::json!({ "code": values[0] }))?,
            (Format::Json, _) => json(&serde_json::json!({ key: values }))?,
            (Format::Text, _) => format!("{}\n", values.join(", ")),
        })
    };
    match cmd {
        PairCommand::Encode { profile, values } => match pair_domain(&profile)? {
            PairDomain::Nat => {
                let xs = values
                    .iter()
                    .map(|v| {
                        v.trim()
                            .parse::<BigUint>()
                            .with_context(|| format!("`{v}` is not a natural number"))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let z = tuple_encode(&xs, encode_pair_nat).expect("values are non-empty");
                Ok(Outcome::ok(emit(vec![z.to_string()], "code")?))
            }
            PairDomain::Charp(k) => {
                let xs = values
                    .iter()
                    .map(|v| parse_literal(&k, v, &["t", "a"]))
                    .collect::<erank_core::Result<Vec<_>>>()?;
                let z = tuple_encode(&xs, |a, b| encode_pair_charp(&k, a, b))
                    .expect("values are non-empty");
                Ok(Outcome::ok(emit(vec![k.format(&z)], "code")?))
            }
        },
        PairCommand::Decode { profile, n, value } => match pair_domain(&profile)? {
            PairDomain::Nat => {
                let z: BigUint = value
                    .trim()
                    .parse()
                    .with_context(|| format!("`{value}` is not a natural number"))?;
                let xs = tuple_decode(&z, n, |c| Ok(Some(decode_pair_nat(c))))?
                    .expect("the Cantor pairing is onto");
                Ok(Outcome::ok(emit(
                    xs.iter().map(|x| x.to_string()).collect(),
                    "tuple",
                )?))
            }
            PairDomain::Charp(k) => {
                let z = parse_literal(&k, &value, &["t", "a"])?;
                match tuple_decode(&z, n, |c| Ok(decode_pair_charp(&k, c)))? {
                    Some(xs) => Ok(Outcome::ok(emit(
                        xs.iter().map(|x| k.format(x)).collect(),
                        "tuple",
                    )?)),
                    None => Ok(Outcome::negative(match format {
                        Format::Json => json(&serde_json::json!({ "tuple": null }))?,
                        Format::Text => {
                            format!("{} is not the code of a {n}-tuple\n", k.format(&z))
                        }
                    })),
                }
            }
        },
    }
}
