//! Positive-primitive formulas as polynomial systems `V -> A^n`, with images
//! and fibres enumerated over finite fields.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Arith, FiniteField, Fq};
use crate::formula::{parse_term, ConstSym, Term, VarName};
use crate::normal::{equations, equations_to_matrix, PrenexFormula};
use crate::semantics::engine::{Compiler, Evaluator};
use crate::semantics::{DefinableSet, FiniteStructure};

/// Generators `f_i` in the variables `x_vars ++ y_vars`; the presented map is
/// the projection `V(f_1, .., f_m) -> A^{x_vars}`. No generators means the
/// whole ambient space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SystemFile", into = "SystemFile")]
pub struct VarietyPresentation {
    pub x_vars: Vec<VarName>,
    pub y_vars: Vec<VarName>,
    pub generators: Vec<Term>,
}

/// On-disk form with generators as term strings.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct SystemFile {
    x_vars: Vec<String>,
    y_vars: Vec<String>,
    generators: Vec<String>,
}

impl TryFrom<SystemFile> for VarietyPresentation {
    type Error = Error;

    fn try_from(f: SystemFile) -> Result<Self> {
        let generators = f
            .generators
            .iter()
            .map(|g| parse_term(g))
            .collect::<Result<Vec<_>>>()?;
        VarietyPresentation::new(
            f.x_vars.iter().map(VarName::new).collect(),
            f.y_vars.iter().map(VarName::new).collect(),
            generators,
        )
    }
}

impl From<VarietyPresentation> for SystemFile {
    fn from(v: VarietyPresentation) -> Self {
        SystemFile {
            x_vars: v.x_vars.iter().map(|x| x.to_string()).collect(),
            y_vars: v.y_vars.iter().map(|x| x.to_string()).collect(),
            generators: v.generators.iter().map(|g| g.to_string()).collect(),
        }
    }
}

impl VarietyPresentation {
    pub fn new(x_vars: Vec<VarName>, y_vars: Vec<VarName>, generators: Vec<Term>) -> Result<Self> {
        let all: Vec<&VarName> = x_vars.iter().chain(&y_vars).collect();
        for (i, v) in all.iter().enumerate() {
            if all[..i].contains(v) {
                return Err(Error::InvalidConfig(format!("variable `{v}` listed twice")));
            }
        }
        for g in &generators {
            if let Some(v) = g.variables().into_iter().find(|v| !all.contains(&v)) {
                return Err(Error::UnknownVariable(v.to_string()));
            }
        }
        Ok(VarietyPresentation {
            x_vars,
            y_vars,
            generators,
        })
    }

    fn all_vars(&self) -> Vec<VarName> {
        self.x_vars.iter().chain(&self.y_vars).cloned().collect()
    }
}

/// `E ys . f_1 = 0 & .. & f_m = 0` as the system `({x}, {ys}, {f_i})`.
pub fn formula_to_system(f: &PrenexFormula) -> Result<VarietyPresentation> {
    let generators = equations(&f.matrix)?;
    VarietyPresentation::new(f.free_variables(), f.bound.clone(), generators)
}

/// The inverse of [`formula_to_system`].
pub fn system_to_formula(vp: &VarietyPresentation) -> PrenexFormula {
    PrenexFormula::new(
        vp.y_vars.clone(),
        equations_to_matrix(vp.generators.clone()),
    )
}

struct Compiled<'a> {
    field: &'a FiniteField,
    prog: crate::semantics::engine::Program<Fq>,
    roots: Vec<u32>,
}

impl<'a> Compiled<'a> {
    fn new(
        vp: &VarietyPresentation,
        field: &'a FiniteField,
        consts: &dyn Fn(&ConstSym) -> Option<Fq>,
    ) -> Result<Self> {
        let mut comp = Compiler::new(field, consts, &vp.all_vars());
        let roots = vp
            .generators
            .iter()
            .map(|g| comp.term(g))
            .collect::<Result<Vec<_>>>()?;
        Ok(Compiled {
            field,
            prog: comp.finish(),
            roots,
        })
    }

    fn evaluator<'s>(&'s self, domain: &'s [Fq]) -> Evaluator<'s, FiniteField> {
        Evaluator::new(self.field, &self.prog, domain)
    }

    fn vanishes(&self, ev: &mut Evaluator<'_, FiniteField>) -> bool {
        self.roots.iter().all(|&r| ev.value(r).is_zero())
    }
}

/// The image of `V(F_q)` in `F_q^{x_vars}`, by enumerating all `(x, y)`.
pub fn image_over_finite(vp: &VarietyPresentation, s: &FiniteStructure) -> Result<DefinableSet> {
    let nx = vp.x_vars.len();
    let ny = vp.y_vars.len();
    s.check_states(nx, ny)?;
    let consts = |c: &ConstSym| s.constant(c);
    let compiled = Compiled::new(vp, &s.field, &consts)?;
    let q = s.size() as u64;
    let total_x = q.pow(nx as u32);
    let total_y = q.pow(ny as u32);
    let hits: Vec<u64> = (0..total_x)
        .into_par_iter()
        .map_init(
            || compiled.evaluator(s.elements()),
            |ev, ix| {
                for (i, x) in s.tuple(ix, nx).into_iter().enumerate() {
                    ev.set(i as u32, x);
                }
                (0..total_y)
                    .any(|iy| {
                        for (j, y) in s.tuple(iy, ny).into_iter().enumerate() {
                            ev.set((nx + j) as u32, y);
                        }
                        compiled.vanishes(ev)
                    })
                    .then_some(ix)
            },
        )
        .flatten()
        .collect();
    Ok(DefinableSet {
        vars: vp.x_vars.clone(),
        tuples: hits.into_iter().map(|i| s.tuple(i, nx)).collect(),
    })
}

/// `F_{q^k}` together with an embedding of `F_q` (the image of the
/// generator of `F_q` is the least root of its modulus).
#[derive(Clone, Debug)]
pub struct Extension {
    pub structure: FiniteStructure,
    image: Vec<Fq>,
}

impl Extension {
    pub fn new(base: &FiniteField, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidConfig(
                "extension degree must be positive".into(),
            ));
        }
        let p = base.characteristic();
        let ext = FiniteField::new(p, base.degree() * k)?;
        let modulus = base.modulus();
        let beta = if base.degree() == 1 {
            ext.one()
        } else {
            ext.elements()
                .find(|&b| {
                    let v = modulus.iter().rev().fold(ext.zero(), |acc, &c| {
                        ext.add(ext.mul(acc, b), ext.from_u64(c as u64))
                    });
                    v.is_zero()
                })
                .ok_or_else(|| {
                    Error::InvalidConfig("modulus has no root in the extension".into())
                })?
        };
        let image = base
            .elements()
            .map(|x| {
                base.coefficients(x)
                    .iter()
                    .rev()
                    .fold(ext.zero(), |acc, &c| {
                        ext.add(ext.mul(acc, beta), ext.from_u64(c as u64))
                    })
            })
            .collect();
        Ok(Extension {
            structure: FiniteStructure::new(ext),
            image,
        })
    }

    pub fn embed(&self, x: Fq) -> Fq {
        self.image[x.0 as usize]
    }
}

fn fibre_scan(
    vp: &VarietyPresentation,
    x0: &[Fq],
    base: &FiniteStructure,
    ext: &Extension,
    collect: bool,
) -> Result<(u64, Vec<Vec<Fq>>)> {
    if x0.len() != vp.x_vars.len() {
        return Err(Error::InvalidConfig(format!(
            "point has {} coordinates, expected {}",
            x0.len(),
            vp.x_vars.len()
        )));
    }
    let s = &ext.structure;
    let ny = vp.y_vars.len();
    s.check_states(0, ny)?;
    let consts = |c: &ConstSym| base.constant(c).map(|v| ext.embed(v));
    let compiled = Compiled::new(vp, &s.field, &consts)?;
    let nx = x0.len();
    let total_y = (s.size() as u64).pow(ny as u32);
    let hits: Vec<u64> = (0..total_y)
        .into_par_iter()
        .map_init(
            || {
                let mut ev = compiled.evaluator(s.elements());
                for (i, &x) in x0.iter().enumerate() {
                    ev.set(i as u32, ext.embed(x));
                }
                ev
            },
            |ev, iy| {
                for (j, y) in s.tuple(iy, ny).into_iter().enumerate() {
                    ev.set((nx + j) as u32, y);
                }
                compiled.vanishes(ev).then_some(iy)
            },
        )
        .flatten()
        .collect();
    let count = hits.len() as u64;
    let points = if collect {
        hits.into_iter().map(|i| s.tuple(i, ny)).collect()
    } else {
        Vec::new()
    };
    Ok((count, points))
}

/// The `F_{q^k}`-points of the fibre over `x0` (a point with coordinates in
/// the base field), with the extension they live in.
pub fn fibre_points(
    vp: &VarietyPresentation,
    x0: &[Fq],
    base: &FiniteStructure,
    k: u32,
) -> Result<(Extension, Vec<Vec<Fq>>)> {
    let ext = Extension::new(&base.field, k)?;
    let (_, pts) = fibre_scan(vp, x0, base, &ext, true)?;
    Ok((ext, pts))
}

/// Heuristic fibre dimension from point counts.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FibreDimEstimate {
    /// `-1` for a fibre without points over every tested extension.
    pub estimated_dim: i64,
    /// Equal ends when the slope is within 0.2 of an integer.
    pub range: (i64, i64),
    pub slope: f64,
    /// `N_k` for `k = 1..=max_k`.
    pub counts: Vec<u64>,
    pub label: String,
}

/// Point counts `N_k` of the fibre over `F_{q^k}`; the dimension estimate
/// is the least-squares slope of `log_q N_k` against `k` over `k >= 2`.
pub fn fibre_dim_estimate(
    vp: &VarietyPresentation,
    x0: &[Fq],
    base: &FiniteStructure,
    max_k: u32,
) -> Result<FibreDimEstimate> {
    if max_k < 2 {
        return Err(Error::InvalidConfig("max_k must be at least 2".into()));
    }
    let mut counts = Vec::new();
    for k in 1..=max_k {
        let ext = Extension::new(&base.field, k)?;
        counts.push(fibre_scan(vp, x0, base, &ext, false)?.0);
    }
    let q = base.size() as f64;
    let positive: Vec<(f64, f64)> = counts
        .iter()
        .enumerate()
        .filter(|(_, &n)| n > 0)
        .map(|(i, &n)| ((i + 1) as f64, (n as f64).ln() / q.ln()))
        .collect();
    let tail: Vec<(f64, f64)> = positive
        .iter()
        .copied()
        .filter(|(k, _)| *k >= 2.0)
        .collect();
    let pts = if tail.len() >= 2 { tail } else { positive };
    let label = "HEURISTIC: slope of log_q N_k; certifies nothing".to_string();
    if pts.is_empty() {
        return Ok(FibreDimEstimate {
            estimated_dim: -1,
            range: (-1, -1),
            slope: 0.0,
            counts,
            label,
        });
    }
    let slope = if pts.len() == 1 {
        pts[0].1 / pts[0].0
    } else {
        let n = pts.len() as f64;
        let mk = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let ml = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let num: f64 = pts.iter().map(|p| (p.0 - mk) * (p.1 - ml)).sum();
        let den: f64 = pts.iter().map(|p| (p.0 - mk).powi(2)).sum();
        num / den
    };
    let est = slope.round().max(0.0) as i64;
    let range = if (slope - slope.round()).abs() <= 0.2 {
        (est, est)
    } else {
        (slope.floor().max(0.0) as i64, slope.ceil().max(0.0) as i64)
    };
    Ok(FibreDimEstimate {
        estimated_dim: est,
        range,
        slope,
        counts,
        label,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use crate::semantics::definable_set;

    fn pre(s: &str) -> PrenexFormula {
        PrenexFormula::from_prenex_formula(&parse_formula(s, false).unwrap()).unwrap()
    }

    fn squares() -> VarietyPresentation {
        VarietyPresentation::new(
            vec![VarName::new("x")],
            vec![VarName::new("y")],
            vec![parse_term("x - y^2").unwrap()],
        )
        .unwrap()
    }

    fn fq(s: &FiniteStructure, n: u32) -> Fq {
        s.field.from_u64(n as u64)
    }

    #[test]
    fn formula_to_system_examples() {
        let vp = formula_to_system(&pre("E y . x = y^2")).unwrap();
        assert_eq!(vp.x_vars, vec![VarName::new("x")]);
        assert_eq!(vp.generators, vec![parse_term("x - y^2").unwrap()]);
        let vp = formula_to_system(&pre("x = 0")).unwrap();
        assert!(vp.y_vars.is_empty());
        assert_eq!(vp.generators, vec![parse_term("x").unwrap()]);
        let vp = formula_to_system(&pre("E y . x = y^2 & y = x + 1")).unwrap();
        assert_eq!(
            vp.generators,
            vec![
                parse_term("x - y^2").unwrap(),
                parse_term("y - (x + 1)").unwrap()
            ]
        );
        assert!(formula_to_system(&pre("x != 0")).is_err());
    }

    #[test]
    fn system_to_formula_examples() {
        let s = FiniteStructure::of_size(7).unwrap();
        let f = system_to_formula(&squares());
        assert_eq!(f.count(), 1);
        assert_eq!(
            definable_set(&f.to_formula(), &s).unwrap(),
            definable_set(&pre("E y . x = y^2").to_formula(), &s).unwrap()
        );
        let empty = VarietyPresentation::new(vec![], vec![VarName::new("y")], vec![]).unwrap();
        assert_eq!(system_to_formula(&empty).to_string(), "E y . T");
        let vp = formula_to_system(&pre("E y1 y2 . x1 = y1*y2 & x2 = y1 + y2")).unwrap();
        assert_eq!(formula_to_system(&system_to_formula(&vp)).unwrap(), vp);
    }

    #[test]
    fn images() {
        let s7 = FiniteStructure::of_size(7).unwrap();
        assert_eq!(
            image_over_finite(&squares(), &s7).unwrap().codes(),
            vec![0, 1, 2, 4]
        );
        let s = FiniteStructure::of_size(4).unwrap();
        let line =
            VarietyPresentation::new(vec![VarName::new("x")], vec![VarName::new("y")], vec![])
                .unwrap();
        assert_eq!(image_over_finite(&line, &s).unwrap().len(), 4);
        let unit = VarietyPresentation::new(
            vec![VarName::new("x")],
            vec![VarName::new("y")],
            vec![Term::one()],
        )
        .unwrap();
        assert!(image_over_finite(&unit, &s).unwrap().is_empty());
    }

    #[test]
    fn fibres_over_f5() {
        let s = FiniteStructure::of_size(5).unwrap();
        let (_, pts) = fibre_points(&squares(), &[fq(&s, 1)], &s, 1).unwrap();
        assert_eq!(pts, vec![vec![Fq(1)], vec![Fq(4)]]);
        let (_, pts) = fibre_points(&squares(), &[fq(&s, 0)], &s, 1).unwrap();
        assert_eq!(pts, vec![vec![Fq(0)]]);
        let (_, pts) = fibre_points(&squares(), &[fq(&s, 2)], &s, 1).unwrap();
        assert!(pts.is_empty());
        // 2 becomes a square in F_25
        let (ext, pts) = fibre_points(&squares(), &[fq(&s, 2)], &s, 2).unwrap();
        assert_eq!(pts.len(), 2);
        for y in pts {
            assert_eq!(ext.structure.field.mul(y[0], y[0]), ext.embed(Fq(2)));
        }
    }

    #[test]
    fn embedding_is_a_homomorphism() {
        let base = FiniteField::new(2, 2).unwrap();
        let ext = Extension::new(&base, 3).unwrap();
        let e = &ext.structure.field;
        for a in base.elements() {
            for b in base.elements() {
                assert_eq!(ext.embed(base.mul(a, b)), e.mul(ext.embed(a), ext.embed(b)));
                assert_eq!(ext.embed(base.add(a, b)), e.add(ext.embed(a), ext.embed(b)));
            }
        }
    }

    #[test]
    fn fibre_generator_constant_is_embedded() {
        let s = FiniteStructure::of_size(4).unwrap();
        let vp = VarietyPresentation::new(
            vec![VarName::new("x")],
            vec![VarName::new("y")],
            vec![parse_term("y - c:a*x").unwrap()],
        )
        .unwrap();
        let (ext, pts) = fibre_points(&vp, &[Fq(1)], &s, 2).unwrap();
        assert_eq!(pts, vec![vec![ext.embed(s.field.generator())]]);
    }

    #[test]
    fn dimension_estimates() {
        let s = FiniteStructure::of_size(5).unwrap();
        let e = fibre_dim_estimate(&squares(), &[fq(&s, 1)], &s, 3).unwrap();
        assert!(e.counts.iter().all(|&n| n <= 2));
        assert_eq!(e.estimated_dim, 0);
        let line = VarietyPresentation::new(vec![], vec![VarName::new("y")], vec![]).unwrap();
        let e = fibre_dim_estimate(&line, &[], &s, 3).unwrap();
        assert_eq!(e.counts, vec![5, 25, 125]);
        assert_eq!((e.estimated_dim, e.range), (1, (1, 1)));
        let cross = VarietyPresentation::new(
            vec![],
            vec![VarName::new("y1"), VarName::new("y2")],
            vec![parse_term("y1*y2").unwrap()],
        )
        .unwrap();
        let e = fibre_dim_estimate(&cross, &[], &s, 3).unwrap();
        assert_eq!(e.counts, vec![9, 49, 249]);
        assert_eq!(e.estimated_dim, 1);
        let none =
            VarietyPresentation::new(vec![], vec![VarName::new("y")], vec![Term::one()]).unwrap();
        assert_eq!(
            fibre_dim_estimate(&none, &[], &s, 2).unwrap().estimated_dim,
            -1
        );
    }

    #[test]
    fn json_round_trip() {
        let vp = squares();
        let text = serde_json::to_string(&vp).unwrap();
        assert_eq!(
            text,
            r#"{"x_vars":["x"],"y_vars":["y"],"generators":["x - y^2"]}"#
        );
        let back: VarietyPresentation = serde_json::from_str(&text).unwrap();
        assert_eq!(back, vp);
        let bad = r#"{"x_vars":["x"],"y_vars":["x"],"generators":[]}"#;
        assert!(serde_json::from_str::<VarietyPresentation>(bad).is_err());
    }
}
