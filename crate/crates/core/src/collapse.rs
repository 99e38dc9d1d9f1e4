//! One-quantifier definitions of tuples of `p^k`-th powers in characteristic
//! `p`: the `pi` formulas, the polynomial `f`, the recursive collapse, the
//! Frobenius lift and witness synthesis over `F_q(t)`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{is_prime, CollapseMode, FunctionField, RatFunc};
use crate::formula::{Formula, Term, VarName};
use crate::normal::PrenexFormula;
use crate::semantics::eval_qf_ratfunc;

/// Largest `n` accepted by the collapse; the matrix has `2^(n-1)` branches.
pub const MAX_COLLAPSE_N: usize = 16;

/// `E y1 .. yn . x1 = y1^m & ... & xn = yn^m`.
pub fn pi_formula(n: usize, m: u32) -> PrenexFormula {
    let ys: Vec<VarName> = (1..=n).map(|i| VarName::new(format!("y{i}"))).collect();
    let matrix = Formula::conj(ys.iter().enumerate().map(|(i, y)| {
        Formula::eq(
            Term::var(format!("x{}", i + 1)),
            Term::pow_simplified(Term::Var(y.clone()), m),
        )
    }));
    PrenexFormula::new(ys, matrix)
}

/// A bivariate polynomial in `X, Y` with coefficients in `F_p`, stored as
/// `(coefficient, deg_X, deg_Y)` monomials in display order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiPoly {
    pub monomials: Vec<(u32, u32, u32)>,
}

impl BiPoly {
    pub fn degree_x(&self) -> u32 {
        self.monomials.iter().map(|m| m.1).max().unwrap_or(0)
    }

    pub fn degree_y(&self) -> u32 {
        self.monomials.iter().map(|m| m.2).max().unwrap_or(0)
    }

    /// The polynomial with `X` and `Y` replaced by shared subterms.
    pub fn apply(&self, x: &Arc<Term>, y: &Arc<Term>) -> Term {
        Term::sum(self.monomials.iter().map(|&(c, a, b)| {
            let mut factors = Vec::new();
            if c != 1 {
                factors.push(Term::int(c));
            }
            for (base, e) in [(x, a), (y, b)] {
                match e {
                    0 => {}
                    1 => factors.push(base.as_ref().clone()),
                    _ => factors.push(Term::Pow(base.clone(), e)),
                }
            }
            Term::product(factors)
        }))
    }

    pub fn to_term(&self) -> Term {
        self.apply(&Arc::new(Term::var("X")), &Arc::new(Term::var("Y")))
    }

    pub fn eval(&self, k: &FunctionField, x: &RatFunc, y: &RatFunc) -> RatFunc {
        let mut acc = k.zero();
        for &(c, a, b) in &self.monomials {
            let m = k.mul(&k.pow(x, a as u64), &k.pow(y, b as u64));
            let m = k.mul(&k.constant(k.base().from_u64(c as u64)), &m);
            acc = k.add(&acc, &m);
        }
        acc
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_term())
    }
}

/// `f(X, Y) = X^(p+1) Y + X^(p+1) Y^(p^2) + X^(2p+1) + X`.
pub fn good_case_poly(p: u32) -> BiPoly {
    BiPoly {
        monomials: vec![
            (1, p + 1, 1),
            (1, p + 1, p * p),
            (1, 2 * p + 1, 0),
            (1, 1, 0),
        ],
    }
}

/// Which polynomial plays the role of `f`. The truncated variant drops the
/// `+X` term and exists only as a sensitivity control for soundness tests.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FVariant {
    #[default]
    Standard,
    WithoutLinearTerm,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseConfig {
    pub p: u32,
    pub n: usize,
    pub k: u32,
    pub mode: CollapseMode,
    #[serde(default)]
    pub variant: FVariant,
}

impl CollapseConfig {
    pub fn new(p: u32, n: usize, k: u32, mode: CollapseMode) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::InvalidConfig(format!("{p} is not prime")));
        }
        if n == 0 || n > MAX_COLLAPSE_N {
            return Err(Error::InvalidConfig(format!(
                "n must lie in 1..={MAX_COLLAPSE_N}, got {n}"
            )));
        }
        if k == 0 {
            return Err(Error::InvalidConfig("k must be positive".into()));
        }
        if p.checked_pow(k).is_none() || p.checked_mul(p).is_none() {
            return Err(Error::InvalidConfig(format!("{p}^{k} overflows")));
        }
        match mode {
            CollapseMode::None => {
                return Err(Error::InvalidConfig(
                    "collapse needs mode ufd or general(r)".into(),
                ))
            }
            CollapseMode::General { r } if r == 0 || r % p == 0 => {
                return Err(Error::InvalidConfig(format!(
                    "r = {r} must be positive and prime to p = {p}"
                )))
            }
            _ => {}
        }
        Ok(CollapseConfig {
            p,
            n,
            k,
            mode,
            variant: FVariant::Standard,
        })
    }

    pub fn with_variant(mut self, variant: FVariant) -> Self {
        self.variant = variant;
        self
    }

    pub fn f_poly(&self) -> BiPoly {
        let mut f = good_case_poly(self.p);
        if self.variant == FVariant::WithoutLinearTerm {
            f.monomials.retain(|m| *m != (1, 1, 0));
        }
        f
    }

    /// `g(X)`: `X` in ufd mode, `X^r + 1` in general mode.
    pub fn g_term(&self, x: &Arc<Term>) -> Arc<Term> {
        match self.mode {
            CollapseMode::General { r } => {
                let xr = if r == 1 {
                    x.as_ref().clone()
                } else {
                    Term::Pow(x.clone(), r)
                };
                Arc::new(Term::add(xr, Term::one()))
            }
            _ => x.clone(),
        }
    }

    /// `h(X, Y) = f(g(X), Y)` on shared subterms.
    pub fn h_term(&self, x: &Arc<Term>, y: &Arc<Term>) -> Term {
        self.f_poly().apply(&self.g_term(x), y)
    }

    /// Degrees of `h` in `X` and in `Y`.
    pub fn h_degrees(&self) -> (u32, u32) {
        let f = self.f_poly();
        let dg = match self.mode {
            CollapseMode::General { r } => r,
            _ => 1,
        };
        (f.degree_x() * dg, f.degree_y())
    }

    pub fn g_value(&self, k: &FunctionField, x: &RatFunc) -> RatFunc {
        match self.mode {
            CollapseMode::General { r } => k.add(&k.pow(x, r as u64), &k.one()),
            _ => x.clone(),
        }
    }

    pub fn h_value(&self, k: &FunctionField, x: &RatFunc, y: &RatFunc) -> RatFunc {
        self.f_poly().eval(k, &self.g_value(k, x), y)
    }

    /// The value the recursion finally compares with `y^(p^k)`: the `g = 0`
    /// branch drops the last argument, the other folds the last two with `h`.
    pub fn terminal_value(&self, k: &FunctionField, xs: &[RatFunc]) -> RatFunc {
        let mut vals = xs.to_vec();
        while vals.len() > 1 {
            let last = vals.pop().expect("nonempty");
            if self.g_value(k, &last).is_zero() {
                continue;
            }
            let prev = vals.pop().expect("at least two");
            vals.push(self.h_value(k, &last, &prev));
        }
        vals.pop().unwrap_or_else(|| k.zero())
    }
}

fn collapse_matrix(cfg: &CollapseConfig, args: &[Arc<Term>], y_pow: &Term) -> Formula {
    let m = args.len();
    if m == 1 {
        return Formula::eq(args[0].as_ref().clone(), y_pow.clone());
    }
    let last = &args[m - 1];
    let g = cfg.g_term(last).as_ref().clone();
    let zero_branch = Formula::and(
        Formula::eq(g.clone(), Term::zero()),
        collapse_matrix(cfg, &args[..m - 1], y_pow),
    );
    let mut folded: Vec<Arc<Term>> = args[..m - 2].to_vec();
    folded.push(Arc::new(cfg.h_term(last, &args[m - 2])));
    let unit_branch = Formula::and(
        Formula::ne(g, Term::zero()),
        collapse_matrix(cfg, &folded, y_pow),
    );
    Formula::or(zero_branch, unit_branch)
}

/// A formula with one bound variable `y` for the `n`-tuples of `p`-th
/// powers (the field of `cfg.k` is ignored here).
pub fn collapse_pth_powers(cfg: &CollapseConfig) -> PrenexFormula {
    let args: Vec<Arc<Term>> = (1..=cfg.n)
        .map(|i| Arc::new(Term::var(format!("x{i}"))))
        .collect();
    let y = VarName::new("y");
    let y_pow = Term::pow(Term::Var(y.clone()), cfg.p);
    PrenexFormula::new(vec![y], collapse_matrix(cfg, &args, &y_pow))
}

fn lift_term(
    t: &Term,
    from: &VarName,
    to: &Term,
    memo: &mut HashMap<*const Term, Arc<Term>>,
) -> Term {
    let child = |a: &Arc<Term>, memo: &mut HashMap<*const Term, Arc<Term>>| -> Arc<Term> {
        let key = Arc::as_ptr(a);
        if let Some(r) = memo.get(&key) {
            return r.clone();
        }
        let r = Arc::new(lift_term(a, from, to, memo));
        memo.insert(key, r.clone());
        r
    };
    match t {
        Term::Var(v) if v == from => to.clone(),
        Term::Var(_) | Term::Const(_) | Term::Int(_) => t.clone(),
        Term::Add(a, b) => Term::Add(child(a, memo), child(b, memo)),
        Term::Sub(a, b) => Term::Sub(child(a, memo), child(b, memo)),
        Term::Mul(a, b) => Term::Mul(child(a, memo), child(b, memo)),
        Term::Pow(a, e) => Term::Pow(child(a, memo), *e),
    }
}

/// Replaces every bound variable `y` of `phi` by `y^(p^(k-1))`, turning a
/// formula for tuples of `p`-th powers into one for `p^k`-th powers.
pub fn frobenius_lift(phi: &PrenexFormula, p: u32, k: u32) -> Result<PrenexFormula> {
    if k <= 1 {
        return Ok(phi.clone());
    }
    let e = p
        .checked_pow(k - 1)
        .ok_or_else(|| Error::InvalidConfig(format!("{p}^{} overflows", k - 1)))?;
    let memo = RefCell::new(HashMap::new());
    let mut matrix = phi.matrix.clone();
    for y in &phi.bound {
        let to = Term::pow(Term::Var(y.clone()), e);
        matrix = matrix.map_terms(&|t| lift_term(t, y, &to, &mut memo.borrow_mut()));
        memo.borrow_mut().clear();
    }
    Ok(PrenexFormula::new(phi.bound.clone(), matrix))
}

/// The collapse with `g` chosen by the mode, lifted to exponent `p^k`.
pub fn fin_gen_pipeline(cfg: &CollapseConfig) -> Result<PrenexFormula> {
    frobenius_lift(&collapse_pth_powers(cfg), cfg.p, cfg.k)
}

fn check_field(cfg: &CollapseConfig, k: &FunctionField, xs: &[RatFunc]) -> Result<()> {
    if k.characteristic() != cfg.p {
        return Err(Error::InvalidConfig(format!(
            "configuration is for p = {} but the field has characteristic {}",
            cfg.p,
            k.characteristic()
        )));
    }
    if xs.len() != cfg.n {
        return Err(Error::InvalidConfig(format!(
            "expected {} inputs, got {}",
            cfg.n,
            xs.len()
        )));
    }
    Ok(())
}

/// A witness `y` for the lifted collapse matrix at `xs`, or `None` when some
/// input is not a `p^k`-th power.
pub fn synth_witness(
    xs: &[RatFunc],
    cfg: &CollapseConfig,
    k: &FunctionField,
) -> Result<Option<RatFunc>> {
    check_field(cfg, k, xs)?;
    if !xs.iter().all(|x| k.is_ppow_power(x, cfg.k)) {
        return Ok(None);
    }
    Ok(k.pth_root_iter(&cfg.terminal_value(k, xs), cfg.k))
}

/// Exact truth of the matrix of `phi` at `(xs, y)`, with inputs named
/// `x1..xn` and the single bound variable set to `y`.
pub fn matrix_holds(
    phi: &PrenexFormula,
    xs: &[RatFunc],
    y: &RatFunc,
    k: &FunctionField,
) -> Result<bool> {
    let mut assignment: HashMap<VarName, RatFunc> = xs
        .iter()
        .enumerate()
        .map(|(i, x)| (VarName::new(format!("x{}", i + 1)), x.clone()))
        .collect();
    let [b] = phi.bound.as_slice() else {
        return Err(Error::InvalidConfig("expected one bound variable".into()));
    };
    assignment.insert(b.clone(), y.clone());
    eval_qf_ratfunc(&phi.matrix, &assignment, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FiniteField, Poly};
    use crate::formula::parse_formula;
    use crate::normal::PrenexFormula;

    fn ufd(p: u32, n: usize, k: u32) -> CollapseConfig {
        CollapseConfig::new(p, n, k, CollapseMode::UfdPDivisibleUnits).unwrap()
    }

    fn field(p: u32) -> FunctionField {
        FunctionField::new(FiniteField::new(p, 1).unwrap())
    }

    fn poly(k: &FunctionField, coeffs: &[u32]) -> RatFunc {
        k.poly(Poly::from_coeffs(
            coeffs.iter().map(|&c| crate::field::Fq(c)).collect(),
        ))
    }

    #[test]
    fn pi_formulas() {
        assert_eq!(
            pi_formula(2, 3).to_string(),
            "E y1 y2 . x1 = y1^3 & x2 = y2^3"
        );
        assert_eq!(pi_formula(1, 1).to_string(), "E y1 . x1 = y1");
    }

    #[test]
    fn good_case_polynomials() {
        assert_eq!(good_case_poly(2).to_string(), "X^3*Y + X^3*Y^4 + X^5 + X");
        assert_eq!(good_case_poly(3).to_string(), "X^4*Y + X^4*Y^9 + X^7 + X");
    }

    #[test]
    fn small_collapses() {
        assert_eq!(
            collapse_pth_powers(&ufd(3, 1, 1)).to_string(),
            "E y . x1 = y^3"
        );
        let want = parse_formula(
            "E y . ((x2 = 0 & x1 = y^2) | (x2 != 0 & x2^3*x1 + x2^3*x1^4 + x2^5 + x2 = y^2))",
            false,
        )
        .unwrap();
        assert_eq!(collapse_pth_powers(&ufd(2, 2, 1)).to_formula(), want);
    }

    #[test]
    fn always_one_quantifier() {
        for p in [2, 3, 5] {
            for n in 1..=4 {
                for k in 1..=2 {
                    for mode in [
                        CollapseMode::UfdPDivisibleUnits,
                        CollapseMode::General { r: 1 },
                    ] {
                        let cfg = CollapseConfig::new(p, n, k, mode).unwrap();
                        let phi = fin_gen_pipeline(&cfg).unwrap();
                        assert_eq!(phi.count(), 1);
                        assert!(phi.matrix.is_quantifier_free());
                    }
                }
            }
        }
    }

    #[test]
    fn config_validation() {
        assert!(CollapseConfig::new(4, 2, 1, CollapseMode::UfdPDivisibleUnits).is_err());
        assert!(CollapseConfig::new(3, 2, 1, CollapseMode::General { r: 3 }).is_err());
        assert!(CollapseConfig::new(3, 2, 1, CollapseMode::None).is_err());
        assert!(CollapseConfig::new(2, 17, 1, CollapseMode::UfdPDivisibleUnits).is_err());
        assert!(CollapseConfig::new(2, 16, 1, CollapseMode::UfdPDivisibleUnits).is_ok());
    }

    #[test]
    fn general_mode_degrees() {
        let cfg = CollapseConfig::new(3, 2, 1, CollapseMode::General { r: 2 }).unwrap();
        assert_eq!(cfg.h_degrees(), (14, 9));
        let cfg = CollapseConfig::new(2, 2, 1, CollapseMode::General { r: 1 }).unwrap();
        let x = Arc::new(Term::var("X"));
        let y = Arc::new(Term::var("Y"));
        assert_eq!(
            cfg.h_term(&x, &y).to_string(),
            "(X + 1)^3*Y + (X + 1)^3*Y^4 + (X + 1)^5 + (X + 1)"
        );
    }

    #[test]
    fn ufd_pipeline_matches_collapse() {
        for n in 1..=4 {
            let cfg = ufd(2, n, 1);
            assert_eq!(fin_gen_pipeline(&cfg).unwrap(), collapse_pth_powers(&cfg));
        }
    }

    #[test]
    fn lift_by_substitution() {
        let phi = collapse_pth_powers(&ufd(2, 1, 1));
        assert_eq!(frobenius_lift(&phi, 2, 1).unwrap(), phi);
        let lifted = frobenius_lift(&phi, 2, 2).unwrap();
        assert_eq!(lifted.to_string(), "E y . x1 = (y^2)^2");
        let pre = PrenexFormula::from_prenex_formula(
            &parse_formula("E y . x1 = (y^2)^2", false).unwrap(),
        )
        .unwrap();
        assert_eq!(lifted, pre);
    }

    #[test]
    fn witness_for_squares_of_t_and_t_plus_one() {
        let k = field(2);
        let cfg = ufd(2, 2, 1);
        let t = poly(&k, &[0, 1]);
        let t1 = poly(&k, &[1, 1]);
        let xs = vec![k.pow(&t, 2), k.pow(&t1, 2)];
        let y = synth_witness(&xs, &cfg, &k).unwrap().unwrap();
        // f(t + 1, t) computed independently as a polynomial
        let a = k.mul(&k.pow(&t1, 3), &t);
        let b = k.mul(&k.pow(&t1, 3), &k.pow(&t, 4));
        let c = k.pow(&t1, 5);
        let want = k.add(&k.add(&k.add(&a, &b), &c), &t1);
        assert_eq!(y, want);
        assert!(matrix_holds(&collapse_pth_powers(&cfg), &xs, &y, &k).unwrap());
    }

    #[test]
    fn lifted_witness_by_repeated_roots() {
        let k = field(2);
        let cfg = ufd(2, 2, 2);
        let t = poly(&k, &[0, 1]);
        let t1 = poly(&k, &[1, 1]);
        let xs = vec![k.pow(&t, 4), k.pow(&t1, 4)];
        let y = synth_witness(&xs, &cfg, &k).unwrap().unwrap();
        let base = synth_witness(&xs, &ufd(2, 2, 1), &k).unwrap().unwrap();
        assert_eq!(Some(y.clone()), k.pth_root(&base));
        assert!(matrix_holds(&fin_gen_pipeline(&cfg).unwrap(), &xs, &y, &k).unwrap());
    }

    #[test]
    fn absent_witnesses_and_units() {
        let k = field(2);
        let cfg = ufd(2, 2, 1);
        let t = poly(&k, &[0, 1]);
        assert_eq!(synth_witness(&[t, k.one()], &cfg, &k).unwrap(), None);
        for p in [2, 3, 5] {
            let k = field(p);
            let cfg = ufd(p, 2, 1);
            let xs = vec![k.one(), k.one()];
            let y = synth_witness(&xs, &cfg, &k).unwrap().unwrap();
            let h11 = cfg.h_value(&k, &k.one(), &k.one());
            assert_eq!(k.pow(&y, p as u64), h11);
            assert!(matrix_holds(&collapse_pth_powers(&cfg), &xs, &y, &k).unwrap());
        }
    }

    #[test]
    fn zero_branch_drops_argument() {
        let k = field(3);
        let cfg = ufd(3, 3, 1);
        let t = poly(&k, &[0, 1]);
        let xs = vec![k.pow(&t, 3), k.one(), k.zero()];
        let y = synth_witness(&xs, &cfg, &k).unwrap().unwrap();
        assert!(matrix_holds(&collapse_pth_powers(&cfg), &xs, &y, &k).unwrap());
        let cfg = CollapseConfig::new(3, 2, 1, CollapseMode::General { r: 2 }).unwrap();
        let minus_one = k.constant(k.base().from_i64(-1));
        // g(X) = X^2 + 1 has no root in F_3, so only the h branch is used
        let xs = vec![k.pow(&t, 3), minus_one];
        let y = synth_witness(&xs, &cfg, &k).unwrap().unwrap();
        assert!(matrix_holds(&collapse_pth_powers(&cfg), &xs, &y, &k).unwrap());
    }

    #[test]
    fn mismatched_field_is_an_error() {
        let k = field(3);
        assert!(synth_witness(&[k.one()], &ufd(2, 1, 1), &k).is_err());
        assert!(synth_witness(&[k.one()], &ufd(3, 2, 1), &k).is_err());
    }

    #[test]
    fn sixteen_inputs_share_structure() {
        let cfg = ufd(2, 16, 1);
        let phi = collapse_pth_powers(&cfg);
        assert_eq!(phi.count(), 1);
        let k = field(2);
        let xs: Vec<RatFunc> = (0..16).map(|i| k.pow(&poly(&k, &[i % 2, 1]), 2)).collect();
        let y = synth_witness(&xs[..3], &ufd(2, 3, 1), &k).unwrap().unwrap();
        assert!(matrix_holds(&collapse_pth_powers(&ufd(2, 3, 1)), &xs[..3], &y, &k).unwrap());
    }
}
