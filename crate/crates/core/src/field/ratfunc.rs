//! The rational function field `F_q(t)`.

use serde::{Deserialize, Serialize};

use super::gf::{FiniteField, Fq};
use super::poly::Poly;

/// A reduced fraction `num / den` with `den` monic and `gcd(num, den) = 1`.
/// Zero is `0 / 1`, so structural equality is field equality.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// `max(deg num, deg den)`, with 0 for zero.
    pub fn height(&self) -> usize {
        self.num.degree_or_zero().max(self.den.degree_or_zero())
    }

    pub fn from_poly(p: Poly) -> RatFunc {
        RatFunc {
            num: p,
            den: Poly::one(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionField {
    base: FiniteField,
}

impl FunctionField {
    pub fn new(base: FiniteField) -> Self {
        FunctionField { base }
    }

    pub fn base(&self) -> &FiniteField {
        &self.base
    }

    pub fn characteristic(&self) -> u32 {
        self.base.characteristic()
    }

    pub fn zero(&self) -> RatFunc {
        RatFunc::from_poly(Poly::zero())
    }

    pub fn one(&self) -> RatFunc {
        RatFunc::from_poly(Poly::one())
    }

    pub fn t(&self) -> RatFunc {
        RatFunc::from_poly(Poly::t())
    }

    pub fn constant(&self, c: Fq) -> RatFunc {
        RatFunc::from_poly(Poly::constant(c))
    }

    pub fn poly(&self, p: Poly) -> RatFunc {
        RatFunc::from_poly(p)
    }

    /// Builds a reduced fraction; `None` when the denominator is zero.
    pub fn fraction(&self, num: Poly, den: Poly) -> Option<RatFunc> {
        if den.is_zero() {
            return None;
        }
        let f = &self.base;
        if num.is_zero() {
            return Some(self.zero());
        }
        let g = num.gcd(&den, f);
        let (mut n, mut d) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g, f), den.div_exact(&g, f))
        };
        if !d.is_monic() {
            let inv = f.inv(d.leading()).unwrap();
            n = n.scale(inv, f);
            d = d.scale(inv, f);
        }
        Some(RatFunc { num: n, den: d })
    }

    pub fn add(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        let f = &self.base;
        if a.den.is_one() && b.den.is_one() {
            return RatFunc::from_poly(a.num.add(&b.num, f));
        }
        if a.den == b.den {
            return self.fraction(a.num.add(&b.num, f), a.den.clone()).unwrap();
        }
        let g = a.den.gcd(&b.den, f);
        if g.is_one() {
            let num = a.num.mul(&b.den, f).add(&b.num.mul(&a.den, f), f);
            let den = a.den.mul(&b.den, f);
            return RatFunc { num, den };
        }
        let ad = a.den.div_exact(&g, f);
        let bd = b.den.div_exact(&g, f);
        let num = a.num.mul(&bd, f).add(&b.num.mul(&ad, f), f);
        let den = ad.mul(&b.den, f);
        let g2 = num.gcd(&g, f);
        if g2.is_one() || num.is_zero() {
            return self.fraction(num, den).unwrap();
        }
        RatFunc {
            num: num.div_exact(&g2, f),
            den: den.div_exact(&g2, f),
        }
    }

    pub fn neg(&self, a: &RatFunc) -> RatFunc {
        RatFunc {
            num: a.num.neg(&self.base),
            den: a.den.clone(),
        }
    }

    pub fn sub(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        let f = &self.base;
        if a.is_zero() || b.is_zero() {
            return self.zero();
        }
        if a.den.is_one() && b.den.is_one() {
            return RatFunc::from_poly(a.num.mul(&b.num, f));
        }
        let g1 = a.num.gcd(&b.den, f);
        let g2 = b.num.gcd(&a.den, f);
        let an = a.num.div_exact(&g1, f);
        let bd = b.den.div_exact(&g1, f);
        let bn = b.num.div_exact(&g2, f);
        let ad = a.den.div_exact(&g2, f);
        RatFunc {
            num: an.mul(&bn, f),
            den: ad.mul(&bd, f),
        }
    }

    pub fn inv(&self, a: &RatFunc) -> Option<RatFunc> {
        if a.is_zero() {
            return None;
        }
        let f = &self.base;
        let lc = f.inv(a.num.leading()).unwrap();
        Some(RatFunc {
            num: a.den.scale(lc, f),
            den: a.num.scale(lc, f),
        })
    }

    pub fn div(&self, a: &RatFunc, b: &RatFunc) -> Option<RatFunc> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    pub fn pow(&self, a: &RatFunc, e: u64) -> RatFunc {
        let f = &self.base;
        // a reduced fraction stays reduced under powers
        RatFunc {
            num: a.num.pow(e, f),
            den: a.den.pow(e, f),
        }
    }

    /// Frobenius `u -> u^p`, computed coefficientwise.
    pub fn frobenius(&self, a: &RatFunc) -> RatFunc {
        RatFunc {
            num: a.num.frobenius(&self.base),
            den: a.den.frobenius(&self.base),
        }
    }

    /// Membership in `F_q(t)^p`: both parts of the reduced fraction lie in
    /// `F_q[t^p]`. Valid because every element of `F_q` is a `p`-th power.
    pub fn pth_power_test(&self, u: &RatFunc) -> bool {
        let p = self.characteristic() as usize;
        u.num.in_frobenius_image(p) && u.den.in_frobenius_image(p)
    }

    /// The unique `w` with `w^p = u`, if it exists.
    pub fn pth_root(&self, u: &RatFunc) -> Option<RatFunc> {
        let f = &self.base;
        Some(RatFunc {
            num: u.num.pth_root(f)?,
            den: u.den.pth_root(f)?,
        })
    }

    /// `u^(1/p^k)` by repeated roots.
    pub fn pth_root_iter(&self, u: &RatFunc, k: u32) -> Option<RatFunc> {
        (0..k).try_fold(u.clone(), |acc, _| self.pth_root(&acc))
    }

    /// Membership in `F_q(t)^(p^k)`.
    pub fn is_ppow_power(&self, u: &RatFunc, k: u32) -> bool {
        self.pth_root_iter(u, k).is_some()
    }

    /// Coordinates of `z` in the `p`-basis `1, t, ..., t^(p-1)`:
    /// the unique `c_0, ..., c_{p-1}` with `z = sum_i t^i c_i^p`.
    pub fn p_basis_decompose(&self, z: &RatFunc) -> Vec<RatFunc> {
        let f = &self.base;
        let p = self.characteristic() as usize;
        // z = num * den^(p-1) / den^p
        let scaled = z.num.mul(&z.den.pow(p as u64 - 1, f), f);
        (0..p)
            .map(|i| {
                let part: Vec<Fq> = scaled
                    .coeffs()
                    .iter()
                    .skip(i)
                    .step_by(p)
                    .map(|&c| f.pth_root(c))
                    .collect();
                self.fraction(Poly::from_coeffs(part), z.den.clone())
                    .unwrap()
            })
            .collect()
    }

    pub fn format(&self, a: &RatFunc) -> String {
        let f = &self.base;
        let wrap = |p: &Poly| {
            let s = p.format(f, "t");
            let simple =
                p.coeffs().iter().filter(|c| !c.is_zero()).count() <= 1 && !s.contains('*');
            if simple {
                s
            } else {
                format!("({s})")
            }
        };
        if a.den.is_one() {
            a.num.format(f, "t")
        } else {
            format!("{}/{}", wrap(&a.num), wrap(&a.den))
        }
    }

    /// All reduced fractions with numerator and denominator of degree at most
    /// `bound`, ordered by height and then lexicographically by coefficients.
    pub fn enumerate_bounded(&self, bound: usize) -> Vec<RatFunc> {
        let f = &self.base;
        let mut out = Vec::new();
        for h in 0..=bound {
            let nums = Poly::enumerate_up_to(f, h);
            let dens: Vec<Poly> = (0..=h).flat_map(|d| Poly::enumerate_monic(f, d)).collect();
            for n in &nums {
                for d in &dens {
                    if n.degree_or_zero().max(d.degree_or_zero()) != h {
                        continue;
                    }
                    if n.is_zero() {
                        if d.is_one() {
                            out.push(self.zero());
                        }
                        continue;
                    }
                    if n.gcd(d, f).is_one() {
                        out.push(RatFunc {
                            num: n.clone(),
                            den: d.clone(),
                        });
                    }
                }
            }
        }
        out
    }

    /// Number of elements `enumerate_bounded(bound)` would return, without
    /// building them; used for cap checks.
    pub fn bounded_count_estimate(&self, bound: usize) -> u128 {
        let q = self.base.size() as u128;
        q.saturating_pow(bound as u32 + 1)
            .saturating_mul(q.saturating_pow(bound as u32 + 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ff(p: u32) -> FunctionField {
        FunctionField::new(FiniteField::new(p, 1).unwrap())
    }

    fn poly(k: &FunctionField, c: &[i64]) -> RatFunc {
        k.poly(Poly::from_coeffs(
            c.iter().map(|&x| k.base().from_i64(x)).collect(),
        ))
    }

    #[test]
    fn arithmetic() {
        let k = ff(2);
        let t = k.t();
        let t1 = k.add(&t, &k.one());
        assert_eq!(k.format(&k.mul(&t, &t1)), "t^2 + t");
        let q = k.div(&t, &t1).unwrap();
        assert_eq!(k.format(&q), "t/(t + 1)");
        assert_eq!(k.mul(&q, &t1), t);
        let s = k.add(&q, &k.inv(&t1).unwrap());
        assert_eq!(s, k.one());
        assert_eq!(k.sub(&q, &q), k.zero());
    }

    #[test]
    fn pth_power_examples() {
        let k = ff(2);
        // t^2/(t^2+1) = (t/(t+1))^2
        let u = k
            .fraction(
                Poly::from_coeffs(vec![Fq(0), Fq(0), Fq(1)]),
                Poly::from_coeffs(vec![Fq(1), Fq(0), Fq(1)]),
            )
            .unwrap();
        assert!(k.pth_power_test(&u));
        let w = k.pth_root(&u).unwrap();
        assert_eq!(k.format(&w), "t/(t + 1)");
        assert_eq!(k.pow(&w, 2), u);
        assert!(!k.pth_power_test(&k.t()));
        assert!(k.pth_root(&k.t()).is_none());
        assert_eq!(k.pth_root(&k.pow(&k.t(), 2)), Some(k.t()));

        let k3 = ff(3);
        let cube = poly(&k3, &[1, 0, 0, 1]);
        assert!(k3.pth_power_test(&cube));
        assert_eq!(k3.pth_root(&cube), Some(poly(&k3, &[1, 1])));
    }

    #[test]
    fn p_basis_examples() {
        let k = ff(2);
        let z = poly(&k, &[0, 1, 0, 1]);
        let c = k.p_basis_decompose(&z);
        assert_eq!(c, vec![k.zero(), poly(&k, &[1, 1])]);
        assert_eq!(k.p_basis_decompose(&k.one()), vec![k.one(), k.zero()]);
        let k3 = ff(3);
        assert_eq!(
            k3.p_basis_decompose(&k3.t()),
            vec![k3.zero(), k3.one(), k3.zero()]
        );
    }

    #[test]
    fn bounded_enumeration() {
        let k = ff(2);
        let els = k.enumerate_bounded(1);
        let shown: Vec<String> = els.iter().map(|e| k.format(e)).collect();
        assert_eq!(
            shown,
            vec![
                "0",
                "1",
                "1/t",
                "1/(t + 1)",
                "t",
                "t/(t + 1)",
                "t + 1",
                "(t + 1)/t"
            ]
        );
        let mut sorted = els.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), els.len());
        assert_eq!(ff(3).enumerate_bounded(1).len(), 27);
    }
}
