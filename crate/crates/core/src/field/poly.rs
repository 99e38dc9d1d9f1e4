//! Dense univariate polynomials over a finite field.

use serde::{Deserialize, Serialize};

use super::gf::{FiniteField, Fq};

/// Coefficients from degree 0 upwards; never has trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Poly {
    coeffs: Vec<Fq>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly::constant(Fq::ONE)
    }

    pub fn constant(c: Fq) -> Poly {
        Poly::from_coeffs(vec![c])
    }

    /// The monomial `c t^k`.
    pub fn monomial(c: Fq, k: usize) -> Poly {
        let mut v = vec![Fq::ZERO; k + 1];
        v[k] = c;
        Poly::from_coeffs(v)
    }

    /// The indeterminate `t`.
    pub fn t() -> Poly {
        Poly::monomial(Fq::ONE, 1)
    }

    pub fn from_coeffs(mut coeffs: Vec<Fq>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[Fq] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == Fq::ONE
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial counted as degree 0.
    pub fn degree_or_zero(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> Fq {
        self.coeffs.last().copied().unwrap_or(Fq::ZERO)
    }

    pub fn coeff(&self, i: usize) -> Fq {
        self.coeffs.get(i).copied().unwrap_or(Fq::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Fq::ONE
    }

    pub fn add(&self, other: &Poly, f: &FiniteField) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::from_coeffs(
            (0..n)
                .map(|i| f.add(self.coeff(i), other.coeff(i)))
                .collect(),
        )
    }

    pub fn neg(&self, f: &FiniteField) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|&c| f.neg(c)).collect())
    }

    pub fn sub(&self, other: &Poly, f: &FiniteField) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::from_coeffs(
            (0..n)
                .map(|i| f.sub(self.coeff(i), other.coeff(i)))
                .collect(),
        )
    }

    pub fn scale(&self, c: Fq, f: &FiniteField) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly::from_coeffs(self.coeffs.iter().map(|&x| f.mul(x, c)).collect())
    }

    pub fn mul(&self, other: &Poly, f: &FiniteField) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if f.degree() == 1 {
            return self.mul_prime(other, f.characteristic() as u64);
        }
        let mut out = vec![Fq::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Poly::from_coeffs(out)
    }

    /// Schoolbook product over a prime field with delayed reduction.
    fn mul_prime(&self, other: &Poly, p: u64) -> Poly {
        let mut acc = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        // keep accumulators far from overflow: reduce every `batch` rows
        let batch = (u64::MAX / ((p - 1) * (p - 1)).max(1)).min(1 << 20) as usize;
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.0 == 0 {
                continue;
            }
            let a = a.0 as u64;
            for (j, &b) in other.coeffs.iter().enumerate() {
                acc[i + j] += a * b.0 as u64;
            }
            if (i + 1) % batch == 0 {
                for x in acc.iter_mut() {
                    *x %= p;
                }
            }
        }
        Poly::from_coeffs(acc.into_iter().map(|x| Fq((x % p) as u32)).collect())
    }

    pub fn pow(&self, mut e: u64, f: &FiniteField) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, f);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, f);
            }
        }
        acc
    }

    /// Euclidean division; panics on division by zero.
    pub fn div_rem(&self, divisor: &Poly, f: &FiniteField) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let dd = divisor.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let lead_inv = f
            .inv(divisor.leading())
            .expect("nonzero leading coefficient");
        let mut r = self.coeffs.clone();
        let mut q = vec![Fq::ZERO; r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = r[k + dd];
            if c.is_zero() {
                continue;
            }
            let factor = f.mul(c, lead_inv);
            q[k] = factor;
            for (i, &dc) in divisor.coeffs.iter().enumerate() {
                r[k + i] = f.sub(r[k + i], f.mul(factor, dc));
            }
        }
        r.truncate(dd);
        (Poly::from_coeffs(q), Poly::from_coeffs(r))
    }

    pub fn rem(&self, divisor: &Poly, f: &FiniteField) -> Poly {
        self.div_rem(divisor, f).1
    }

    /// Exact division; the caller guarantees divisibility.
    pub fn div_exact(&self, divisor: &Poly, f: &FiniteField) -> Poly {
        let (q, r) = self.div_rem(divisor, f);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn monic(&self, f: &FiniteField) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let inv = f.inv(self.leading()).unwrap();
        self.scale(inv, f)
    }

    /// Monic greatest common divisor (zero iff both inputs are zero).
    pub fn gcd(&self, other: &Poly, f: &FiniteField) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b, f);
            a = b;
            b = r;
        }
        a.monic(f)
    }

    pub fn eval(&self, x: Fq, f: &FiniteField) -> Fq {
        self.coeffs
            .iter()
            .rev()
            .fold(Fq::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn derivative(&self, f: &FiniteField) -> Poly {
        Poly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| f.mul(c, f.from_u64(i as u64)))
                .collect(),
        )
    }

    /// `t^k * self`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Fq::ZERO; k];
        v.extend_from_slice(&self.coeffs);
        Poly { coeffs: v }
    }

    /// True iff every nonzero coefficient sits at an exponent divisible by `p`,
    /// i.e. the polynomial lies in `F_q[t^p]`.
    pub fn in_frobenius_image(&self, p: usize) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(i, c)| c.is_zero() || i % p == 0)
    }

    /// For a polynomial in `F_q[t^p]`, the unique `w` with `w^p = self`.
    pub fn pth_root(&self, f: &FiniteField) -> Option<Poly> {
        let p = f.characteristic() as usize;
        if !self.in_frobenius_image(p) {
            return None;
        }
        Some(Poly::from_coeffs(
            self.coeffs
                .iter()
                .step_by(p)
                .map(|&c| f.pth_root(c))
                .collect(),
        ))
    }

    /// Applies Frobenius: `w -> w^p`, computed coefficientwise.
    pub fn frobenius(&self, f: &FiniteField) -> Poly {
        let p = f.characteristic() as usize;
        if self.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Fq::ZERO; (self.coeffs.len() - 1) * p + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            v[i * p] = f.frobenius(c);
        }
        Poly::from_coeffs(v)
    }

    /// Human readable form in the variable `var`.
    pub fn format(&self, f: &FiniteField, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            let cs = f.format(c);
            parts.push(match i {
                0 => cs,
                _ if c == Fq::ONE => mono,
                _ => format!("{cs}*{mono}"),
            });
        }
        parts.join(" + ")
    }

    /// All polynomials of degree at most `max_deg` (including zero), in
    /// lexicographic order of coefficients from the top degree down.
    pub fn enumerate_up_to(f: &FiniteField, max_deg: usize) -> Vec<Poly> {
        let q = f.size() as u64;
        let count = q.pow(max_deg as u32 + 1);
        (0..count)
            .map(|mut idx| {
                let mut c = vec![Fq::ZERO; max_deg + 1];
                for slot in c.iter_mut() {
                    *slot = Fq((idx % q) as u32);
                    idx /= q;
                }
                Poly::from_coeffs(c)
            })
            .collect()
    }

    /// Monic polynomials of degree exactly `deg`, in lexicographic order.
    pub fn enumerate_monic(f: &FiniteField, deg: usize) -> Vec<Poly> {
        let q = f.size() as u64;
        let count = q.pow(deg as u32);
        (0..count)
            .map(|mut idx| {
                let mut c = vec![Fq::ZERO; deg + 1];
                for slot in c.iter_mut().take(deg) {
                    *slot = Fq((idx % q) as u32);
                    idx /= q;
                }
                c[deg] = Fq::ONE;
                Poly::from_coeffs(c)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> FiniteField {
        FiniteField::new(2, 1).unwrap()
    }

    fn p(f: &FiniteField, c: &[i64]) -> Poly {
        Poly::from_coeffs(c.iter().map(|&x| f.from_i64(x)).collect())
    }

    #[test]
    fn arithmetic_identities() {
        let f = FiniteField::new(3, 1).unwrap();
        let a = p(&f, &[1, 2, 0, 1]);
        let b = p(&f, &[2, 1]);
        let (q, r) = a.div_rem(&b, &f);
        assert_eq!(q.mul(&b, &f).add(&r, &f), a);
        assert!(r.degree().is_none() || r.degree() < b.degree());
        assert_eq!(a.sub(&a, &f), Poly::zero());
        let g = a.mul(&b, &f).gcd(&b.mul(&b, &f), &f);
        assert_eq!(g, b.monic(&f));
    }

    #[test]
    fn frobenius_on_polynomials() {
        let f = FiniteField::new(3, 1).unwrap();
        let t1 = p(&f, &[1, 1]);
        let cube = t1.pow(3, &f);
        assert_eq!(cube, p(&f, &[1, 0, 0, 1]));
        assert_eq!(cube.pth_root(&f), Some(t1.clone()));
        assert_eq!(t1.frobenius(&f), cube);
        assert_eq!(t1.pth_root(&f), None);
    }

    #[test]
    fn formatting_and_enumeration() {
        let f = f2();
        assert_eq!(p(&f, &[0, 1, 1]).format(&f, "t"), "t^2 + t");
        assert_eq!(Poly::enumerate_up_to(&f, 1).len(), 4);
        assert_eq!(Poly::enumerate_monic(&f, 2).len(), 4);
        let f9 = FiniteField::new(3, 2).unwrap();
        assert_eq!(
            Poly::from_coeffs(vec![Fq(3), Fq(1)]).format(&f9, "t"),
            "t + [a]"
        );
    }
}
