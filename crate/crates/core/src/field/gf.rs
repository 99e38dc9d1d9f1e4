//! Finite fields `F_q`, `q = p^d`, as `F_p[a]/(m(a))` for the lowest
//! lexicographic monic irreducible `m` of degree `d`.
//!
//! Elements are stored as their coefficient vector read as a base-`p`
//! integer: `c_0 + c_1 p + ... + c_{d-1} p^{d-1}` encodes
//! `c_0 + c_1 a + ... + c_{d-1} a^{d-1}`. Numeric order of the encoding is
//! lexicographic order on `(c_{d-1}, ..., c_0)`, which is also the
//! enumeration order of the field.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest field size for which log tables are built.
pub const MAX_FIELD_SIZE: u32 = 1 << 22;

#[derive(
    Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Fq(pub u32);

impl Fq {
    pub const ZERO: Fq = Fq(0);
    pub const ONE: Fq = Fq(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2u64;
    while i * i <= n {
        if n % i == 0 {
            return false;
        }
        i += 1;
    }
    true
}

/// Splits `q` as `p^d` with `p` prime, if possible.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while q % p != 0 {
        p += 1;
    }
    let mut d = 0u32;
    let mut r = q;
    while r % p == 0 {
        r /= p;
        d += 1;
    }
    (r == 1 && is_prime(p)).then_some((p as u32, d))
}

#[derive(Clone)]
pub struct FiniteField {
    p: u32,
    d: u32,
    q: u32,
    /// Monic modulus, coefficients from degree 0 to degree `d`.
    modulus: Vec<u32>,
    /// `exp[i] = g^i` for a fixed primitive element `g`, `i < q - 1`.
    exp: Vec<u32>,
    /// `log[x]` for `x != 0`.
    log: Vec<u32>,
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q)
    }
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.d == other.d && self.modulus == other.modulus
    }
}

impl Eq for FiniteField {}

/// Multiplies two elements given as coefficient vectors modulo `modulus`.
fn slow_mul(p: u32, modulus: &[u32], a: &[u32], b: &[u32]) -> Vec<u32> {
    let d = modulus.len() - 1;
    let mut prod = vec![0u64; 2 * d.max(1)];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    for k in (d..prod.len()).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        prod[k] = 0;
        for (i, &m) in modulus[..d].iter().enumerate() {
            let sub = c * m as u64 % p as u64;
            prod[k - d + i] = (prod[k - d + i] + p as u64 - sub) % p as u64;
        }
    }
    prod.truncate(d);
    prod.into_iter().map(|c| c as u32).collect()
}

fn digits(mut x: u32, p: u32, d: u32) -> Vec<u32> {
    (0..d)
        .map(|_| {
            let c = x % p;
            x /= p;
            c
        })
        .collect()
}

fn undigits(c: &[u32], p: u32) -> u32 {
    c.iter().rev().fold(0, |acc, &x| acc * p + x)
}

/// Checks irreducibility of a monic polynomial over `F_p` by trial division
/// with every monic polynomial of degree at most half its degree.
pub fn is_irreducible_mod_p(p: u32, poly: &[u32]) -> bool {
    let d = poly.len() - 1;
    if d <= 1 {
        return d == 1;
    }
    for deg in 1..=d / 2 {
        let count = (p as u64).pow(deg as u32);
        for idx in 0..count {
            let mut div = digits(idx as u32, p, deg as u32);
            div.push(1);
            if poly_rem_mod_p(p, poly, &div).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn poly_rem_mod_p(p: u32, a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut r: Vec<u64> = a.iter().map(|&c| c as u64).collect();
    let db = b.len() - 1;
    let pp = p as u64;
    while r.len() > db {
        let lead = *r.last().unwrap() % pp;
        let shift = r.len() - 1 - db;
        if lead != 0 {
            for (i, &c) in b.iter().enumerate() {
                r[shift + i] = (r[shift + i] + pp * pp - lead * c as u64 % pp) % pp;
            }
        }
        r.pop();
    }
    r.into_iter().map(|c| c as u32).collect()
}

impl FiniteField {
    /// Builds `F_{p^d}` with the lowest lexicographic irreducible modulus.
    pub fn new(p: u32, d: u32) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::InvalidProfile(format!("{p} is not prime")));
        }
        if d == 0 {
            return Err(Error::InvalidProfile(
                "extension degree must be positive".into(),
            ));
        }
        let q = (p as u64)
            .checked_pow(d)
            .filter(|&q| q <= MAX_FIELD_SIZE as u64)
            .ok_or_else(|| {
                Error::UnsupportedProfile(format!("F_{p}^{d} exceeds the supported size"))
            })? as u32;
        let modulus = if d == 1 {
            vec![0, 1]
        } else {
            (0..q)
                .map(|idx| {
                    let mut m = digits(idx, p, d);
                    m.push(1);
                    m
                })
                .find(|m| is_irreducible_mod_p(p, m))
                .expect("irreducible polynomials exist in every degree")
        };
        Self::with_modulus(p, modulus)
    }

    /// Builds `F_p[a]/(modulus)`; the modulus must be monic and irreducible.
    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<Self> {
        let d = (modulus.len() - 1) as u32;
        if modulus.last() != Some(&1) {
            return Err(Error::InvalidProfile("modulus must be monic".into()));
        }
        if !is_irreducible_mod_p(p, &modulus) {
            return Err(Error::InvalidProfile("modulus is reducible".into()));
        }
        let q = p.pow(d);
        let order = q - 1;
        let mut exp = vec![0u32; order.max(1) as usize];
        let mut log = vec![0u32; q as usize];
        // search a primitive element in enumeration order
        for g in 1..q {
            let gd = digits(g, p, d);
            let mut cur = vec![0u32; d as usize];
            cur[0] = 1;
            let mut seen_one_early = false;
            for i in 0..order {
                let idx = undigits(&cur, p);
                if i > 0 && idx == 1 {
                    seen_one_early = true;
                    break;
                }
                exp[i as usize] = idx;
                cur = slow_mul(p, &modulus, &cur, &gd);
            }
            if !seen_one_early {
                for (i, &e) in exp.iter().enumerate().take(order as usize) {
                    log[e as usize] = i as u32;
                }
                break;
            }
        }
        Ok(FiniteField {
            p,
            d,
            q,
            modulus,
            exp,
            log,
        })
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn size(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn elements(&self) -> impl Iterator<Item = Fq> + '_ {
        (0..self.q).map(Fq)
    }

    /// The class of the indeterminate `a` (equal to 0 in a prime field).
    pub fn generator(&self) -> Fq {
        if self.d == 1 {
            Fq(0)
        } else {
            Fq(self.p)
        }
    }

    pub fn coefficients(&self, x: Fq) -> Vec<u32> {
        digits(x.0, self.p, self.d)
    }

    /// Element `sum c_i a^i`; coefficients past the degree are reduced.
    pub fn from_coefficients(&self, c: &[u32]) -> Fq {
        if c.len() <= self.d as usize {
            let v: Vec<u32> = c.iter().map(|x| x % self.p).collect();
            return Fq(undigits(&v, self.p));
        }
        let a = self.generator();
        c.iter().rev().fold(Fq::ZERO, |acc, &x| {
            self.add(self.mul(acc, a), self.from_u64(x as u64))
        })
    }

    pub fn from_u64(&self, n: u64) -> Fq {
        Fq((n % self.p as u64) as u32)
    }

    pub fn from_int(&self, n: &BigInt) -> Fq {
        let r = n.mod_floor(&BigInt::from(self.p));
        Fq(r.to_u32().expect("residue fits"))
    }

    pub fn from_i64(&self, n: i64) -> Fq {
        Fq(n.rem_euclid(self.p as i64) as u32)
    }

    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        if self.d == 1 {
            let s = a.0 + b.0;
            return Fq(if s >= self.p { s - self.p } else { s });
        }
        if self.p == 2 {
            return Fq(a.0 ^ b.0);
        }
        let (mut x, mut y, mut out, mut place) = (a.0, b.0, 0u32, 1u32);
        while x > 0 || y > 0 {
            let s = (x % self.p + y % self.p) % self.p;
            out += s * place;
            place *= self.p;
            x /= self.p;
            y /= self.p;
        }
        Fq(out)
    }

    pub fn neg(&self, a: Fq) -> Fq {
        if self.p == 2 {
            return a;
        }
        if self.d == 1 {
            return Fq(if a.0 == 0 { 0 } else { self.p - a.0 });
        }
        let (mut x, mut out, mut place) = (a.0, 0u32, 1u32);
        while x > 0 {
            let c = x % self.p;
            out += ((self.p - c) % self.p) * place;
            place *= self.p;
            x /= self.p;
        }
        Fq(out)
    }

    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        if a.0 == 0 || b.0 == 0 {
            return Fq(0);
        }
        if self.d == 1 {
            return Fq(((a.0 as u64 * b.0 as u64) % self.p as u64) as u32);
        }
        let order = self.q - 1;
        let s = self.log[a.0 as usize] + self.log[b.0 as usize];
        Fq(self.exp[(if s >= order { s - order } else { s }) as usize])
    }

    pub fn inv(&self, a: Fq) -> Option<Fq> {
        if a.0 == 0 {
            return None;
        }
        let order = self.q - 1;
        let l = self.log[a.0 as usize];
        Some(Fq(self.exp[((order - l) % order) as usize]))
    }

    pub fn div(&self, a: Fq, b: Fq) -> Option<Fq> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: Fq, e: u64) -> Fq {
        if e == 0 {
            return Fq(1);
        }
        if a.0 == 0 {
            return Fq(0);
        }
        let order = (self.q - 1) as u64;
        let l = self.log[a.0 as usize] as u64;
        Fq(self.exp[((l * (e % order)) % order) as usize])
    }

    /// Signed exponent (negative powers invert).
    pub fn pow_signed(&self, a: Fq, e: &BigInt) -> Option<Fq> {
        if e.is_negative() {
            let inv = self.inv(a)?;
            Some(self.pow_big(inv, &-e))
        } else {
            Some(self.pow_big(a, e))
        }
    }

    fn pow_big(&self, a: Fq, e: &BigInt) -> Fq {
        if e.sign() == num_bigint::Sign::NoSign {
            return Fq(1);
        }
        if a.0 == 0 {
            return Fq(0);
        }
        let order = BigInt::from(self.q - 1);
        let r = e.mod_floor(&order).to_u64().unwrap();
        self.pow(a, r)
    }

    /// Frobenius `x -> x^p`.
    pub fn frobenius(&self, a: Fq) -> Fq {
        self.pow(a, self.p as u64)
    }

    /// The unique `p`-th root (Frobenius is bijective on a finite field).
    pub fn pth_root(&self, a: Fq) -> Fq {
        self.pow(a, (self.q / self.p) as u64)
    }

    /// Multiplicative order of a nonzero element.
    pub fn mult_order(&self, a: Fq) -> Option<u32> {
        if a.0 == 0 {
            return None;
        }
        let order = self.q - 1;
        let l = self.log[a.0 as usize];
        Some(order / gcd_u32(order, l))
    }

    /// Renders an element: integers for prime fields, `[poly in a]` otherwise.
    pub fn format(&self, a: Fq) -> String {
        if self.d == 1 {
            return a.0.to_string();
        }
        format!("[{}]", format_coeff_poly(&self.coefficients(a), "a"))
    }
}

fn gcd_u32(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Renders integer coefficients `c_0, c_1, ...` as a polynomial in `var`,
/// highest degree first.
pub fn format_coeff_poly(c: &[u32], var: &str) -> String {
    let mut parts = Vec::new();
    for (i, &x) in c.iter().enumerate().rev() {
        if x == 0 {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        parts.push(match (x, i) {
            (_, 0) => x.to_string(),
            (1, _) => mono,
            _ => format!("{x}*{mono}"),
        });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(16), Some((2, 4)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(6), None);
        assert_eq!(prime_power(1), None);
    }

    #[test]
    fn lowest_moduli() {
        // x^2 + x + 1 over F_2, x^2 + 1 over F_3, x^3 + x + 1 over F_2
        assert_eq!(FiniteField::new(2, 2).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(FiniteField::new(3, 2).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(FiniteField::new(2, 3).unwrap().modulus(), &[1, 1, 0, 1]);
        assert_eq!(FiniteField::new(2, 4).unwrap().modulus(), &[1, 1, 0, 0, 1]);
    }

    #[test]
    fn field_axioms_exhaustive_small_fields() {
        for (p, d) in [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2)] {
            let f = FiniteField::new(p, d).unwrap();
            let els: Vec<Fq> = f.elements().collect();
            for &a in &els {
                assert_eq!(f.add(a, f.neg(a)), Fq::ZERO);
                assert_eq!(f.mul(a, Fq::ONE), a);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), Fq::ONE);
                }
                assert_eq!(f.frobenius(f.pth_root(a)), a);
                for &b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for &c in &els {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn log_tables_agree_with_schoolbook_multiplication() {
        let f = FiniteField::new(3, 3).unwrap();
        for a in f.elements() {
            for b in f.elements() {
                let expected = slow_mul(3, f.modulus(), &f.coefficients(a), &f.coefficients(b));
                assert_eq!(f.coefficients(f.mul(a, b)), expected);
            }
        }
    }

    #[test]
    fn formatting() {
        let f = FiniteField::new(3, 2).unwrap();
        assert_eq!(f.format(Fq(0)), "[0]");
        assert_eq!(f.format(Fq(3 + 1)), "[a + 1]");
        assert_eq!(f.format(Fq(2 * 3)), "[2*a]");
        assert_eq!(FiniteField::new(5, 1).unwrap().format(Fq(4)), "4");
    }

    #[test]
    fn reduction_of_high_powers() {
        let f = FiniteField::new(2, 2).unwrap();
        // a^2 = a + 1
        assert_eq!(f.from_coefficients(&[0, 0, 1]), Fq(3));
        assert_eq!(f.pow(f.generator(), 2), Fq(3));
    }
}
