//! Pairing functions: the Cantor bijection on naturals and the
//! characteristic-`p` pairing `x^p + t*y^p` on `F_p(t)`, with tuple folds.

use num_bigint::BigUint;
use num_traits::One;

use crate::error::Result;
use crate::field::{FunctionField, RatFunc};

/// `((x + y)(x + y + 1))/2 + y`.
pub fn encode_pair_nat(x: &BigUint, y: &BigUint) -> BigUint {
    let s = x + y;
    (&s * (&s + 1u32)) / 2u32 + y
}

pub fn decode_pair_nat(z: &BigUint) -> (BigUint, BigUint) {
    // w = floor((sqrt(8z + 1) - 1) / 2)
    let w = ((z * 8u32 + 1u32).sqrt() - BigUint::one()) / 2u32;
    let tri = (&w * (&w + 1u32)) / 2u32;
    let y = z - tri;
    let x = &w - &y;
    (x, y)
}

/// `x^p + t*y^p`.
pub fn encode_pair_charp(k: &FunctionField, x: &RatFunc, y: &RatFunc) -> RatFunc {
    k.add(&k.frobenius(x), &k.mul(&k.t(), &k.frobenius(y)))
}

/// Inverse of [`encode_pair_charp`]; `None` when `z` is not a code, i.e.
/// some coordinate of index at least 2 in the `p`-basis is nonzero.
pub fn decode_pair_charp(k: &FunctionField, z: &RatFunc) -> Option<(RatFunc, RatFunc)> {
    let c = k.p_basis_decompose(z);
    if c.iter().skip(2).any(|x| !x.is_zero()) {
        return None;
    }
    let mut it = c.into_iter();
    let c0 = it.next().unwrap();
    let c1 = it.next().unwrap_or_else(|| k.zero());
    Some((c0, c1))
}

/// Left fold `f_n(a_1..a_n) = f(f_{n-1}(a_1..a_{n-1}), a_n)`.
pub fn tuple_encode<T: Clone>(xs: &[T], pair: impl Fn(&T, &T) -> T) -> Option<T> {
    let (first, rest) = xs.split_first()?;
    Some(rest.iter().fold(first.clone(), |acc, x| pair(&acc, x)))
}

/// Unfolds a code of an `n`-tuple; fails when some intermediate value is
/// not a code.
pub fn tuple_decode<T: Clone>(
    z: &T,
    n: usize,
    unpair: impl Fn(&T) -> Result<Option<(T, T)>>,
) -> Result<Option<Vec<T>>> {
    if n == 0 {
        return Ok(Some(Vec::new()));
    }
    let mut out = Vec::with_capacity(n);
    let mut cur = z.clone();
    for _ in 1..n {
        match unpair(&cur)? {
            Some((a, b)) => {
                out.push(b);
                cur = a;
            }
            None => return Ok(None),
        }
    }
    out.push(cur);
    out.reverse();
    Ok(Some(out))
}
