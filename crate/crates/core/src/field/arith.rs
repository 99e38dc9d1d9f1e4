//! A common ring interface over the concrete structures, used by the
//! evaluators.

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use super::gf::{FiniteField, Fq};
use super::ratfunc::{FunctionField, RatFunc};

pub trait Arith: Sync + Send {
    type Elem: Clone + PartialEq + Eq + Hash + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_int(&self, n: &BigInt) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn pow(&self, a: &Self::Elem, e: u32) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Built-in named constants (`t`, `a`), if any.
    fn named_constant(&self, name: &str) -> Option<Self::Elem>;
    fn show(&self, a: &Self::Elem) -> String;
}

impl Arith for FiniteField {
    type Elem = Fq;

    fn zero(&self) -> Fq {
        Fq::ZERO
    }
    fn one(&self) -> Fq {
        Fq::ONE
    }
    fn from_int(&self, n: &BigInt) -> Fq {
        FiniteField::from_int(self, n)
    }
    fn add(&self, a: &Fq, b: &Fq) -> Fq {
        FiniteField::add(self, *a, *b)
    }
    fn sub(&self, a: &Fq, b: &Fq) -> Fq {
        FiniteField::sub(self, *a, *b)
    }
    fn mul(&self, a: &Fq, b: &Fq) -> Fq {
        FiniteField::mul(self, *a, *b)
    }
    fn pow(&self, a: &Fq, e: u32) -> Fq {
        FiniteField::pow(self, *a, e as u64)
    }
    fn inv(&self, a: &Fq) -> Option<Fq> {
        FiniteField::inv(self, *a)
    }
    fn is_zero(&self, a: &Fq) -> bool {
        a.is_zero()
    }
    fn named_constant(&self, name: &str) -> Option<Fq> {
        (name == "a" && self.degree() > 1).then(|| self.generator())
    }
    fn show(&self, a: &Fq) -> String {
        self.format(*a)
    }
}

impl Arith for FunctionField {
    type Elem = RatFunc;

    fn zero(&self) -> RatFunc {
        FunctionField::zero(self)
    }
    fn one(&self) -> RatFunc {
        FunctionField::one(self)
    }
    fn from_int(&self, n: &BigInt) -> RatFunc {
        self.constant(self.base().from_int(n))
    }
    fn add(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        FunctionField::add(self, a, b)
    }
    fn sub(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        FunctionField::sub(self, a, b)
    }
    fn mul(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        FunctionField::mul(self, a, b)
    }
    fn pow(&self, a: &RatFunc, e: u32) -> RatFunc {
        FunctionField::pow(self, a, e as u64)
    }
    fn inv(&self, a: &RatFunc) -> Option<RatFunc> {
        FunctionField::inv(self, a)
    }
    fn is_zero(&self, a: &RatFunc) -> bool {
        a.is_zero()
    }
    fn named_constant(&self, name: &str) -> Option<RatFunc> {
        match name {
            "t" => Some(self.t()),
            "a" if self.base().degree() > 1 => Some(self.constant(self.base().generator())),
            _ => None,
        }
    }
    fn show(&self, a: &RatFunc) -> String {
        self.format(a)
    }
}

/// The field of rational numbers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Arith for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_int(&self, n: &BigInt) -> BigRational {
        BigRational::from_integer(n.clone())
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn pow(&self, a: &BigRational, e: u32) -> BigRational {
        Pow::pow(a, e)
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn named_constant(&self, _name: &str) -> Option<BigRational> {
        None
    }
    fn show(&self, a: &BigRational) -> String {
        a.to_string()
    }
}
