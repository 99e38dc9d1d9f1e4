//! Exact arithmetic in finite fields, the rationals and rational function
//! fields over finite fields, plus field profiles.

mod arith;
mod gf;
mod poly;
mod profile;
mod ratfunc;
mod rootless;

pub use arith::{Arith, Rationals};
pub use gf::{
    format_coeff_poly, is_irreducible_mod_p, is_prime, prime_power, FiniteField, Fq, MAX_FIELD_SIZE,
};
pub use poly::Poly;
pub use profile::{parse_literal, CollapseMode, Element, FieldProfile, Model, ProfileKind};
pub use ratfunc::{FunctionField, RatFunc};
pub use rootless::{
    check_rootless_finite, element_term, rootless_default, rootless_quadratic, ZPoly,
};
