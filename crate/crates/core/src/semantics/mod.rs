//! Evaluation of formulas: exhaustive over finite fields, bounded witness
//! search over `F_q(t)`, generated subfields and pairing functions.

mod bounded;
pub mod engine;
mod finite;
mod pairing;

pub use bounded::{eval_bounded_ratfunc, eval_qf_ratfunc, BoundedDomain, BoundedVerdict};
pub use finite::{
    definable_set, definable_set_over, eval_formula_finite, generated_subfield, DefinableSet,
    FiniteStructure, SubStructure,
};
pub use pairing::{
    decode_pair_charp, decode_pair_nat, encode_pair_charp, encode_pair_nat, tuple_decode,
    tuple_encode,
};

/// Default cap on enumerated states.
pub const DEFAULT_MAX_STATES: u64 = 1 << 24;

/// The enumeration cap: `ERANK_MAX_STATES` if set and valid, otherwise
/// [`DEFAULT_MAX_STATES`].
pub fn state_cap() -> u64 {
    std::env::var("ERANK_MAX_STATES")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_STATES)
}
