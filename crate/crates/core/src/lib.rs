//! Existential formulas over the language of rings with certified
//! quantifier accounting.
//!
//! The crate is organised bottom-up:
//!
//! * [`formula`]: syntax trees, parsing and printing;
//! * [`field`]: exact arithmetic in `F_q`, `Q` and `F_q(t)`, field profiles;
//! * [`semantics`]: evaluation over finite fields and bounded search in `F_q(t)`;
//! * [`normal`]: rewriting passes and rank reports;
//! * [`collapse`]: one-quantifier formulas for tuples of `p`-th powers;
//! * [`geometry`]: formulas as polynomial systems, images and fibres;
//! * [`equiv`]: equivalence checks and refutation over batteries of fields.

pub mod collapse;
pub mod corpus;
pub mod equiv;
pub mod error;
pub mod field;
pub mod formula;
pub mod geometry;
pub mod normal;
pub mod semantics;

pub use error::{Error, Result};
