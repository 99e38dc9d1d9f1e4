//! Formulas of the language of rings: syntax tree, parser, printer and
//! structural utilities.

mod ast;
mod ops;
mod parse;
mod print;

pub use ast::{ConstSym, Formula, Term, VarName};
pub use ops::{
    canonicalize, free_variables, instantiate_constants, promote_free_vars, quantifier_count,
    raw_quantifier_count, substitute, FreshNames,
};
pub use parse::{parse_formula, parse_fraction, parse_term, split_top_level};
pub use print::{format_formula, format_term};
