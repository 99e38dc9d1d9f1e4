//! Rewriting passes with quantifier accounting: prenex form, the
//! combinators for disjunction and conjunction, positive-primitive form,
//! the single-equation fold, order elimination, rank reports and
//! quantifier-free interpolation over finite fields.

mod interp;
mod order;
mod pp;
mod prenex;
mod report;

pub use interp::qf_interpolation_finite;
pub use order::{count_order_atoms, eliminate_order, SquareTuple, MAX_ROUTED_ATOMS};
pub use pp::{
    difference, equations, equations_to_matrix, homogenize, is_positive_primitive_matrix,
    to_positive_primitive, to_positive_primitive_with_limit, to_single_equation, DEFAULT_DNF_LIMIT,
};
pub use prenex::{merge_conjunction, merge_disjunction, to_prenex_existential, PrenexFormula};
pub use report::{
    parse_pipeline, rank_report, run_pass, PassId, PassTraceEntry, PipelineOptions, RankReport,
    Stage,
};
