//! Reducts of the random tournament and the random graph.
//!
//! Relations are sets of complete types. Tractability is decided by
//! searching for the behavior of a canonical polymorphism on pair types;
//! a brute-force oracle solves small instances directly.

mod behavior;
mod classify;
mod relation;
mod types;

pub use behavior::{
    behavior_image, behavior_preserves, search_behavior, search_behavior_report, PairBehavior,
    SearchReport, Shape, MAX_SEARCH_TUPLES, RECHECK_FREE_CELLS,
};
pub use classify::{classify_reduct, Verdict, VerdictKind};
pub use relation::{
    format_solution, solve_instance_brute, HomTemplate, TypeSetRelation, MAX_BRUTE_VARIABLES,
};
pub use types::{enumerate_types, Alphabet, Base, LabeledType, BWD, E, EQ, FWD, MAX_TYPE_ARITY, N};
