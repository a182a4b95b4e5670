//! Constraint satisfaction over first-order expansions of `(Q;<)`.
//!
//! Relations are sets of order types, the operations `pp`, `ll`, `lex` and
//! their duals are evaluated on sign-annotated order types, and tractable
//! instances are solved by peeling off free sets found through the
//! two-element template `A^fin`.

mod afin;
mod master;
mod ops;
mod relation;
mod weak_order;

pub use afin::{
    build_afin, fin_relation, free_set_containing, is_free_set, minimal_free_set, NAME_P, NAME_Z,
    P, Z,
};
pub use master::{
    brute_oracle, classify_temporal, format_levels, satisfies, solve_master, template_preserved,
    TemporalVerdict, MASTER_MODES, MAX_ORACLE_VARIABLES,
};
pub use ops::{
    apply_temporal_op, for_each_interleaving, preserves_temporal, Counterexample, Preservation,
    TemporalOp, MAX_PRESERVATION_ARITY,
};
pub use relation::{TemporalRelation, TemporalTemplate};
pub use weak_order::{
    enumerate_weak_orders, SignedWeakOrderType, WeakOrderType, MAX_ENUMERATION_ARITY,
};
