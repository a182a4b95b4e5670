//! Polymorphisms: operation tables, identity systems, the two-element
//! classification and the search for operations satisfying identities.

mod boolean;
pub(crate) mod gf2;
mod identities;
mod optable;
mod search;

pub use boolean::{boolean_classify, is_equationally_affine, schaefer_solve, BooleanClass};
pub use identities::IdentitySystem;
pub use optable::{boolean as probes, preserves_op, OpTable};
pub use search::{find_polymorphism, MAX_SEARCH_CELLS};
