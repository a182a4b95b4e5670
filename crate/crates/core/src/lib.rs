//! Constraint satisfaction over finite templates, the rational order, the
//! random tournament and the random graph: classifiers, solvers and
//! brute-force oracles.
//!
//! The guide under `book/` walks through each part with runnable examples.

// pair matrices and value domains read most clearly with index loops
#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod consistency;
pub mod error;
pub mod homog;
pub mod polyengine;
pub mod relstruct;
pub mod temporal;
mod unionfind;

pub use error::{Error, Result};

// The guide's code blocks run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    mod overview {}
    #[doc = include_str!("../../../book/src/finite.md")]
    mod finite {}
    #[doc = include_str!("../../../book/src/consistency.md")]
    mod consistency {}
    #[doc = include_str!("../../../book/src/temporal.md")]
    mod temporal {}
    #[doc = include_str!("../../../book/src/homogeneous.md")]
    mod homogeneous {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
