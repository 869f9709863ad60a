//! Li-Yau type gradient estimates `beta |grad f|^2 - f_t <= psi` for
//! `f = ln u`, `u` a positive solution of the heat equation on a manifold
//! with `Ric >= -k g`.
//!
//! Built-in families live in [`bound`], coefficient-generated ones in
//! [`coefficient`]. [`conditions`] audits hypotheses, [`manifolds`] supplies
//! model data and [`verify`] checks and compares bounds on it. The guide in
//! `book/` walks through each part; its snippets run as doctests.

pub mod bound;
pub mod coefficient;
pub mod conditions;
pub mod error;
pub mod manifolds;
pub mod numfmt;
pub mod ode;
pub mod quad;
pub mod roots;
pub mod selftest;
pub mod special;
pub mod timefn;
pub mod verify;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/families.md")]
    mod families {}
    #[doc = include_str!("../../../book/src/generator.md")]
    mod generator {}
    #[doc = include_str!("../../../book/src/conditions.md")]
    mod conditions {}
    #[doc = include_str!("../../../book/src/model-data.md")]
    mod model_data {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
