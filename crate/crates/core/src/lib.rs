//! Exact-arithmetic toolkit for Sidon sets, Δ-Sidon block sequences,
//! weighted backward shifts and Bayart–Matheron type operators.
//!
//! ```
//! use sidonlab::natset::{is_sidon, sidon_family_jn};
//!
//! let j3 = sidon_family_jn(3).unwrap();
//! assert!(is_sidon(&j3.with_zero()));
//! ```
//!
//! The guide in `book/` walks through each module; its chapters run as
//! doctests of this crate.

pub mod bmop;
pub mod deltasidon;
pub mod dhc;
pub mod natset;
pub mod ratio;
pub mod shiftlab;
pub mod sparse;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/sidon.md")]
    mod sidon {}
    #[doc = include_str!("../../../book/src/delta-sidon.md")]
    mod delta_sidon {}
    #[doc = include_str!("../../../book/src/shifts.md")]
    mod shifts {}
    #[doc = include_str!("../../../book/src/bm-operator.md")]
    mod bm_operator {}
    #[doc = include_str!("../../../book/src/hitting-times.md")]
    mod hitting_times {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
