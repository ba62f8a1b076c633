//! Exact engine deciding inductive freeness of subarrangements of Weyl
//! arrangements, in particular arrangements of ideal type.
//!
//! The pipeline is: build the positive roots ([`rootsys`]), precompute the
//! canonical restriction objects and their label maps ([`restrict`], on top
//! of the Weyl groupoid machinery in [`cryst`]), then run the memoized
//! recursive search for induction trees ([`induction`], [`memodb`]), pruning
//! with characteristic polynomials ([`charpoly`]).

pub mod charpoly;
pub mod cryst;
pub mod error;
pub mod induction;
pub mod labels;
pub mod linalg;
pub mod memodb;
pub mod restrict;
pub mod rootsys;

pub use error::{Error, Result};
pub use labels::LabelSet;
pub use rootsys::{build_positive_roots, CartanType, ExponentMultiset, PositiveRootSystem, Root};
