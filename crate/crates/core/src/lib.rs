//! Exact verification toolkit for intersection theorems on set families and
//! integer-sequence families.
//!
//! Families of subsets of `[n]` live in [`setfam`], the `(A, B)`-shift engine
//! in [`shift`], families of sequences in `[m]^n` in [`seqfam`], and the
//! exhaustive and sampled extremal searches in [`search`]. All measures are
//! exact [`Rational`] values.

pub mod arith;
pub mod error;
pub mod io;
pub mod search;
pub mod seqfam;
pub mod setfam;
pub mod shift;

pub use arith::Rational;
pub use error::{Error, Result};

pub use seqfam::{SeqFamily, SymbolSet, ThresholdVector};
pub use setfam::SetFamily;
pub use shift::{ShiftSpec, StabilizationTrace};
