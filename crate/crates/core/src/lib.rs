//! Weight sequences, weight functions and weight matrices from the theory of
//! ultradifferentiable classes, with numerical checkers for the growth conditions
//! relating them.
//!
//! Asymptotic conditions cannot be decided on a finite truncation. Every checker
//! returns a [`ConditionReport`] whose verdict comes from a fixed trend rule applied to a
//! diagnostic profile (see [`report`]).

// `!(x > 0.0)` style guards are deliberate: they reject NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constructions;
pub mod entire;
pub mod error;
pub mod growth;
pub mod harmonic;
pub mod quadrature;
pub mod report;
pub mod sequences;
pub mod weights;

pub use error::{Error, Result};
pub use report::{ConditionReport, Interval, Verdict};

#[cfg(test)]
mod properties;
