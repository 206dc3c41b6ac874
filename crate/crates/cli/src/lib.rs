//! Library surface of the `vessel-nls` front door: config schema and
//! validation, the coupling-expression grammar, artifact writers, and the
//! stage runner. The binary in `main.rs` is a thin clap wrapper over these.

// NaN-rejecting guards use `!(a > b)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod expr;
pub mod output;
pub mod runner;
