//! q-Dunkl Kantorovich-Szasz-Mirakjan operators of Stancu type.

// `!(a > b)` checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dunkl;
pub mod error;
pub mod experiments;
pub mod moduli;
pub mod operators;
pub mod qcore;
pub mod qintegral;

pub use error::{Error, Result};
