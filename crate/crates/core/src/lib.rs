//! Radial sign-changing bound states of weighted p-Laplace equations by shooting.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod integrator;
pub mod library;
pub mod numeric;
pub mod problem;
pub mod ptrig;
pub mod shooter;

pub use error::{Error, Result};
