//! Higher-order convexity toolkit.
//!
//! Divided differences and n-convexity verdicts, evaluable function models,
//! Bernstein approximation, Hermite-Hadamard type bounds for 3-convex
//! functions, the 3-convex stochastic ordering on discrete measures, the
//! Hornich-Hlawka inequality family and its extension to commuting symmetric
//! matrices.
//!
//! The crate is `no_std` and needs only `alloc`. IO, file formats and the
//! command line live in the `hiconvex` companion crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bernstein;
pub mod divided_differences;
pub mod error;
pub mod function_models;
pub mod hh_bounds;
pub mod hornich_hlawka;
pub mod matrix_ext;
pub mod ordering;
pub mod quadrature;
pub mod report;

mod math;

pub use error::{Error, Result};
pub use function_models::{CatalogEntry, FunctionModel, Interval};
pub use report::InequalityReport;
