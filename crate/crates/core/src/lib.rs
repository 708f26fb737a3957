//! Exact sparse A-discriminants, Schläfli iterated discriminants and mixed
//! discriminants of lattice configurations.
//!
//! Everything is exact: coefficients are big integers, linear algebra is
//! fraction-free or modular with exact verification, and no floating point
//! is used anywhere.

pub mod adisc;
pub mod cli;
pub mod degrees;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod poly;
pub mod resultants;
pub mod schlaefli;

pub use error::{Error, Result};
