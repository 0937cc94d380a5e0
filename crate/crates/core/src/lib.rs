//! Exact computations with Siegel modular forms of degree two.

pub mod arith;
pub mod arthur;
pub mod bessel;
pub mod cache;
pub mod cli;
pub mod conv;
pub mod error;
pub mod heckeop;
pub mod jacobi;
pub mod linalg;
pub mod maass;
pub mod quadfield;
pub mod qseries;
pub mod quad;

pub use error::{Error, Result};
