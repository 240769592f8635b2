//! Exact modular-method toolkit for x^r + y^r = C z^p.

pub mod arith;
pub mod config;
pub mod error;
pub mod exec;
pub mod numfield;
pub mod poly;
pub mod diophantine;
pub mod frey;
pub mod localred;
pub mod sieve;
pub mod traces;

pub use error::{Error, Result};
