//! Exact-precision experiments with normal basis generators in totally
//! ramified elementary abelian p-extensions of local fields.

#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod galois;
pub mod lab;
pub mod linalg;
pub mod localfield;
pub mod normalbasis;
pub mod ramification;

pub use error::{Error, Result};
