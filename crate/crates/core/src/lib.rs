//! Calculus for the quasi-Banach pair `(L₀, L∞)` over finite trace models.

pub mod error;
pub mod homs;
pub mod kcalc;
pub mod matmodel;
pub mod orbits;
pub mod sampling;
pub mod stepfn;
pub mod suite;
mod svd;
pub mod symnorm;
pub mod transfer;

pub use error::{Error, Result};
