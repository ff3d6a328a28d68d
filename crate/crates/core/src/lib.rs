//! Limit-periodic discrete Schrödinger operators.
//!
//! Procyclic hulls, periodic and limit-periodic potentials, transfer-matrix
//! cocycles, Floquet band analysis and the gap-opening constructions built on
//! top of them.

pub mod cli;
pub mod cocycle;
pub mod constructions;
pub mod error;
pub mod floquet;
pub mod potentials;
pub mod procyclic;
pub mod quadrature;

pub use error::{Error, Result};
