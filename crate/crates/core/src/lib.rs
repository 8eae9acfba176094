//! Schur and Bogomolov multipliers of finite p-groups given by consistent
//! polycyclic presentations.

pub mod catalog;
pub mod collector;
pub mod error;
pub mod extension;
pub mod intlattice;
pub mod multiplier;
pub mod presentation;

pub use error::{Error, Result};
