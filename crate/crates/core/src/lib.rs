//! Spin-S states as constellations of spin-1/2 "stars".
//!
//! The crate covers four layers that build on each other:
//!
//! - [`spin`]: exact spin bookkeeping, Wigner rotation matrices, coherent
//!   states and transition probabilities.
//! - [`majorana`]: the stellar (Majorana) map between spin-S rays and
//!   multisets of 2S points on the sphere.
//! - [`embedding`]: symmetrized embedding of a spin-S state into the 2S-fold
//!   tensor product of spin-1/2 spaces, and the outcome subspaces that
//!   reproduce spin-S transition probabilities there.
//! - [`cascade`] and [`aerts`]: a spin-S measurement realized as 2S
//!   consecutive spin-1/2 measurements with correlated collapse, and a
//!   classical hidden-variable realization of each spin-1/2 step.
//!
//! [`simulation`] ties the cascades to a seeded Monte Carlo harness with
//! serializable reports.

pub mod aerts;
pub mod cascade;
pub mod combinatorics;
pub mod embedding;
mod error;
pub mod majorana;
mod roots;
pub mod simulation;
pub mod spin;

pub use error::{Error, Result};
pub use num_complex::Complex64;
