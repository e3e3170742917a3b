//! Numerical toolkit for non-autonomous polynomial iteration.
//!
//! Composition sequences P_n o ... o P_1 of bounded polynomial sequences
//! drive everything here: escape-time approximations of the iterated
//! filled Julia sets K_m and their boundaries J_m, Carathéodory limits of
//! pointed raster domains, quasihyperbolic distance brackets, conformal
//! moduli of raster annuli, polynomial-like mapping sequences with their
//! Stage-I restriction, and the quasicircle / separation experiments
//! exposed by the `nonauto` CLI.

pub mod apps;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod plseq;
pub mod poly;
pub mod render;
pub mod seq;
pub mod sphere;

pub use error::{Error, Result};
