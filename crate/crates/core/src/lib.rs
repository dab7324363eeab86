//! Numerical laboratory for gauged Ginzburg-Landau vortices over the plane.
//!
//! The crate solves the abelian vortex equations for prescribed zeros, works
//! with points of symmetric products of the sphere, models genus-zero bubble
//! trees together with their reparametrization group, extracts limit trees
//! from degenerating zero configurations, and evaluates Maslov indices,
//! Fredholm indices and weighted Sobolev quantities.

pub mod bubbling;
pub mod index_maslov;
pub mod moduli;
pub mod sphere;
pub mod stable_maps;
pub mod vortex;
pub mod weighted;

pub use num_complex::Complex64;
