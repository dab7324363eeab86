//! Ginzburg-Landau vortices over the plane.
//!
//! With `μ(z) = (i/2)(1 − |z|²)` and the connection written as
//! `Φ = i·phi`, `Ψ = i·psi`, a vortex is a triple `(phi, psi, f)` with
//!
//! ```text
//! ∂_s f + Φf + i(∂_t f + Ψf) = 0,      ∂_sΨ − ∂_tΦ + μ(f) = 0.
//! ```
//!
//! Solutions are computed through `h = log|f|²`, which satisfies
//! `Δh = e^h − 1 + 4π Σ n_j δ_{z_j}`.

mod config;
mod degrees;
mod diagnostics;
mod dst;
pub mod export;
mod grid;
mod params;
mod solution;
mod solver;

pub use config::{ConfigError, Zero, ZeroConfig};
pub use degrees::{default_probe_radius, local_degrees, local_degrees_of_field, winding_number, DegreeError, Winding};
pub use diagnostics::{annulus_energy, decay_exponent, decay_exponent_of_density, residual_report, DecayError, Residuals};
pub use grid::{FieldValue, Grid};
pub(crate) use grid::derivative;
pub use params::{
    SolverParams, BOUNDARY_TOLERANCE, DEFAULT_GRID_POINTS, DEFAULT_MAX_NEWTON_ITERATIONS,
    DEFAULT_NEWTON_TOLERANCE, DOMAIN_MARGIN, MAX_GRID_SPACING, MIN_DEFAULT_RADIUS, RESIDUAL_TOLERANCE,
};
pub use solution::{solve_vortex, VortexSolution};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NonConvergence {
    #[error("Newton stopped after {iterations} iterations with residual {residual:.3e}")]
    IterationLimit { iterations: usize, residual: f64 },
    #[error("Newton iterate became non-finite after {iterations} iterations")]
    Diverged { iterations: usize },
    #[error("grid spacing {spacing:.4} exceeds {max:.2}; the vortex cores are not resolved")]
    Unresolved { spacing: f64, max: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(#[from] ConfigError),
    #[error("invalid solver parameters: {0}")]
    InvalidParams(String),
    #[error("domain radius {radius} is below the required {required}")]
    DomainTooSmall { radius: f64, required: f64 },
    #[error("no convergence: {0}")]
    NonConvergence(NonConvergence),
}
