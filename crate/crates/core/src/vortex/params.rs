use serde::{Deserialize, Serialize};

use super::config::ZeroConfig;
use super::SolverError;

/// Distance kept between every zero and the domain boundary.
pub const DOMAIN_MARGIN: f64 = 8.0;
pub const MIN_DEFAULT_RADIUS: f64 = 12.0;
pub const DEFAULT_GRID_POINTS: usize = 1024;
pub const DEFAULT_NEWTON_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_NEWTON_ITERATIONS: usize = 40;
/// Coarsest grid spacing the solver accepts.
pub const MAX_GRID_SPACING: f64 = 0.25;
/// Pointwise bound on the residuals of both vortex equations.
pub const RESIDUAL_TOLERANCE: f64 = 1e-4;
/// Allowed deficit of `|f|` below 1 on the outermost ring.
pub const BOUNDARY_TOLERANCE: f64 = 1e-2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    pub domain_radius: f64,
    pub grid_points_per_axis: usize,
    pub newton_tolerance: f64,
    pub max_newton_iterations: usize,
    pub damping: f64,
}

impl SolverParams {
    /// Default parameters for `config`: radius `max(12, 8 + max|z_j|)`,
    /// 1024 points per axis.
    pub fn for_config(config: &ZeroConfig) -> Self {
        SolverParams {
            domain_radius: MIN_DEFAULT_RADIUS.max(DOMAIN_MARGIN + config.max_modulus()),
            grid_points_per_axis: DEFAULT_GRID_POINTS,
            newton_tolerance: DEFAULT_NEWTON_TOLERANCE,
            max_newton_iterations: DEFAULT_MAX_NEWTON_ITERATIONS,
            damping: 1.0,
        }
    }

    pub fn with_grid(mut self, points: usize) -> Self {
        self.grid_points_per_axis = points;
        self
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.domain_radius = radius;
        self
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.domain_radius / (self.grid_points_per_axis as f64 - 1.0)
    }

    /// Structural checks independent of the configuration.
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |msg: &str| Err(SolverError::InvalidParams(msg.to_string()));
        if !(self.domain_radius.is_finite() && self.domain_radius > 0.0) {
            return bad("domain_radius must be positive");
        }
        if self.grid_points_per_axis < 16 {
            return bad("grid_points_per_axis must be at least 16");
        }
        if !(self.newton_tolerance.is_finite() && self.newton_tolerance > 0.0) {
            return bad("newton_tolerance must be positive");
        }
        if self.max_newton_iterations == 0 {
            return bad("max_newton_iterations must be positive");
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return bad("damping must lie in (0, 1]");
        }
        Ok(())
    }

    /// The margin requirement between the zeros and the boundary.
    pub fn check_domain(&self, config: &ZeroConfig) -> Result<(), SolverError> {
        let required = DOMAIN_MARGIN + config.max_modulus();
        if self.domain_radius < required * (1.0 - 1e-12) {
            return Err(SolverError::DomainTooSmall { radius: self.domain_radius, required });
        }
        Ok(())
    }
}
