use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::grid::Grid;
use super::solution::{disk_integral, VortexSolution};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecayError {
    #[error("invalid radial range [{lo}, {hi}]: need {min_lo} ≤ lo < hi ≤ {max_hi}")]
    InvalidRange { lo: f64, hi: f64, min_lo: f64, max_hi: f64 },
    #[error("energy density vanishes at radius {radius}; no decay to fit")]
    InsufficientRange { radius: f64 },
}

/// Sup-norms of the pointwise residuals of the two vortex equations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub first: f64,
    pub second: f64,
}

/// Residuals of both vortex equations over nodes with `|z| ≤ R − 1` at
/// distance at least 1 from every zero, with sixth-order differences.
pub fn residual_report(sol: &VortexSolution) -> Residuals {
    let g = &sol.grid;
    let i_unit = Complex64::new(0.0, 1.0);
    let mut first = 0.0f64;
    let mut second = 0.0f64;
    for j in 0..g.n {
        for i in 0..g.n {
            let z = g.point(i, j);
            if z.norm() > g.radius - 1.0 {
                continue;
            }
            if sol.config.zeros().iter().any(|q| (z - q.position).norm() < 1.0) {
                continue;
            }
            let k = g.index(i, j);
            let f = sol.f[k];
            let fs = g.dx(&sol.f, i, j);
            let ft = g.dy(&sol.f, i, j);
            let r1 = fs + i_unit * sol.phi[k] * f + i_unit * (ft + i_unit * sol.psi[k] * f);
            let r2 = g.dx(&sol.psi, i, j) - g.dy(&sol.phi, i, j) + 0.5 * (1.0 - f.norm_sqr());
            first = first.max(r1.norm());
            second = second.max(r2.abs());
        }
    }
    Residuals { first, second }
}

/// `∫ e_w` over `r ≤ |z| < r_out` by the node (midpoint) rule. `None`
/// unless `0 ≤ r < r_out ≤ R`.
pub fn annulus_energy(sol: &VortexSolution, r: f64, r_out: f64) -> Option<f64> {
    if !(r >= 0.0 && r < r_out && r_out <= sol.grid.radius) {
        return None;
    }
    Some(disk_integral(&sol.grid, &sol.energy_density, r, r_out))
}

/// Least-squares slope of `log max_{|z|=r} e_w` against `log r`.
pub fn decay_exponent(sol: &VortexSolution, fit_range: (f64, f64)) -> Result<f64, DecayError> {
    let (lo, hi) = fit_range;
    let max_hi = 0.8 * sol.grid.radius;
    if !(lo >= 1.0 && lo < hi && hi <= max_hi * (1.0 + 1e-12)) {
        return Err(DecayError::InvalidRange { lo, hi, min_lo: 1.0, max_hi });
    }
    decay_exponent_of_density(&sol.grid, &sol.energy_density, fit_range)
}

/// Same fit for an arbitrary density sampled on `grid`.
pub fn decay_exponent_of_density(grid: &Grid, density: &[f64], fit_range: (f64, f64)) -> Result<f64, DecayError> {
    const RADII: usize = 24;
    let (lo, hi) = fit_range;
    if !(lo > 0.0 && lo < hi && hi < grid.radius) {
        return Err(DecayError::InvalidRange { lo, hi, min_lo: 0.0, max_hi: grid.radius });
    }
    let mut xs = Vec::with_capacity(RADII);
    let mut ys = Vec::with_capacity(RADII);
    for s in 0..RADII {
        let r = lo * (hi / lo).powf(s as f64 / (RADII - 1) as f64);
        let samples = ((2.0 * std::f64::consts::PI * r / grid.spacing).ceil() as usize).max(64);
        let peak = (0..samples)
            .filter_map(|a| {
                let t = 2.0 * std::f64::consts::PI * a as f64 / samples as f64;
                grid.sample(density, Complex64::from_polar(r, t))
            })
            .fold(0.0f64, f64::max);
        if !(peak > 0.0) {
            return Err(DecayError::InsufficientRange { radius: r });
        }
        xs.push(r.ln());
        ys.push(peak.ln());
    }
    Ok(least_squares_slope(&xs, &ys))
}

pub(crate) fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
