//! CSV grid dump and JSON summary of a solution.

use std::io::{self, Write};

use serde::Serialize;

use super::diagnostics::{decay_exponent, residual_report, Residuals};
use super::params::SolverParams;
use super::solution::VortexSolution;

#[derive(Clone, Debug, Serialize)]
pub struct SolutionSummary {
    pub degree: u32,
    pub energy: f64,
    pub energy_over_pi: f64,
    pub residuals: Residuals,
    pub decay_slope: Option<f64>,
    pub sup_abs_f: f64,
    pub min_abs_f: f64,
    pub outer_ring_min_abs_f: f64,
    pub newton_iterations: usize,
    pub newton_residual: f64,
    pub params: SolverParams,
}

/// Decay fit window used by the summary: `[4, min(9.5, 0.8R)]`.
pub fn default_decay_range(radius: f64) -> (f64, f64) {
    (4.0, 9.5f64.min(0.8 * radius))
}

pub fn summary(sol: &VortexSolution) -> SolutionSummary {
    SolutionSummary {
        degree: sol.degree(),
        energy: sol.energy,
        energy_over_pi: sol.energy / std::f64::consts::PI,
        residuals: residual_report(sol),
        decay_slope: decay_exponent(sol, default_decay_range(sol.grid.radius)).ok(),
        sup_abs_f: sol.sup_abs_f(),
        min_abs_f: sol.min_abs_f(),
        outer_ring_min_abs_f: sol.outer_ring_min_abs_f(),
        newton_iterations: sol.newton_iterations,
        newton_residual: sol.newton_residual,
        params: sol.params.clone(),
    }
}

/// Writes `x,y,h,re_f,im_f,phi,psi,e_w` for every `stride`-th node of the disk.
pub fn write_csv<W: Write>(sol: &VortexSolution, stride: usize, out: W) -> io::Result<()> {
    let mut out = io::BufWriter::new(out);
    writeln!(out, "x,y,h,re_f,im_f,phi,psi,e_w")?;
    let g = &sol.grid;
    let stride = stride.max(1);
    for j in (0..g.n).step_by(stride) {
        for i in (0..g.n).step_by(stride) {
            let z = g.point(i, j);
            if z.norm() > g.radius {
                continue;
            }
            let k = g.index(i, j);
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                z.re, z.im, sol.h[k], sol.f[k].re, sol.f[k].im, sol.phi[k], sol.psi[k], sol.energy_density[k]
            )?;
        }
    }
    out.flush()
}
