use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ZeroConfig;
use super::grid::Grid;
use super::params::{SolverParams, MAX_GRID_SPACING};
use super::solver::{background, solve_reduced};
use super::{NonConvergence, SolverError};

/// Discretized vortex on the node grid of the disk's bounding square.
///
/// Every field is stored on all `n²` nodes; integrals only use nodes with
/// `|z| ≤ R`. `h` is `−∞` on a node that coincides with a zero.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VortexSolution {
    pub config: ZeroConfig,
    pub params: SolverParams,
    pub grid: Grid,
    pub h: Vec<f64>,
    #[serde(with = "crate::sphere::complex_json::vec")]
    pub f: Vec<Complex64>,
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
    pub energy_density: Vec<f64>,
    pub energy: f64,
    pub newton_iterations: usize,
    pub newton_residual: f64,
}

pub fn solve_vortex(config: &ZeroConfig, params: &SolverParams) -> Result<VortexSolution, SolverError> {
    params.validate()?;
    // Re-validate in case the configuration was assembled field by field.
    let config = ZeroConfig::new(config.zeros().to_vec())?;
    params.check_domain(&config)?;
    let grid = Grid::new(params.grid_points_per_axis, params.domain_radius);
    if config.is_empty() {
        return Ok(VortexSolution::vacuum(params.clone()));
    }
    if grid.spacing > MAX_GRID_SPACING {
        return Err(SolverError::NonConvergence(NonConvergence::Unresolved {
            spacing: grid.spacing,
            max: MAX_GRID_SPACING,
        }));
    }
    let red = solve_reduced(&config, params)?;
    Ok(assemble(config, params.clone(), red.grid, &red.h0, &red.w, red.iterations, red.residual))
}

/// Unit phase `Π ((z−z_j)/|z−z_j|)^{n_j}`, or `None` on a zero.
fn phase(config: &ZeroConfig, z: Complex64) -> Option<Complex64> {
    let mut p = Complex64::new(1.0, 0.0);
    for q in config.zeros() {
        let v = z - q.position;
        let r = v.norm();
        if r == 0.0 {
            return None;
        }
        p *= (v / r).powu(q.multiplicity);
    }
    Some(p)
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    config: ZeroConfig,
    params: SolverParams,
    grid: Grid,
    h0: &[f64],
    w: &[f64],
    iterations: usize,
    residual: f64,
) -> VortexSolution {
    let n = grid.n;
    let len = grid.len();
    let h: Vec<f64> = (0..len).map(|k| h0[k] + w[k]).collect();
    let f: Vec<Complex64> = (0..len)
        .map(|k| match phase(&config, grid.point_at(k)) {
            Some(p) => p * (0.5 * h[k]).exp(),
            None => Complex64::new(0.0, 0.0),
        })
        .collect();

    let mut phi = vec![0.0; len];
    let mut psi = vec![0.0; len];
    let mut energy_density = vec![0.0; len];
    phi.par_chunks_mut(n)
        .zip(psi.par_chunks_mut(n))
        .zip(energy_density.par_chunks_mut(n))
        .enumerate()
        .for_each(|(j, ((phi_row, psi_row), e_row))| {
            for i in 0..n {
                let k = j * n + i;
                let z = grid.point(i, j);
                let wx = grid.dx(w, i, j);
                let wy = grid.dy(w, i, j);
                // Singular parts of h₀ and of the phase cancel analytically.
                let mut ps = 0.5 * wx;
                let mut ph = -0.5 * wy;
                // e^{h₀/2}·∇h₀ as a complex vector, with the limit at a zero.
                let mut grad_scaled = Complex64::new(0.0, 0.0);
                let half_h0 = 0.5 * h0[k];
                let mut on_zero = None;
                for (idx, q) in config.zeros().iter().enumerate() {
                    let v = z - q.position;
                    let r2 = v.norm_sqr();
                    let nj = q.multiplicity as f64;
                    ps -= nj * v.re / (1.0 + r2);
                    ph += nj * v.im / (1.0 + r2);
                    if r2 == 0.0 {
                        on_zero = Some(idx);
                    } else {
                        grad_scaled += v * (2.0 * nj / (r2 * (1.0 + r2)));
                    }
                }
                let wgrad = Complex64::new(wx, wy);
                let kinetic = match on_zero {
                    None => {
                        let s = half_h0.exp();
                        (w[k].exp() * (grad_scaled * s + wgrad * s).norm_sqr()).max(0.0)
                    }
                    Some(idx) if config.zeros()[idx].multiplicity == 1 => {
                        let z0 = config.zeros()[idx].position;
                        let rest: f64 = config
                            .zeros()
                            .iter()
                            .enumerate()
                            .filter(|&(o, _)| o != idx)
                            .map(|(_, q)| {
                                let r2 = (z0 - q.position).norm_sqr();
                                (r2 / (1.0 + r2)).powi(q.multiplicity as i32)
                            })
                            .product();
                        4.0 * rest * w[k].exp()
                    }
                    Some(_) => 0.0,
                };
                let eh = h[k].exp();
                phi_row[i] = ph;
                psi_row[i] = ps;
                e_row[i] = 0.25 * kinetic + 0.25 * (1.0 - eh) * (1.0 - eh);
            }
        });
    let energy = disk_integral(&grid, &energy_density, 0.0, grid.radius);
    VortexSolution {
        config,
        params,
        grid,
        h,
        f,
        phi,
        psi,
        energy_density,
        energy,
        newton_iterations: iterations,
        newton_residual: residual,
    }
}

/// Midpoint sum of `field` over nodes with `r_lo ≤ |z| < r_hi`
/// (`|z| ≤ r_hi` when `r_hi` is the domain radius), in row order.
pub(crate) fn disk_integral(grid: &Grid, field: &[f64], r_lo: f64, r_hi: f64) -> f64 {
    let n = grid.n;
    let closed = r_hi >= grid.radius;
    let rows: Vec<f64> = field
        .par_chunks(n)
        .enumerate()
        .map(|(j, row)| {
            let mut s = 0.0;
            for (i, v) in row.iter().enumerate() {
                let r = grid.point(i, j).norm();
                if r >= r_lo && (r < r_hi || (closed && r <= r_hi)) {
                    s += v;
                }
            }
            s
        })
        .collect();
    rows.iter().sum::<f64>() * grid.cell_area()
}

impl VortexSolution {
    /// The degree-zero solution `f ≡ 1`, `phi = psi = 0`.
    pub fn vacuum(params: SolverParams) -> Self {
        let grid = Grid::new(params.grid_points_per_axis, params.domain_radius);
        let len = grid.len();
        VortexSolution {
            config: ZeroConfig::empty(),
            params,
            grid,
            h: vec![0.0; len],
            f: vec![Complex64::new(1.0, 0.0); len],
            phi: vec![0.0; len],
            psi: vec![0.0; len],
            energy_density: vec![0.0; len],
            energy: 0.0,
            newton_iterations: 0,
            newton_residual: 0.0,
        }
    }

    pub fn degree(&self) -> u32 {
        self.config.degree()
    }

    /// Nodes inside the closed disk of radius `R`.
    pub fn disk_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.grid.len()).filter(move |&k| self.grid.point_at(k).norm() <= self.grid.radius)
    }

    pub fn sup_abs_f(&self) -> f64 {
        self.disk_nodes().map(|k| self.f[k].norm()).fold(0.0, f64::max)
    }

    pub fn min_abs_f(&self) -> f64 {
        self.disk_nodes().map(|k| self.f[k].norm()).fold(f64::INFINITY, f64::min)
    }

    /// Minimum of `|f|` over disk nodes within two cells of the boundary.
    pub fn outer_ring_min_abs_f(&self) -> f64 {
        let inner = self.grid.radius - 2.0 * self.grid.spacing;
        self.disk_nodes()
            .filter(|&k| self.grid.point_at(k).norm() > inner)
            .map(|k| self.f[k].norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Copy with the Higgs field multiplied by `c`; the other fields are kept.
    pub fn with_scaled_higgs(&self, c: f64) -> VortexSolution {
        let mut s = self.clone();
        s.f.iter_mut().for_each(|v| *v *= c);
        s.h.iter_mut().for_each(|v| *v += 2.0 * c.ln());
        s
    }

    /// `h₀` evaluated at `z` for this solution's zeros.
    pub fn background_at(&self, z: Complex64) -> f64 {
        background(&self.config, z)
    }
}
