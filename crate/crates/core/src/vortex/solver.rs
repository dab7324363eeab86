//! Newton iteration for the reduced scalar equation
//! `Δw = e^{h₀+w} − 1 + Σ 4n_j/(1+|z−z_j|²)²`, `h = h₀ + w`.
//!
//! All reductions are taken row by row and the per-row partial sums are
//! added in row order, so results do not depend on the thread count.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::config::ZeroConfig;
use super::dst::SineSolver;
use super::grid::Grid;
use super::params::SolverParams;
use super::{NonConvergence, SolverError};

const LINEAR_REL_TOL: f64 = 1e-4;
const MAX_CG_ITERATIONS: usize = 2000;

pub(crate) struct Reduced {
    pub grid: Grid,
    pub h0: Vec<f64>,
    pub w: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// `h₀ = Σ n_j log(r_j²/(1+r_j²))`, `−∞` on a zero.
pub(crate) fn background(config: &ZeroConfig, z: Complex64) -> f64 {
    config
        .zeros()
        .iter()
        .map(|q| {
            let r2 = (z - q.position).norm_sqr();
            -(q.multiplicity as f64) * (1.0 / r2).ln_1p()
        })
        .sum()
}

/// `−Δh₀` away from the zeros: `Σ 4n_j/(1+r_j²)²`.
fn background_source(config: &ZeroConfig, z: Complex64) -> f64 {
    config
        .zeros()
        .iter()
        .map(|q| {
            let s = 1.0 + (z - q.position).norm_sqr();
            4.0 * q.multiplicity as f64 / (s * s)
        })
        .sum()
}

struct System<'a> {
    grid: &'a Grid,
    unknown: &'a [bool],
    h0: &'a [f64],
    g: &'a [f64],
}

impl System<'_> {
    fn n(&self) -> usize {
        self.grid.n
    }

    /// Fourth-order five-point Laplacian at an unknown node.
    #[inline]
    fn laplacian(&self, x: &[f64], k: usize) -> f64 {
        let n = self.n();
        let c = x[k];
        let lx = -x[k - 2] + 16.0 * x[k - 1] - 30.0 * c + 16.0 * x[k + 1] - x[k + 2];
        let ly = -x[k - 2 * n] + 16.0 * x[k - n] - 30.0 * c + 16.0 * x[k + n] - x[k + 2 * n];
        (lx + ly) / (12.0 * self.grid.spacing * self.grid.spacing)
    }

    fn residual(&self, w: &[f64], out: &mut [f64]) {
        let n = self.n();
        out.par_chunks_mut(n).enumerate().for_each(|(j, row)| {
            for (i, v) in row.iter_mut().enumerate() {
                let k = j * n + i;
                *v = if self.unknown[k] {
                    self.laplacian(w, k) - (self.h0[k] + w[k]).exp() + 1.0 - self.g[k]
                } else {
                    0.0
                };
            }
        });
    }

    /// `(−L + diag(e^h)) x` on unknown nodes, zero elsewhere.
    fn apply(&self, eh: &[f64], x: &[f64], out: &mut [f64]) {
        let n = self.n();
        out.par_chunks_mut(n).enumerate().for_each(|(j, row)| {
            for (i, v) in row.iter_mut().enumerate() {
                let k = j * n + i;
                *v = if self.unknown[k] { eh[k] * x[k] - self.laplacian(x, k) } else { 0.0 };
            }
        });
    }
}

fn dot(a: &[f64], b: &[f64], n: usize) -> f64 {
    let rows: Vec<f64> = a
        .par_chunks(n)
        .zip(b.par_chunks(n))
        .map(|(x, y)| x.iter().zip(y).map(|(u, v)| u * v).sum::<f64>())
        .collect();
    rows.iter().sum()
}

fn sup(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Sine-transform solve of `−L + 1` on a box of `m` interior nodes per axis
/// that contains the unknowns; `m + 1` is chosen 5-smooth for the FFT.
struct Preconditioner<'a> {
    solver: SineSolver,
    n: usize,
    m: usize,
    unknown: &'a [bool],
    buf: Vec<f64>,
    scratch: Vec<f64>,
}

impl Preconditioner<'_> {
    fn apply(&mut self, r: &[f64], z: &mut [f64]) {
        let n = self.n;
        let m = self.m;
        let inner = n - 2;
        self.buf.par_chunks_mut(m).enumerate().for_each(|(jj, row)| {
            if jj < inner {
                let base = (jj + 1) * n + 1;
                row[..inner].copy_from_slice(&r[base..base + inner]);
                row[inner..].iter_mut().for_each(|v| *v = 0.0);
            } else {
                row.iter_mut().for_each(|v| *v = 0.0);
            }
        });
        self.solver.solve(&mut self.buf, &mut self.scratch);
        let buf = &self.buf;
        let unknown = self.unknown;
        z.par_chunks_mut(n).enumerate().for_each(|(j, row)| {
            for (i, v) in row.iter_mut().enumerate() {
                let k = j * n + i;
                *v = if unknown[k] { buf[(j - 1) * m + (i - 1)] } else { 0.0 };
            }
        });
    }
}

/// Preconditioned conjugate gradients for `A x = b`, starting from zero.
fn pcg(sys: &System, pre: &mut Preconditioner, eh: &[f64], b: &[f64], rel_tol: f64) -> Vec<f64> {
    let n = sys.n();
    let len = b.len();
    let mut x = vec![0.0; len];
    let mut r = b.to_vec();
    let mut z = vec![0.0; len];
    let mut q = vec![0.0; len];
    let b_norm = dot(b, b, n).sqrt();
    if b_norm == 0.0 {
        return x;
    }
    pre.apply(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z, n);
    for _ in 0..MAX_CG_ITERATIONS {
        sys.apply(eh, &p, &mut q);
        let alpha = rz / dot(&p, &q, n);
        x.par_iter_mut().zip(&p).for_each(|(xi, pi)| *xi += alpha * pi);
        r.par_iter_mut().zip(&q).for_each(|(ri, qi)| *ri -= alpha * qi);
        if dot(&r, &r, n).sqrt() <= rel_tol * b_norm {
            break;
        }
        pre.apply(&r, &mut z);
        let rz_new = dot(&r, &z, n);
        let beta = rz_new / rz;
        rz = rz_new;
        p.par_iter_mut().zip(&z).for_each(|(pi, zi)| *pi = zi + beta * *pi);
    }
    x
}

pub(crate) fn solve_reduced(config: &ZeroConfig, params: &SolverParams) -> Result<Reduced, SolverError> {
    let grid = Grid::new(params.grid_points_per_axis, params.domain_radius);
    let n = grid.n;
    let inner = grid.radius - 2.0 * grid.spacing * (1.0 + 1e-9);
    let unknown: Vec<bool> = (0..grid.len()).map(|k| grid.point_at(k).norm() <= inner).collect();
    let h0: Vec<f64> = (0..grid.len()).map(|k| background(config, grid.point_at(k))).collect();
    let g: Vec<f64> = (0..grid.len()).map(|k| background_source(config, grid.point_at(k))).collect();
    // Dirichlet data h = 0 outside the unknown disk.
    let mut w: Vec<f64> = (0..grid.len()).map(|k| if unknown[k] { 0.0 } else { -h0[k] }).collect();

    let sys = System { grid: &grid, unknown: &unknown, h0: &h0, g: &g };
    let m = smooth_size(n - 1) - 1;
    let mut pre = Preconditioner {
        solver: SineSolver::new(m, grid.spacing, 1.0),
        n,
        m,
        unknown: &unknown,
        buf: vec![0.0; m * m],
        scratch: vec![0.0; m * m],
    };

    let mut work = Workspace::new(grid.len());
    let coarse_tol = params.newton_tolerance.max(1e-6);
    let mut iterations = newton(&sys, &mut pre, params, coarse_tol, &mut w, &mut work, 0)?;
    // Replace h = 0 on the Dirichlet band by the far-field continuation of
    // the interior solution and re-solve until the band settles.
    let rho = grid.radius - 2.0;
    for _ in 0..FAR_FIELD_PASSES {
        let h_now: Vec<f64> = (0..grid.len()).map(|k| h0[k] + w[k]).collect();
        let far = FarField::new(&grid, &h_now, rho);
        let mut change = 0.0f64;
        for k in (0..grid.len()).filter(|&k| !unknown[k]) {
            let next = far.eval(grid.point_at(k)) - h0[k];
            change = change.max((next - w[k]).abs());
            w[k] = next;
        }
        iterations = newton(&sys, &mut pre, params, params.newton_tolerance, &mut w, &mut work, iterations)?;
        if change < FAR_FIELD_SETTLED {
            break;
        }
    }
    let residual = work.f_sup;

    Ok(Reduced { grid, h0, w, iterations, residual })
}

const FAR_FIELD_PASSES: usize = 4;
const FAR_FIELD_SETTLED: f64 = 1e-13;
const FAR_FIELD_SAMPLES: usize = 128;
const FAR_FIELD_MODES: usize = 24;

/// `h(r, θ) ≈ Re Σ_m a_m e^{imθ} K_m(r)/K_m(ρ)` with the `a_m` read off the
/// circle of radius `ρ`. Exact for solutions of `Δh = h` outside that circle.
struct FarField {
    rho: f64,
    coefficients: Vec<Complex64>,
    k_rho: Vec<f64>,
}

impl FarField {
    fn new(grid: &Grid, h: &[f64], rho: f64) -> Self {
        let m = FAR_FIELD_SAMPLES;
        let mut values: Vec<Complex64> = (0..m)
            .map(|a| {
                let z = Complex64::from_polar(rho, 2.0 * PI * a as f64 / m as f64);
                Complex64::new(grid.sample(h, z).expect("circle inside grid"), 0.0)
            })
            .collect();
        FftPlanner::new().plan_fft_forward(m).process(&mut values);
        let coefficients = values[..=FAR_FIELD_MODES]
            .iter()
            .enumerate()
            .map(|(k, c)| c * if k == 0 { 1.0 } else { 2.0 } / m as f64)
            .collect();
        FarField { rho, coefficients, k_rho: scaled_bessel_k(FAR_FIELD_MODES, rho) }
    }

    fn eval(&self, z: Complex64) -> f64 {
        let (r, theta) = z.to_polar();
        let k_r = scaled_bessel_k(FAR_FIELD_MODES, r);
        let decay = (self.rho - r).exp();
        self.coefficients
            .iter()
            .enumerate()
            .map(|(k, c)| (c * Complex64::from_polar(1.0, k as f64 * theta)).re * k_r[k] / self.k_rho[k] * decay)
            .sum()
    }
}

/// `eˣ K_m(x)` for `m = 0..=m_max`: large-argument series for `K₀, K₁`
/// (truncated at its smallest term) and upward recurrence. Meant for `x ≳ 8`.
fn scaled_bessel_k(m_max: usize, x: f64) -> Vec<f64> {
    let asymptotic = |nu: f64| {
        let mu = 4.0 * nu * nu;
        let (mut term, mut sum) = (1.0f64, 1.0f64);
        for k in 1..60 {
            let odd = (2 * k - 1) as f64;
            let next = term * (mu - odd * odd) / (k as f64 * 8.0 * x);
            if next.abs() >= term.abs() || next.abs() < 1e-17 {
                break;
            }
            term = next;
            sum += term;
        }
        (PI / (2.0 * x)).sqrt() * sum
    };
    let mut k = vec![asymptotic(0.0), asymptotic(1.0)];
    for m in 1..m_max {
        k.push(k[m - 1] + 2.0 * m as f64 / x * k[m]);
    }
    k.truncate(m_max + 1);
    k
}

struct Workspace {
    f: Vec<f64>,
    eh: Vec<f64>,
    trial: Vec<f64>,
    f_trial: Vec<f64>,
    f_sup: f64,
}

impl Workspace {
    fn new(len: usize) -> Self {
        Workspace { f: vec![0.0; len], eh: vec![0.0; len], trial: vec![0.0; len], f_trial: vec![0.0; len], f_sup: 0.0 }
    }
}

/// Damped Newton with residual-norm backtracking. Returns the running
/// iteration count.
fn newton(
    sys: &System,
    pre: &mut Preconditioner,
    params: &SolverParams,
    tolerance: f64,
    w: &mut Vec<f64>,
    ws: &mut Workspace,
    mut iterations: usize,
) -> Result<usize, SolverError> {
    let n = sys.n();
    let unknown = sys.unknown;
    let h0 = sys.h0;
    sys.residual(w, &mut ws.f);
    let mut f_sup = sup(&ws.f);
    let mut f_l2 = dot(&ws.f, &ws.f, n).sqrt();
    while f_sup > tolerance {
        if iterations >= params.max_newton_iterations {
            return Err(SolverError::NonConvergence(NonConvergence::IterationLimit {
                iterations,
                residual: f_sup,
            }));
        }
        iterations += 1;
        ws.eh.par_iter_mut().enumerate().for_each(|(k, e)| {
            *e = if unknown[k] { (h0[k] + w[k]).exp() } else { 0.0 };
        });
        let delta = pcg(sys, pre, &ws.eh, &ws.f, LINEAR_REL_TOL);

        let mut t = params.damping;
        loop {
            ws.trial.par_iter_mut().enumerate().for_each(|(k, v)| {
                *v = if unknown[k] { w[k] + t * delta[k] } else { w[k] };
            });
            sys.residual(&ws.trial, &mut ws.f_trial);
            let l2 = dot(&ws.f_trial, &ws.f_trial, n).sqrt();
            if l2.is_finite() && (l2 <= (1.0 - 1e-4 * t) * f_l2 || t < 1e-6) {
                f_l2 = l2;
                break;
            }
            t *= 0.5;
        }
        std::mem::swap(w, &mut ws.trial);
        std::mem::swap(&mut ws.f, &mut ws.f_trial);
        f_sup = sup(&ws.f);
        if !f_sup.is_finite() {
            return Err(SolverError::NonConvergence(NonConvergence::Diverged { iterations }));
        }
    }
    ws.f_sup = f_sup;
    Ok(iterations)
}

/// Smallest integer `≥ k` with no prime factor above 5.
fn smooth_size(k: usize) -> usize {
    (k..)
        .find(|&c| {
            let mut c = c;
            for p in [2, 3, 5] {
                while c % p == 0 {
                    c /= p;
                }
            }
            c == 1
        })
        .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_k_at_ten() {
        let k = scaled_bessel_k(3, 10.0);
        let scale = 10f64.exp();
        for (got, want) in k.iter().zip([1.778006231616918e-5, 1.864877345382558e-5, 2.150981700693277e-5, 2.725270025659869e-5]) {
            assert!((got / scale / want - 1.0).abs() < 1e-9, "{got} {want}");
        }
    }

    #[test]
    fn far_field_reproduces_an_off_center_source() {
        let g = Grid::new(401, 14.0);
        let c = Complex64::new(2.5, -1.0);
        let h: Vec<f64> = (0..g.len()).map(|k| -scaled_bessel_k(0, (g.point_at(k) - c).norm().max(1e-3))[0] * (-(g.point_at(k) - c).norm()).exp()).collect();
        let far = FarField::new(&g, &h, 10.0);
        let z = Complex64::from_polar(13.5, 0.7);
        let exact = -scaled_bessel_k(0, (z - c).norm())[0] * (-(z - c).norm()).exp();
        assert!((far.eval(z) / exact - 1.0).abs() < 1e-3, "{} {exact}", far.eval(z));
    }
}
