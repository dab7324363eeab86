//! Weighted Lebesgue and Sobolev norms on grids, membership of polynomials
//! in weighted spaces, a numerical Hardy-type inequality and the kernel of
//! `∂̄` on weighted spaces.
//!
//! Weights use `⟨x⟩ = (1 + |x|²)^{1/2}`:
//! `‖f‖_{p,λ} = ‖⟨·⟩^λ f‖_p`,
//! `‖u‖_{L^{k,p}_λ} = Σ_{|α|≤k} ‖⟨·⟩^{λ+|α|} ∂^α u‖_p` and
//! `‖u‖_{W^{k,p}_λ} = Σ_{|α|≤k} ‖⟨·⟩^λ ∂^α u‖_p`.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::vortex::derivative;

#[derive(Debug, Error)]
pub enum WeightedError {
    #[error("derivatives of order {0} are not supported")]
    UnsupportedOrder(u32),
    #[error("weight diverges: needs p > n and λ > −n/p, got p = {p}, λ = {lambda}, n = {n}")]
    DivergentWeight { p: f64, lambda: f64, n: u32 },
    #[error("invalid weight parameters: {0}")]
    InvalidParams(String),
    #[error("invalid grid function: {0}")]
    InvalidFunction(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightParams {
    pub p: f64,
    pub lambda: f64,
    pub n: u32,
    pub k: u32,
}

impl WeightParams {
    pub fn new(p: f64, lambda: f64) -> Result<Self, WeightedError> {
        let w = WeightParams { p, lambda, n: 2, k: 0 };
        w.validate()?;
        Ok(w)
    }

    pub fn with_order(self, k: u32) -> Self {
        WeightParams { k, ..self }
    }

    pub fn validate(&self) -> Result<(), WeightedError> {
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(WeightedError::InvalidParams(format!("p = {} must exceed 1", self.p)));
        }
        if !self.lambda.is_finite() {
            return Err(WeightedError::InvalidParams("λ must be finite".into()));
        }
        if self.n != 2 {
            return Err(WeightedError::InvalidParams(format!("grids are planar, n = {} given", self.n)));
        }
        Ok(())
    }

    /// `1 − 2/p ≤ λ < 2 − 2/p`. The lower endpoint is kept since membership
    /// of monomials is still decided by a strict inequality there.
    pub fn in_fredholm_range(&self) -> bool {
        1.0 - 2.0 / self.p <= self.lambda && self.lambda < 2.0 - 2.0 / self.p
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Square,
    Disk,
}

/// Values at the cell centres of an `n × n` grid covering the square of
/// half-width `half_width` around `center`. Integrals run over the square
/// or its inscribed disk. A value has `components` real entries and its
/// pointwise norm is Euclidean.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    pub center: Complex64,
    pub half_width: f64,
    pub n: usize,
    pub domain: Domain,
    pub components: usize,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(
        center: Complex64,
        half_width: f64,
        n: usize,
        domain: Domain,
        components: usize,
        values: Vec<f64>,
    ) -> Result<Self, WeightedError> {
        let bad = |s: String| Err(WeightedError::InvalidFunction(s));
        if n < 2 || components == 0 {
            return bad(format!("need n ≥ 2 and at least one component, got n = {n}"));
        }
        if !(half_width > 0.0 && half_width.is_finite()) || !(center.re.is_finite() && center.im.is_finite()) {
            return bad("grid geometry must be finite and nondegenerate".into());
        }
        if values.len() != n * n * components {
            return bad(format!("{} values for {n}×{n}×{components}", values.len()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return bad("non-finite value".into());
        }
        Ok(GridFunction { center, half_width, n, domain, components, values })
    }

    /// Samples `f` at the cell centres.
    pub fn from_fn(
        center: Complex64,
        half_width: f64,
        n: usize,
        domain: Domain,
        components: usize,
        f: impl Fn(Complex64) -> Vec<f64>,
    ) -> Result<Self, WeightedError> {
        let h = 2.0 * half_width / n as f64;
        let mut values = Vec::with_capacity(n * n * components);
        for j in 0..n {
            for i in 0..n {
                let z = center + Complex64::new(-half_width + (i as f64 + 0.5) * h, -half_width + (j as f64 + 0.5) * h);
                let v = f(z);
                if v.len() != components {
                    return Err(WeightedError::InvalidFunction(format!("{} components, expected {components}", v.len())));
                }
                values.extend(v);
            }
        }
        GridFunction::new(center, half_width, n, domain, components, values)
    }

    /// Real scalar function.
    pub fn real(center: Complex64, half_width: f64, n: usize, domain: Domain, f: impl Fn(Complex64) -> f64) -> Result<Self, WeightedError> {
        GridFunction::from_fn(center, half_width, n, domain, 1, |z| vec![f(z)])
    }

    /// Complex scalar function stored as (re, im).
    pub fn complex(center: Complex64, half_width: f64, n: usize, domain: Domain, f: impl Fn(Complex64) -> Complex64) -> Result<Self, WeightedError> {
        GridFunction::from_fn(center, half_width, n, domain, 2, |z| {
            let w = f(z);
            vec![w.re, w.im]
        })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        let h = self.spacing();
        self.center
            + Complex64::new(-self.half_width + (i as f64 + 0.5) * h, -self.half_width + (j as f64 + 0.5) * h)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize, c: usize) -> f64 {
        self.values[(j * self.n + i) * self.components + c]
    }

    pub fn scaled(&self, c: f64) -> GridFunction {
        GridFunction { values: self.values.iter().map(|v| v * c).collect(), ..self.clone() }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction { values: self.values.iter().map(|&v| f(v)).collect(), ..self.clone() }
    }

    fn inside(&self, i: usize, j: usize) -> bool {
        match self.domain {
            Domain::Square => true,
            Domain::Disk => (self.point(i, j) - self.center).norm() <= self.half_width,
        }
    }

    /// Cells of the integration domain.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |j| (0..self.n).map(move |i| (i, j))).filter(|&(i, j)| self.inside(i, j))
    }

    /// Cells of the outermost band of the domain, two cells wide.
    pub fn outer_ring(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let inner = self.half_width - 2.0 * self.spacing();
        self.cells().filter(move |&(i, j)| {
            let z = self.point(i, j) - self.center;
            match self.domain {
                Domain::Disk => z.norm() > inner,
                Domain::Square => z.re.abs().max(z.im.abs()) > inner,
            }
        })
    }

    /// `∂_x` of component `c` at cell `(i, j)`.
    pub fn dx(&self, c: usize, i: usize, j: usize) -> f64 {
        derivative(|k| self.value(k, j, c), i, self.n, self.spacing())
    }

    pub fn dy(&self, c: usize, i: usize, j: usize) -> f64 {
        derivative(|k| self.value(i, k, c), j, self.n, self.spacing())
    }

    fn norm_at(&self, i: usize, j: usize) -> f64 {
        (0..self.components).map(|c| self.value(i, j, c).powi(2)).sum::<f64>().sqrt()
    }

    fn gradient_norm_at(&self, i: usize, j: usize) -> f64 {
        (0..self.components)
            .map(|c| self.dx(c, i, j).powi(2) + self.dy(c, i, j).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// `(∫ (weight · |g|)^p)^{1/p}` by the midpoint rule.
    fn lp(&self, p: f64, pointwise: impl Fn(usize, usize) -> f64) -> f64 {
        let sum: f64 = self.cells().map(|(i, j)| pointwise(i, j).abs().powf(p)).sum();
        (sum * self.spacing().powi(2)).powf(1.0 / p)
    }

    /// CSV with header `x,y,v0,…`, one row per cell.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), WeightedError> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["x".to_string(), "y".to_string()];
        header.extend((0..self.components).map(|c| format!("v{c}")));
        w.write_record(&header)?;
        for j in 0..self.n {
            for i in 0..self.n {
                let z = self.point(i, j);
                let mut row = vec![z.re.to_string(), z.im.to_string()];
                row.extend((0..self.components).map(|c| self.value(i, j, c).to_string()));
                w.write_record(&row)?;
            }
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    /// Reads the format of [`GridFunction::write_csv`]: rows ordered by `y`
    /// then `x` on a uniform square grid of cell centres.
    pub fn read_csv<R: Read>(input: R, domain: Domain) -> Result<Self, WeightedError> {
        let bad = |s: &str| WeightedError::InvalidFunction(s.to_string());
        let mut r = csv::Reader::from_reader(input);
        let components = r.headers()?.len().checked_sub(2).filter(|&c| c > 0).ok_or_else(|| bad("need x, y and at least one value column"))?;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut values = Vec::new();
        for record in r.records() {
            let record = record?;
            let nums = record
                .iter()
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|_| bad("non-numeric entry"))?;
            xs.push(nums[0]);
            ys.push(nums[1]);
            values.extend_from_slice(&nums[2..]);
        }
        let n = (xs.len() as f64).sqrt().round() as usize;
        if n < 2 || n * n != xs.len() {
            return Err(bad("row count is not a square number ≥ 4"));
        }
        let h = xs[1] - xs[0];
        let x0 = xs[0];
        let y0 = ys[0];
        let tol = 1e-9 * h.abs().max(1e-300) * n as f64;
        for j in 0..n {
            for i in 0..n {
                let k = j * n + i;
                if (xs[k] - (x0 + i as f64 * h)).abs() > tol || (ys[k] - (y0 + j as f64 * h)).abs() > tol {
                    return Err(bad("points do not form a uniform grid in row order"));
                }
            }
        }
        let half_width = n as f64 * h / 2.0;
        let center = Complex64::new(x0 - h / 2.0 + half_width, y0 - h / 2.0 + half_width);
        GridFunction::new(center, half_width, n, domain, components, values)
    }
}

fn bracket(z: Complex64) -> f64 {
    (1.0 + z.norm_sqr()).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormFlavor {
    #[serde(rename = "p_lambda")]
    PLambda,
    #[serde(rename = "L_kp_lambda")]
    LkpLambda,
    #[serde(rename = "W_kp_lambda")]
    WkpLambda,
}

/// Midpoint-rule value of the chosen weighted norm. Derivatives are taken
/// with centred differences, so only `k ≤ 1` is available.
pub fn weighted_norm(f: &GridFunction, w: &WeightParams, flavor: NormFlavor) -> Result<f64, WeightedError> {
    w.validate()?;
    let weight = |i: usize, j: usize, extra: f64| bracket(f.point(i, j)).powf(w.lambda + extra);
    if flavor == NormFlavor::PLambda {
        return Ok(f.lp(w.p, |i, j| weight(i, j, 0.0) * f.norm_at(i, j)));
    }
    if w.k > 1 {
        return Err(WeightedError::UnsupportedOrder(w.k));
    }
    let mut total = f.lp(w.p, |i, j| weight(i, j, 0.0) * f.norm_at(i, j));
    if w.k == 1 {
        let extra = if flavor == NormFlavor::LkpLambda { 1.0 } else { 0.0 };
        let partial = |dir: usize, i: usize, j: usize| {
            (0..f.components)
                .map(|c| if dir == 0 { f.dx(c, i, j) } else { f.dy(c, i, j) }.powi(2))
                .sum::<f64>()
                .sqrt()
        };
        for dir in 0..2 {
            total += f.lp(w.p, |i, j| weight(i, j, extra) * partial(dir, i, j));
        }
    }
    Ok(total)
}

/// Whether `z^k` belongs to the weighted space attached to degree `d`:
/// `k < d − λ + 1 − 2/p`.
pub fn poly_in_weighted_space(k: i64, d: i64, w: &WeightParams) -> bool {
    (k as f64) < d as f64 - w.lambda + 1.0 - 2.0 / w.p
}

/// Relative slack allowed on the Hardy inequality for quadrature error.
pub const HARDY_SLACK: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardyReport {
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
    pub y_infinity: f64,
    pub ok: bool,
}

/// `‖(u − y_∞)|·|^λ‖_p ≤ p/(λ + n/p) · ‖Du |·|^{λ+1}‖_p` on the grid, with
/// `y_∞` taken as the mean of `u` over the outer ring.
pub fn hardy_check(u: &GridFunction, w: &WeightParams) -> Result<HardyReport, WeightedError> {
    hardy_check_with(u, w, HARDY_SLACK)
}

pub fn hardy_check_with(u: &GridFunction, w: &WeightParams, slack: f64) -> Result<HardyReport, WeightedError> {
    w.validate()?;
    let n = w.n as f64;
    if !(w.p > n && w.lambda > -n / w.p) {
        return Err(WeightedError::DivergentWeight { p: w.p, lambda: w.lambda, n: w.n });
    }
    if u.components != 1 {
        return Err(WeightedError::InvalidFunction("the Hardy check takes a real scalar function".into()));
    }
    let ring: Vec<f64> = u.outer_ring().map(|(i, j)| u.value(i, j, 0)).collect();
    if ring.is_empty() {
        return Err(WeightedError::InvalidFunction("grid has no outer ring".into()));
    }
    let y_infinity = ring.iter().sum::<f64>() / ring.len() as f64;
    let modulus = |i: usize, j: usize| u.point(i, j).norm();
    let lhs = u.lp(w.p, |i, j| (u.value(i, j, 0) - y_infinity) * modulus(i, j).powf(w.lambda));
    let dnorm = u.lp(w.p, |i, j| u.gradient_norm_at(i, j) * modulus(i, j).powf(w.lambda + 1.0));
    let constant = w.p / (w.lambda + n / w.p);
    let rhs = constant * dnorm;
    Ok(HardyReport { lhs, rhs, constant, y_infinity, ok: lhs <= rhs * (1.0 + slack) })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonomialCheck {
    pub k: u32,
    pub in_domain: bool,
    pub dbar_residual: f64,
    pub in_kernel: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelReport {
    pub d: u32,
    pub p: f64,
    pub lambda: f64,
    pub monomials: Vec<MonomialCheck>,
    pub next_excluded: bool,
    pub kernel_real_dimension: u32,
    pub cokernel_real_dimension: u32,
    pub index: i64,
    pub expected_index: i64,
    pub ok: bool,
}

/// Largest `∂̄` residual accepted for a holomorphic polynomial.
pub const DBAR_TOLERANCE: f64 = 1e-10;

/// Interior cells where the sixth-order stencil applies.
fn dbar_residual(g: &GridFunction) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 3..g.n - 3 {
        for i in 3..g.n - 3 {
            // ∂̄ = (∂_x + i∂_y)/2 applied to u + iv
            let re = 0.5 * (g.dx(0, i, j) - g.dy(1, i, j));
            let im = 0.5 * (g.dx(1, i, j) + g.dy(0, i, j));
            worst = worst.max(re.hypot(im));
        }
    }
    worst
}

/// Checks that `1, z, …, z^d` lie in the domain `ℂρ₀p_d + L^{1,p}_{λ−1−d}`
/// and are annihilated by the discrete `∂̄`, and that `z^{d+1}` is not in the
/// domain. The cokernel is zero for `d ≥ 0`.
pub fn dbar_kernel_check(d: u32, w: &WeightParams, template: &GridFunction) -> Result<KernelReport, WeightedError> {
    w.validate()?;
    if !w.in_fredholm_range() {
        return Err(WeightedError::InvalidParams(format!(
            "λ = {} outside [1 − 2/p, 2 − 2/p) for p = {}",
            w.lambda, w.p
        )));
    }
    if template.n < 7 {
        return Err(WeightedError::InvalidFunction("template grid needs at least 7 cells per axis".into()));
    }
    // Monomials of degree ≤ d − 1 lie in L^{1,p}_{λ−1−d}; z^d is covered by ρ₀p_d.
    let in_domain = |k: u32| poly_in_weighted_space(k as i64, d as i64, w) || k == d;
    let mut monomials = Vec::new();
    for k in 0..=d {
        let g = GridFunction::complex(template.center, template.half_width, template.n, template.domain, |z| z.powu(k))?;
        let dbar_residual = dbar_residual(&g);
        let in_domain = in_domain(k);
        monomials.push(MonomialCheck { k, in_domain, dbar_residual, in_kernel: in_domain && dbar_residual <= DBAR_TOLERANCE });
    }
    let next_excluded = !in_domain(d + 1);
    let kernel_real_dimension = 2 * monomials.iter().filter(|m| m.in_kernel).count() as u32;
    let cokernel_real_dimension = 0;
    let index = kernel_real_dimension as i64 - cokernel_real_dimension as i64;
    let expected_index = 2 + 2 * d as i64;
    Ok(KernelReport {
        d,
        p: w.p,
        lambda: w.lambda,
        monomials,
        next_excluded,
        kernel_real_dimension,
        cokernel_real_dimension,
        index,
        expected_index,
        ok: next_excluded && index == expected_index,
    })
}
