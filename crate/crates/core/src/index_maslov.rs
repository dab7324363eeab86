//! Maslov indices of unitary loops, the boundary Maslov index of a vortex,
//! and the index formula `dim M − 2 dim G + 2⟨c₁^G, [W]⟩`.
//!
//! On unitary loops the normalized symplectic determinant is the complex
//! determinant, so the Maslov index is twice the winding number of `det`.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sphere::complex_json;
use crate::vortex::{VortexSolution, ZeroConfig};

pub const UNITARY_TOLERANCE: f64 = 1e-9;
/// Largest allowed operator distance between consecutive samples.
pub const MAX_STEP: f64 = 0.5;
/// Smallest `|f|` accepted on a boundary circle.
pub const MIN_BOUNDARY_MODULUS: f64 = 0.9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MaslovError {
    #[error("invalid loop: {0}")]
    InvalidLoop(String),
    #[error("{samples} samples for dimension {dim}, at least {required} needed")]
    TooFewSamples { samples: usize, dim: usize, required: usize },
    #[error("sample {index} is not unitary (defect {defect:.3e})")]
    NotUnitary { index: usize, defect: f64 },
    #[error("samples {index} and {next} are {distance:.3} apart in operator norm")]
    StepTooLarge { index: usize, next: usize, distance: f64 },
    #[error("phase of det jumps by {increment:.3} after sample {index}")]
    WindingAmbiguous { index: usize, increment: f64 },
    #[error("|f| drops to {min:.4} on the circle of radius {radius}")]
    FieldNotUnimodular { radius: f64, min: f64 },
    #[error("radius {radius} outside the admissible range [{min}, {max}]")]
    RadiusOutOfRange { radius: f64, min: f64, max: f64 },
    #[error("invalid index data: {0}")]
    InvalidIndexData(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLoop {
    dim: usize,
    samples: Vec<RawMatrix>,
}

#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct RawMatrix(#[serde(with = "complex_json::vec")] Vec<Complex64>);

/// Closed loop `θ ↦ U(θ)` of unitary matrices sampled at `N` points,
/// indexed cyclically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLoop", into = "RawLoop")]
pub struct SymplecticLoop {
    dim: usize,
    samples: Vec<DMatrix<Complex64>>,
}

impl TryFrom<RawLoop> for SymplecticLoop {
    type Error = MaslovError;
    fn try_from(raw: RawLoop) -> Result<Self, MaslovError> {
        let n = raw.dim;
        let mut samples = Vec::with_capacity(raw.samples.len());
        for (k, m) in raw.samples.into_iter().enumerate() {
            if n == 0 || m.0.len() != n * n {
                return Err(MaslovError::InvalidLoop(format!(
                    "sample {k} has {} entries, expected {}",
                    m.0.len(),
                    n * n
                )));
            }
            samples.push(DMatrix::from_row_slice(n, n, &m.0));
        }
        SymplecticLoop::new(samples)
    }
}

impl From<SymplecticLoop> for RawLoop {
    fn from(l: SymplecticLoop) -> Self {
        let samples = l
            .samples
            .iter()
            .map(|m| RawMatrix((0..l.dim).flat_map(|i| (0..l.dim).map(move |j| m[(i, j)])).collect()))
            .collect();
        RawLoop { dim: l.dim, samples }
    }
}

fn operator_norm(m: &DMatrix<Complex64>) -> f64 {
    m.singular_values().iter().copied().fold(0.0, f64::max)
}

impl SymplecticLoop {
    pub fn new(samples: Vec<DMatrix<Complex64>>) -> Result<Self, MaslovError> {
        let Some(first) = samples.first() else {
            return Err(MaslovError::InvalidLoop("no samples".into()));
        };
        let n = first.nrows();
        if n == 0 || samples.iter().any(|m| m.nrows() != n || m.ncols() != n) {
            return Err(MaslovError::InvalidLoop("samples must be square of one common size".into()));
        }
        if samples.len() < 8 * n {
            return Err(MaslovError::TooFewSamples { samples: samples.len(), dim: n, required: 8 * n });
        }
        let identity = DMatrix::<Complex64>::identity(n, n);
        for (index, m) in samples.iter().enumerate() {
            if m.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(MaslovError::InvalidLoop(format!("sample {index} is not finite")));
            }
            let defect = (m.adjoint() * m - &identity).iter().map(|z| z.norm()).fold(0.0, f64::max);
            if defect > UNITARY_TOLERANCE {
                return Err(MaslovError::NotUnitary { index, defect });
            }
        }
        for index in 0..samples.len() {
            let next = (index + 1) % samples.len();
            let distance = operator_norm(&(&samples[next] - &samples[index]));
            if distance > MAX_STEP {
                return Err(MaslovError::StepTooLarge { index, next, distance });
            }
        }
        Ok(SymplecticLoop { dim: n, samples })
    }

    /// Samples `u(θ)` at `θ = 2πk/N`.
    pub fn sample(n: usize, count: usize, u: impl Fn(f64) -> DMatrix<Complex64>) -> Result<Self, MaslovError> {
        let samples = (0..count).map(|k| u(2.0 * PI * k as f64 / count as f64)).collect::<Vec<_>>();
        if samples.iter().any(|m| m.nrows() != n) {
            return Err(MaslovError::InvalidLoop(format!("sampler does not produce {n}×{n} matrices")));
        }
        SymplecticLoop::new(samples)
    }

    /// `z ↦ z^d · Id_n` on the unit circle.
    pub fn zd_id(d: i64, n: usize) -> Result<Self, MaslovError> {
        let count = default_sample_count(d.unsigned_abs() as usize, n);
        SymplecticLoop::sample(n, count, |t| {
            DMatrix::identity(n, n) * Complex64::from_polar(1.0, d as f64 * t)
        })
    }

    /// `z ↦ diag(z^{d₁}, …, z^{d_n})`.
    pub fn diag(degrees: &[i64]) -> Result<Self, MaslovError> {
        let n = degrees.len();
        let top = degrees.iter().map(|d| d.unsigned_abs() as usize).max().unwrap_or(0);
        SymplecticLoop::sample(n, default_sample_count(top, n), |t| {
            DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                n,
                degrees.iter().map(|&d| Complex64::from_polar(1.0, d as f64 * t)),
            ))
        })
    }

    pub fn constant(u: DMatrix<Complex64>, count: usize) -> Result<Self, MaslovError> {
        SymplecticLoop::new(vec![u; count])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn samples(&self) -> &[DMatrix<Complex64>] {
        &self.samples
    }

    /// Runs `self` and then `other`. Both should start at the same point.
    pub fn concat(&self, other: &SymplecticLoop) -> Result<SymplecticLoop, MaslovError> {
        SymplecticLoop::new(self.samples.iter().chain(&other.samples).cloned().collect())
    }

    /// Applies `f` to every sample, passing its index.
    pub fn map(&self, f: impl Fn(usize, &DMatrix<Complex64>) -> DMatrix<Complex64>) -> Result<SymplecticLoop, MaslovError> {
        SymplecticLoop::new(self.samples.iter().enumerate().map(|(k, m)| f(k, m)).collect())
    }
}

/// Enough samples for the step bounds on a loop of matrix degree `d`.
pub fn default_sample_count(d: usize, n: usize) -> usize {
    (16 * d.max(1) * n.max(1)).max(64).max(8 * n)
}

fn winding(phases: &[Complex64]) -> Result<i64, MaslovError> {
    let n = phases.len();
    let mut total = 0.0;
    for index in 0..n {
        let increment = (phases[(index + 1) % n] / phases[index]).arg();
        if increment.abs() >= FRAC_PI_2 {
            return Err(MaslovError::WindingAmbiguous { index, increment });
        }
        total += increment;
    }
    Ok((total / (2.0 * PI)).round() as i64)
}

/// Twice the winding number of `det U(θ)`.
pub fn maslov_index(lp: &SymplecticLoop) -> Result<i64, MaslovError> {
    let dets: Vec<Complex64> = lp.samples.iter().map(|m| m.determinant()).collect();
    Ok(2 * winding(&dets)?)
}

/// Admissible radii for the boundary loop of a solution.
pub fn boundary_radius_range(sol: &VortexSolution) -> (f64, f64) {
    let r = sol.grid.radius;
    (0.8 * r, r - 2.0 * sol.grid.spacing)
}

/// Maslov index of the transport `z ↦ f(z)/|f(z)| · |f(z₀)|/f(z₀)` around
/// the circle of the given radius.
pub fn vortex_boundary_maslov(sol: &VortexSolution, radius: f64) -> Result<i64, MaslovError> {
    let (lo, hi) = boundary_radius_range(sol);
    if !(radius >= lo - 1e-12 && radius <= hi + 1e-12) {
        return Err(MaslovError::RadiusOutOfRange { radius, min: lo, max: hi });
    }
    let count = (8.0 * 2.0 * PI * radius / sol.grid.spacing).ceil().max(64.0) as usize;
    let mut values = Vec::with_capacity(count);
    let mut min = f64::INFINITY;
    for k in 0..count {
        let z = Complex64::from_polar(radius, 2.0 * PI * k as f64 / count as f64);
        let f = sol.grid.sample(&sol.f, z).expect("circle inside the grid");
        min = min.min(f.norm());
        values.push(f);
    }
    if min < MIN_BOUNDARY_MODULUS {
        return Err(MaslovError::FieldNotUnimodular { radius, min });
    }
    let base = values[0] / values[0].norm();
    let samples = values
        .iter()
        .map(|f| DMatrix::from_element(1, 1, f / f.norm() / base))
        .collect();
    maslov_index(&SymplecticLoop::new(samples)?)
}

/// `⟨c₁^G(ℂ, ω₀), [W]⟩`, the total degree in this model.
pub fn chern_pairing(config: &ZeroConfig) -> i64 {
    config.degree() as i64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawIndexData")]
pub struct IndexData {
    pub dim_m: u32,
    pub dim_g: u32,
    pub chern_pairing: i64,
}

#[derive(Deserialize)]
struct RawIndexData {
    dim_m: u32,
    dim_g: u32,
    chern_pairing: i64,
}

impl TryFrom<RawIndexData> for IndexData {
    type Error = MaslovError;
    fn try_from(r: RawIndexData) -> Result<Self, MaslovError> {
        IndexData::new(r.dim_m, r.dim_g, r.chern_pairing)
    }
}

impl IndexData {
    pub fn new(dim_m: u32, dim_g: u32, chern_pairing: i64) -> Result<Self, MaslovError> {
        if dim_m == 0 || dim_m % 2 != 0 {
            return Err(MaslovError::InvalidIndexData(format!("dim M = {dim_m} must be even and positive")));
        }
        if dim_g == 0 {
            return Err(MaslovError::InvalidIndexData("dim G must be positive".into()));
        }
        Ok(IndexData { dim_m, dim_g, chern_pairing })
    }
}

pub fn fredholm_index(data: &IndexData) -> i64 {
    data.dim_m as i64 - 2 * data.dim_g as i64 + 2 * data.chern_pairing
}
