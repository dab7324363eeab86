//! Points of `Sym^d(S²)`, the inclusion `ι_d : Sym^{≤d}(ℂ) → Sym^d(S²)` and a
//! matching metric for the symmetric-product topology.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sphere::{chordal, SpherePoint};
use crate::vortex::ZeroConfig;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModuliError {
    #[error("configuration of degree {degree} does not fit in Sym^{d}")]
    DegreeExceeded { degree: u32, d: u32 },
    #[error("multisets of sizes {left} and {right} cannot be compared")]
    SizeMismatch { left: usize, right: usize },
    #[error("SymPoint declares d = {declared} but lists {actual} points")]
    SizeField { declared: usize, actual: usize },
    #[error("point {index} is not finite")]
    NonFinite { index: usize },
}

#[derive(Serialize, Deserialize)]
struct RawSym {
    d: usize,
    points: Vec<SpherePoint>,
}

/// A multiset of `d` points of the Riemann sphere, stored sorted
/// lexicographically with `∞` last.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSym", into = "RawSym")]
pub struct SymPoint {
    points: Vec<SpherePoint>,
}

impl TryFrom<RawSym> for SymPoint {
    type Error = ModuliError;
    fn try_from(raw: RawSym) -> Result<Self, ModuliError> {
        if raw.d != raw.points.len() {
            return Err(ModuliError::SizeField { declared: raw.d, actual: raw.points.len() });
        }
        SymPoint::new(raw.points)
    }
}

impl From<SymPoint> for RawSym {
    fn from(s: SymPoint) -> Self {
        RawSym { d: s.points.len(), points: s.points }
    }
}

impl SymPoint {
    pub fn new(mut points: Vec<SpherePoint>) -> Result<Self, ModuliError> {
        if let Some(index) = points.iter().position(|p| !p.is_finite_value()) {
            return Err(ModuliError::NonFinite { index });
        }
        points.sort_by(|a, b| a.lex_cmp(b));
        Ok(SymPoint { points })
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[SpherePoint] {
        &self.points
    }

    /// Multiplicity of `p` (exact comparison).
    pub fn multiplicity(&self, p: SpherePoint) -> usize {
        self.points.iter().filter(|&&q| q == p).count()
    }

    /// Number of points, with multiplicity, in the open chordal ball.
    pub fn count_in_ball(&self, ball: &ChordalBall) -> usize {
        self.points.iter().filter(|&&p| ball.contains(p)).count()
    }

    /// Pushes every point through `map`.
    pub fn map(&self, map: impl Fn(SpherePoint) -> SpherePoint) -> SymPoint {
        SymPoint::new(self.points.iter().map(|&p| map(p)).collect()).expect("mapped points are finite")
    }
}

/// `ι_d`: the zeros of `config` with multiplicity, padded with `∞`.
pub fn iota(config: &ZeroConfig, d: u32) -> Result<SymPoint, ModuliError> {
    let degree = config.degree();
    if degree > d {
        return Err(ModuliError::DegreeExceeded { degree, d });
    }
    let mut pts: Vec<SpherePoint> = config.points().into_iter().map(SpherePoint::Finite).collect();
    pts.extend(std::iter::repeat(SpherePoint::Infinity).take((d - degree) as usize));
    SymPoint::new(pts)
}

/// Minimum over bijections of the summed chordal distances.
pub fn sym_distance(a: &SymPoint, b: &SymPoint) -> Result<f64, ModuliError> {
    if a.size() != b.size() {
        return Err(ModuliError::SizeMismatch { left: a.size(), right: b.size() });
    }
    let n = a.size();
    if n == 0 {
        return Ok(0.0);
    }
    let cost: Vec<Vec<f64>> =
        a.points.iter().map(|&p| b.points.iter().map(|&q| chordal(p, q)).collect()).collect();
    let assignment = hungarian(&cost);
    // Sum in row order over the sorted multiset for a reproducible value.
    Ok(assignment.iter().enumerate().map(|(i, &j)| cost[i][j]).sum())
}

/// Optimal assignment for a square cost matrix (Kuhn-Munkres with
/// potentials, `O(n³)`). Returns the column assigned to each row. Ties are
/// broken towards the lowest column index.
pub fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1]; // owner[j] = row matched to column j (1-based)
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut result = vec![0; n];
    for j in 1..=n {
        result[owner[j] - 1] = j - 1;
    }
    result
}

/// Open ball `{p : χ(p, center) < radius}` in the chordal metric.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChordalBall {
    pub center: SpherePoint,
    pub radius: f64,
}

impl ChordalBall {
    pub fn contains(&self, p: SpherePoint) -> bool {
        chordal(p, self.center) < self.radius
    }

    /// Chordal distance from `p` to the boundary sphere of the ball.
    pub fn distance_to_boundary(&self, p: SpherePoint) -> f64 {
        (chordal(p, self.center) - self.radius).abs()
    }
}

/// Subbasis set `V_U^{d₀}`: multisets with exactly `d₀` points in the open
/// set `U` and none on its boundary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubbasisSet {
    pub ball: ChordalBall,
    pub count: usize,
}

impl SubbasisSet {
    pub fn contains(&self, m: &SymPoint) -> bool {
        m.points.iter().all(|&p| self.ball.distance_to_boundary(p) > 0.0) && m.count_in_ball(&self.ball) == self.count
    }

    /// Smallest distance from a point of `m` to the ball's boundary. Any
    /// multiset closer than this in `sym_distance` has the same membership.
    pub fn margin(&self, m: &SymPoint) -> f64 {
        m.points.iter().map(|&p| self.ball.distance_to_boundary(p)).fold(f64::INFINITY, f64::min)
    }
}
