use num_complex::Complex64;
use thiserror::Error;

use super::config::{Zero, ZeroConfig};
use super::grid::Grid;
use super::solution::VortexSolution;

/// `|f|` must exceed this on every probe circle.
const PROBE_FLOOR: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DegreeError {
    #[error("|f| stays below {floor} on the probe circle around {center} (maximum {max:.3})")]
    AmbiguousZero { center: Complex64, max: f64, floor: f64 },
    #[error("|f| vanishes on the probe circle around {center}")]
    ZeroOnProbe { center: Complex64 },
    #[error("probe radius {probe} must be below {limit:.4}")]
    ProbeTooLarge { probe: f64, limit: f64 },
    #[error("field winds {winding} times around {center}; zero configurations need positive multiplicities")]
    NegativeWinding { center: Complex64, winding: i64 },
}

/// Winding number of `f` around the circle `|z − center| = radius`, from
/// bilinear samples and phase increments in `(−π, π]`.
pub fn winding_number(grid: &Grid, f: &[Complex64], center: Complex64, radius: f64) -> Option<Winding> {
    let samples = ((4.0 * std::f64::consts::PI * radius / grid.spacing).ceil() as usize).max(64);
    let mut values = Vec::with_capacity(samples);
    for a in 0..samples {
        let t = 2.0 * std::f64::consts::PI * a as f64 / samples as f64;
        values.push(grid.sample(f, center + Complex64::from_polar(radius, t))?);
    }
    let min = values.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
    let max = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut total = 0.0;
    for a in 0..samples {
        let step = (values[(a + 1) % samples] / values[a]).arg();
        // arg lies in [−π, π]; move −π to π
        total += if step == -std::f64::consts::PI { std::f64::consts::PI } else { step };
    }
    Some(Winding { winding: (total / (2.0 * std::f64::consts::PI)).round() as i64, min, max })
}

/// Winding of a field around a circle with the range of `|f|` sampled on it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Winding {
    pub winding: i64,
    pub min: f64,
    pub max: f64,
}

/// 0.45 times the smaller of the minimal separation and the distance of the
/// zeros to the boundary.
pub fn default_probe_radius(sol: &VortexSolution) -> f64 {
    let margin = sol.grid.radius - sol.config.max_modulus();
    0.45 * sol.config.min_separation().min(margin)
}

/// Detected zeros of a solution with their local degrees.
pub fn local_degrees(sol: &VortexSolution, probe_radius: f64) -> Result<ZeroConfig, DegreeError> {
    let zs: Vec<Complex64> = sol.config.zeros().iter().map(|z| z.position).collect();
    let mut limit = f64::INFINITY;
    for (a, &p) in zs.iter().enumerate() {
        limit = limit.min(sol.grid.radius - p.norm());
        for &q in &zs[a + 1..] {
            limit = limit.min(0.5 * (p - q).norm());
        }
    }
    if !(probe_radius > 0.0 && probe_radius < limit) {
        return Err(DegreeError::ProbeTooLarge { probe: probe_radius, limit });
    }
    local_degrees_of_field(&sol.grid, &sol.f, probe_radius)
}

/// Zero detection on an arbitrary complex field. Candidates are local
/// minima of `|f|` below 0.5, grouped when closer than the probe radius;
/// each group's position is refined by a quadratic fit of `|f|^{2/n}`.
pub fn local_degrees_of_field(grid: &Grid, f: &[Complex64], probe_radius: f64) -> Result<ZeroConfig, DegreeError> {
    let n = grid.n;
    let reach = grid.radius - probe_radius - 2.0 * grid.spacing;
    let mut candidates: Vec<(usize, usize, f64)> = Vec::new();
    for j in 1..n - 1 {
        for i in 1..n - 1 {
            if grid.point(i, j).norm() > reach {
                continue;
            }
            let v = f[grid.index(i, j)].norm();
            if v >= PROBE_FLOOR {
                continue;
            }
            let is_min = (-1isize..=1).all(|dj| {
                (-1isize..=1).all(|di| {
                    let k = grid.index((i as isize + di) as usize, (j as isize + dj) as usize);
                    f[k].norm() >= v
                })
            });
            if is_min {
                candidates.push((i, j, v));
            }
        }
    }

    // single-linkage grouping at the probe radius
    let mut group: Vec<usize> = (0..candidates.len()).collect();
    fn root(g: &mut [usize], mut a: usize) -> usize {
        while g[a] != a {
            g[a] = g[g[a]];
            a = g[a];
        }
        a
    }
    for a in 0..candidates.len() {
        for b in a + 1..candidates.len() {
            let pa = grid.point(candidates[a].0, candidates[a].1);
            let pb = grid.point(candidates[b].0, candidates[b].1);
            if (pa - pb).norm() < probe_radius {
                let (ra, rb) = (root(&mut group, a), root(&mut group, b));
                group[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut best: Vec<Option<usize>> = vec![None; candidates.len()];
    for a in 0..candidates.len() {
        let r = root(&mut group, a);
        match best[r] {
            Some(b) if candidates[b].2 <= candidates[a].2 => {}
            _ => best[r] = Some(a),
        }
    }
    let reps: Vec<usize> = best.into_iter().flatten().collect();

    let mut zeros: Vec<Zero> = Vec::new();
    for &a in &reps {
        let (i, j, _) = candidates[a];
        let node = grid.point(i, j);
        let Winding { winding: w, min, max } = winding_number(grid, f, node, probe_radius).expect("probe circle inside grid");
        if max <= PROBE_FLOOR {
            return Err(DegreeError::AmbiguousZero { center: node, max, floor: PROBE_FLOOR });
        }
        if min == 0.0 {
            return Err(DegreeError::ZeroOnProbe { center: node });
        }
        if w == 0 {
            continue;
        }
        if w < 0 {
            return Err(DegreeError::NegativeWinding { center: node, winding: w });
        }
        let position = refine(grid, f, i, j, w as u32);
        match zeros.iter_mut().find(|z| (z.position - position).norm() < probe_radius) {
            Some(z) => z.multiplicity += w as u32,
            None => zeros.push(Zero { position, multiplicity: w as u32 }),
        }
    }
    zeros.sort_by(|a, b| a.position.re.total_cmp(&b.position.re).then(a.position.im.total_cmp(&b.position.im)));
    Ok(ZeroConfig::new(zeros).expect("detected zeros are distinct"))
}

fn refine(grid: &Grid, f: &[Complex64], i: usize, j: usize, mult: u32) -> Complex64 {
    let q = |di: isize, dj: isize| {
        let k = grid.index((i as isize + di) as usize, (j as isize + dj) as usize);
        f[k].norm().powf(2.0 / mult as f64)
    };
    let h = grid.spacing;
    let qx = (q(1, 0) - q(-1, 0)) / (2.0 * h);
    let qy = (q(0, 1) - q(0, -1)) / (2.0 * h);
    let qxx = (q(1, 0) - 2.0 * q(0, 0) + q(-1, 0)) / (h * h);
    let qyy = (q(0, 1) - 2.0 * q(0, 0) + q(0, -1)) / (h * h);
    let qxy = (q(1, 1) - q(1, -1) - q(-1, 1) + q(-1, -1)) / (4.0 * h * h);
    let det = qxx * qyy - qxy * qxy;
    let node = grid.point(i, j);
    if !(det > 0.0 && qxx > 0.0) {
        return node;
    }
    let dx = -(qyy * qx - qxy * qy) / det;
    let dy = -(qxx * qy - qxy * qx) / det;
    if dx.abs() > h || dy.abs() > h {
        return node;
    }
    node + Complex64::new(dx, dy)
}
