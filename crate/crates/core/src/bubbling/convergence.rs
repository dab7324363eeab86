use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{BubblingError, ConfigurationFamily, MobiusFamily};
use crate::moduli::{iota, sym_distance, SymPoint};
use crate::sphere::SpherePoint;
use crate::stable_maps::{BubbleTree, NodalPoint, VertexType};

/// Default limit tolerance in the chordal metric.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-3;

/// Increases below this are round-off, not divergence.
pub const ROUNDOFF: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceCondition {
    /// Total degree and the number of zeros each vortex component captures.
    Degree,
    /// `π d = Σ E(W_α)`.
    Energy,
    /// Maps on vortex components are translations.
    Translation,
    /// Pulled-back zeros converge to `ι_d` of the component in `Sym^d(S²)`.
    Symmetric,
    /// Pulled-back marked points converge.
    Marked,
    /// `(φ_σ)^{-1} ∘ φ_α` converges to the nodal point `z_{σα}`.
    Nodal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: ConvergenceCondition,
    /// Vertex, marked point index or child vertex, depending on the condition.
    pub subject: Option<usize>,
    pub residuals: Vec<f64>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub tolerance: f64,
    pub conditions: Vec<ConditionReport>,
    /// Nodal points induced by the maps at the largest scale.
    pub induced_nodal_points: Vec<NodalPoint>,
    pub verdict: Verdict,
}

impl ConvergenceReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConditionReport> {
        self.conditions.iter().filter(|c| c.verdict == Verdict::Fail)
    }
}

impl fmt::Display for ConvergenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.conditions {
            let subject = c.subject.map_or(String::new(), |s| format!(" [{s}]"));
            let last = c.residuals.last().copied().unwrap_or(0.0);
            writeln!(f, "{:?}{subject}: final residual {last:.3e} {:?}", c.condition, c.verdict)?;
        }
        for p in &self.induced_nodal_points {
            writeln!(f, "induced z_({},{}) = {}", p.from, p.to, p.point)?;
        }
        write!(f, "verdict: {:?}", self.verdict)
    }
}

/// A residual sequence converges when it does not increase (beyond
/// round-off) over the last three scales and ends within `tolerance`.
pub fn verdict(residuals: &[f64], tolerance: f64) -> Verdict {
    let n = residuals.len();
    let tail = &residuals[n.saturating_sub(3)..];
    let monotone = tail.windows(2).all(|w| w[1] <= w[0] + ROUNDOFF);
    if monotone && tail.last().is_some_and(|&r| r <= tolerance) {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn point_farthest_from(p: SpherePoint) -> SpherePoint {
    [SpherePoint::finite(0.0, 0.0), SpherePoint::finite(1.0, 0.0), SpherePoint::Infinity]
        .into_iter()
        .max_by(|a, b| a.chordal(&p).total_cmp(&b.chordal(&p)))
        .unwrap()
}

/// Finite-scale surrogate for convergence of the family to `tree` under
/// `reparams`, with the default tolerance.
pub fn check_convergence(
    family: &ConfigurationFamily,
    tree: &BubbleTree,
    reparams: &MobiusFamily,
) -> Result<ConvergenceReport, BubblingError> {
    check_convergence_with(family, tree, reparams, CONVERGENCE_TOLERANCE)
}

pub fn check_convergence_with(
    family: &ConfigurationFamily,
    tree: &BubbleTree,
    reparams: &MobiusFamily,
    tolerance: f64,
) -> Result<ConvergenceReport, BubblingError> {
    let m = family.scale_count();
    let n = tree.len();
    let mismatch = |s: String| Err(BubblingError::SizeMismatch(s));
    if let Some(v) = tree.validate().first() {
        return Err(BubblingError::SizeMismatch(format!("tree is not a stable map: {v}")));
    }
    if reparams.maps.len() != n {
        return mismatch(format!("{} map families for {n} vertices", reparams.maps.len()));
    }
    if let Some(v) = reparams.maps.iter().position(|row| row.len() != m) {
        return mismatch(format!("vertex {v} has {} maps for {m} scales", reparams.maps[v].len()));
    }
    if tree.marked_points.len() != family.marked_tracks().len() + 1 {
        return mismatch(format!(
            "tree has {} marked points, family has {} marked tracks plus z0",
            tree.marked_points.len(),
            family.marked_tracks().len()
        ));
    }
    let d = family.degree();
    let t1: Vec<usize> = (0..n).filter(|&v| tree.kind(v) == VertexType::T1).collect();
    let total: usize = t1.iter().map(|&v| tree.vertices[v].degree() as usize).sum();
    let mut conditions = Vec::new();
    let mut push = |condition, subject, residuals: Vec<f64>| {
        let verdict = verdict(&residuals, tolerance);
        conditions.push(ConditionReport { condition, subject, residuals, verdict });
    };

    let degree: Vec<f64> = (0..m)
        .map(|i| {
            let zeros = family.zeros_at(i);
            let mut r = (d as f64 - total as f64).abs();
            for &v in &t1 {
                let config = tree.vertices[v].config.as_ref().unwrap();
                let reach = 1.0 + config.max_modulus();
                let back = reparams.maps[v][i].inverse();
                let captured = zeros
                    .iter()
                    .filter(|&&z| back.apply(SpherePoint::Finite(z)).as_finite().is_some_and(|w| w.norm() <= reach))
                    .count();
                r += (captured as f64 - config.degree() as f64).abs();
            }
            r
        })
        .collect();
    push(ConvergenceCondition::Degree, None, degree);

    let energy = (PI * d as f64 - tree.energy()).abs();
    push(ConvergenceCondition::Energy, None, vec![energy; m]);

    for &v in &t1 {
        let r = reparams.maps[v]
            .iter()
            .map(|g| (g.c.norm()).max((g.a - 1.0).norm()).max((g.d - 1.0).norm()))
            .collect();
        push(ConvergenceCondition::Translation, Some(v), r);
    }

    for &v in &t1 {
        let config = tree.vertices[v].config.as_ref().unwrap();
        let r = match iota(config, d as u32) {
            Ok(target) => (0..m)
                .map(|i| {
                    let back = reparams.maps[v][i].inverse();
                    let pulled = SymPoint::new(
                        family.zeros_at(i).into_iter().map(|z| back.apply(SpherePoint::Finite(z))).collect(),
                    )
                    .expect("finite samples");
                    sym_distance(&pulled, &target).expect("equal sizes")
                })
                .collect(),
            Err(_) => vec![f64::INFINITY; m],
        };
        push(ConvergenceCondition::Symmetric, Some(v), r);
    }

    for (k, mp) in tree.marked_points.iter().enumerate() {
        let r = (0..m)
            .map(|i| {
                let z = if k == 0 {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite(family.marked_tracks()[k - 1][i])
                };
                reparams.maps[mp.vertex][i].inverse().apply(z).chordal(&mp.point)
            })
            .collect();
        push(ConvergenceCondition::Marked, Some(k), r);
    }

    let parents = tree.parents().expect("validated tree");
    let mut induced = Vec::new();
    for (child, parent) in parents.iter().enumerate() {
        let Some(parent) = *parent else { continue };
        let target = tree.nodal(parent, child).unwrap();
        let probe = point_farthest_from(tree.nodal(child, parent).unwrap());
        let at = |i: usize| reparams.maps[parent][i].inverse().apply(reparams.maps[child][i].apply(probe));
        let r = (0..m).map(|i| at(i).chordal(&target)).collect();
        push(ConvergenceCondition::Nodal, Some(child), r);
        induced.push(NodalPoint { from: parent, to: child, point: at(m - 1) });
    }

    let verdict = if conditions.iter().all(|c| c.verdict == Verdict::Pass) { Verdict::Pass } else { Verdict::Fail };
    Ok(ConvergenceReport { tolerance, conditions, induced_nodal_points: induced, verdict })
}
