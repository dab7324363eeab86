use std::collections::VecDeque;
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::sphere::SpherePoint;
use crate::vortex::ZeroConfig;

/// Points closer than this in the chordal metric count as coincident.
pub const POINT_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VertexType {
    /// Holomorphic spheres in the target. In this model they are ghosts.
    T0,
    /// Vortex classes over the plane.
    T1,
    /// Spheres in the symplectic quotient, which is a point here.
    Tinf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Vertex {
    pub id: usize,
    #[serde(rename = "type")]
    pub kind: VertexType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<ZeroConfig>,
}

impl Vertex {
    pub fn t0(id: usize) -> Vertex {
        Vertex { id, kind: VertexType::T0, config: None }
    }

    pub fn t1(id: usize, config: ZeroConfig) -> Vertex {
        Vertex { id, kind: VertexType::T1, config: Some(config) }
    }

    pub fn tinf(id: usize) -> Vertex {
        Vertex { id, kind: VertexType::Tinf, config: None }
    }

    pub fn degree(&self) -> u32 {
        self.config.as_ref().map_or(0, ZeroConfig::degree)
    }

    /// `π · degree`.
    pub fn energy(&self) -> f64 {
        PI * self.degree() as f64
    }
}

/// The nodal point `z_{from,to}` lying on the component `from`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodalPoint {
    pub from: usize,
    pub to: usize,
    pub point: SpherePoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkedPoint {
    pub vertex: usize,
    pub point: SpherePoint,
}

/// Genus-0 stable map with Ginzburg-Landau vortex data. Marked point 0 is
/// `(α₀, z₀)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BubbleTree {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<(usize, usize)>,
    pub nodal_points: Vec<NodalPoint>,
    pub marked_points: Vec<MarkedPoint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    Structure,
    Combinatorics,
    SpecialPoints,
    Stability,
    MarkedPoints,
    Connectedness,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::Structure => "structure",
            Condition::Combinatorics => "combinatorics",
            Condition::SpecialPoints => "special points",
            Condition::Stability => "stability",
            Condition::MarkedPoints => "marked points",
            Condition::Connectedness => "connectedness",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: Condition,
    pub vertex: Option<usize>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.vertex {
            Some(v) => write!(f, "{} at vertex {}: {}", self.condition, v, self.detail),
            None => write!(f, "{}: {}", self.condition, self.detail),
        }
    }
}

impl BubbleTree {
    /// Assembles a tree and puts edges and nodal points in canonical order.
    pub fn new(
        vertices: Vec<Vertex>,
        edges: Vec<(usize, usize)>,
        nodal_points: Vec<NodalPoint>,
        marked_points: Vec<MarkedPoint>,
    ) -> BubbleTree {
        let mut t = BubbleTree { vertices, edges, nodal_points, marked_points };
        t.canonicalize();
        t
    }

    /// Sorts edges as `(min, max)` pairs and nodal points by `(from, to)`.
    pub fn canonicalize(&mut self) {
        for e in &mut self.edges {
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
        }
        self.edges.sort_unstable();
        self.nodal_points.sort_by_key(|p| (p.from, p.to));
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn root(&self) -> Option<usize> {
        self.marked_points.first().map(|m| m.vertex)
    }

    pub fn kind(&self, v: usize) -> VertexType {
        self.vertices[v].kind
    }

    pub fn degree(&self) -> u32 {
        self.vertices.iter().map(Vertex::degree).sum()
    }

    pub fn energy(&self) -> f64 {
        PI * self.degree() as f64
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let e = if a < b { (a, b) } else { (b, a) };
        self.edges.contains(&e)
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn nodal(&self, from: usize, to: usize) -> Option<SpherePoint> {
        self.nodal_points.iter().find(|p| p.from == from && p.to == to).map(|p| p.point)
    }

    /// Nodal points towards all neighbours followed by the marked points on `v`.
    pub fn special_points(&self, v: usize) -> Vec<SpherePoint> {
        let mut pts: Vec<SpherePoint> =
            self.neighbors(v).into_iter().filter_map(|w| self.nodal(v, w)).collect();
        pts.extend(self.marked_points.iter().filter(|m| m.vertex == v).map(|m| m.point));
        pts
    }

    /// Parent of every vertex on the path towards the root; `None` at the root.
    pub fn parents(&self) -> Option<Vec<Option<usize>>> {
        let root = self.root()?;
        let n = self.len();
        if root >= n {
            return None;
        }
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for w in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(v);
                    queue.push_back(w);
                }
            }
        }
        seen.iter().all(|&s| s).then_some(parent)
    }

    /// All conditions of a genus-0 stable map with vortex data. Structural
    /// problems are reported alone since the other checks need a tree.
    pub fn validate(&self) -> Vec<Violation> {
        let structure = self.structure_violations();
        if !structure.is_empty() {
            return structure;
        }
        let mut out = Vec::new();
        let root = self.root().unwrap();
        let parent = self.parents().unwrap();

        if self.kind(root) == VertexType::T0 {
            out.push(violation(Condition::Combinatorics, Some(root), "root vertex lies in T0"));
        }
        for (v, p) in parent.iter().enumerate() {
            let Some(p) = *p else { continue };
            let ok = match self.kind(v) {
                VertexType::T0 => matches!(self.kind(p), VertexType::T0 | VertexType::T1),
                VertexType::T1 | VertexType::Tinf => self.kind(p) == VertexType::Tinf,
            };
            if !ok {
                out.push(violation(
                    Condition::Combinatorics,
                    Some(v),
                    &format!("{:?} vertex attached towards the root through {:?} vertex {}", self.kind(v), self.kind(p), p),
                ));
            }
        }

        if self.kind(root) == VertexType::T1 && !self.marked_points[0].point.is_infinite() {
            out.push(violation(Condition::SpecialPoints, Some(root), "z0 must be infinity on a T1 root"));
        }
        for &(a, b) in &self.edges {
            for (x, y) in [(a, b), (b, a)] {
                if self.kind(x) == VertexType::T1 && self.kind(y) == VertexType::Tinf {
                    let z = self.nodal(x, y).unwrap();
                    if !z.is_infinite() {
                        out.push(violation(
                            Condition::SpecialPoints,
                            Some(x),
                            &format!("nodal point towards Tinf vertex {y} is {z}, not infinity"),
                        ));
                    }
                }
            }
        }
        for v in 0..self.len() {
            let pts = self.special_points(v);
            'pairs: for i in 0..pts.len() {
                for j in 0..i {
                    if pts[i].chordal(&pts[j]) <= POINT_TOLERANCE {
                        out.push(violation(
                            Condition::SpecialPoints,
                            Some(v),
                            &format!("special points coincide at {}", pts[i]),
                        ));
                        break 'pairs;
                    }
                }
            }
        }

        for v in 0..self.len() {
            let count = self.special_points(v).len();
            let required = match self.kind(v) {
                VertexType::T1 if self.vertices[v].degree() > 0 => 0,
                VertexType::T1 => 2,
                VertexType::T0 | VertexType::Tinf => 3,
            };
            if count < required {
                out.push(violation(
                    Condition::Stability,
                    Some(v),
                    &format!("{:?} ghost has {count} special points, needs {required}", self.kind(v)),
                ));
            }
        }

        for (i, m) in self.marked_points.iter().enumerate().skip(1) {
            if self.kind(m.vertex) == VertexType::T1 && m.point.is_infinite() {
                out.push(violation(
                    Condition::MarkedPoints,
                    Some(m.vertex),
                    &format!("marked point z{i} on a T1 vertex is infinity"),
                ));
            }
        }
        // Connectedness holds trivially: the quotient is a single point, so
        // every evaluation at a node agrees.
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    fn structure_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.len();
        let s = Condition::Structure;
        if n == 0 {
            out.push(violation(s, None, "no vertices"));
            return out;
        }
        for (i, v) in self.vertices.iter().enumerate() {
            if v.id != i {
                out.push(violation(s, Some(i), &format!("vertex id {} at position {i}", v.id)));
            }
            match (v.kind, &v.config) {
                (VertexType::T1, None) => out.push(violation(s, Some(i), "T1 vertex without a configuration")),
                (VertexType::T0 | VertexType::Tinf, Some(_)) => {
                    out.push(violation(s, Some(i), "only T1 vertices carry a configuration"))
                }
                _ => {}
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for &(a, b) in &self.edges {
            if a >= n || b >= n {
                out.push(violation(s, None, &format!("edge ({a},{b}) has an unknown endpoint")));
            } else if a == b {
                out.push(violation(s, Some(a), "self-loop"));
            } else if !seen.insert((a.min(b), a.max(b))) {
                out.push(violation(s, None, &format!("edge ({a},{b}) listed twice")));
            }
        }
        if !out.is_empty() {
            return out;
        }
        if self.edges.len() + 1 != n {
            out.push(violation(s, None, &format!("{} edges for {n} vertices", self.edges.len())));
        }
        if self.marked_points.is_empty() {
            out.push(violation(s, None, "marked point z0 is missing"));
            return out;
        }
        for m in &self.marked_points {
            if m.vertex >= n {
                out.push(violation(s, None, &format!("marked point on unknown vertex {}", m.vertex)));
            }
        }
        if !out.is_empty() {
            return out;
        }
        if self.parents().is_none() {
            out.push(violation(s, None, "graph is not connected"));
        }
        for &(a, b) in &self.edges {
            for (x, y) in [(a, b), (b, a)] {
                match self.nodal_points.iter().filter(|p| p.from == x && p.to == y).count() {
                    0 => out.push(violation(s, Some(x), &format!("missing nodal point towards {y}"))),
                    1 => {}
                    _ => out.push(violation(s, Some(x), &format!("nodal point towards {y} given twice"))),
                }
            }
        }
        for p in &self.nodal_points {
            if p.from >= n || p.to >= n || !seen.contains(&(p.from.min(p.to), p.from.max(p.to))) || p.from == p.to {
                out.push(violation(s, None, &format!("nodal point ({},{}) without an edge", p.from, p.to)));
            }
        }
        let points = self.nodal_points.iter().map(|p| p.point).chain(self.marked_points.iter().map(|m| m.point));
        if points.into_iter().any(|p| !p.is_finite_value()) {
            out.push(violation(s, None, "non-finite coordinate"));
        }
        out
    }

    /// Same combinatorics and data up to `tol` in positions.
    pub fn approx_eq(&self, other: &BubbleTree, tol: f64) -> bool {
        if self.len() != other.len()
            || self.edges != other.edges
            || self.marked_points.len() != other.marked_points.len()
            || self.nodal_points.len() != other.nodal_points.len()
        {
            return false;
        }
        let vertices = self.vertices.iter().zip(&other.vertices).all(|(a, b)| {
            a.kind == b.kind
                && match (&a.config, &b.config) {
                    (Some(x), Some(y)) => x.approx_eq(y, tol),
                    (None, None) => true,
                    _ => false,
                }
        });
        let nodal = self.nodal_points.iter().zip(&other.nodal_points).all(|(p, q)| {
            p.from == q.from && p.to == q.to && p.point.chordal(&q.point) <= tol
        });
        let marked = self
            .marked_points
            .iter()
            .zip(&other.marked_points)
            .all(|(p, q)| p.vertex == q.vertex && p.point.chordal(&q.point) <= tol);
        vertices && nodal && marked
    }

    /// No two distinct positive-energy T1 vertices carry configurations that
    /// differ by a translation.
    pub fn is_simple(&self) -> bool {
        let normalized: Vec<ZeroConfig> = self
            .vertices
            .iter()
            .filter(|v| v.kind == VertexType::T1 && v.degree() > 0)
            .map(|v| {
                let c = v.config.as_ref().unwrap();
                c.translated(-c.centroid().unwrap())
            })
            .collect();
        for i in 0..normalized.len() {
            for j in 0..i {
                if translation_equivalent(&normalized[i], &normalized[j]) {
                    return false;
                }
            }
        }
        true
    }
}

/// Whether two centroid-normalized configurations agree within `1e-9`.
fn translation_equivalent(a: &ZeroConfig, b: &ZeroConfig) -> bool {
    a.approx_eq(b, 1e-9)
}

fn violation(condition: Condition, vertex: Option<usize>, detail: &str) -> Violation {
    Violation { condition, vertex, detail: detail.to_string() }
}
