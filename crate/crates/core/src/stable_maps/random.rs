//! Random stable maps and reparametrizations for property checks.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;

use super::mobius::Mobius;
use super::reparam::{automorphisms, ReparamElement};
use super::tree::{BubbleTree, MarkedPoint, NodalPoint, Vertex, VertexType};
use crate::sphere::SpherePoint;
use crate::vortex::{Zero, ZeroConfig};

fn complex<R: Rng>(rng: &mut R, scale: f64) -> Complex64 {
    Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
}

/// Nonempty configuration with up to three distinct zeros.
pub fn random_config<R: Rng>(rng: &mut R) -> ZeroConfig {
    let count = rng.gen_range(1..=3);
    let mut zeros: Vec<Zero> = Vec::new();
    while zeros.len() < count {
        let z = complex(rng, 3.0);
        if zeros.iter().all(|w| (w.position - z).norm() > 1e-3) {
            zeros.push(Zero { position: z, multiplicity: rng.gen_range(1..=3) });
        }
    }
    ZeroConfig::new(zeros).expect("distinct finite zeros")
}

pub fn random_mobius<R: Rng>(rng: &mut R) -> Mobius {
    loop {
        let m = Mobius::new(complex(rng, 2.0), complex(rng, 2.0), complex(rng, 2.0), complex(rng, 2.0));
        if let Some(m) = m {
            if (m.a * m.d - m.b * m.c).norm() > 0.5 && [m.a, m.b, m.c, m.d].iter().all(|z| z.norm() < 10.0) {
                return m;
            }
        }
    }
}

struct Draft {
    vertices: Vec<Vertex>,
    parent: Vec<Option<usize>>,
    marked: Vec<usize>,
}

impl Draft {
    fn add(&mut self, kind: VertexType, config: Option<ZeroConfig>, parent: Option<usize>) -> usize {
        let id = self.vertices.len();
        self.vertices.push(Vertex { id, kind, config });
        self.parent.push(parent);
        id
    }

    fn grow<R: Rng>(&mut self, rng: &mut R, v: usize, depth: usize) {
        match self.vertices[v].kind {
            VertexType::Tinf => {
                for _ in 0..rng.gen_range(2..=3) {
                    if depth < 2 && rng.gen_bool(0.3) {
                        let c = self.add(VertexType::Tinf, None, Some(v));
                        self.grow(rng, c, depth + 1);
                    } else {
                        self.add_vortex(rng, v, depth);
                    }
                }
            }
            VertexType::T0 => {
                let mut slots = 0;
                if depth < 3 && rng.gen_bool(0.3) {
                    let c = self.add(VertexType::T0, None, Some(v));
                    self.grow(rng, c, depth + 1);
                    slots += 1;
                }
                while slots < 2 || rng.gen_bool(0.2) {
                    self.marked.push(v);
                    slots += 1;
                }
            }
            VertexType::T1 => {}
        }
    }

    fn add_vortex<R: Rng>(&mut self, rng: &mut R, parent: usize, depth: usize) {
        let ghost = rng.gen_bool(0.15);
        let config = if ghost { ZeroConfig::empty() } else { random_config(rng) };
        let v = self.add(VertexType::T1, Some(config), Some(parent));
        self.decorate_vortex(rng, v, depth, ghost);
    }

    fn decorate_vortex<R: Rng>(&mut self, rng: &mut R, v: usize, depth: usize, ghost: bool) {
        if depth < 3 && rng.gen_bool(0.25) {
            let c = self.add(VertexType::T0, None, Some(v));
            self.grow(rng, c, depth + 1);
        } else if ghost || rng.gen_bool(0.3) {
            self.marked.push(v);
        }
    }
}

/// Distinct points; `fixed` entries stay as given.
fn distinct_points<R: Rng>(rng: &mut R, fixed: &[Option<SpherePoint>], allow_infinity: bool) -> Vec<SpherePoint> {
    let mut out: Vec<SpherePoint> = Vec::new();
    let taken: Vec<SpherePoint> = fixed.iter().flatten().copied().collect();
    for f in fixed {
        let p = match f {
            Some(p) => *p,
            None => loop {
                let candidate = if allow_infinity && rng.gen_bool(0.15) {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite(complex(rng, 4.0))
                };
                if taken.iter().chain(&out).all(|q| q.chordal(&candidate) > 1e-3) {
                    break candidate;
                }
            },
        };
        out.push(p);
    }
    out
}

/// Random valid stable map with up to four levels.
pub fn random_stable_map<R: Rng>(rng: &mut R) -> BubbleTree {
    let mut draft = Draft { vertices: Vec::new(), parent: Vec::new(), marked: Vec::new() };
    if rng.gen_bool(0.25) {
        let ghost = rng.gen_bool(0.2);
        let config = if ghost { ZeroConfig::empty() } else { random_config(rng) };
        let root = draft.add(VertexType::T1, Some(config), None);
        draft.decorate_vortex(rng, root, 0, ghost);
    } else {
        let root = draft.add(VertexType::Tinf, None, None);
        draft.grow(rng, root, 0);
    }
    let n = draft.vertices.len();
    for _ in 0..rng.gen_range(0..=2) {
        let v = rng.gen_range(0..n);
        draft.marked.push(v);
    }

    // Special points per vertex: parent, children, z0 on the root, marked points.
    let mut nodal = Vec::new();
    let mut marked_points = vec![MarkedPoint { vertex: 0, point: SpherePoint::Infinity }];
    let mut extra: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, &v) in draft.marked.iter().enumerate() {
        extra[v].push(i);
    }
    let mut placed: Vec<Option<SpherePoint>> = vec![None; draft.marked.len()];
    let mut root_z0 = SpherePoint::Infinity;
    for v in 0..n {
        let kind = draft.vertices[v].kind;
        let children: Vec<usize> = (0..n).filter(|&c| draft.parent[c] == Some(v)).collect();
        let mut fixed: Vec<Option<SpherePoint>> = Vec::new();
        let vortex = kind == VertexType::T1;
        // parent or z0 first
        let first = match (draft.parent[v], kind) {
            (Some(p), VertexType::T1) if draft.vertices[p].kind == VertexType::Tinf => Some(SpherePoint::Infinity),
            (None, VertexType::T1) => Some(SpherePoint::Infinity),
            _ => None,
        };
        fixed.push(first);
        fixed.extend(children.iter().map(|_| None));
        fixed.extend(extra[v].iter().map(|_| None));
        let pts = if vortex {
            let mut pts = vec![first.unwrap()];
            let rest = distinct_points(rng, &vec![None; fixed.len() - 1], false);
            pts.extend(rest);
            pts
        } else {
            distinct_points(rng, &fixed, true)
        };
        match draft.parent[v] {
            Some(p) => nodal.push(NodalPoint { from: v, to: p, point: pts[0] }),
            None => root_z0 = pts[0],
        }
        for (k, &c) in children.iter().enumerate() {
            nodal.push(NodalPoint { from: v, to: c, point: pts[1 + k] });
        }
        for (k, &i) in extra[v].iter().enumerate() {
            placed[i] = Some(pts[1 + children.len() + k]);
        }
    }
    marked_points[0].point = root_z0;
    for (i, &v) in draft.marked.iter().enumerate() {
        marked_points.push(MarkedPoint { vertex: v, point: placed[i].unwrap() });
    }
    let edges = (1..n).map(|c| (draft.parent[c].unwrap(), c)).collect();
    BubbleTree::new(draft.vertices, edges, nodal, marked_points)
}

/// Random valid stable map that is simple.
pub fn random_simple_stable_map<R: Rng>(rng: &mut R) -> BubbleTree {
    loop {
        let t = random_stable_map(rng);
        if t.is_simple() {
            return t;
        }
    }
}

/// Random element compatible with `tree`: a random automorphism with random
/// maps (translations on vortex components).
pub fn random_element<R: Rng>(rng: &mut R, tree: &BubbleTree) -> ReparamElement {
    let autos = automorphisms(tree);
    let automorphism = autos.choose(rng).expect("identity is an automorphism").clone();
    let maps = (0..tree.len())
        .map(|v| match tree.kind(v) {
            VertexType::T1 => Mobius::translation(complex(rng, 3.0)),
            _ => random_mobius(rng),
        })
        .collect();
    ReparamElement { automorphism, maps }
}

/// Element with a random automorphism whose maps are chosen to line up as
/// much data as possible with the original tree, so that it fixes the tree
/// whenever anything can.
pub fn aligned_element<R: Rng>(rng: &mut R, tree: &BubbleTree) -> ReparamElement {
    let autos = automorphisms(tree);
    let f = autos.choose(rng).expect("identity is an automorphism").clone();
    let mut maps = vec![Mobius::identity(); tree.len()];
    for alpha in 0..tree.len() {
        let beta = f[alpha];
        // Pairs (point on α, point on β) that φ_β should match.
        let mut pairs: Vec<(SpherePoint, SpherePoint)> = Vec::new();
        for gamma in tree.neighbors(alpha) {
            pairs.push((tree.nodal(alpha, gamma).unwrap(), tree.nodal(beta, f[gamma]).unwrap()));
        }
        if alpha == beta {
            for m in tree.marked_points.iter().filter(|m| m.vertex == alpha) {
                pairs.push((m.point, m.point));
            }
        }
        maps[beta] = match tree.kind(alpha) {
            VertexType::T1 => {
                let source = tree.vertices[alpha].config.as_ref().unwrap();
                let target = tree.vertices[beta].config.as_ref().unwrap();
                let shift = match (source.centroid(), target.centroid()) {
                    (Some(s), Some(t)) => t - s,
                    _ => pairs
                        .iter()
                        .find_map(|(s, t)| Some(t.as_finite()? - s.as_finite()?))
                        .unwrap_or_else(|| complex(rng, 3.0)),
                };
                Mobius::translation(shift)
            }
            _ if pairs.len() >= 3 => {
                Mobius::from_three_points([pairs[0].0, pairs[1].0, pairs[2].0], [pairs[0].1, pairs[1].1, pairs[2].1])
                    .unwrap_or_else(|| random_mobius(rng))
            }
            _ => random_mobius(rng),
        };
    }
    ReparamElement { automorphism: f, maps }
}
