use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::mobius::Mobius;
use super::tree::{BubbleTree, MarkedPoint, NodalPoint, Vertex, VertexType};

/// Tolerance for recognizing a T1 map as a translation.
const TRANSLATION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ActionError {
    #[error("incompatible with the tree: {0}")]
    IncompatibleType(String),
}

/// Element `(f, (φ_α))` of the semidirect product of tree automorphisms with
/// per-vertex Möbius groups. `automorphism[α] = f(α)` and `maps[α] = φ_α`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReparamElement {
    pub automorphism: Vec<usize>,
    pub maps: Vec<Mobius>,
}

impl ReparamElement {
    pub fn identity(n: usize) -> ReparamElement {
        ReparamElement { automorphism: (0..n).collect(), maps: vec![Mobius::identity(); n] }
    }

    pub fn len(&self) -> usize {
        self.automorphism.len()
    }

    pub fn is_empty(&self) -> bool {
        self.automorphism.is_empty()
    }

    fn inverse_permutation(&self) -> Vec<usize> {
        let mut inv = vec![0; self.len()];
        for (a, &b) in self.automorphism.iter().enumerate() {
            inv[b] = a;
        }
        inv
    }

    /// Product `self · other`, so that `act(g·h, t) = act(h, act(g, t))`.
    pub fn compose(&self, other: &ReparamElement) -> ReparamElement {
        let inv = self.inverse_permutation();
        let automorphism = other.automorphism.iter().map(|&b| self.automorphism[b]).collect();
        let maps = (0..self.len())
            .map(|beta| self.maps[beta].compose(&other.maps[inv[beta]]))
            .collect();
        ReparamElement { automorphism, maps }
    }

    pub fn inverse(&self) -> ReparamElement {
        let inv = self.inverse_permutation();
        let maps = (0..self.len())
            .map(|beta| self.maps[self.automorphism[beta]].inverse())
            .collect();
        ReparamElement { automorphism: inv, maps }
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.automorphism.iter().enumerate().all(|(a, &b)| a == b)
            && self.maps.iter().all(|m| m.is_identity(tol))
    }

    /// Checks that `f` is a type-preserving tree automorphism and that T1
    /// maps are translations.
    pub fn check(&self, tree: &BubbleTree) -> Result<(), ActionError> {
        let n = tree.len();
        if self.automorphism.len() != n || self.maps.len() != n {
            return Err(ActionError::IncompatibleType(format!(
                "element acts on {} vertices, tree has {n}",
                self.automorphism.len()
            )));
        }
        let mut hit = vec![false; n];
        for &b in &self.automorphism {
            if b >= n || std::mem::replace(&mut hit[b], true) {
                return Err(ActionError::IncompatibleType("vertex map is not a bijection".into()));
            }
        }
        for a in 0..n {
            if tree.kind(a) != tree.kind(self.automorphism[a]) {
                return Err(ActionError::IncompatibleType(format!("vertex {a} changes type")));
            }
            if tree.kind(a) == VertexType::T1 && self.maps[a].as_translation(TRANSLATION_TOLERANCE).is_none() {
                return Err(ActionError::IncompatibleType(format!("map on T1 vertex {a} is not a translation")));
            }
        }
        for &(a, b) in &tree.edges {
            if !tree.has_edge(self.automorphism[a], self.automorphism[b]) {
                return Err(ActionError::IncompatibleType(format!("edge ({a},{b}) is not preserved")));
            }
        }
        if tree.nodal_points.len() != 2 * tree.edges.len() {
            return Err(ActionError::IncompatibleType("nodal points do not match the edges".into()));
        }
        for p in &tree.nodal_points {
            if tree.nodal(p.from, p.to).is_none() || !tree.has_edge(p.from, p.to) {
                return Err(ActionError::IncompatibleType("nodal points do not match the edges".into()));
            }
        }
        if tree.marked_points.iter().any(|m| m.vertex >= n) {
            return Err(ActionError::IncompatibleType("marked point on an unknown vertex".into()));
        }
        Ok(())
    }
}

/// Pullback action `(f,(φ_α))^*`: the new component at `α` is
/// `φ_{f(α)}^* W_{f(α)}`, nodal points are `φ_{f(α)}^{-1}(z_{f(α)f(β)})`, and
/// a marked point on `α_i` moves to `f^{-1}(α_i)` at `φ_{α_i}^{-1}(z_i)`.
pub fn act(g: &ReparamElement, tree: &BubbleTree) -> Result<BubbleTree, ActionError> {
    g.check(tree)?;
    let f = &g.automorphism;
    let inv = g.inverse_permutation();
    let vertices = (0..tree.len())
        .map(|a| {
            let source = &tree.vertices[f[a]];
            let config = source.config.as_ref().map(|c| {
                let shift: Complex64 = g.maps[f[a]].as_translation(TRANSLATION_TOLERANCE).unwrap_or_default();
                c.translated(-shift)
            });
            Vertex { id: a, kind: source.kind, config }
        })
        .collect();
    let nodal_points = tree
        .nodal_points
        .iter()
        .map(|p| {
            let (a, b) = (inv[p.from], inv[p.to]);
            NodalPoint { from: a, to: b, point: g.maps[p.from].inverse().apply(p.point) }
        })
        .collect();
    let marked_points = tree
        .marked_points
        .iter()
        .map(|m| MarkedPoint { vertex: inv[m.vertex], point: g.maps[m.vertex].inverse().apply(m.point) })
        .collect();
    Ok(BubbleTree::new(vertices, tree.edges.clone(), nodal_points, marked_points))
}

/// All type-preserving automorphisms of the underlying tree, as vertex maps
/// `f[α]`, in lexicographic order.
pub fn automorphisms(tree: &BubbleTree) -> Vec<Vec<usize>> {
    let n = tree.len();
    let adjacency: Vec<Vec<usize>> = (0..n).map(|v| tree.neighbors(v)).collect();
    let mut out = Vec::new();
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];
    extend(tree, &adjacency, 0, &mut image, &mut used, &mut out);
    out
}

fn extend(
    tree: &BubbleTree,
    adjacency: &[Vec<usize>],
    v: usize,
    image: &mut Vec<usize>,
    used: &mut Vec<bool>,
    out: &mut Vec<Vec<usize>>,
) {
    let n = image.len();
    if v == n {
        out.push(image.clone());
        return;
    }
    for w in 0..n {
        if used[w] || tree.kind(w) != tree.kind(v) || adjacency[w].len() != adjacency[v].len() {
            continue;
        }
        let consistent = (0..v).all(|u| tree.has_edge(u, v) == tree.has_edge(image[u], w));
        if !consistent {
            continue;
        }
        image[v] = w;
        used[w] = true;
        extend(tree, adjacency, v + 1, image, used, out);
        used[w] = false;
    }
    image[v] = usize::MAX;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::SpherePoint;
    use crate::vortex::ZeroConfig;

    fn single(config: ZeroConfig, marked: Vec<MarkedPoint>) -> BubbleTree {
        BubbleTree::new(vec![Vertex::t1(0, config)], vec![], vec![], marked)
    }

    #[test]
    fn identity_acts_trivially() {
        let t = single(
            ZeroConfig::from_triples(&[(1.0, 2.0, 1)]).unwrap(),
            vec![MarkedPoint { vertex: 0, point: SpherePoint::Infinity }],
        );
        assert_eq!(act(&ReparamElement::identity(1), &t).unwrap(), t);
    }

    #[test]
    fn translation_pulls_back_the_configuration() {
        let c = Complex64::new(1.5, -0.5);
        let t = single(
            ZeroConfig::from_triples(&[(0.0, 0.0, 2)]).unwrap(),
            vec![
                MarkedPoint { vertex: 0, point: SpherePoint::Infinity },
                MarkedPoint { vertex: 0, point: SpherePoint::finite(1.0, 1.0) },
            ],
        );
        let g = ReparamElement { automorphism: vec![0], maps: vec![Mobius::translation(c)] };
        let out = act(&g, &t).unwrap();
        let zero = out.vertices[0].config.as_ref().unwrap().zeros()[0];
        assert_eq!(zero.position, -c);
        assert_eq!(zero.multiplicity, 2);
        assert_eq!(out.marked_points[0].point, SpherePoint::Infinity);
        assert_eq!(out.marked_points[1].point, SpherePoint::Finite(Complex64::new(1.0, 1.0) - c));
        assert!(out.is_valid());
    }

    #[test]
    fn non_translation_on_t1_is_rejected() {
        let t = single(ZeroConfig::empty(), vec![MarkedPoint { vertex: 0, point: SpherePoint::Infinity }]);
        let g = ReparamElement {
            automorphism: vec![0],
            maps: vec![Mobius::affine(Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)).unwrap()],
        };
        assert!(matches!(act(&g, &t), Err(ActionError::IncompatibleType(_))));
    }

    #[test]
    fn automorphisms_of_a_star() {
        let mut vertices = vec![Vertex::tinf(0)];
        let mut edges = vec![];
        let mut nodal = vec![];
        for i in 1..=3 {
            vertices.push(Vertex::t1(i, ZeroConfig::from_triples(&[(0.0, 0.0, 1)]).unwrap()));
            edges.push((0, i));
            nodal.push(NodalPoint { from: i, to: 0, point: SpherePoint::Infinity });
            nodal.push(NodalPoint { from: 0, to: i, point: SpherePoint::finite(i as f64, 0.0) });
        }
        let t = BubbleTree::new(vertices, edges, nodal, vec![MarkedPoint { vertex: 0, point: SpherePoint::Infinity }]);
        let autos = automorphisms(&t);
        assert_eq!(autos.len(), 6);
        assert!(autos.iter().all(|f| f[0] == 0));
    }
}
