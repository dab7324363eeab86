use std::collections::VecDeque;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{BubblingError, ConfigurationFamily, MobiusFamily};
use crate::sphere::SpherePoint;
use crate::stable_maps::{BubbleTree, MarkedPoint, Mobius, NodalPoint, Vertex, VertexType};
use crate::vortex::ZeroConfig;

/// Exponent levels closer than this are merged.
pub const LEVEL_GAP: f64 = 0.25;

/// Minimum number of scales for a slope with an error estimate.
pub const MIN_SCALES: usize = 4;

/// Growth fit of `|x_a − x_b|` against `ν`. Tracks are numbered with zeros
/// first and marked tracks after them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairExponent {
    pub first: usize,
    pub second: usize,
    pub exponent: f64,
    pub stderr: f64,
    /// Exponent used for clustering: distances involving a zero that shrink
    /// are treated as bounded.
    pub effective: f64,
    pub level: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentLevel {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexReport {
    pub id: usize,
    pub kind: VertexType,
    pub tracks: Vec<usize>,
    pub level: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractionReport {
    pub zero_tracks: usize,
    pub marked_tracks: usize,
    pub pairs: Vec<PairExponent>,
    pub levels: Vec<ExponentLevel>,
    pub bounded_level: usize,
    pub vertices: Vec<VertexReport>,
}

impl fmt::Display for ExtractionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "tracks: {} zeros, {} marked", self.zero_tracks, self.marked_tracks)?;
        for (i, l) in self.levels.iter().enumerate() {
            let tag = if i == self.bounded_level { " (bounded)" } else { "" };
            writeln!(f, "level {i}: exponent {:.3} in [{:.3}, {:.3}]{tag}", l.mean, l.min, l.max)?;
        }
        for v in &self.vertices {
            writeln!(f, "vertex {} {:?} level {:.3} tracks {:?}", v.id, v.kind, v.level, v.tracks)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Extraction {
    pub tree: BubbleTree,
    pub reparams: MobiusFamily,
    pub report: ExtractionReport,
}

fn fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let ssr: f64 = xs.iter().zip(ys).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum();
    let stderr = if xs.len() > 2 { (ssr / (n - 2.0) / sxx).sqrt() } else { f64::INFINITY };
    (slope, stderr)
}

fn ambiguous<T>(detail: String) -> Result<T, BubblingError> {
    Err(BubblingError::AmbiguousExponents { detail })
}

/// Limit bubble tree of a family. Pairs of tracks are fitted as
/// `|x_a − x_b| ~ ν^s`; the exponents are grouped into levels, bounded
/// clusters become vortex components and every faster separation becomes a
/// sphere in the quotient. Marked tracks that merge inside a bounded
/// cluster produce ghost spheres below it.
pub fn extract_bubble_tree(family: &ConfigurationFamily) -> Result<Extraction, BubblingError> {
    let m = family.scale_count();
    if m < MIN_SCALES {
        return ambiguous(format!("{m} scales given, at least {MIN_SCALES} are needed"));
    }
    if family.degree() == 0 {
        return Err(BubblingError::InvalidFamily("no zero tracks".into()));
    }
    let d = family.degree();
    let tracks: Vec<&[Complex64]> = family
        .tracks()
        .iter()
        .chain(family.marked_tracks())
        .map(|t| t.as_slice())
        .collect();
    let n = tracks.len();
    let logs: Vec<f64> = family.scales().iter().map(|s| s.ln()).collect();

    let mut pairs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let dist: Vec<f64> = (0..m).map(|i| (tracks[a][i] - tracks[b][i]).norm()).collect();
            let zeros = dist.iter().filter(|&&x| x == 0.0).count();
            let (exponent, stderr) = if zeros == m {
                (0.0, 0.0)
            } else if zeros > 0 {
                return ambiguous(format!("tracks {a} and {b} meet at some scales only"));
            } else {
                let ys: Vec<f64> = dist.iter().map(|x| x.ln()).collect();
                fit(&logs, &ys)
            };
            let effective = if a < d { exponent.max(0.0) } else { exponent };
            pairs.push(PairExponent { first: a, second: b, exponent, stderr, effective, level: 0 });
        }
    }

    // Single linkage in one dimension, with a virtual bounded exponent 0.
    let mut values: Vec<f64> = pairs.iter().map(|p| p.effective).chain([0.0]).collect();
    values.sort_by(f64::total_cmp);
    let mut levels: Vec<ExponentLevel> = Vec::new();
    let mut members: Vec<Vec<f64>> = Vec::new();
    for &v in &values {
        match members.last_mut() {
            Some(group) if v - group.last().unwrap() <= LEVEL_GAP => group.push(v),
            _ => members.push(vec![v]),
        }
    }
    for g in &members {
        levels.push(ExponentLevel {
            mean: g.iter().sum::<f64>() / g.len() as f64,
            min: g[0],
            max: *g.last().unwrap(),
        });
    }
    let level_of = |v: f64| levels.iter().position(|l| l.min <= v && v <= l.max).unwrap();
    let bounded = level_of(0.0);
    for p in &mut pairs {
        p.level = level_of(p.effective);
    }

    for (i, p) in pairs.iter().enumerate() {
        if p.level != bounded && p.effective.abs() <= 2.0 * p.stderr {
            return ambiguous(format!(
                "tracks {} and {} separate at rate {:.3} ± {:.3}, indistinguishable from bounded",
                p.first, p.second, p.effective, p.stderr
            ));
        }
        for q in &pairs[..i] {
            if p.level != q.level && (p.effective - q.effective).abs() <= 2.0 * p.stderr.max(q.stderr) {
                return ambiguous(format!(
                    "exponents {:.3} ± {:.3} and {:.3} ± {:.3} fall in different levels",
                    p.effective, p.stderr, q.effective, q.stderr
                ));
            }
        }
    }

    let mut level = vec![vec![bounded; n]; n];
    for p in &pairs {
        level[p.first][p.second] = p.level;
        level[p.second][p.first] = p.level;
    }
    let builder = Builder { family, tracks, d, level, bounded, levels: &levels };
    let (tree, reparams, vertices) = builder.build()?;
    let violations = tree.validate();
    if !violations.is_empty() {
        return Err(BubblingError::UnstableLimit { violations });
    }
    let report = ExtractionReport {
        zero_tracks: d,
        marked_tracks: n - d,
        pairs,
        levels: levels.clone(),
        bounded_level: bounded,
        vertices,
    };
    Ok(Extraction { tree, reparams, report })
}

struct Builder<'a> {
    family: &'a ConfigurationFamily,
    tracks: Vec<&'a [Complex64]>,
    d: usize,
    level: Vec<Vec<usize>>,
    bounded: usize,
    levels: &'a [ExponentLevel],
}

#[derive(Clone, Copy, PartialEq)]
enum Context {
    /// Any set of tracks below a sphere in the quotient, or the whole family.
    Free,
    /// Marked tracks merging inside a bounded cluster.
    Bundle,
}

struct Pending {
    tracks: Vec<usize>,
    parent: Option<usize>,
    context: Context,
}

struct Node {
    vertex: Vertex,
    maps: Vec<Mobius>,
    parent: Option<usize>,
    report: VertexReport,
}

impl Builder<'_> {
    fn max_level(&self, set: &[usize]) -> Option<usize> {
        let mut best = None;
        for (i, &a) in set.iter().enumerate() {
            for &b in &set[..i] {
                best = best.max(Some(self.level[a][b]));
            }
        }
        best
    }

    /// Components of `set` under the relation "pair level below `cap`",
    /// ordered by smallest member.
    fn components(&self, set: &[usize], cap: usize) -> Vec<Vec<usize>> {
        let mut root: Vec<usize> = (0..set.len()).collect();
        fn find(root: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while root[r] != r {
                r = root[r];
            }
            root[i] = r;
            r
        }
        for i in 0..set.len() {
            for j in 0..i {
                if self.level[set[i]][set[j]] < cap {
                    let (a, b) = (find(&mut root, i), find(&mut root, j));
                    root[a.max(b)] = a.min(b);
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut index = vec![usize::MAX; set.len()];
        for i in 0..set.len() {
            let r = find(&mut root, i);
            if index[r] == usize::MAX {
                index[r] = groups.len();
                groups.push(Vec::new());
            }
            groups[index[r]].push(set[i]);
        }
        groups
    }

    fn mean(&self, set: &[usize], i: usize) -> Complex64 {
        set.iter().map(|&t| self.tracks[t][i]).sum::<Complex64>() / set.len() as f64
    }

    /// The point `φ(0)` of the component built from `set`, per scale.
    fn anchor(&self, set: &[usize], context: Context, i: usize) -> Complex64 {
        if set.len() == 1 {
            return self.tracks[set[0]][i];
        }
        let top = self.max_level(set).unwrap();
        let separating = match context {
            Context::Free => top > self.bounded,
            Context::Bundle => true,
        };
        if separating {
            let first = &self.components(set, top)[0];
            return self.anchor(first, context, i);
        }
        let zeros: Vec<usize> = set.iter().copied().filter(|&t| t < self.d).collect();
        if zeros.is_empty() {
            self.mean(set, i)
        } else {
            self.mean(&zeros, i)
        }
    }

    fn separating_maps(&self, children: &[Vec<usize>], context: Context) -> Result<Vec<Mobius>, BubblingError> {
        (0..self.family.scale_count())
            .map(|i| {
                let c0 = self.anchor(&children[0], context, i);
                let c1 = self.anchor(&children[1], context, i);
                Mobius::affine(c1 - c0, c0).ok_or_else(|| BubblingError::AmbiguousExponents {
                    detail: format!("separating clusters coincide at scale {}", self.family.scales()[i]),
                })
            })
            .collect()
    }

    fn build(&self) -> Result<(BubbleTree, MobiusFamily, Vec<VertexReport>), BubblingError> {
        let m = self.family.scale_count();
        let last = m - 1;
        let all: Vec<usize> = (0..self.tracks.len()).collect();
        let mut nodes: Vec<Node> = Vec::new();
        let mut marked: Vec<Option<MarkedPoint>> = vec![None; self.tracks.len() - self.d];
        let mut queue = VecDeque::from([Pending { tracks: all, parent: None, context: Context::Free }]);

        while let Some(job) = queue.pop_front() {
            let id = nodes.len();
            let top = self.max_level(&job.tracks).unwrap_or(self.bounded);
            let inconsistent = || BubblingError::AmbiguousExponents {
                detail: format!("tracks {:?} do not split into separated groups", job.tracks),
            };
            let (kind, maps, children, config) = match job.context {
                Context::Free if top > self.bounded => {
                    let children = self.components(&job.tracks, top);
                    if children.len() < 2 {
                        return Err(inconsistent());
                    }
                    let maps = self.separating_maps(&children, Context::Free)?;
                    (VertexType::Tinf, maps, children, None)
                }
                Context::Free => {
                    let zeros: Vec<usize> = job.tracks.iter().copied().filter(|&t| t < self.d).collect();
                    let base = if zeros.is_empty() { job.tracks.clone() } else { zeros.clone() };
                    let shift = |i: usize| {
                        let c = self.mean(&base, i);
                        if job.parent.is_none() {
                            c - self.mean(&base, last)
                        } else {
                            c
                        }
                    };
                    let maps: Vec<Mobius> = (0..m).map(|i| Mobius::translation(shift(i))).collect();
                    let points: Vec<Complex64> = zeros.iter().map(|&t| self.tracks[t][last] - shift(last)).collect();
                    let config = ZeroConfig::from_points(&points).expect("finite samples");
                    let marks: Vec<usize> = job.tracks.iter().copied().filter(|&t| t >= self.d).collect();
                    let children = self.components(&marks, self.bounded);
                    (VertexType::T1, maps, children, Some(config))
                }
                Context::Bundle => {
                    let children = self.components(&job.tracks, top);
                    if children.len() < 2 {
                        return Err(inconsistent());
                    }
                    let maps = self.separating_maps(&children, Context::Bundle)?;
                    (VertexType::T0, maps, children, None)
                }
            };
            let child_context = match kind {
                VertexType::Tinf => Context::Free,
                _ => Context::Bundle,
            };
            for child in children {
                if child.len() == 1 && child[0] >= self.d {
                    let point = maps[last].inverse().apply(SpherePoint::Finite(self.tracks[child[0]][last]));
                    marked[child[0] - self.d] = Some(MarkedPoint { vertex: id, point });
                } else {
                    queue.push_back(Pending { tracks: child, parent: Some(id), context: child_context });
                }
            }
            let level = match kind {
                VertexType::T1 => 0.0,
                _ => self.levels[top].mean,
            };
            nodes.push(Node {
                vertex: Vertex { id, kind, config },
                maps,
                parent: job.parent,
                report: VertexReport { id, kind, tracks: job.tracks.clone(), level },
            });
        }

        let mut edges = Vec::new();
        let mut nodal = Vec::new();
        for (id, node) in nodes.iter().enumerate() {
            if let Some(p) = node.parent {
                edges.push((p, id));
                let on_parent = nodes[p].maps[last].inverse().apply(node.maps[last].apply(SpherePoint::finite(0.0, 0.0)));
                nodal.push(NodalPoint { from: p, to: id, point: on_parent });
                nodal.push(NodalPoint { from: id, to: p, point: SpherePoint::Infinity });
            }
        }
        let mut marked_points = vec![MarkedPoint { vertex: 0, point: SpherePoint::Infinity }];
        marked_points.extend(marked.into_iter().map(|m| m.expect("every marked track is placed")));
        let reports = nodes.iter().map(|n| n.report.clone()).collect();
        let maps = nodes.iter().map(|n| n.maps.clone()).collect();
        let vertices = nodes.into_iter().map(|n| n.vertex).collect();
        Ok((BubbleTree::new(vertices, edges, nodal, marked_points), MobiusFamily { maps }, reports))
    }
}
