use num_complex::Complex64;
use vortexlab::bubbling::{
    check_convergence, extract_bubble_tree, BubblingError, ConfigurationFamily, ConvergenceCondition,
    MobiusFamily, Verdict,
};
use vortexlab::sphere::SpherePoint;
use vortexlab::stable_maps::{act, BubbleTree, MarkedPoint, Mobius, NodalPoint, ReparamElement, Vertex, VertexType};
use vortexlab::vortex::ZeroConfig;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn conv_scales() -> Vec<f64> {
    (1..=10).map(|k| 10.0 * k as f64).collect()
}

fn spiral(nu: f64) -> Complex64 {
    Complex64::from_polar(nu, nu)
}

fn conv_family(scales: &[f64]) -> ConfigurationFamily {
    let a = |_: f64| c(-2.0, -1.0);
    let b = |_: f64| c(3.0, 4.0);
    ConfigurationFamily::sample(scales, &[&a, &b, &b, &spiral, &spiral, &spiral, &spiral], &[]).unwrap()
}

fn degrees(tree: &BubbleTree, kind: VertexType) -> Vec<(usize, u32)> {
    tree.vertices.iter().filter(|v| v.kind == kind).map(|v| (v.id, v.degree())).collect()
}

/// The limit written down by hand: a ghost sphere with the two vortices at 1 and 2.
fn conv_tree(first: &[(f64, f64, u32)], second: &[(f64, f64, u32)]) -> BubbleTree {
    BubbleTree::new(
        vec![
            Vertex::tinf(0),
            Vertex::t1(1, ZeroConfig::from_triples(first).unwrap()),
            Vertex::t1(2, ZeroConfig::from_triples(second).unwrap()),
        ],
        vec![(0, 1), (0, 2)],
        vec![
            NodalPoint { from: 0, to: 1, point: SpherePoint::finite(1.0, 0.0) },
            NodalPoint { from: 0, to: 2, point: SpherePoint::finite(2.0, 0.0) },
            NodalPoint { from: 1, to: 0, point: SpherePoint::Infinity },
            NodalPoint { from: 2, to: 0, point: SpherePoint::Infinity },
        ],
        vec![MarkedPoint { vertex: 0, point: SpherePoint::Infinity }],
    )
}

fn conv_maps(scales: &[f64]) -> MobiusFamily {
    let ghost = scales.iter().map(|&nu| Mobius::affine(spiral(nu), -spiral(nu)).unwrap()).collect();
    let first = vec![Mobius::identity(); scales.len()];
    let second = scales.iter().map(|&nu| Mobius::translation(spiral(nu))).collect();
    MobiusFamily { maps: vec![ghost, first, second] }
}

#[test]
fn stationary_family_is_a_single_vortex() {
    let scales = [1.0, 2.0, 3.0, 4.0, 5.0];
    let p = |_: f64| c(1.0, 2.0);
    let q = |_: f64| c(-3.0, 0.5);
    let family = ConfigurationFamily::sample(&scales, &[&p, &q, &q], &[]).unwrap();
    let out = extract_bubble_tree(&family).unwrap();
    assert_eq!(out.tree.len(), 1);
    assert_eq!(out.tree.kind(0), VertexType::T1);
    let expected = ZeroConfig::from_triples(&[(1.0, 2.0, 1), (-3.0, 0.5, 2)]).unwrap();
    assert!(out.tree.vertices[0].config.as_ref().unwrap().approx_eq(&expected, 0.0));
    assert_eq!(out.tree.marked_points, vec![MarkedPoint { vertex: 0, point: SpherePoint::Infinity }]);

    let report = check_convergence(&family, &out.tree, &out.reparams).unwrap();
    assert_eq!(report.verdict, Verdict::Pass);
    assert!(report.conditions.iter().all(|c| c.residuals.iter().all(|&r| r == 0.0)));
}

#[test]
fn spiralling_cluster_splits_off() {
    let family = conv_family(&conv_scales());
    let out = extract_bubble_tree(&family).unwrap();
    let tree = &out.tree;
    assert_eq!(degrees(tree, VertexType::Tinf), vec![(0, 0)]);
    assert_eq!(degrees(tree, VertexType::T1), vec![(1, 3), (2, 4)]);
    assert!(degrees(tree, VertexType::T0).is_empty());
    assert_eq!(tree.nodal(1, 0), Some(SpherePoint::Infinity));
    assert_eq!(tree.nodal(2, 0), Some(SpherePoint::Infinity));
    assert_eq!(tree.nodal(0, 1), Some(SpherePoint::finite(0.0, 0.0)));
    assert!(tree.nodal(0, 2).unwrap().chordal(&SpherePoint::finite(1.0, 0.0)) < 1e-15);
    assert_eq!(tree.marked_points[0], MarkedPoint { vertex: 0, point: SpherePoint::Infinity });
    assert_eq!(tree.special_points(0).len(), 3);
    assert!(tree.is_valid());
}

#[test]
fn hand_made_limit_has_nodal_points_one_and_two() {
    let scales = conv_scales();
    let family = conv_family(&scales);
    let tree = conv_tree(&[(-2.0, -1.0, 1), (3.0, 4.0, 2)], &[(0.0, 0.0, 4)]);
    let report = check_convergence(&family, &tree, &conv_maps(&scales)).unwrap();
    let induced: Vec<_> = report.induced_nodal_points.iter().map(|p| (p.to, p.point.as_finite().unwrap())).collect();
    assert_eq!(induced.len(), 2);
    assert!((induced[0].1 - c(1.0, 0.0)).norm() < 1e-12);
    assert!((induced[1].1 - c(2.0, 0.0)).norm() < 1e-12);
    for cond in &report.conditions {
        match cond.condition {
            ConvergenceCondition::Degree
            | ConvergenceCondition::Energy
            | ConvergenceCondition::Translation
            | ConvergenceCondition::Marked
            | ConvergenceCondition::Nodal => assert_eq!(cond.verdict, Verdict::Pass, "{cond:?}"),
            ConvergenceCondition::Symmetric => {}
        }
    }
    // Escaping zeros are at chordal distance 2/√(1+ν²) from ∞.
    let sym = report
        .conditions
        .iter()
        .find(|c| c.condition == ConvergenceCondition::Symmetric && c.subject == Some(1))
        .unwrap();
    for (r, nu) in sym.residuals.iter().zip(&scales) {
        assert!((r - 8.0 / (1.0 + nu * nu).sqrt()).abs() < 1e-12);
    }
}

#[test]
fn same_limit_converges_at_large_scales() {
    let scales: Vec<f64> = (0..8).map(|k| 1e3 * 4f64.powi(k)).collect();
    let family = conv_family(&scales);
    let tree = conv_tree(&[(-2.0, -1.0, 1), (3.0, 4.0, 2)], &[(0.0, 0.0, 4)]);
    let report = check_convergence(&family, &tree, &conv_maps(&scales)).unwrap();
    assert_eq!(report.verdict, Verdict::Pass, "{report}");
}

#[test]
fn wrong_degree_split_fails_degree_conservation() {
    let scales = conv_scales();
    let family = conv_family(&scales);
    let tree = conv_tree(&[(-2.0, -1.0, 1), (3.0, 4.0, 1)], &[(0.0, 0.0, 5)]);
    let report = check_convergence(&family, &tree, &conv_maps(&scales)).unwrap();
    let degree = report.conditions.iter().find(|c| c.condition == ConvergenceCondition::Degree).unwrap();
    assert_eq!(degree.verdict, Verdict::Fail);
    assert_eq!(report.verdict, Verdict::Fail);
    let energy = report.conditions.iter().find(|c| c.condition == ConvergenceCondition::Energy).unwrap();
    assert_eq!(energy.verdict, Verdict::Pass);
}

fn nested_family(scales: &[f64]) -> ConfigurationFamily {
    let o = |_: f64| c(0.0, 0.0);
    let a = |nu: f64| c(nu, 0.0);
    let b = |nu: f64| c(nu, nu.sqrt());
    ConfigurationFamily::sample(scales, &[&o, &a, &b], &[]).unwrap()
}

#[test]
fn two_separation_levels() {
    let scales: Vec<f64> = (0..8).map(|k| 1e4 * 4f64.powi(k)).collect();
    let family = nested_family(&scales);
    let out = extract_bubble_tree(&family).unwrap();
    let tree = &out.tree;
    assert_eq!(degrees(tree, VertexType::Tinf).len(), 2);
    assert_eq!(degrees(tree, VertexType::T1), vec![(1, 1), (3, 1), (4, 1)]);
    assert_eq!(tree.kind(0), VertexType::Tinf);
    assert_eq!(tree.kind(2), VertexType::Tinf);
    assert_eq!(tree.neighbors(2), vec![0, 3, 4]);
    let levels: Vec<f64> = out.report.vertices.iter().filter(|v| v.kind == VertexType::Tinf).map(|v| v.level).collect();
    assert!((levels[0] - 1.0).abs() < 0.1 && (levels[1] - 0.5).abs() < 0.1, "{levels:?}");
    let report = check_convergence(&family, tree, &out.reparams).unwrap();
    assert_eq!(report.verdict, Verdict::Pass, "{report}");
}

#[test]
fn extraction_round_trips_through_the_check() {
    let scales: Vec<f64> = (0..8).map(|k| 1e3 * 4f64.powi(k)).collect();
    let out = extract_bubble_tree(&conv_family(&scales)).unwrap();
    let report = check_convergence(&conv_family(&scales), &out.tree, &out.reparams).unwrap();
    assert_eq!(report.verdict, Verdict::Pass, "{report}");
    assert_eq!(out.tree.degree(), 7);
}

#[test]
fn translated_family_gives_the_translated_tree() {
    let scales: Vec<f64> = (0..8).map(|k| 1e2 * 4f64.powi(k)).collect();
    let shift = c(2.5, -7.0);
    let base = extract_bubble_tree(&nested_family(&scales)).unwrap();
    let moved = extract_bubble_tree(&nested_family(&scales).translated(shift)).unwrap();
    assert!(moved.tree.approx_eq(&base.tree, 1e-9));

    // Stationary families expose the translation on the root component.
    let p = |_: f64| c(1.0, 1.0);
    let q = |_: f64| c(0.0, -2.0);
    let fam = ConfigurationFamily::sample(&[1.0, 2.0, 3.0, 4.0], &[&p, &q], &[]).unwrap();
    let base = extract_bubble_tree(&fam).unwrap().tree;
    let moved = extract_bubble_tree(&fam.translated(shift)).unwrap().tree;
    let g = ReparamElement { automorphism: vec![0], maps: vec![Mobius::translation(-shift)] };
    assert!(act(&g, &base).unwrap().approx_eq(&moved, 1e-12));
}

#[test]
fn too_few_scales_are_ambiguous() {
    let family = conv_family(&[10.0, 20.0, 30.0]);
    assert!(matches!(extract_bubble_tree(&family), Err(BubblingError::AmbiguousExponents { .. })));
}

#[test]
fn close_exponents_are_ambiguous() {
    let scales = [10.0, 20.0, 40.0, 80.0, 160.0];
    let o = |_: f64| c(0.0, 0.0);
    let a = |nu: f64| c(nu.sqrt() * (2.0 * (5.0 * nu).sin()).exp(), 0.0);
    let b = |nu: f64| c(0.0, nu);
    let family = ConfigurationFamily::sample(&scales, &[&o, &a, &b], &[]).unwrap();
    assert!(matches!(extract_bubble_tree(&family), Err(BubblingError::AmbiguousExponents { .. })));
}

#[test]
fn marked_points_follow_their_clusters() {
    let scales: Vec<f64> = (0..8).map(|k| 1e2 * 4f64.powi(k)).collect();
    let o = |_: f64| c(0.0, 0.0);
    let a = |nu: f64| c(nu, 0.0);
    // On the vortex at 0, near the far vortex, and escaping faster than both.
    let m1 = |_: f64| c(0.5, 0.5);
    let m2 = |nu: f64| c(nu + 1.0, 0.0);
    let m3 = |nu: f64| c(0.0, nu * nu);
    let family = ConfigurationFamily::sample(&scales, &[&o, &a], &[&m1, &m2, &m3]).unwrap();
    let out = extract_bubble_tree(&family).unwrap();
    let t = &out.tree;
    assert!(t.is_valid(), "{:?}", t.validate());
    assert_eq!(t.marked_points.len(), 4);
    // Root separates at rate 2: the zeros' cluster and m3.
    assert_eq!(t.kind(0), VertexType::Tinf);
    assert_eq!(t.marked_points[3].vertex, 0);
    assert_eq!(t.marked_points[3].point, SpherePoint::finite(1.0, 0.0));
    let on = |i: usize| t.marked_points[i].vertex;
    assert_eq!(t.kind(on(1)), VertexType::T1);
    assert_eq!(t.vertices[on(1)].degree(), 1);
    assert_eq!(t.marked_points[1].point, SpherePoint::finite(0.5, 0.5));
    assert_eq!(t.kind(on(2)), VertexType::T1);
    assert_eq!(t.marked_points[2].point, SpherePoint::finite(1.0, 0.0));
    let report = check_convergence(&family, t, &out.reparams).unwrap();
    assert_eq!(report.verdict, Verdict::Pass, "{report}");
}

#[test]
fn merging_marked_points_get_ghost_bubbles() {
    let scales: Vec<f64> = (0..8).map(|k| 1e2 * 4f64.powi(k)).collect();
    let o = |_: f64| c(0.0, 0.0);
    let far = |nu: f64| c(-nu, 0.0);
    // Two marked points merging at 1 on the vortex at 0.
    let m1 = |nu: f64| c(1.0 + 1.0 / nu, 0.0);
    let m2 = |nu: f64| c(1.0 - 1.0 / nu, 0.0);
    // Two marked points at bounded distance from each other, far from all zeros.
    let m3 = |nu: f64| c(0.0, nu);
    let m4 = |nu: f64| c(1.0, nu);
    let family = ConfigurationFamily::sample(&scales, &[&o, &far], &[&m1, &m2, &m3, &m4]).unwrap();
    let out = extract_bubble_tree(&family).unwrap();
    let t = &out.tree;
    assert!(t.is_valid(), "{:?}", t.validate());
    let on = |i: usize| t.marked_points[i].vertex;
    assert_eq!(on(1), on(2));
    assert_eq!(t.kind(on(1)), VertexType::T0);
    let parent = t.parents().unwrap()[on(1)].unwrap();
    assert_eq!(t.kind(parent), VertexType::T1);
    assert!(t.nodal(parent, on(1)).unwrap().chordal(&SpherePoint::finite(1.0, 0.0)) < 1e-5);
    assert_eq!(t.kind(on(3)), VertexType::T1);
    assert_eq!(t.vertices[on(3)].degree(), 0);
    assert_eq!(on(3), on(4));
    let report = check_convergence(&family, t, &out.reparams).unwrap();
    assert_eq!(report.verdict, Verdict::Pass, "{report}");
}

#[test]
fn family_json() {
    let family = conv_family(&conv_scales());
    let s = serde_json::to_string(&family).unwrap();
    let back: ConfigurationFamily = serde_json::from_str(&s).unwrap();
    assert_eq!(back, family);
    let bad = r#"{"scales":[1,2,2,3],"tracks":[[{"re":0,"im":0},{"re":0,"im":0},{"re":0,"im":0},{"re":0,"im":0}]]}"#;
    assert!(serde_json::from_str::<ConfigurationFamily>(bad).is_err());
    let short = r#"{"scales":[1,2,3,4],"tracks":[[{"re":0,"im":0}]]}"#;
    assert!(serde_json::from_str::<ConfigurationFamily>(short).is_err());
}
