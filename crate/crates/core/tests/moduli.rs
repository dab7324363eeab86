use itertools::Itertools;
use proptest::prelude::*;
use vortexlab::moduli::{iota, sym_distance, ChordalBall, SubbasisSet, SymPoint};
use vortexlab::sphere::{chordal, SpherePoint};
use vortexlab::vortex::ZeroConfig;

fn point() -> impl Strategy<Value = SpherePoint> {
    prop_oneof![
        1 => Just(SpherePoint::Infinity),
        6 => (-4.0..4.0f64, -4.0..4.0f64).prop_map(|(x, y)| SpherePoint::finite(x, y)),
    ]
}

fn multiset(n: usize) -> impl Strategy<Value = SymPoint> {
    proptest::collection::vec(point(), n).prop_map(|p| SymPoint::new(p).unwrap())
}

fn sized_triple() -> impl Strategy<Value = (SymPoint, SymPoint, SymPoint)> {
    (0usize..=5).prop_flat_map(|n| (multiset(n), multiset(n), multiset(n)))
}

fn brute_force(a: &SymPoint, b: &SymPoint) -> f64 {
    let n = a.size();
    (0..n)
        .permutations(n)
        .map(|perm| perm.iter().enumerate().map(|(i, &j)| chordal(a.points()[i], b.points()[j])).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn matching_distance_equals_permutation_minimum((a, b, _) in sized_triple()) {
        let fast = sym_distance(&a, &b).unwrap();
        let slow = brute_force(&a, &b);
        prop_assert!((fast - slow).abs() <= 1e-12, "{} vs {}", fast, slow);
    }

    #[test]
    fn metric_axioms((a, b, c) in sized_triple()) {
        let ab = sym_distance(&a, &b).unwrap();
        prop_assert_eq!(sym_distance(&a, &a).unwrap(), 0.0);
        prop_assert!((ab - sym_distance(&b, &a).unwrap()).abs() <= 1e-12);
        prop_assert!(ab >= 0.0);
        prop_assert!(ab <= sym_distance(&a, &c).unwrap() + sym_distance(&c, &b).unwrap() + 1e-12);
        if a != b {
            prop_assert!(ab > 0.0);
        }
    }

    #[test]
    fn subbasis_membership_is_stable_within_the_margin(
        (a, b, _) in sized_triple(),
        cx in -2.0..2.0f64,
        cy in -2.0..2.0f64,
        radius in 0.2..1.5f64,
    ) {
        let ball = ChordalBall { center: SpherePoint::finite(cx, cy), radius };
        let set = SubbasisSet { ball, count: a.count_in_ball(&ball) };
        if set.contains(&a) && sym_distance(&a, &b).unwrap() < set.margin(&a) {
            prop_assert!(set.contains(&b));
        }
    }

    #[test]
    fn iota_pads_with_infinity(points in proptest::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 0..4), extra in 0u32..3) {
        let pts: Vec<_> = points.iter().map(|&(x, y)| num_complex::Complex64::new(x, y)).collect();
        let config = ZeroConfig::from_points(&pts).unwrap();
        let d = config.degree() + extra;
        let s = iota(&config, d).unwrap();
        prop_assert_eq!(s.size(), d as usize);
        prop_assert_eq!(s.multiplicity(SpherePoint::Infinity), extra as usize);
    }
}
