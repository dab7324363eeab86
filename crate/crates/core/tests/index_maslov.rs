use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use vortexlab::index_maslov::{
    boundary_radius_range, chern_pairing, fredholm_index, maslov_index, vortex_boundary_maslov, IndexData, MaslovError,
    SymplecticLoop,
};
use vortexlab::vortex::{solve_vortex, SolverParams, VortexSolution, ZeroConfig};

fn solutions() -> &'static [VortexSolution] {
    static CELL: OnceLock<Vec<VortexSolution>> = OnceLock::new();
    CELL.get_or_init(|| {
        [vec![(0.0, 0.0, 1)], vec![(-2.0, -1.0, 1), (3.0, 4.0, 2)], vec![(1.0, 1.0, 3), (-1.5, 0.0, 1)]]
            .iter()
            .map(|t| {
                let c = ZeroConfig::from_triples(t).unwrap();
                solve_vortex(&c, &SolverParams::for_config(&c).with_grid(512)).unwrap()
            })
            .collect()
    })
}

/// Unitary `exp(iH)` for a Hermitian `H` built from `entries`.
fn unitary(n: usize, entries: &[f64], scale: f64) -> DMatrix<Complex64> {
    let mut h = DMatrix::<Complex64>::zeros(n, n);
    let mut it = entries.iter().cycle();
    for i in 0..n {
        h[(i, i)] = Complex64::new(*it.next().unwrap(), 0.0);
        for j in i + 1..n {
            let z = Complex64::new(*it.next().unwrap(), *it.next().unwrap());
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    let eig = (h * Complex64::new(scale, 0.0)).symmetric_eigen();
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::from_polar(1.0, l)));
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}

#[test]
fn boundary_loop_of_a_vortex_has_index_twice_the_degree() {
    for sol in solutions() {
        let (lo, hi) = boundary_radius_range(sol);
        for s in 0..5 {
            let r = lo + (hi - lo) * s as f64 / 4.0;
            assert_eq!(vortex_boundary_maslov(sol, r).unwrap(), 2 * chern_pairing(&sol.config), "radius {r}");
        }
    }
}

#[test]
fn vacuum_boundary_loop_is_trivial() {
    let sol = VortexSolution::vacuum(SolverParams::for_config(&ZeroConfig::empty()).with_grid(128));
    let (lo, _) = boundary_radius_range(&sol);
    assert_eq!(vortex_boundary_maslov(&sol, lo).unwrap(), 0);
}

#[test]
fn boundary_loop_rejects_bad_radii() {
    let sol = &solutions()[0];
    let (lo, hi) = boundary_radius_range(sol);
    assert!(matches!(vortex_boundary_maslov(sol, 0.5 * lo), Err(MaslovError::RadiusOutOfRange { .. })));
    assert!(matches!(vortex_boundary_maslov(sol, hi + 0.1), Err(MaslovError::RadiusOutOfRange { .. })));
    let zeroed = sol.with_scaled_higgs(0.5);
    assert!(matches!(vortex_boundary_maslov(&zeroed, lo), Err(MaslovError::FieldNotUnimodular { .. })));
}

#[test]
fn calibration_table() {
    for d in -2..=3 {
        for n in 1..=3 {
            assert_eq!(maslov_index(&SymplecticLoop::zd_id(d, n).unwrap()).unwrap(), 2 * d * n as i64);
        }
    }
}

#[test]
fn concatenation_adds_indices() {
    for (a, b) in [(1, 2), (-1, 3), (2, -2)] {
        let la = SymplecticLoop::zd_id(a, 2).unwrap();
        let lb = SymplecticLoop::zd_id(b, 2).unwrap();
        assert_eq!(maslov_index(&la.concat(&lb).unwrap()).unwrap(), 2 * (a + b) * 2);
    }
}

#[test]
fn index_formula_table() {
    let table = [
        (2, 1, 0, 0),
        (2, 1, 1, 2),
        (2, 1, 3, 6),
        (2, 1, -2, -4),
        (4, 1, 1, 4),
        (4, 2, 0, 0),
        (6, 1, 2, 8),
        (10, 2, 1, 8),
        (8, 3, 5, 12),
        (2, 1, 7, 14),
    ];
    for (m, g, c, expect) in table {
        assert_eq!(fredholm_index(&IndexData::new(m, g, c).unwrap()), expect, "{m} {g} {c}");
    }
    assert!(IndexData::new(3, 1, 0).is_err());
    assert!(IndexData::new(2, 0, 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conjugation_and_small_perturbations_preserve_the_index(
        degrees in proptest::collection::vec(-2i64..=2, 1..=3),
        entries in proptest::collection::vec(-1.0..1.0f64, 9),
        eps in 0.0..0.05f64,
        freq in 1usize..4,
    ) {
        let n = degrees.len();
        let base = SymplecticLoop::diag(&degrees).unwrap();
        let count = base.samples().len();
        let v = unitary(n, &entries, 1.0);
        let conj = base.map(|_, u| &v * u * v.adjoint()).unwrap();
        let wobble = base
            .map(|k, u| u * unitary(n, &entries, eps * (2.0 * PI * (freq * k) as f64 / count as f64).sin()))
            .unwrap();
        let expect = 2 * degrees.iter().sum::<i64>();
        prop_assert_eq!(maslov_index(&base).unwrap(), expect);
        prop_assert_eq!(maslov_index(&conj).unwrap(), expect);
        prop_assert_eq!(maslov_index(&wobble).unwrap(), expect);
    }
}
