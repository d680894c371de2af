use proptest::prelude::*;

use sfvem::harness::{subdivide_checked, Discretization, ManufacturedProblem};
use sfvem::macrosub::Strategy as Split;
use sfvem::polybasis::{graded_exponents, Polynomial};
use sfvem::polymesh::{parse_mesh, render_mesh, validate_mesh, Family, MeshFamily, Orientation};
use sfvem::system::SolverConfig;

#[test]
fn family_meshes_are_valid_and_round_trip() {
    for (family, max) in [(Family::Pentagon, 5), (Family::Hexagon, 5), (Family::Cube, 3)] {
        for level in 1..=max {
            let mesh = MeshFamily::new(family, level).generate();
            let report = validate_mesh(&mesh);
            assert!(report.all_passed(), "{family} {level}\n{report}");
            let back = parse_mesh(&render_mesh(&mesh), Orientation::Strict).unwrap();
            assert_eq!(back, mesh, "{family} {level}");
        }
    }
}

#[test]
fn subdivisions_satisfy_constraints() {
    let cases = [
        (Family::Pentagon, 6, Split::Auto),
        (Family::Hexagon, 6, Split::Auto),
        (Family::Cube, 4, Split::Kuhn),
        (Family::Cube, 4, Split::Center),
    ];
    for (family, max, strategy) in cases {
        for level in 1..=max {
            let mesh = MeshFamily::new(family, level).generate();
            let (_, report) = subdivide_checked(&mesh, strategy).unwrap();
            assert!(report.all_passed(), "{family} {level} {strategy}\n{report}");
        }
    }
}

#[test]
fn mesh_size_halves_between_levels() {
    for family in [Family::Pentagon, Family::Hexagon, Family::Cube] {
        let h: Vec<f64> = (1..=4).map(|l| MeshFamily::new(family, l).generate().h()).collect();
        for w in h.windows(2) {
            assert!((w[0] / w[1] - 2.0).abs() < 1e-12, "{family}: {h:?}");
        }
    }
}

fn poly_strategy(dim: usize, k: usize) -> impl Strategy<Value = Polynomial> {
    let n = graded_exponents(dim, k).len();
    prop::collection::vec(-1.0f64..1.0, n).prop_map(move |c| Polynomial::from_coeffs(dim, k, &c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn patch_test_pentagon(p in (1usize..=3).prop_flat_map(|d| poly_strategy(2, d))) {
        let prob = ManufacturedProblem::polynomial("patch", p);
        let disc = Discretization::new(MeshFamily::new(Family::Pentagon, 2).generate(), 3, Split::Auto).unwrap();
        let sol = disc.solve(&prob, &SolverConfig::default()).unwrap();
        let e = disc.errors(&prob, &sol, 2).unwrap();
        prop_assert!(e.l2_error < 1e-9 && e.h1_error < 1e-9, "{:?}", e);
    }

    #[test]
    fn patch_test_cube(p in poly_strategy(3, 2)) {
        let prob = ManufacturedProblem::polynomial("patch", p);
        let disc = Discretization::new(MeshFamily::new(Family::Cube, 2).generate(), 2, Split::Kuhn).unwrap();
        let sol = disc.solve(&prob, &SolverConfig::default()).unwrap();
        let e = disc.errors(&prob, &sol, 2).unwrap();
        prop_assert!(e.l2_error < 1e-9 && e.h1_error < 1e-9, "{:?}", e);
    }
}
