use super::*;
use crate::geometry::{self, Point};
use crate::macrosub::{subdivide_mesh, Strategy};
use crate::polybasis::{graded_exponents, Polynomial};
use crate::polymesh::{generate_cube_mesh, generate_hexagon_mesh, generate_pentagon_mesh, parse_mesh, Orientation, PolyMesh2D};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Field(Polynomial);

impl ScalarField for Field {
    fn value(&self, x: &Point) -> f64 {
        self.0.eval(x)
    }
    fn hessian(&self, x: &Point) -> [[f64; 3]; 3] {
        self.0.hessian(x)
    }
}

fn random_field(rng: &mut ChaCha8Rng, dim: usize, k: usize) -> Field {
    let n = graded_exponents(dim, k).len();
    let c: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    Field(Polynomial::from_coeffs(dim, k, &c))
}

fn single_pentagon() -> Mesh {
    let v = vec![[0.0, 0.0], [0.5, 0.0], [0.5, 0.5], [0.25, 0.25], [0.0, 0.5]];
    Mesh::Planar(PolyMesh2D::new(v, vec![vec![0, 1, 2, 3, 4]], Orientation::Strict).unwrap())
}

fn tetra() -> Mesh {
    let text = "sfvem-mesh 3 4 1 4\nv 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nf 0 2 1\nf 0 1 3\nf 1 2 3\nf 0 3 2\nc +0 +1 +2 +3\n";
    parse_mesh(text, Orientation::Strict).unwrap()
}

fn setup(mesh: &Mesh, k: usize, strategy: Strategy) -> (MeshSubdivision, TildeDofLayout, Vec<ElementProjector>) {
    let sub = subdivide_mesh(mesh, strategy).unwrap();
    let layout = build_layout(mesh, k);
    let proj = build_projectors(mesh, &sub, &layout).unwrap();
    (sub, layout, proj)
}

#[test]
fn layout_counts() {
    assert_eq!(build_layout(&generate_pentagon_mesh(1).into(), 1).len(), 11);
    assert_eq!(build_layout(&single_pentagon(), 3).len(), 18);
    let cube: Mesh = generate_cube_mesh(1).into();
    let l = build_layout(&cube, 2);
    assert_eq!(l.len(), 27);
    // everything but the cell coefficient sits on the boundary
    assert_eq!(l.num_free(), 1);
    assert_eq!(l.cell_dofs(&cube, 0).len(), 27);
}

#[test]
fn constants_are_preserved() {
    for mesh in [single_pentagon(), generate_cube_mesh(1).into()] {
        for k in 1..=4 {
            let (_, layout, proj) = setup(&mesh, k, Strategy::Auto);
            let mut x = DVector::zeros(layout.len());
            for v in 0..layout.num_vertices {
                x[v] = 1.0;
            }
            for e in 0..layout.num_edges {
                for j in 0..layout.per_edge {
                    x[layout.edge_dof(e, j)] = 1.0;
                }
            }
            let y = proj[0].apply(&x);
            assert!(y.iter().all(|v| (v - 1.0).abs() < 1e-12), "k={k}");
        }
    }
}

fn check_reproduction(mesh: &Mesh, strategy: Strategy, kmax: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 1..=kmax {
        let (sub, layout, proj) = setup(mesh, k, strategy);
        for _ in 0..3 {
            let f = random_field(&mut rng, mesh.dim(), k);
            let x = interpolate_exact(mesh, &sub, &layout, &f).unwrap();
            for p in &proj {
                let y = p.apply(&x);
                let want = p.space.interpolate(&|q| f.value(q));
                let scale = want.amax().max(1.0);
                assert!((&y - &want).amax() <= 1e-9 * scale, "k={k} cell {}: {:e}", p.cell, (&y - &want).amax());
            }
        }
    }
}

#[test]
fn reproduction_2d() {
    check_reproduction(&generate_pentagon_mesh(1).into(), Strategy::Auto, 5, 1);
    check_reproduction(&generate_hexagon_mesh(1).into(), Strategy::Auto, 5, 2);
}

#[test]
fn reproduction_3d() {
    let cube: Mesh = generate_cube_mesh(1).into();
    check_reproduction(&cube, Strategy::Kuhn, 4, 3);
    check_reproduction(&cube, Strategy::Center, 4, 4);
    check_reproduction(&tetra(), Strategy::Center, 4, 5);
}

#[test]
fn energy_identity_and_symmetry() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (mesh, k) in [(single_pentagon(), 4), (generate_cube_mesh(1).into(), 3)] {
        let (sub, layout, proj) = setup(&mesh, k, Strategy::Auto);
        let f = random_field(&mut rng, mesh.dim(), k);
        let x = interpolate_exact(&mesh, &sub, &layout, &f).unwrap();
        let p = &proj[0];
        let a = &p.stiffness;
        assert!((a - a.transpose()).amax() <= 1e-13 * a.amax());
        let xl = p.gather(&x);
        let energy = xl.dot(&(a * &xl));
        // independent: ∫|∇p|² by quadrature over the sub-simplices
        let mut exact = 0.0;
        let s = &sub.cells[0];
        for t in 0..s.simplices.len() {
            for (q, w) in layout::physical_rule(mesh.dim(), &s.simplex_points(t), 2 * k).unwrap() {
                let g = f.0.grad(&q);
                exact += w * geometry::dot(&g, &g);
            }
        }
        assert!((energy - exact).abs() <= 1e-10 * exact, "{energy} vs {exact}");
    }
}

#[test]
fn linearity() {
    let mesh = single_pentagon();
    let (_, layout, proj) = setup(&mesh, 3, Strategy::Auto);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x = DVector::from_fn(layout.len(), |_, _| rng.random_range(-1.0..1.0));
    let y = DVector::from_fn(layout.len(), |_, _| rng.random_range(-1.0..1.0));
    let lhs = proj[0].apply(&(&x * 2.0 - &y * 3.0));
    let rhs = proj[0].apply(&x) * 2.0 - proj[0].apply(&y) * 3.0;
    assert!((lhs - rhs).amax() < 1e-13);
}

#[test]
fn harmonic_extension_k1() {
    let mesh = single_pentagon();
    let (sub, layout, proj) = setup(&mesh, 1, Strategy::Auto);
    let f = Field(Polynomial::from_coeffs(2, 1, &[0.0, 1.0, 2.0]));
    let x = interpolate_exact(&mesh, &sub, &layout, &f).unwrap();
    let y = proj[0].apply(&x);
    for (i, n) in proj[0].space.nodes.iter().enumerate() {
        assert!((y[i] - (n[0] + 2.0 * n[1])).abs() < 1e-14);
    }
}

#[test]
fn interpolation_dofs() {
    let mesh: Mesh = generate_pentagon_mesh(1).into();
    let sub = subdivide_mesh(&mesh, Strategy::Auto).unwrap();
    let layout = build_layout(&mesh, 3);
    let one = Field(Polynomial::from_coeffs(2, 0, &[1.0]));
    let x = interpolate_exact(&mesh, &sub, &layout, &one).unwrap();
    for d in 0..layout.len() {
        let want = if d < layout.cell_dof(0, 0) { 1.0 } else { 0.0 };
        assert!((x[d] - want).abs() < 1e-14);
    }
    // u = x²: -Δu = -2 in every cell
    let sq = Field(Polynomial { dim: 2, terms: vec![([2, 0, 0], 1.0)] });
    let x = interpolate_exact(&mesh, &sub, &layout, &sq).unwrap();
    for c in 0..layout.num_cells {
        assert!((x[layout.cell_dof(c, 0)] + 2.0).abs() < 1e-12);
        for a in 1..layout.per_cell {
            assert!(x[layout.cell_dof(c, a)].abs() < 1e-12);
        }
    }
}

struct SinSin;

impl ScalarField for SinSin {
    fn value(&self, x: &Point) -> f64 {
        use std::f64::consts::PI;
        (PI * x[0]).sin() * (PI * x[1]).sin()
    }
    fn hessian(&self, x: &Point) -> [[f64; 3]; 3] {
        use std::f64::consts::PI;
        let (sx, cx, sy, cy) = ((PI * x[0]).sin(), (PI * x[0]).cos(), (PI * x[1]).sin(), (PI * x[1]).cos());
        let p2 = PI * PI;
        [[-p2 * sx * sy, p2 * cx * cy, 0.0], [p2 * cx * cy, -p2 * sx * sy, 0.0], [0.0; 3]]
    }
}

#[test]
fn cell_projection_vs_over_integration() {
    let mesh = single_pentagon();
    let sub = subdivide_mesh(&mesh, Strategy::Auto).unwrap();
    let k = 4;
    let layout = build_layout(&mesh, k);
    let x = interpolate_exact(&mesh, &sub, &layout, &SinSin).unwrap();
    let s = &sub.cells[0];
    let simplices: Vec<Vec<Point>> = (0..s.simplices.len()).map(|t| s.simplex_points(t)).collect();
    let basis = cell_monomials(&mesh, 0, k).unwrap();
    let oracle = project_cell_data(2, &simplices, &basis, &|p| -SinSin.laplacian(p, 2), 2 * k + 8).unwrap();
    for a in 0..layout.per_cell {
        assert!((x[layout.cell_dof(0, a)] - oracle[a]).abs() < 1e-10);
    }
}

#[test]
fn face_projection_cases() {
    let mesh: Mesh = generate_cube_mesh(1).into();
    let sub = subdivide_mesh(&mesh, Strategy::Kuhn).unwrap();
    let layout = build_layout(&mesh, 2);
    let ft = &sub.faces[0];
    let fp = project_face(ft, &layout).unwrap();
    // constant trace, q = 0
    let ones = DVector::from_fn(fp.dofs.len(), |i, _| if fp.dofs[i] < layout.face_dof(0, 0) { 1.0 } else { 0.0 });
    assert!((&fp.matrix * &ones).iter().all(|v| (v - 1.0).abs() < 1e-13));

    // random data vs full system with Dirichlet rows replaced by identity
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let data = DVector::from_fn(fp.dofs.len(), |_, _| rng.random_range(-1.0..1.0));
    let got = &fp.matrix * &data;
    let sp = &fp.space;
    let n = sp.num_nodes();
    let s = sp.local_stiffness().unwrap();
    let m = sp.moment_matrix(&face_monomials(ft, 2).unwrap()).unwrap();
    let q = data[fp.dofs.iter().position(|&d| d == layout.face_dof(0, 0)).unwrap()];
    let mut a = s.clone();
    let mut b = DVector::zeros(n);
    for i in 0..n {
        if sp.boundary_mask[i] {
            a.row_mut(i).fill(0.0);
            a[(i, i)] = 1.0;
            let d = layout.trace_dof(&sp.keys[i]).unwrap();
            b[i] = data[fp.dofs.iter().position(|&x| x == d).unwrap()];
        } else {
            b[i] = m[(i, 0)] * q;
        }
    }
    let oracle = a.lu().solve(&b).unwrap();
    assert!((got - oracle).amax() < 1e-11);
}
