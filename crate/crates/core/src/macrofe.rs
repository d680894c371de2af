//! Continuous piecewise P_k spaces on a macro-subdivision.
//!
//! Nodes are identified by their lattice key: the multiset of subdivision points
//! (with multiplicities) a node is supported on. Keys are built from global
//! [`PointId`]s, so the same node gets the same key in every cell or face space
//! that contains it.

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{self, AffineMap, Point};
use crate::macrosub::{FaceTriangulation, MacroSubdivision, PointId};
use crate::polybasis::{
    gauss_lobatto, lagrange_pk_basis, node_position, simplex_quadrature, LagrangeBasis, ScaledMonomialBasis,
    SimplexQuadrature, MAX_EXACTNESS,
};

/// Lattice key of a node: sorted `(point, multiplicity)` pairs, multiplicities sum to `k`.
pub type NodeKey = Vec<(PointId, u8)>;

/// Reference-element integrals of products of basis derivatives, per `(dim, k)`.
struct RefMatrices {
    /// `grad[a][b][(i, j)] = ∫ ∂_a φ_i ∂_b φ_j` on the reference simplex.
    grad: Vec<Vec<DMatrix<f64>>>,
    mass: DMatrix<f64>,
}

type RefCache = RwLock<HashMap<(usize, usize), Arc<RefMatrices>>>;

fn reference_matrices(dim: usize, k: usize) -> Result<Arc<RefMatrices>> {
    static CACHE: OnceLock<RefCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(r) = cache.read().unwrap().get(&(dim, k)) {
        return Ok(r.clone());
    }
    let basis = lagrange_pk_basis(dim, k)?;
    let quad = simplex_quadrature(dim, 2 * k)?;
    let n = basis.len();
    let mut grad = vec![vec![DMatrix::zeros(n, n); dim]; dim];
    let mut mass = DMatrix::zeros(n, n);
    for (q, xi) in quad.points.iter().enumerate() {
        let w = quad.weights[q];
        let v = basis.eval(xi);
        let g = basis.eval_grad(xi);
        for i in 0..n {
            for j in 0..n {
                mass[(i, j)] += w * v[i] * v[j];
                for a in 0..dim {
                    for b in 0..dim {
                        grad[a][b][(i, j)] += w * g[i][a] * g[j][b];
                    }
                }
            }
        }
    }
    let r = Arc::new(RefMatrices { grad, mass });
    Ok(cache.write().unwrap().entry((dim, k)).or_insert(r).clone())
}

/// Basis values at the points of a reference quadrature rule, per `(dim, k, exactness)`.
pub(crate) struct QuadTable {
    pub quad: SimplexQuadrature,
    /// `phi[q][i]`
    pub phi: Vec<Vec<f64>>,
}

type QuadCache = RwLock<HashMap<(usize, usize, usize), Arc<QuadTable>>>;

pub(crate) fn quad_table(dim: usize, k: usize, exactness: usize) -> Result<Arc<QuadTable>> {
    static CACHE: OnceLock<QuadCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let exactness = exactness.min(MAX_EXACTNESS);
    if let Some(t) = cache.read().unwrap().get(&(dim, k, exactness)) {
        return Ok(t.clone());
    }
    let basis = lagrange_pk_basis(dim, k)?;
    let quad = simplex_quadrature(dim, exactness)?;
    let phi = quad.points.iter().map(|xi| basis.eval(xi)).collect();
    let t = Arc::new(QuadTable { quad, phi });
    Ok(cache.write().unwrap().entry((dim, k, exactness)).or_insert(t).clone())
}

/// The macro element space on one cell (or, in 3D, on one face in its own plane).
#[derive(Debug, Clone)]
pub struct MacroFeSpace {
    pub dim: usize,
    pub degree: usize,
    pub nodes: Vec<Point>,
    pub keys: Vec<NodeKey>,
    pub boundary_mask: Vec<bool>,
    /// Node indices of each simplex, in reference-basis order.
    pub simplex_nodes: Vec<Vec<usize>>,
    simplex_vertices: Vec<Vec<Point>>,
    basis: Arc<LagrangeBasis>,
    index: HashMap<NodeKey, usize>,
}

/// Space on a cell subdivision.
pub fn build_macro_space(sub: &MacroSubdivision, k: usize) -> Result<MacroFeSpace> {
    MacroFeSpace::new(sub.dim, k, &sub.points, &sub.ids, &sub.simplices, &sub.boundary_facets())
}

/// Space on a face triangulation, in planar face coordinates.
pub fn build_face_space(ft: &FaceTriangulation, k: usize) -> Result<MacroFeSpace> {
    let n = ft.loop_len();
    let tris: Vec<Vec<usize>> = ft.triangles.iter().map(|t| t.to_vec()).collect();
    let edges: Vec<Vec<usize>> = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
    MacroFeSpace::new(2, k, &ft.planar_points(), &ft.ids, &tris, &edges)
}

impl MacroFeSpace {
    /// Builds the space from a simplicial complex. `boundary_facets` lists the
    /// facets (point indices) on the boundary of the parent entity.
    pub fn new(
        dim: usize,
        k: usize,
        points: &[Point],
        ids: &[PointId],
        simplices: &[Vec<usize>],
        boundary_facets: &[Vec<usize>],
    ) -> Result<Self> {
        let basis = lagrange_pk_basis(dim, k)?;
        let lobatto = gauss_lobatto(k);
        let bsets: Vec<HashSet<PointId>> =
            boundary_facets.iter().map(|f| f.iter().map(|&i| ids[i]).collect()).collect();
        let mut nodes = Vec::new();
        let mut keys: Vec<NodeKey> = Vec::new();
        let mut boundary_mask = Vec::new();
        let mut index: HashMap<NodeKey, usize> = HashMap::new();
        let mut simplex_nodes = Vec::with_capacity(simplices.len());
        let mut simplex_vertices = Vec::with_capacity(simplices.len());
        for simp in simplices {
            if simp.len() != dim + 1 {
                return Err(Error::Geometry(format!("simplex with {} vertices in dimension {dim}", simp.len())));
            }
            let verts: Vec<Point> = simp.iter().map(|&i| points[i]).collect();
            if geometry::simplex_volume(dim, &verts) <= 0.0 {
                return Err(Error::Constraint(format!("sub-simplex {simp:?} is not positively oriented")));
            }
            let mut local = Vec::with_capacity(basis.len());
            for alpha in &basis.multi_indices {
                let mut key: NodeKey =
                    (0..=dim).filter(|&i| alpha[i] > 0).map(|i| (ids[simp[i]], alpha[i])).collect();
                key.sort_unstable();
                let id = match index.get(&key) {
                    Some(&id) => id,
                    None => {
                        let id = nodes.len();
                        nodes.push(node_position(&alpha[..=dim], &verts, k, &lobatto));
                        let on_boundary = bsets.iter().any(|b| key.iter().all(|(p, _)| b.contains(p)));
                        boundary_mask.push(on_boundary);
                        index.insert(key.clone(), id);
                        keys.push(key);
                        id
                    }
                };
                local.push(id);
            }
            simplex_nodes.push(local);
            simplex_vertices.push(verts);
        }
        Ok(MacroFeSpace { dim, degree: k, nodes, keys, boundary_mask, simplex_nodes, simplex_vertices, basis, index })
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_simplices(&self) -> usize {
        self.simplex_nodes.len()
    }

    pub fn simplex_vertices(&self, s: usize) -> &[Point] {
        &self.simplex_vertices[s]
    }

    pub fn node_index(&self, key: &NodeKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn boundary_nodes(&self) -> Vec<usize> {
        (0..self.num_nodes()).filter(|&i| self.boundary_mask[i]).collect()
    }

    pub fn interior_nodes(&self) -> Vec<usize> {
        (0..self.num_nodes()).filter(|&i| !self.boundary_mask[i]).collect()
    }

    pub fn measure(&self) -> f64 {
        self.simplex_vertices.iter().map(|v| geometry::simplex_volume(self.dim, v)).sum()
    }

    fn map(&self, s: usize) -> AffineMap {
        AffineMap::new(self.dim, &self.simplex_vertices[s])
    }

    /// Stiffness matrix `∫ ∇w_i · ∇w_j`.
    pub fn local_stiffness(&self) -> Result<DMatrix<f64>> {
        let r = reference_matrices(self.dim, self.degree)?;
        let n = self.num_nodes();
        let mut s = DMatrix::zeros(n, n);
        let nb = self.basis.len();
        for (t, idx) in self.simplex_nodes.iter().enumerate() {
            let am = self.map(t);
            let g = am.metric();
            let det = am.det.abs();
            let mut local = DMatrix::<f64>::zeros(nb, nb);
            for a in 0..self.dim {
                for b in 0..self.dim {
                    if g[a][b] != 0.0 {
                        local += &r.grad[a][b] * (det * g[a][b]);
                    }
                }
            }
            for i in 0..nb {
                for j in 0..nb {
                    s[(idx[i], idx[j])] += local[(i, j)];
                }
            }
        }
        Ok(s)
    }

    /// Mass matrix `∫ w_i w_j`.
    pub fn local_mass(&self) -> Result<DMatrix<f64>> {
        let r = reference_matrices(self.dim, self.degree)?;
        let n = self.num_nodes();
        let mut m = DMatrix::zeros(n, n);
        let nb = self.basis.len();
        for (t, idx) in self.simplex_nodes.iter().enumerate() {
            let det = self.map(t).det.abs();
            for i in 0..nb {
                for j in 0..nb {
                    m[(idx[i], idx[j])] += det * r.mass[(i, j)];
                }
            }
        }
        Ok(m)
    }

    /// `∫ f w_i` for every node, with quadrature of the given exactness.
    pub fn load_vector(&self, f: &dyn Fn(&Point) -> f64, exactness: usize) -> Result<DVector<f64>> {
        let table = quad_table(self.dim, self.degree, exactness)?;
        let mut v = DVector::zeros(self.num_nodes());
        for (t, idx) in self.simplex_nodes.iter().enumerate() {
            let am = self.map(t);
            let det = am.det.abs();
            for (q, xi) in table.quad.points.iter().enumerate() {
                let fx = f(&am.map(xi)) * table.quad.weights[q] * det;
                for (i, &n) in idx.iter().enumerate() {
                    v[n] += fx * table.phi[q][i];
                }
            }
        }
        Ok(v)
    }

    /// Moment matrix `M[(i, α)] = ∫ w_i m_α` for every member of `poly`.
    pub fn moment_matrix(&self, poly: &ScaledMonomialBasis) -> Result<DMatrix<f64>> {
        let table = quad_table(self.dim, self.degree, self.degree + poly.degree)?;
        let mut m = DMatrix::zeros(self.num_nodes(), poly.len());
        for (t, idx) in self.simplex_nodes.iter().enumerate() {
            let am = self.map(t);
            let det = am.det.abs();
            for (q, xi) in table.quad.points.iter().enumerate() {
                let mv = poly.eval(&am.map(xi));
                let w = table.quad.weights[q] * det;
                for (i, &n) in idx.iter().enumerate() {
                    let wp = w * table.phi[q][i];
                    for (a, ma) in mv.iter().enumerate() {
                        m[(n, a)] += wp * ma;
                    }
                }
            }
        }
        Ok(m)
    }

    /// Column `alpha` of [`Self::moment_matrix`].
    pub fn moment_vector(&self, poly: &ScaledMonomialBasis, alpha: usize) -> Result<DVector<f64>> {
        Ok(self.moment_matrix(poly)?.column(alpha).into_owned())
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate(&self, f: &dyn Fn(&Point) -> f64) -> DVector<f64> {
        DVector::from_iterator(self.num_nodes(), self.nodes.iter().map(|p| f(p)))
    }

    /// Evaluates the function with nodal values `coeffs` at `x`, or `None` if `x` is
    /// outside every simplex.
    pub fn eval(&self, coeffs: &DVector<f64>, x: &Point) -> Option<f64> {
        let tol = 1e-12;
        for (t, idx) in self.simplex_nodes.iter().enumerate() {
            let am = self.map(t);
            let d = geometry::sub(x, &am.origin);
            let mut xi = [0.0; 3];
            for i in 0..self.dim {
                xi[i] = (0..self.dim).map(|j| am.inv[i][j] * d[j]).sum();
            }
            let s: f64 = xi[..self.dim].iter().sum();
            if xi[..self.dim].iter().all(|&c| c >= -tol) && s <= 1.0 + tol {
                let phi = self.basis.eval(&xi);
                return Some(idx.iter().zip(&phi).map(|(&n, p)| coeffs[n] * p).sum());
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::macrosub::{subdivide_mesh, subdivide_polygon, Strategy};
    use crate::polybasis::{graded_exponents, poly_dim};
    use crate::polymesh::{generate_cube_mesh, Mesh};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(x: f64, y: f64) -> Point {
        [x, y, 0.0]
    }

    fn pentagon() -> MacroSubdivision {
        subdivide_polygon(&[p(0.0, 0.0), p(0.5, 0.0), p(0.5, 0.5), p(0.25, 0.25), p(0.0, 0.5)]).unwrap()
    }

    fn reference_triangle() -> MacroFeSpace {
        let pts = [p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)];
        let ids: Vec<PointId> = (0..3).map(PointId::Vertex).collect();
        let facets = vec![vec![0, 1], vec![1, 2], vec![2, 0]];
        MacroFeSpace::new(2, 1, &pts, &ids, &[vec![0, 1, 2]], &facets).unwrap()
    }

    #[test]
    fn reference_triangle_stiffness() {
        let s = reference_triangle().local_stiffness().unwrap();
        let want = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((s[(i, j)] - want[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn node_counts() {
        let tri = subdivide_polygon(&[p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)]).unwrap();
        let sp = build_macro_space(&tri, 1).unwrap();
        assert_eq!((sp.num_nodes(), sp.interior_nodes().len()), (4, 1));
        let sp = build_macro_space(&pentagon(), 2).unwrap();
        assert_eq!((sp.num_nodes(), sp.interior_nodes().len()), (12, 2));
        let cube = subdivide_mesh(&Mesh::Solid(generate_cube_mesh(1)), Strategy::Kuhn).unwrap();
        let sp = build_macro_space(&cube.cells[0], 1).unwrap();
        assert_eq!((sp.num_nodes(), sp.interior_nodes().len()), (8, 0));
    }

    #[test]
    fn constants_in_kernel_and_mass_total() {
        for k in 1..=5 {
            let sp = build_macro_space(&pentagon(), k).unwrap();
            let s = sp.local_stiffness().unwrap();
            let ones = DVector::from_element(sp.num_nodes(), 1.0);
            assert!((&s * &ones).amax() < 1e-12, "k={k}");
            assert!((&s - s.transpose()).amax() < 1e-13);
            let m = sp.local_mass().unwrap();
            assert!((m.sum() - 0.1875).abs() < 1e-12);
        }
    }

    #[test]
    fn moments() {
        let sp = build_macro_space(&pentagon(), 3).unwrap();
        let poly = ScaledMonomialBasis::new(2, 1, [0.25, 0.25, 0.0], 0.5);
        assert!((sp.moment_vector(&poly, 0).unwrap().sum() - 0.1875).abs() < 1e-14);
        // square centered at the origin: odd monomial integrates to zero
        let sq = subdivide_polygon(&[p(-1.0, -1.0), p(1.0, -1.0), p(1.0, 1.0), p(-1.0, 1.0)]).unwrap();
        let sp = build_macro_space(&sq, 3).unwrap();
        let poly = ScaledMonomialBasis::new(2, 1, [0.0; 3], 1.0);
        assert!(sp.moment_vector(&poly, 1).unwrap().sum().abs() < 1e-12);
    }

    #[test]
    fn moments_vs_over_integration() {
        let sp = build_macro_space(&pentagon(), 3).unwrap();
        let poly = ScaledMonomialBasis::new(2, 1, [0.25, 0.25, 0.0], 0.5);
        let m = sp.moment_matrix(&poly).unwrap();
        // independent path: assemble ∫ w_i m_α with a 12-exact rule, simplex by simplex
        let quad = simplex_quadrature(2, 12).unwrap();
        let basis = lagrange_pk_basis(2, 3).unwrap();
        let mut oracle = DMatrix::<f64>::zeros(sp.num_nodes(), poly.len());
        for t in 0..sp.num_simplices() {
            let v = sp.simplex_vertices(t);
            let area = geometry::simplex_volume(2, v);
            for (q, xi) in quad.points.iter().enumerate() {
                let b = quad.barycentric(q);
                let x = [
                    b[0] * v[0][0] + b[1] * v[1][0] + b[2] * v[2][0],
                    b[0] * v[0][1] + b[1] * v[1][1] + b[2] * v[2][1],
                    0.0,
                ];
                let phi = basis.eval(xi);
                let mv = poly.eval(&x);
                for (i, &n) in sp.simplex_nodes[t].iter().enumerate() {
                    for a in 0..poly.len() {
                        oracle[(n, a)] += 2.0 * area * quad.weights[q] * phi[i] * mv[a];
                    }
                }
            }
        }
        assert!((&m - &oracle).amax() < 1e-12);
    }

    fn random_poly(rng: &mut ChaCha8Rng, dim: usize, k: usize) -> impl Fn(&Point) -> f64 {
        let ex = graded_exponents(dim, k);
        let c: Vec<f64> = ex.iter().map(|_| rng.random_range(-1.0..1.0)).collect();
        move |x: &Point| {
            ex.iter()
                .zip(&c)
                .map(|(e, c)| c * x[0].powi(e[0] as i32) * x[1].powi(e[1] as i32) * x[2].powi(e[2] as i32))
                .sum()
        }
    }

    #[test]
    fn reproduces_polynomials() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let sub = pentagon();
        for k in 1..=5 {
            let sp = build_macro_space(&sub, k).unwrap();
            let f = random_poly(&mut rng, 2, k);
            let c = sp.interpolate(&f);
            for _ in 0..20 {
                // random point in the first sub-triangle
                let (a, b) = (rng.random_range(0.0..1.0f64), rng.random_range(0.0..1.0f64));
                let (a, b) = if a + b > 1.0 { (1.0 - a, 1.0 - b) } else { (a, b) };
                let v = sp.simplex_vertices(rng.random_range(0..sp.num_simplices()));
                let x = geometry::add(
                    &v[0],
                    &geometry::add(&geometry::scale(&geometry::sub(&v[1], &v[0]), a), &geometry::scale(&geometry::sub(&v[2], &v[0]), b)),
                );
                let got = sp.eval(&c, &x).unwrap();
                assert!((got - f(&x)).abs() <= 1e-11 * f(&x).abs().max(1.0), "k={k}");
            }
        }
    }

    #[test]
    fn reproduces_polynomials_3d() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cube = subdivide_mesh(&Mesh::Solid(generate_cube_mesh(1)), Strategy::Center).unwrap();
        for k in [2, 4] {
            let sp = build_macro_space(&cube.cells[0], k).unwrap();
            let f = random_poly(&mut rng, 3, k);
            let c = sp.interpolate(&f);
            for _ in 0..20 {
                let x = [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)];
                let got = sp.eval(&c, &x).unwrap();
                assert!((got - f(&x)).abs() <= 1e-11 * f(&x).abs().max(1.0));
            }
        }
    }

    #[test]
    fn interior_dimension_condition() {
        let sub2 = pentagon();
        let cube = subdivide_mesh(&Mesh::Solid(generate_cube_mesh(1)), Strategy::Kuhn).unwrap();
        for k in 2..=5 {
            let sp = build_macro_space(&sub2, k).unwrap();
            assert!(sp.interior_nodes().len() > poly_dim(2, k as isize - 2));
            // Kuhn at k = 2 has a single interior node (the diagonal midpoint): equality
            let sp = build_macro_space(&cube.cells[0], k).unwrap();
            assert!(sp.interior_nodes().len() >= poly_dim(3, k as isize - 2), "k={k}");
            if k > 2 {
                assert!(sp.interior_nodes().len() > poly_dim(3, k as isize - 2), "k={k}");
            }
        }
    }

    #[test]
    fn shared_face_nodes_have_equal_keys() {
        let sub = subdivide_mesh(&Mesh::Solid(generate_cube_mesh(2)), Strategy::Auto).unwrap();
        let a = build_macro_space(&sub.cells[0], 3).unwrap();
        let b = build_macro_space(&sub.cells[1], 3).unwrap();
        let shared: Vec<_> = a.keys.iter().filter(|k| b.node_index(k).is_some()).collect();
        // one 3x3 face patch of a P3 triangulated square: 16 lattice nodes
        assert_eq!(shared.len(), 16);
        for key in shared {
            let (i, j) = (a.node_index(key).unwrap(), b.node_index(key).unwrap());
            assert!(geometry::dist(&a.nodes[i], &b.nodes[j]) < 1e-15);
            assert!(a.boundary_mask[i] && b.boundary_mask[j]);
        }
    }
}
