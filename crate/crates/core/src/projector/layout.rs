use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{self, AffineMap, Point};
use crate::macrofe::NodeKey;
use crate::macrosub::{FaceTriangulation, MeshSubdivision, PointId};
use crate::polybasis::{gauss_lobatto, load_exactness, poly_dim, simplex_quadrature, ScaledMonomialBasis, MAX_EXACTNESS};
use crate::polymesh::Mesh;

/// Global numbering of the tilde degrees of freedom: vertex values, then interior
/// Gauss–Lobatto values per edge, then face Laplacian coefficients (3D), then cell
/// Laplacian coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct TildeDofLayout {
    pub dim: usize,
    pub degree: usize,
    pub num_vertices: usize,
    pub num_edges: usize,
    pub num_faces: usize,
    pub num_cells: usize,
    pub per_edge: usize,
    pub per_face: usize,
    pub per_cell: usize,
    /// True for every DOF attached to an entity on the domain boundary.
    pub boundary_mask: Vec<bool>,
    edge_index: HashMap<(usize, usize), usize>,
}

/// Builds the layout for `mesh` and degree `k`.
pub fn build_layout(mesh: &Mesh, k: usize) -> TildeDofLayout {
    let dim = mesh.dim();
    let km2 = k as isize - 2;
    let (nv, edges, nf, nc) = match mesh {
        Mesh::Planar(m) => (m.num_vertices(), m.edges(), 0, m.num_cells()),
        Mesh::Solid(m) => (m.num_vertices(), m.edges(), m.num_faces(), m.num_cells()),
    };
    let per_face = if dim == 3 { poly_dim(2, km2) } else { 0 };
    let mut l = TildeDofLayout {
        dim,
        degree: k,
        num_vertices: nv,
        num_edges: edges.len(),
        num_faces: nf,
        num_cells: nc,
        per_edge: k - 1,
        per_face,
        per_cell: poly_dim(dim, km2),
        boundary_mask: Vec::new(),
        edge_index: edges.iter().enumerate().map(|(i, e)| ((e.vertices[0], e.vertices[1]), i)).collect(),
    };
    let mut mask = vec![false; l.len()];
    let (bv, be, bf): (Vec<bool>, Vec<bool>, Vec<bool>) = match mesh {
        Mesh::Planar(m) => (m.boundary_vertex_flags(), m.boundary_edge_flags().to_vec(), Vec::new()),
        Mesh::Solid(m) => (m.boundary_vertex_flags(), m.boundary_edge_flags(), m.boundary_face_flags().to_vec()),
    };
    for v in 0..nv {
        mask[l.vertex_dof(v)] = bv[v];
    }
    for e in 0..l.num_edges {
        for j in 0..l.per_edge {
            mask[l.edge_dof(e, j)] = be[e];
        }
    }
    for f in 0..nf {
        for a in 0..per_face {
            mask[l.face_dof(f, a)] = bf[f];
        }
    }
    l.boundary_mask = mask;
    l
}

impl TildeDofLayout {
    pub fn len(&self) -> usize {
        self.num_vertices + self.per_edge * self.num_edges + self.per_face * self.num_faces + self.per_cell * self.num_cells
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn vertex_dof(&self, v: usize) -> usize {
        v
    }

    /// DOF of the `j`-th interior Gauss–Lobatto node (`j` in `0..k-1`), counted from
    /// the lower-numbered vertex.
    pub fn edge_dof(&self, e: usize, j: usize) -> usize {
        self.num_vertices + e * self.per_edge + j
    }

    pub fn face_dof(&self, f: usize, a: usize) -> usize {
        self.num_vertices + self.num_edges * self.per_edge + f * self.per_face + a
    }

    pub fn cell_dof(&self, c: usize, a: usize) -> usize {
        self.num_vertices + self.num_edges * self.per_edge + self.num_faces * self.per_face + c * self.per_cell + a
    }

    pub fn num_free(&self) -> usize {
        self.boundary_mask.iter().filter(|b| !**b).count()
    }

    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_index.get(&(a.min(b), a.max(b))).copied()
    }

    /// Tilde DOF carrying the value at a macro node on a mesh vertex or edge.
    pub fn trace_dof(&self, key: &NodeKey) -> Option<usize> {
        match key.as_slice() {
            [(PointId::Vertex(v), _)] => Some(self.vertex_dof(*v)),
            [(PointId::Vertex(a), _), (PointId::Vertex(b), mb)] => {
                // keys are sorted, so `b` is the higher vertex id and its
                // multiplicity is the Gauss–Lobatto index seen from `a`
                let e = self.edge_id(*a, *b)?;
                Some(self.edge_dof(e, *mb as usize - 1))
            }
            _ => None,
        }
    }

    /// Local DOF list of a cell: vertices, edge values, face coefficients, cell
    /// coefficients.
    pub fn cell_dofs(&self, mesh: &Mesh, c: usize) -> Vec<usize> {
        let mut d = Vec::new();
        match mesh {
            Mesh::Planar(m) => {
                d.extend(m.cells()[c].iter().map(|&v| self.vertex_dof(v)));
                for &e in m.cell_edges(c) {
                    d.extend((0..self.per_edge).map(|j| self.edge_dof(e, j)));
                }
            }
            Mesh::Solid(m) => {
                d.extend(m.cell_vertices(c).iter().map(|&v| self.vertex_dof(v)));
                for &e in m.cell_edges(c) {
                    d.extend((0..self.per_edge).map(|j| self.edge_dof(e, j)));
                }
                for of in &m.cells()[c] {
                    d.extend((0..self.per_face).map(|a| self.face_dof(of.face, a)));
                }
            }
        }
        d.extend((0..self.per_cell).map(|a| self.cell_dof(c, a)));
        d
    }
}

/// Monomials of degree `k - 2` on cell `c`, centered at the vertex average and scaled
/// by the cell diameter. `None` for `k = 1`.
pub fn cell_monomials(mesh: &Mesh, c: usize, k: usize) -> Option<ScaledMonomialBasis> {
    if k < 2 {
        return None;
    }
    let (pts, h) = match mesh {
        Mesh::Planar(m) => (m.cell_points(c), m.cell_diameter(c)),
        Mesh::Solid(m) => (m.cell_points(c), m.cell_diameter(c)),
    };
    Some(ScaledMonomialBasis::new(mesh.dim(), k - 2, geometry::average(&pts), h))
}

/// Monomials of degree `k - 2` in planar face coordinates.
pub fn face_monomials(ft: &FaceTriangulation, k: usize) -> Option<ScaledMonomialBasis> {
    if k < 2 {
        return None;
    }
    let pts = ft.planar_points();
    let lp = &pts[..ft.loop_len()];
    Some(ScaledMonomialBasis::new(2, k - 2, geometry::average(lp), geometry::diameter(lp)))
}

/// A twice differentiable scalar field with known Hessian.
pub trait ScalarField: Sync {
    fn value(&self, x: &Point) -> f64;
    fn hessian(&self, x: &Point) -> [[f64; 3]; 3];

    fn laplacian(&self, x: &Point, dim: usize) -> f64 {
        let h = self.hessian(x);
        (0..dim).map(|i| h[i][i]).sum()
    }
}

/// Quadrature points and weights mapped onto a physical simplex.
pub(crate) fn physical_rule(dim: usize, verts: &[Point], exactness: usize) -> Result<Vec<(Point, f64)>> {
    let quad = simplex_quadrature(dim, exactness.min(MAX_EXACTNESS))?;
    let am = AffineMap::new(dim, verts);
    let det = am.det.abs();
    Ok(quad.points.iter().zip(&quad.weights).map(|(xi, w)| (am.map(xi), w * det)).collect())
}

/// L²-projection onto `basis` from samples `(basis point, value, weight)`.
fn l2_project(basis: &ScaledMonomialBasis, samples: &[(Point, f64, f64)]) -> Result<DVector<f64>> {
    let n = basis.len();
    let mut g = DMatrix::zeros(n, n);
    let mut b = DVector::zeros(n);
    for (x, v, w) in samples {
        let m = basis.eval(x);
        for i in 0..n {
            b[i] += w * v * m[i];
            for j in 0..n {
                g[(i, j)] += w * m[i] * m[j];
            }
        }
    }
    let chol = g
        .cholesky()
        .ok_or_else(|| Error::NotPositiveDefinite("monomial Gram matrix".into()))?;
    Ok(chol.solve(&b))
}

/// Coefficients of the L²(K) projection of `g` onto `basis`, integrated over the
/// subdivision simplices.
pub fn project_cell_data(
    dim: usize,
    simplices: &[Vec<Point>],
    basis: &ScaledMonomialBasis,
    g: &dyn Fn(&Point) -> f64,
    exactness: usize,
) -> Result<DVector<f64>> {
    let mut samples = Vec::new();
    for v in simplices {
        for (x, w) in physical_rule(dim, v, exactness)? {
            samples.push((x, g(&x), w));
        }
    }
    l2_project(basis, &samples)
}

/// Coefficients of the L²(F) projection of `−Δ_F u` onto the face monomials.
pub fn project_face_data(
    ft: &FaceTriangulation,
    basis: &ScaledMonomialBasis,
    u: &dyn ScalarField,
    exactness: usize,
) -> Result<DVector<f64>> {
    let planar = ft.planar_points();
    let [e1, e2, n] = ft.frame;
    let o = ft.points[0];
    let mut samples = Vec::new();
    for t in &ft.triangles {
        let v: Vec<Point> = t.iter().map(|&i| planar[i]).collect();
        for (y, w) in physical_rule(2, &v, exactness)? {
            let x = geometry::add(&o, &geometry::add(&geometry::scale(&e1, y[0]), &geometry::scale(&e2, y[1])));
            let h = u.hessian(&x);
            let tr = h[0][0] + h[1][1] + h[2][2];
            let mut nhn = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    nhn += n[i] * h[i][j] * n[j];
                }
            }
            samples.push((y, -(tr - nhn), w));
        }
    }
    l2_project(basis, &samples)
}

/// Tilde DOFs of the interpolant `I_h u`: point values at vertices and edge
/// Gauss–Lobatto nodes, L² projections of `−Δ_F u` on faces and `−Δu` on cells.
pub fn interpolate_exact(
    mesh: &Mesh,
    sub: &MeshSubdivision,
    layout: &TildeDofLayout,
    u: &dyn ScalarField,
) -> Result<DVector<f64>> {
    let k = layout.degree;
    let dim = layout.dim;
    let ex = load_exactness(k);
    let mut x = DVector::zeros(layout.len());
    let (points, edges): (Vec<Point>, _) = match mesh {
        Mesh::Planar(m) => ((0..m.num_vertices()).map(|v| m.point(v)).collect(), m.edges()),
        Mesh::Solid(m) => (m.vertices().to_vec(), m.edges()),
    };
    for (v, p) in points.iter().enumerate() {
        x[layout.vertex_dof(v)] = u.value(p);
    }
    let gl = gauss_lobatto(k);
    for (e, edge) in edges.iter().enumerate() {
        let (a, b) = (points[edge.vertices[0]], points[edge.vertices[1]]);
        for j in 0..layout.per_edge {
            let t = gl[j + 1];
            let p = geometry::add(&geometry::scale(&a, 1.0 - t), &geometry::scale(&b, t));
            x[layout.edge_dof(e, j)] = u.value(&p);
        }
    }
    if k >= 2 {
        let faces: Vec<DVector<f64>> = sub
            .faces
            .par_iter()
            .map(|ft| project_face_data(ft, &face_monomials(ft, k).unwrap(), u, ex))
            .collect::<Result<_>>()?;
        for (f, q) in faces.iter().enumerate() {
            for a in 0..layout.per_face {
                x[layout.face_dof(f, a)] = q[a];
            }
        }
        let cells: Vec<DVector<f64>> = sub
            .cells
            .par_iter()
            .map(|s| {
                let simplices: Vec<Vec<Point>> = (0..s.simplices.len()).map(|t| s.simplex_points(t)).collect();
                let basis = cell_monomials(mesh, s.cell, k).unwrap();
                project_cell_data(dim, &simplices, &basis, &|p| -u.laplacian(p, dim), ex)
            })
            .collect::<Result<_>>()?;
        for (c, q) in cells.iter().enumerate() {
            for a in 0..layout.per_cell {
                x[layout.cell_dof(c, a)] = q[a];
            }
        }
    }
    Ok(x)
}
