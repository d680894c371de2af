//! Polygonal and polyhedral meshes: data model, generators, text I/O and validation.

mod generate;
mod io;
mod validate;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, Point};

pub use generate::{
    generate_cube_mesh, generate_hexagon_mesh, generate_pentagon_mesh, Family, MeshFamily, UnitCell,
};
pub use io::{parse_mesh, read_mesh, render_mesh, write_mesh};
pub use validate::{face_frame, segments_intersect, validate_mesh, validate_mesh_2d, validate_mesh_3d};

/// What to do with cells given in the wrong orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    /// Reverse clockwise loops / inward cells silently.
    #[default]
    Fix,
    /// Reject them.
    Strict,
}

/// An edge with vertices stored as `[lo, hi]` and the cells (2D) or faces (3D)
/// that use it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub vertices: [usize; 2],
    pub users: Vec<usize>,
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolyMesh2D {
    vertices: Vec<[f64; 2]>,
    cells: Vec<Vec<usize>>,
    edges: Vec<Edge>,
    cell_edges: Vec<Vec<usize>>,
    boundary_edge_flags: Vec<bool>,
}

fn check_loop(kind: &str, id: usize, lp: &[usize], nv: usize) -> Result<()> {
    if let Some(&bad) = lp.iter().find(|&&v| v >= nv) {
        return Err(Error::Topology(format!("{kind} {id} references missing vertex {bad}")));
    }
    let mut sorted = lp.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() < 3 || sorted.len() != lp.len() {
        return Err(Error::Topology(format!(
            "{kind} {id} needs at least 3 distinct, non-repeated vertices"
        )));
    }
    Ok(())
}

impl PolyMesh2D {
    /// Builds the mesh and its edge table. Loops with negative area are reversed
    /// under [`Orientation::Fix`] and rejected under [`Orientation::Strict`].
    pub fn new(vertices: Vec<[f64; 2]>, mut cells: Vec<Vec<usize>>, orientation: Orientation) -> Result<Self> {
        let nv = vertices.len();
        for (c, lp) in cells.iter_mut().enumerate() {
            check_loop("cell", c, lp, nv)?;
            let pts: Vec<Point> = lp.iter().map(|&v| [vertices[v][0], vertices[v][1], 0.0]).collect();
            let area = geometry::shoelace(&pts);
            if area == 0.0 {
                return Err(Error::Geometry(format!("cell {c} has zero area")));
            }
            if area < 0.0 {
                match orientation {
                    Orientation::Fix => lp.reverse(),
                    Orientation::Strict => {
                        return Err(Error::Orientation(format!("cell {c} is clockwise (area {area:e})")))
                    }
                }
            }
        }
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut cell_edges = Vec::with_capacity(cells.len());
        for (c, lp) in cells.iter().enumerate() {
            let n = lp.len();
            let mut ce = Vec::with_capacity(n);
            for i in 0..n {
                let key = edge_key(lp[i], lp[(i + 1) % n]);
                let id = *index.entry(key).or_insert_with(|| {
                    edges.push(Edge { vertices: [key.0, key.1], users: Vec::new() });
                    edges.len() - 1
                });
                edges[id].users.push(c);
                if edges[id].users.len() > 2 {
                    return Err(Error::Topology(format!(
                        "edge {id} ({}, {}) is used by more than two cells: {:?}",
                        key.0, key.1, edges[id].users
                    )));
                }
                ce.push(id);
            }
            cell_edges.push(ce);
        }
        let boundary_edge_flags = edges.iter().map(|e| e.users.len() == 1).collect();
        Ok(PolyMesh2D { vertices, cells, edges, cell_edges, boundary_edge_flags })
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn point(&self, v: usize) -> Point {
        [self.vertices[v][0], self.vertices[v][1], 0.0]
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Edge ids of cell `c`; entry `i` joins loop vertices `i` and `i + 1`.
    pub fn cell_edges(&self, c: usize) -> &[usize] {
        &self.cell_edges[c]
    }

    pub fn boundary_edge_flags(&self) -> &[bool] {
        &self.boundary_edge_flags
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn cell_points(&self, c: usize) -> Vec<Point> {
        self.cells[c].iter().map(|&v| self.point(v)).collect()
    }

    pub fn cell_area(&self, c: usize) -> f64 {
        geometry::shoelace(&self.cell_points(c))
    }

    pub fn cell_diameter(&self, c: usize) -> f64 {
        geometry::diameter(&self.cell_points(c))
    }

    /// Maximum cell diameter.
    pub fn h(&self) -> f64 {
        (0..self.num_cells()).map(|c| self.cell_diameter(c)).fold(0.0, f64::max)
    }

    pub fn boundary_vertex_flags(&self) -> Vec<bool> {
        let mut flags = vec![false; self.num_vertices()];
        for (e, edge) in self.edges.iter().enumerate() {
            if self.boundary_edge_flags[e] {
                flags[edge.vertices[0]] = true;
                flags[edge.vertices[1]] = true;
            }
        }
        flags
    }
}

/// A cell's reference to a face; `positive` means the face loop's right-hand normal
/// points out of the cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrientedFace {
    pub face: usize,
    pub positive: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolyMesh3D {
    vertices: Vec<Point>,
    faces: Vec<Vec<usize>>,
    cells: Vec<Vec<OrientedFace>>,
    edges: Vec<Edge>,
    face_edges: Vec<Vec<usize>>,
    face_cells: Vec<Vec<usize>>,
    boundary_face_flags: Vec<bool>,
    cell_vertices: Vec<Vec<usize>>,
    cell_edges: Vec<Vec<usize>>,
}

impl PolyMesh3D {
    pub fn new(
        vertices: Vec<Point>,
        faces: Vec<Vec<usize>>,
        mut cells: Vec<Vec<OrientedFace>>,
        orientation: Orientation,
    ) -> Result<Self> {
        let nv = vertices.len();
        for (f, lp) in faces.iter().enumerate() {
            check_loop("face", f, lp, nv)?;
        }
        let mut face_cells = vec![Vec::new(); faces.len()];
        for (c, cf) in cells.iter().enumerate() {
            if cf.len() < 4 {
                return Err(Error::Topology(format!("cell {c} has fewer than 4 faces")));
            }
            for of in cf {
                if of.face >= faces.len() {
                    return Err(Error::Topology(format!("cell {c} references missing face {}", of.face)));
                }
                face_cells[of.face].push(c);
                if face_cells[of.face].len() > 2 {
                    return Err(Error::Topology(format!(
                        "face {} is used by more than two cells: {:?}",
                        of.face, face_cells[of.face]
                    )));
                }
            }
        }
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut face_edges = Vec::with_capacity(faces.len());
        for (f, lp) in faces.iter().enumerate() {
            let n = lp.len();
            let mut fe = Vec::with_capacity(n);
            for i in 0..n {
                let key = edge_key(lp[i], lp[(i + 1) % n]);
                let id = *index.entry(key).or_insert_with(|| {
                    edges.push(Edge { vertices: [key.0, key.1], users: Vec::new() });
                    edges.len() - 1
                });
                edges[id].users.push(f);
                fe.push(id);
            }
            face_edges.push(fe);
        }
        let boundary_face_flags = face_cells.iter().map(|c| c.len() == 1).collect();
        let mut mesh = PolyMesh3D {
            vertices,
            faces,
            cells: Vec::new(),
            edges,
            face_edges,
            face_cells,
            boundary_face_flags,
            cell_vertices: Vec::new(),
            cell_edges: Vec::new(),
        };
        for (c, cf) in cells.iter_mut().enumerate() {
            let vol = mesh.signed_volume(cf);
            if vol == 0.0 {
                return Err(Error::Geometry(format!("cell {c} has zero volume")));
            }
            if vol < 0.0 {
                match orientation {
                    Orientation::Fix => cf.iter_mut().for_each(|of| of.positive = !of.positive),
                    Orientation::Strict => {
                        return Err(Error::Orientation(format!("cell {c} faces point inward (volume {vol:e})")))
                    }
                }
            }
        }
        for cf in &cells {
            let mut vs: Vec<usize> = cf.iter().flat_map(|of| mesh.faces[of.face].iter().copied()).collect();
            vs.sort_unstable();
            vs.dedup();
            let mut es: Vec<usize> = cf.iter().flat_map(|of| mesh.face_edges[of.face].iter().copied()).collect();
            es.sort_unstable();
            es.dedup();
            mesh.cell_vertices.push(vs);
            mesh.cell_edges.push(es);
        }
        mesh.cells = cells;
        Ok(mesh)
    }

    /// Divergence-theorem volume of a signed face set.
    fn signed_volume(&self, cf: &[OrientedFace]) -> f64 {
        let mut v = 0.0;
        let o = self.face_points(cf[0].face)[0];
        for of in cf {
            let pts = self.face_points(of.face);
            let n = geometry::newell_normal(&pts);
            let c = geometry::sub(&geometry::average(&pts), &o);
            let s = if of.positive { 1.0 } else { -1.0 };
            v += s * geometry::dot(&c, &n) / 6.0;
        }
        v
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn point(&self, v: usize) -> Point {
        self.vertices[v]
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn cells(&self) -> &[Vec<OrientedFace>] {
        &self.cells
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Edge ids of face `f`; entry `i` joins loop vertices `i` and `i + 1`.
    pub fn face_edges(&self, f: usize) -> &[usize] {
        &self.face_edges[f]
    }

    pub fn face_cells(&self, f: usize) -> &[usize] {
        &self.face_cells[f]
    }

    pub fn boundary_face_flags(&self) -> &[bool] {
        &self.boundary_face_flags
    }

    /// Sorted vertex ids of cell `c`.
    pub fn cell_vertices(&self, c: usize) -> &[usize] {
        &self.cell_vertices[c]
    }

    /// Sorted edge ids of cell `c`.
    pub fn cell_edges(&self, c: usize) -> &[usize] {
        &self.cell_edges[c]
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn face_points(&self, f: usize) -> Vec<Point> {
        self.faces[f].iter().map(|&v| self.vertices[v]).collect()
    }

    pub fn cell_points(&self, c: usize) -> Vec<Point> {
        self.cell_vertices[c].iter().map(|&v| self.vertices[v]).collect()
    }

    pub fn cell_volume(&self, c: usize) -> f64 {
        self.signed_volume(&self.cells[c])
    }

    pub fn cell_diameter(&self, c: usize) -> f64 {
        geometry::diameter(&self.cell_points(c))
    }

    pub fn h(&self) -> f64 {
        (0..self.num_cells()).map(|c| self.cell_diameter(c)).fold(0.0, f64::max)
    }

    pub fn boundary_vertex_flags(&self) -> Vec<bool> {
        let mut flags = vec![false; self.num_vertices()];
        for (f, lp) in self.faces.iter().enumerate() {
            if self.boundary_face_flags[f] {
                for &v in lp {
                    flags[v] = true;
                }
            }
        }
        flags
    }

    pub fn boundary_edge_flags(&self) -> Vec<bool> {
        let mut flags = vec![false; self.num_edges()];
        for (f, fe) in self.face_edges.iter().enumerate() {
            if self.boundary_face_flags[f] {
                for &e in fe {
                    flags[e] = true;
                }
            }
        }
        flags
    }

    /// True when cell `c` is an axis-aligned box with six quadrilateral faces.
    pub fn is_axis_aligned_box(&self, c: usize) -> bool {
        let cf = &self.cells[c];
        if cf.len() != 6 || self.cell_vertices[c].len() != 8 {
            return false;
        }
        let pts = self.cell_points(c);
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in &pts {
            for i in 0..3 {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        let tol = 1e-12 * geometry::dist(&lo, &hi);
        let corner = |p: &Point| (0..3).all(|i| (p[i] - lo[i]).abs() <= tol || (p[i] - hi[i]).abs() <= tol);
        let mut seen = std::collections::HashSet::new();
        for p in &pts {
            if !corner(p) {
                return false;
            }
            let key: Vec<bool> = (0..3).map(|i| (p[i] - hi[i]).abs() <= tol).collect();
            seen.insert(key);
        }
        seen.len() == 8 && cf.iter().all(|of| self.faces[of.face].len() == 4)
    }
}

/// A mesh of either dimension.
#[derive(Debug, Clone, PartialEq)]
pub enum Mesh {
    Planar(PolyMesh2D),
    Solid(PolyMesh3D),
}

impl Mesh {
    pub fn dim(&self) -> usize {
        match self {
            Mesh::Planar(_) => 2,
            Mesh::Solid(_) => 3,
        }
    }

    pub fn num_cells(&self) -> usize {
        match self {
            Mesh::Planar(m) => m.num_cells(),
            Mesh::Solid(m) => m.num_cells(),
        }
    }

    pub fn num_vertices(&self) -> usize {
        match self {
            Mesh::Planar(m) => m.num_vertices(),
            Mesh::Solid(m) => m.num_vertices(),
        }
    }

    pub fn h(&self) -> f64 {
        match self {
            Mesh::Planar(m) => m.h(),
            Mesh::Solid(m) => m.h(),
        }
    }
}

impl From<PolyMesh2D> for Mesh {
    fn from(m: PolyMesh2D) -> Self {
        Mesh::Planar(m)
    }
}

impl From<PolyMesh3D> for Mesh {
    fn from(m: PolyMesh3D) -> Self {
        Mesh::Solid(m)
    }
}
