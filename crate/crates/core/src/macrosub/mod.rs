//! Simplicial macro-subdivision of polygons and polyhedra.
//!
//! Every cell is split into triangles (2D) or tetrahedra (3D) without splitting any
//! parent edge. Triangles receive a barycenter so that there are at least two
//! sub-triangles; in 3D every face carries at least two triangles and every
//! tetrahedron has at least two facets inside the cell.

mod check;
mod polygon;
mod polyhedron;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::Result;
use crate::geometry::Point;
use crate::polymesh::Mesh;

pub use check::check_constraints;
pub use polygon::{ear_clip, subdivide_polygon, subdivide_polygon_cell};
pub use polyhedron::{subdivide_polyhedron, triangulate_faces, FaceTriangulation};

/// Shape tolerance: sub-simplices must have measure `>= SHAPE_TOL * h_K^d`.
pub const SHAPE_TOL: f64 = 1e-6;

/// Identity of a subdivision point across the whole mesh.
///
/// Added points are unique per host entity: at most one barycenter per face and one
/// interior point per cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum PointId {
    /// A parent vertex (mesh vertex id).
    Vertex(usize),
    /// A point added inside mesh face `f`.
    Face(usize),
    /// A point added inside cell `c`.
    Cell(usize),
}

/// Parent entity of a sub-simplex facet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FacetParent {
    /// Lies on parent edge `parent_edges[i]` (2D).
    Edge(usize),
    /// Lies on parent face `parent_faces[i]` (3D).
    Face(usize),
    Internal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParentEdge {
    /// Mesh edge id (or loop position for a standalone polygon).
    pub edge: usize,
    /// Local point indices of the endpoints, in CCW loop order.
    pub points: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParentFace {
    pub face: usize,
    /// Face triangles in local point indices, oriented with outward normal.
    pub triangles: Vec<[usize; 3]>,
    /// Local point indices of the face loop (outward orientation).
    pub boundary: Vec<usize>,
}

/// Simplicial decomposition of one cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MacroSubdivision {
    pub dim: usize,
    pub cell: usize,
    pub points: Vec<Point>,
    pub ids: Vec<PointId>,
    /// Positively oriented simplices (local point indices).
    pub simplices: Vec<Vec<usize>>,
    /// `facet_parents[s][i]` classifies the facet of simplex `s` opposite vertex `i`.
    pub facet_parents: Vec<Vec<FacetParent>>,
    pub parent_edges: Vec<ParentEdge>,
    pub parent_faces: Vec<ParentFace>,
}

fn sorted_ids(ids: &[PointId], idx: impl Iterator<Item = usize>) -> Vec<PointId> {
    let mut v: Vec<PointId> = idx.map(|i| ids[i]).collect();
    v.sort_unstable();
    v
}

impl MacroSubdivision {
    /// Assembles a subdivision and classifies every facet against the parent boundary.
    pub(crate) fn assemble(
        dim: usize,
        cell: usize,
        points: Vec<Point>,
        ids: Vec<PointId>,
        simplices: Vec<Vec<usize>>,
        parent_edges: Vec<ParentEdge>,
        parent_faces: Vec<ParentFace>,
    ) -> Self {
        let mut boundary: HashMap<Vec<PointId>, FacetParent> = HashMap::new();
        for (i, e) in parent_edges.iter().enumerate() {
            boundary.insert(sorted_ids(&ids, e.points.iter().copied()), FacetParent::Edge(i));
        }
        for (i, f) in parent_faces.iter().enumerate() {
            for t in &f.triangles {
                boundary.insert(sorted_ids(&ids, t.iter().copied()), FacetParent::Face(i));
            }
        }
        let facet_parents = simplices
            .iter()
            .map(|s| {
                (0..s.len())
                    .map(|skip| {
                        let key = sorted_ids(&ids, (0..s.len()).filter(|&j| j != skip).map(|j| s[j]));
                        boundary.get(&key).copied().unwrap_or(FacetParent::Internal)
                    })
                    .collect()
            })
            .collect();
        MacroSubdivision { dim, cell, points, ids, simplices, facet_parents, parent_edges, parent_faces }
    }

    pub fn num_added_points(&self) -> usize {
        self.ids.iter().filter(|id| !matches!(id, PointId::Vertex(_))).count()
    }

    pub fn simplex_points(&self, s: usize) -> Vec<Point> {
        self.simplices[s].iter().map(|&i| self.points[i]).collect()
    }

    /// Facets (local point indices) lying on the cell boundary.
    pub fn boundary_facets(&self) -> Vec<Vec<usize>> {
        if self.dim == 2 {
            self.parent_edges.iter().map(|e| e.points.to_vec()).collect()
        } else {
            self.parent_faces
                .iter()
                .flat_map(|f| f.triangles.iter().map(|t| t.to_vec()))
                .collect()
        }
    }

    /// Number of facets of simplex `s` that are interior to the cell.
    pub fn internal_facet_count(&self, s: usize) -> usize {
        self.facet_parents[s].iter().filter(|p| **p == FacetParent::Internal).count()
    }
}

/// Strategy for splitting polyhedra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Kuhn for axis-aligned boxes, centroid coning otherwise.
    #[default]
    Auto,
    /// Six tetrahedra around the main diagonal (boxes only).
    Kuhn,
    /// Cone every face triangle to the cell centroid.
    Center,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Auto => "auto",
            Strategy::Kuhn => "kuhn",
            Strategy::Center => "center",
        })
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Strategy::Auto),
            "kuhn" => Ok(Strategy::Kuhn),
            "center" => Ok(Strategy::Center),
            _ => Err(format!("unknown strategy `{s}` (auto | kuhn | center)")),
        }
    }
}

/// Subdivisions of every cell of a mesh, plus the shared face triangulations in 3D.
#[derive(Debug, Clone)]
pub struct MeshSubdivision {
    pub cells: Vec<MacroSubdivision>,
    /// One entry per mesh face (3D only).
    pub faces: Vec<FaceTriangulation>,
}

pub fn subdivide_mesh(mesh: &Mesh, strategy: Strategy) -> Result<MeshSubdivision> {
    use rayon::prelude::*;
    match mesh {
        Mesh::Planar(m) => {
            let cells = (0..m.num_cells())
                .into_par_iter()
                .map(|c| subdivide_polygon_cell(m, c))
                .collect::<Result<Vec<_>>>()?;
            Ok(MeshSubdivision { cells, faces: Vec::new() })
        }
        Mesh::Solid(m) => {
            let faces = triangulate_faces(m, strategy)?;
            let cells = (0..m.num_cells())
                .into_par_iter()
                .map(|c| subdivide_polyhedron(m, c, strategy, &faces))
                .collect::<Result<Vec<_>>>()?;
            Ok(MeshSubdivision { cells, faces })
        }
    }
}
