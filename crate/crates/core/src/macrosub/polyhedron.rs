use std::collections::HashMap;

use serde::Serialize;

use super::polygon::split_polygon;
use super::{MacroSubdivision, ParentFace, PointId, Strategy};
use crate::error::{Error, Result};
use crate::geometry::{self, Point};
use crate::polymesh::{face_frame, PolyMesh3D};

/// Triangulation of one mesh face, shared by both adjacent cells.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FaceTriangulation {
    pub face: usize,
    /// Face loop points followed by the optional barycenter.
    pub points: Vec<Point>,
    pub ids: Vec<PointId>,
    /// Triangles (indices into `points`) oriented like the face loop.
    pub triangles: Vec<[usize; 3]>,
    /// In-plane frame `(e1, e2, n)`, computed from the face alone.
    pub frame: [Point; 3],
}

impl FaceTriangulation {
    /// Points in the face frame, origin at the first loop vertex.
    pub fn planar_points(&self) -> Vec<Point> {
        let o = self.points[0];
        self.points
            .iter()
            .map(|p| {
                let d = geometry::sub(p, &o);
                [geometry::dot(&d, &self.frame[0]), geometry::dot(&d, &self.frame[1]), 0.0]
            })
            .collect()
    }

    pub fn loop_len(&self) -> usize {
        self.ids.iter().filter(|id| matches!(id, PointId::Vertex(_))).count()
    }
}

fn uses_kuhn(mesh: &PolyMesh3D, c: usize, strategy: Strategy) -> Result<bool> {
    match strategy {
        Strategy::Center => Ok(false),
        Strategy::Auto => Ok(mesh.is_axis_aligned_box(c)),
        Strategy::Kuhn => {
            if mesh.is_axis_aligned_box(c) {
                Ok(true)
            } else {
                Err(Error::Unsupported(format!("kuhn strategy needs an axis-aligned box, cell {c} is not")))
            }
        }
    }
}

/// Triangulates every mesh face once. Faces next to a Kuhn-split box are cut along
/// the diagonal joining their componentwise minimal and maximal corners; all other
/// faces follow the polygon rule in their own plane.
pub fn triangulate_faces(mesh: &PolyMesh3D, strategy: Strategy) -> Result<Vec<FaceTriangulation>> {
    let kuhn: Vec<bool> = (0..mesh.num_cells()).map(|c| uses_kuhn(mesh, c, strategy)).collect::<Result<_>>()?;
    (0..mesh.num_faces())
        .map(|f| {
            let lp = &mesh.faces()[f];
            let mut points = mesh.face_points(f);
            let (e1, e2, n) = face_frame(&points);
            let mut ids: Vec<PointId> = lp.iter().map(|&v| PointId::Vertex(v)).collect();
            let triangles = if mesh.face_cells(f).iter().any(|&c| kuhn[c]) {
                let i0 = (0..4)
                    .min_by(|&a, &b| {
                        let (p, q) = (points[a], points[b]);
                        (p[0] + p[1] + p[2]).total_cmp(&(q[0] + q[1] + q[2]))
                    })
                    .unwrap();
                let at = |j: usize| (i0 + j) % 4;
                vec![[at(0), at(1), at(2)], [at(0), at(2), at(3)]]
            } else {
                let o = points[0];
                let flat: Vec<Point> = points
                    .iter()
                    .map(|p| {
                        let d = geometry::sub(p, &o);
                        [geometry::dot(&d, &e1), geometry::dot(&d, &e2), 0.0]
                    })
                    .collect();
                let (added, tris) =
                    split_polygon(&flat).map_err(|e| Error::Geometry(format!("face {f}: {e}")))?;
                if let Some(b) = added {
                    let b3 = geometry::add(&o, &geometry::add(&geometry::scale(&e1, b[0]), &geometry::scale(&e2, b[1])));
                    points.push(b3);
                    ids.push(PointId::Face(f));
                }
                tris
            };
            Ok(FaceTriangulation { face: f, points, ids, triangles, frame: [e1, e2, n] })
        })
        .collect()
}

/// Subdivides cell `c` using the shared face triangulations.
pub fn subdivide_polyhedron(
    mesh: &PolyMesh3D,
    c: usize,
    strategy: Strategy,
    faces: &[FaceTriangulation],
) -> Result<MacroSubdivision> {
    let kuhn = uses_kuhn(mesh, c, strategy)?;
    let mut points: Vec<Point> = Vec::new();
    let mut ids: Vec<PointId> = Vec::new();
    let mut local: HashMap<PointId, usize> = HashMap::new();
    let mut add = |id: PointId, p: Point, points: &mut Vec<Point>, ids: &mut Vec<PointId>| -> usize {
        *local.entry(id).or_insert_with(|| {
            points.push(p);
            ids.push(id);
            points.len() - 1
        })
    };
    for &v in mesh.cell_vertices(c) {
        add(PointId::Vertex(v), mesh.point(v), &mut points, &mut ids);
    }
    let mut parent_faces = Vec::with_capacity(mesh.cells()[c].len());
    for of in &mesh.cells()[c] {
        let ft = &faces[of.face];
        let map: Vec<usize> = ft
            .ids
            .iter()
            .zip(&ft.points)
            .map(|(&id, &p)| add(id, p, &mut points, &mut ids))
            .collect();
        let triangles = ft
            .triangles
            .iter()
            .map(|t| {
                let t = [map[t[0]], map[t[1]], map[t[2]]];
                if of.positive { t } else { [t[0], t[2], t[1]] }
            })
            .collect();
        let mut boundary: Vec<usize> = map[..ft.loop_len()].to_vec();
        if !of.positive {
            boundary.reverse();
        }
        parent_faces.push(ParentFace { face: of.face, triangles, boundary });
    }

    let simplices = if kuhn {
        kuhn_tets(&points)
    } else {
        let nverts = mesh.cell_vertices(c).len();
        let apex = geometry::average(&points[..nverts]);
        let a = add(PointId::Cell(c), apex, &mut points, &mut ids);
        let mut tets = Vec::new();
        for pf in &parent_faces {
            for t in &pf.triangles {
                let tet = vec![a, t[0], t[1], t[2]];
                let pts: Vec<Point> = tet.iter().map(|&i| points[i]).collect();
                if geometry::simplex_volume(3, &pts) <= 0.0 {
                    return Err(Error::Geometry(format!(
                        "cell {c}: vertex centroid does not see face {} (cell is not star-shaped w.r.t. it)",
                        pf.face
                    )));
                }
                tets.push(tet);
            }
        }
        tets
    };
    Ok(MacroSubdivision::assemble(3, c, points, ids, simplices, Vec::new(), parent_faces))
}

/// Six positively oriented tetrahedra sharing the min-max diagonal of a box.
fn kuhn_tets(points: &[Point]) -> Vec<Vec<usize>> {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in points {
        for i in 0..3 {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    let mut corner = [usize::MAX; 8];
    for (j, p) in points.iter().enumerate() {
        let bits = (0..3).fold(0, |acc, i| acc | (((p[i] - lo[i]).abs() > (p[i] - hi[i]).abs()) as usize) << i);
        corner[bits] = j;
    }
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    PERMS
        .iter()
        .map(|p| {
            let b1 = 1 << p[0];
            let b2 = b1 | 1 << p[1];
            let mut tet = vec![corner[0], corner[b1], corner[b2], corner[7]];
            let pts: Vec<Point> = tet.iter().map(|&i| points[i]).collect();
            if geometry::simplex_volume(3, &pts) < 0.0 {
                tet.swap(2, 3);
            }
            tet
        })
        .collect()
}
