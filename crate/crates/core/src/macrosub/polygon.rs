use super::{MacroSubdivision, ParentEdge, PointId};
use crate::error::{Error, Result};
use crate::geometry::{self, Point};
use crate::polymesh::PolyMesh2D;

/// Ear clipping of a simple CCW polygon (xy-plane). Always clips the ear with the
/// lowest original vertex index; returns CCW triangles of loop indices.
pub fn ear_clip(pts: &[Point]) -> Result<Vec<[usize; 3]>> {
    let n = pts.len();
    let scale = geometry::diameter(pts);
    let eps = 1e-14 * scale * scale;
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut tris = Vec::with_capacity(n.saturating_sub(2));
    while remaining.len() > 3 {
        let m = remaining.len();
        let mut found = None;
        for pos in 0..m {
            let (a, b, c) = (remaining[(pos + m - 1) % m], remaining[pos], remaining[(pos + 1) % m]);
            if geometry::orient2d(&pts[a], &pts[b], &pts[c]) <= eps {
                continue;
            }
            let blocked = remaining.iter().any(|&v| {
                v != a && v != b && v != c && {
                    let p = &pts[v];
                    geometry::orient2d(&pts[a], &pts[b], p) >= -eps
                        && geometry::orient2d(&pts[b], &pts[c], p) >= -eps
                        && geometry::orient2d(&pts[c], &pts[a], p) >= -eps
                }
            });
            if !blocked {
                found = Some(pos);
                break;
            }
        }
        let Some(pos) = found else {
            return Err(Error::Geometry("no ear found; polygon is not simple".into()));
        };
        let m = remaining.len();
        tris.push([remaining[(pos + m - 1) % m], remaining[pos], remaining[(pos + 1) % m]]);
        remaining.remove(pos);
    }
    tris.push([remaining[0], remaining[1], remaining[2]]);
    Ok(tris)
}

/// Triangulates a CCW polygon loop: a triangle gets its barycenter (3 sub-triangles),
/// larger polygons are ear-clipped without new points. Returns the optional added
/// point (index `pts.len()`) and the triangles.
pub(crate) fn split_polygon(pts: &[Point]) -> Result<(Option<Point>, Vec<[usize; 3]>)> {
    let area = geometry::shoelace(pts);
    let h = geometry::diameter(pts);
    if pts.len() < 3 || area <= 1e-12 * h * h {
        return Err(Error::Geometry(format!("degenerate polygon (area {area:e})")));
    }
    if pts.len() == 3 {
        let b = geometry::average(pts);
        return Ok((Some(b), vec![[0, 1, 3], [1, 2, 3], [2, 0, 3]]));
    }
    Ok((None, ear_clip(pts)?))
}

fn build(
    cell: usize,
    mut points: Vec<Point>,
    mut ids: Vec<PointId>,
    edge_ids: Vec<usize>,
) -> Result<MacroSubdivision> {
    let n = points.len();
    let (added, tris) = split_polygon(&points)?;
    if let Some(b) = added {
        points.push(b);
        ids.push(PointId::Cell(cell));
    }
    let parent_edges = (0..n)
        .map(|i| ParentEdge { edge: edge_ids[i], points: [i, (i + 1) % n] })
        .collect();
    let simplices = tris.iter().map(|t| t.to_vec()).collect();
    Ok(MacroSubdivision::assemble(2, cell, points, ids, simplices, parent_edges, Vec::new()))
}

/// Subdivision of a standalone CCW polygon; parent ids are loop positions.
pub fn subdivide_polygon(loop_pts: &[Point]) -> Result<MacroSubdivision> {
    let n = loop_pts.len();
    build(0, loop_pts.to_vec(), (0..n).map(PointId::Vertex).collect(), (0..n).collect())
}

/// Subdivision of mesh cell `c` with global point ids.
pub fn subdivide_polygon_cell(mesh: &PolyMesh2D, c: usize) -> Result<MacroSubdivision> {
    let lp = &mesh.cells()[c];
    build(
        c,
        mesh.cell_points(c),
        lp.iter().map(|&v| PointId::Vertex(v)).collect(),
        mesh.cell_edges(c).to_vec(),
    )
    .map_err(|e| match e {
        Error::Geometry(msg) => Error::Geometry(format!("cell {c}: {msg}")),
        e => e,
    })
}
