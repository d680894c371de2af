use std::collections::HashMap;

use super::{Mesh, PolyMesh2D, PolyMesh3D};
use crate::geometry::{self, Point};
use crate::report::ValidationReport;

const AREA_SUM_TOL: f64 = 1e-12;
const PLANARITY_TOL: f64 = 1e-10;
const VOLUME_TOL: f64 = 1e-10;
const DUPLICATE_TOL: f64 = 1e-14;

pub fn validate_mesh(mesh: &Mesh) -> ValidationReport {
    match mesh {
        Mesh::Planar(m) => validate_mesh_2d(m),
        Mesh::Solid(m) => validate_mesh_3d(m),
    }
}

/// Closed-segment intersection test in the xy-plane.
pub fn segments_intersect(p1: &Point, p2: &Point, q1: &Point, q2: &Point) -> bool {
    let d1 = geometry::orient2d(q1, q2, p1);
    let d2 = geometry::orient2d(q1, q2, p2);
    let d3 = geometry::orient2d(p1, p2, q1);
    let d4 = geometry::orient2d(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    let on_seg = |a: &Point, b: &Point, p: &Point| {
        p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
    };
    (d1 == 0.0 && on_seg(q1, q2, p1))
        || (d2 == 0.0 && on_seg(q1, q2, p2))
        || (d3 == 0.0 && on_seg(p1, p2, q1))
        || (d4 == 0.0 && on_seg(p1, p2, q2))
}

/// First pair of non-adjacent loop edges that touch, if any.
fn loop_self_intersection(pts: &[Point]) -> Option<(usize, usize)> {
    let n = pts.len();
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            if segments_intersect(&pts[i], &pts[(i + 1) % n], &pts[j], &pts[(j + 1) % n]) {
                return Some((i, j));
            }
        }
    }
    None
}

fn duplicate_vertices(points: &[Point]) -> Option<(usize, usize)> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a][0].total_cmp(&points[b][0]));
    for (pos, &a) in order.iter().enumerate() {
        for &b in &order[pos + 1..] {
            if points[b][0] - points[a][0] > DUPLICATE_TOL {
                break;
            }
            if geometry::dist(&points[a], &points[b]) <= DUPLICATE_TOL {
                return Some((a.min(b), a.max(b)));
            }
        }
    }
    None
}

pub fn validate_mesh_2d(m: &PolyMesh2D) -> ValidationReport {
    let mut r = ValidationReport::new();
    let pts: Vec<Point> = (0..m.num_vertices()).map(|v| m.point(v)).collect();

    r.record(
        "distinct-vertices",
        "no two vertices coincide",
        duplicate_vertices(&pts).map(|(a, b)| (format!("vertices {a}, {b}"), "coincident vertices".into())),
    );

    let bad = m.cells().iter().enumerate().find(|(_, lp)| {
        let mut s = (*lp).clone();
        s.sort_unstable();
        s.dedup();
        s.len() < 3 || s.len() != lp.len()
    });
    r.record(
        "cell-loops",
        "every cell has >= 3 distinct vertices",
        bad.map(|(c, _)| (format!("cell {c}"), "fewer than 3 distinct vertices".into())),
    );

    let bad = (0..m.num_cells()).find(|&c| m.cell_area(c) <= 0.0);
    r.record(
        "orientation",
        "every cell loop is counter-clockwise with positive area",
        bad.map(|c| (format!("cell {c}"), format!("area {:e}", m.cell_area(c)))),
    );

    let bad = m.edges().iter().enumerate().find(|(_, e)| e.users.is_empty() || e.users.len() > 2);
    r.record(
        "edge-manifold",
        "every edge is shared by 1 or 2 cells",
        bad.map(|(i, e)| (format!("edge {i} {:?}", e.vertices), format!("{} cells", e.users.len()))),
    );

    // interior edges must be traversed in opposite directions by their two cells
    let mut dir: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (c, lp) in m.cells().iter().enumerate() {
        for i in 0..lp.len() {
            dir.entry((lp[i], lp[(i + 1) % lp.len()])).or_default().push(c);
        }
    }
    let mut bad: Vec<_> = dir.iter().filter(|(_, cs)| cs.len() > 1).map(|(k, cs)| (*k, cs.clone())).collect();
    bad.sort();
    r.record(
        "edge-direction",
        "shared edges are traversed oppositely",
        bad.first().map(|(k, cs)| (format!("edge {k:?}"), format!("same direction in cells {cs:?}"))),
    );

    let bad = (0..m.num_cells()).find_map(|c| loop_self_intersection(&m.cell_points(c)).map(|p| (c, p)));
    r.record(
        "simple-loops",
        "no cell loop self-intersects",
        bad.map(|(c, (i, j))| (format!("cell {c}"), format!("loop edges {i} and {j} intersect"))),
    );

    let bad = crossing_edges(m);
    r.record(
        "edge-crossings",
        "edges of different cells only meet at shared vertices",
        bad.map(|(a, b)| (format!("edges {a}, {b}"), "edges cross".into())),
    );

    // Green's theorem over boundary edges, oriented as in their single cell
    let cell_sum: f64 = (0..m.num_cells()).map(|c| m.cell_area(c)).sum();
    let mut domain = 0.0;
    for (c, lp) in m.cells().iter().enumerate() {
        for (i, &e) in m.cell_edges(c).iter().enumerate() {
            if m.boundary_edge_flags()[e] {
                let (p, q) = (m.point(lp[i]), m.point(lp[(i + 1) % lp.len()]));
                domain += 0.5 * (p[0] * q[1] - q[0] * p[1]);
            }
        }
    }
    let rel = (cell_sum - domain).abs() / domain.abs().max(f64::MIN_POSITIVE);
    r.record(
        "area-sum",
        &format!("cell areas sum to the domain area {domain} (rel. dev. {rel:.1e})"),
        (rel > AREA_SUM_TOL || domain <= 0.0)
            .then(|| ("mesh".to_string(), format!("cells sum to {cell_sum}, boundary encloses {domain}"))),
    );
    r
}

/// Finds two edges (sharing no vertex) that intersect, using a uniform bucket grid.
fn crossing_edges(m: &PolyMesh2D) -> Option<(usize, usize)> {
    let edges = m.edges();
    if edges.is_empty() {
        return None;
    }
    let pts: Vec<Point> = (0..m.num_vertices()).map(|v| m.point(v)).collect();
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in &pts {
        for d in 0..2 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    let nb = ((edges.len() as f64).sqrt().ceil() as usize).max(1);
    let cell = |x: f64, d: usize| -> usize {
        let w = (hi[d] - lo[d]).max(f64::MIN_POSITIVE);
        (((x - lo[d]) / w * nb as f64) as usize).min(nb - 1)
    };
    let mut buckets: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (i, e) in edges.iter().enumerate() {
        let (a, b) = (&pts[e.vertices[0]], &pts[e.vertices[1]]);
        for bx in cell(a[0].min(b[0]), 0)..=cell(a[0].max(b[0]), 0) {
            for by in cell(a[1].min(b[1]), 1)..=cell(a[1].max(b[1]), 1) {
                buckets.entry((bx, by)).or_default().push(i);
            }
        }
    }
    let mut keys: Vec<_> = buckets.keys().copied().collect();
    keys.sort_unstable();
    for k in keys {
        let list = &buckets[&k];
        for (s, &i) in list.iter().enumerate() {
            for &j in &list[s + 1..] {
                let (ei, ej) = (&edges[i].vertices, &edges[j].vertices);
                if ei.iter().any(|v| ej.contains(v)) {
                    continue;
                }
                if segments_intersect(&pts[ei[0]], &pts[ei[1]], &pts[ej[0]], &pts[ej[1]]) {
                    return Some((i.min(j), i.max(j)));
                }
            }
        }
    }
    None
}

/// In-plane orthonormal frame `(e1, e2, n)` of a planar polygon.
pub fn face_frame(pts: &[Point]) -> (Point, Point, Point) {
    let nn = geometry::newell_normal(pts);
    let n = geometry::scale(&nn, 1.0 / geometry::norm(&nn));
    let d = geometry::sub(&pts[1], &pts[0]);
    let d = geometry::sub(&d, &geometry::scale(&n, geometry::dot(&d, &n)));
    let e1 = geometry::scale(&d, 1.0 / geometry::norm(&d));
    let e2 = geometry::cross(&n, &e1);
    (e1, e2, n)
}

pub fn validate_mesh_3d(m: &PolyMesh3D) -> ValidationReport {
    let mut r = ValidationReport::new();

    r.record(
        "distinct-vertices",
        "no two vertices coincide",
        duplicate_vertices(m.vertices()).map(|(a, b)| (format!("vertices {a}, {b}"), "coincident vertices".into())),
    );

    let mut planar_fail = None;
    let mut simple_fail = None;
    for f in 0..m.num_faces() {
        let pts = m.face_points(f);
        let nn = geometry::newell_normal(&pts);
        let diam = geometry::diameter(&pts);
        if geometry::norm(&nn) <= 1e-14 * diam * diam {
            planar_fail.get_or_insert((format!("face {f}"), "degenerate face".to_string()));
            continue;
        }
        let (e1, e2, n) = face_frame(&pts);
        let c = geometry::average(&pts);
        let dev = pts
            .iter()
            .map(|p| geometry::dot(&geometry::sub(p, &c), &n).abs())
            .fold(0.0, f64::max);
        if dev > PLANARITY_TOL * diam && planar_fail.is_none() {
            planar_fail = Some((format!("face {f}"), format!("vertex off-plane by {dev:e} (diameter {diam:e})")));
        }
        let flat: Vec<Point> = pts
            .iter()
            .map(|p| {
                let d = geometry::sub(p, &c);
                [geometry::dot(&d, &e1), geometry::dot(&d, &e2), 0.0]
            })
            .collect();
        if simple_fail.is_none() {
            if let Some((i, j)) = loop_self_intersection(&flat) {
                simple_fail = Some((format!("face {f}"), format!("loop edges {i} and {j} intersect")));
            }
        }
    }
    r.record("face-planarity", "every face is planar", planar_fail);
    r.record("face-simple", "every face loop is simple", simple_fail);

    let bad = (0..m.num_faces()).find(|&f| m.face_cells(f).is_empty() || m.face_cells(f).len() > 2);
    r.record(
        "face-manifold",
        "every face belongs to 1 or 2 cells",
        bad.map(|f| (format!("face {f}"), format!("{} cells", m.face_cells(f).len()))),
    );

    // shared faces must be seen with opposite signs
    let mut signs: Vec<Vec<bool>> = vec![Vec::new(); m.num_faces()];
    for cf in m.cells() {
        for of in cf {
            signs[of.face].push(of.positive);
        }
    }
    let bad = signs.iter().position(|s| s.len() == 2 && s[0] == s[1]);
    r.record(
        "face-orientation",
        "shared faces have opposite orientation in their two cells",
        bad.map(|f| (format!("face {f}"), "same orientation in both cells".into())),
    );

    // watertightness: each directed edge appears once, its reverse once
    let mut bad = None;
    for (c, cf) in m.cells().iter().enumerate() {
        let mut count: HashMap<(usize, usize), i32> = HashMap::new();
        for of in cf {
            let lp = &m.faces()[of.face];
            let n = lp.len();
            for i in 0..n {
                let (a, b) = (lp[i], lp[(i + 1) % n]);
                let (a, b) = if of.positive { (a, b) } else { (b, a) };
                *count.entry((a, b)).or_insert(0) += 1;
            }
        }
        let mut keys: Vec<_> = count.keys().copied().collect();
        keys.sort_unstable();
        if let Some(k) = keys.into_iter().find(|&(a, b)| count[&(a, b)] != 1 || count.get(&(b, a)) != Some(&1)) {
            bad = Some((format!("cell {c}"), format!("edge {k:?} is not closed consistently")));
            break;
        }
    }
    r.record("cell-watertight", "every cell's signed faces close up", bad);

    // divergence volume vs fan tetrahedralization from the vertex average
    let mut bad = None;
    let mut total = 0.0;
    for (c, cf) in m.cells().iter().enumerate() {
        let vol = m.cell_volume(c);
        total += vol;
        let apex = geometry::average(&m.cell_points(c));
        let mut tet = 0.0;
        for of in cf {
            let lp = &m.faces()[of.face];
            for i in 1..lp.len() - 1 {
                let (a, b, cc) = (m.point(lp[0]), m.point(lp[i]), m.point(lp[i + 1]));
                let v = geometry::simplex_volume(3, &[apex, a, b, cc]);
                tet += if of.positive { v } else { -v };
            }
        }
        if vol <= 0.0 || (vol - tet).abs() > VOLUME_TOL * vol.abs() {
            bad = Some((format!("cell {c}"), format!("divergence volume {vol:e}, tetrahedralized {tet:e}")));
            break;
        }
    }
    r.record(
        "cell-volume",
        &format!("cell volumes positive and consistent (total {total})"),
        bad,
    );
    r
}
