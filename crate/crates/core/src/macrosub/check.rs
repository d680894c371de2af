use std::collections::{HashMap, HashSet};

use super::{FacetParent, MacroSubdivision, SHAPE_TOL};
use crate::geometry::{self, Point};
use crate::report::ValidationReport;

fn key(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

fn pair(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Signed distance-like quantity of `p` relative to the hyperplane through `facet`.
fn side(dim: usize, facet: &[Point], p: &Point) -> f64 {
    let mut v = facet.to_vec();
    v.push(*p);
    geometry::simplex_volume(dim, &v)
}

fn parent_measure(s: &MacroSubdivision) -> f64 {
    if s.dim == 2 {
        let lp: Vec<Point> = s.parent_edges.iter().map(|e| s.points[e.points[0]]).collect();
        geometry::shoelace(&lp)
    } else {
        let o = s.points[0];
        s.parent_faces
            .iter()
            .flat_map(|f| &f.triangles)
            .map(|t| {
                let rel = |i: usize| geometry::sub(&s.points[t[i]], &o);
                let (a, b, c) = (&rel(0), &rel(1), &rel(2));
                geometry::dot(a, &geometry::cross(b, c)) / 6.0
            })
            .sum()
    }
}

/// Checks a subdivision against the structural requirements of the macro space.
///
/// Entries: `partition`, `conforming`, `edges-unsplit`, `min-simplices`,
/// `internal-facets`, `shape`, `bubble-support`.
pub fn check_constraints(s: &MacroSubdivision) -> ValidationReport {
    let d = s.dim;
    let mut r = ValidationReport::new();
    let vols: Vec<f64> = (0..s.simplices.len()).map(|t| geometry::simplex_volume(d, &s.simplex_points(t))).collect();

    let measure = parent_measure(s);
    let total: f64 = vols.iter().sum();
    let rel = (total - measure).abs() / measure.abs();
    let neg = vols.iter().position(|&v| v <= 0.0);
    let fail = if let Some(t) = neg {
        Some((format!("simplex {t}"), format!("non-positive measure {:e}", vols[t])))
    } else if rel > 1e-12 {
        Some(("cell".into(), format!("sum of measures {total} vs cell {measure} (rel {rel:e})")))
    } else {
        None
    };
    r.record("partition", &format!("measures sum to the cell (rel {rel:.1e})"), fail);

    let boundary: HashSet<Vec<usize>> = s.boundary_facets().into_iter().map(key).collect();
    let mut facets: HashMap<Vec<usize>, Vec<(usize, usize)>> = HashMap::new();
    for (t, simp) in s.simplices.iter().enumerate() {
        for skip in 0..=d {
            let f: Vec<usize> = (0..=d).filter(|&j| j != skip).map(|j| simp[j]).collect();
            facets.entry(key(f)).or_default().push((t, simp[skip]));
        }
    }
    let mut fail = None;
    let mut sorted: Vec<_> = facets.iter().collect();
    sorted.sort();
    for (f, users) in &sorted {
        let on_boundary = boundary.contains(*f);
        let msg = match (users.len(), on_boundary) {
            (1, true) => None,
            (1, false) => Some("hanging facet inside the cell".to_string()),
            (2, false) => {
                let fp: Vec<Point> = f.iter().map(|&i| s.points[i]).collect();
                let a = side(d, &fp, &s.points[users[0].1]);
                let b = side(d, &fp, &s.points[users[1].1]);
                (a * b >= 0.0).then(|| "neighbours on the same side".to_string())
            }
            (n, _) => Some(format!("shared by {n} simplices")),
        };
        if let Some(m) = msg {
            fail = Some((format!("facet {f:?}"), m));
            break;
        }
    }
    if fail.is_none() {
        if let Some(b) = boundary.iter().find(|b| !facets.contains_key(*b)) {
            fail = Some((format!("facet {b:?}"), "boundary facet not covered".into()));
        }
    }
    r.record("conforming", "facets match pairwise; boundary facets covered once", fail);

    let mut fail = None;
    if d == 2 {
        for (i, e) in s.parent_edges.iter().enumerate() {
            let n = facets.get(&key(e.points.to_vec())).map_or(0, |u| u.len());
            if n != 1 {
                fail = Some((format!("parent edge {i}"), "edge is split or missing".into()));
                break;
            }
        }
    } else {
        'faces: for pf in &s.parent_faces {
            let mut count: HashMap<(usize, usize), usize> = HashMap::new();
            for t in &pf.triangles {
                for j in 0..3 {
                    *count.entry(pair(t[j], t[(j + 1) % 3])).or_default() += 1;
                }
            }
            let n = pf.boundary.len();
            for j in 0..n {
                if count.get(&pair(pf.boundary[j], pf.boundary[(j + 1) % n])).copied() != Some(1) {
                    fail = Some((format!("face {}", pf.face), format!("edge {j} is split or missing")));
                    break 'faces;
                }
            }
        }
    }
    r.record("edges-unsplit", "every parent edge is a single sub-edge", fail);

    let fail = if d == 2 {
        (s.simplices.len() < 2).then(|| ("cell".to_string(), format!("{} triangle(s)", s.simplices.len())))
    } else {
        s.parent_faces
            .iter()
            .find(|f| f.triangles.len() < 2)
            .map(|f| (format!("face {}", f.face), format!("{} triangle(s)", f.triangles.len())))
    };
    r.record("min-simplices", "at least two sub-simplices per parent entity", fail);

    let need = if d == 2 { 1 } else { 2 };
    let fail = (0..s.simplices.len())
        .find(|&t| s.facet_parents[t].iter().filter(|p| **p == FacetParent::Internal).count() < need)
        .map(|t| (format!("simplex {t}"), format!("fewer than {need} internal facet(s)")));
    r.record("internal-facets", "every simplex touches the interior", fail);

    let hk = geometry::diameter(&s.points);
    let floor = SHAPE_TOL * hk.powi(d as i32);
    let worst = vols.iter().cloned().fold(f64::INFINITY, f64::min);
    let fail = vols
        .iter()
        .position(|&v| v < floor)
        .map(|t| (format!("simplex {t}"), format!("measure {:e} below {floor:e}", vols[t])));
    r.record("shape", &format!("min measure / h^d = {:.3e}", worst / hk.powi(d as i32)), fail);

    let mut bedges: HashSet<(usize, usize)> = HashSet::new();
    for f in s.boundary_facets() {
        for a in 0..f.len() {
            for b in a + 1..f.len() {
                bedges.insert(pair(f[a], f[b]));
            }
        }
    }
    let fail = s
        .simplices
        .iter()
        .position(|simp| {
            !(0..=d).any(|a| (a + 1..=d).any(|b| !bedges.contains(&pair(simp[a], simp[b]))))
        })
        .map(|t| (format!("simplex {t}"), "all edges on the cell boundary; no interior bubble".into()));
    r.record("bubble-support", "every simplex has an interior edge", fail);
    r
}
