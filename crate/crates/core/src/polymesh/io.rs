//! Text mesh format.
//!
//! ```text
//! sfvem-mesh <dim> <nv> <ncell> [nface]
//! v x y [z]
//! f i0 i1 ...        (3D only)
//! c ...              (2D: CCW vertex ids; 3D: signed face ids +id / -id)
//! ```
//! Indices are 0-based; `#` starts a comment.

use std::fmt::Write as _;
use std::path::Path;

use super::{Mesh, OrientedFace, Orientation, PolyMesh2D, PolyMesh3D};
use crate::error::{Error, Result};

const MAGIC: &str = "sfvem-mesh";

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse::<T>().map_err(|_| perr(line, format!("invalid {what} `{tok}`")))
}

pub fn render_mesh(mesh: &Mesh) -> String {
    let mut s = String::new();
    match mesh {
        Mesh::Planar(m) => {
            writeln!(s, "{MAGIC} 2 {} {}", m.num_vertices(), m.num_cells()).unwrap();
            for v in m.vertices() {
                writeln!(s, "v {} {}", v[0], v[1]).unwrap();
            }
            for c in m.cells() {
                let ids: Vec<String> = c.iter().map(|v| v.to_string()).collect();
                writeln!(s, "c {}", ids.join(" ")).unwrap();
            }
        }
        Mesh::Solid(m) => {
            writeln!(s, "{MAGIC} 3 {} {} {}", m.num_vertices(), m.num_cells(), m.num_faces()).unwrap();
            for v in m.vertices() {
                writeln!(s, "v {} {} {}", v[0], v[1], v[2]).unwrap();
            }
            for f in m.faces() {
                let ids: Vec<String> = f.iter().map(|v| v.to_string()).collect();
                writeln!(s, "f {}", ids.join(" ")).unwrap();
            }
            for c in m.cells() {
                let ids: Vec<String> = c
                    .iter()
                    .map(|of| format!("{}{}", if of.positive { '+' } else { '-' }, of.face))
                    .collect();
                writeln!(s, "c {}", ids.join(" ")).unwrap();
            }
        }
    }
    s
}

pub fn write_mesh(mesh: &Mesh, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, render_mesh(mesh))?;
    Ok(())
}

pub fn read_mesh(path: impl AsRef<Path>, orientation: Orientation) -> Result<Mesh> {
    let text = std::fs::read_to_string(path)?;
    parse_mesh(&text, orientation)
}

/// Parses the text format; topology problems surface as [`Error::Topology`] naming the
/// first offending entity.
pub fn parse_mesh(text: &str, orientation: Orientation) -> Result<Mesh> {
    let mut header: Option<(usize, usize, usize, usize)> = None;
    let mut vertices: Vec<[f64; 3]> = Vec::new();
    let mut faces: Vec<Vec<usize>> = Vec::new();
    let mut cells2: Vec<Vec<usize>> = Vec::new();
    let mut cells3: Vec<Vec<OrientedFace>> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        let Some((dim, nv, _, nface)) = header else {
            if toks[0] != MAGIC {
                return Err(perr(line, format!("expected `{MAGIC}` header")));
            }
            if toks.len() < 4 {
                return Err(perr(line, "header needs <dim> <nv> <ncell> [nface]"));
            }
            let dim: usize = parse_num(toks[1], line, "dimension")?;
            if dim != 2 && dim != 3 {
                return Err(perr(line, format!("dimension must be 2 or 3, got {dim}")));
            }
            let nv = parse_num(toks[2], line, "vertex count")?;
            let ncell = parse_num(toks[3], line, "cell count")?;
            let nface = match (dim, toks.get(4)) {
                (3, Some(t)) => parse_num(t, line, "face count")?,
                (3, None) => return Err(perr(line, "3D header needs a face count")),
                (_, Some(_)) => return Err(perr(line, "2D header takes no face count")),
                (_, None) => 0,
            };
            if toks.len() > 5 || (dim == 2 && toks.len() > 4) {
                return Err(perr(line, "trailing fields in header"));
            }
            header = Some((dim, nv, ncell, nface));
            continue;
        };
        match toks[0] {
            "v" => {
                if toks.len() != dim + 1 {
                    return Err(perr(line, format!("vertex line needs {dim} coordinates")));
                }
                if !faces.is_empty() || !cells2.is_empty() || !cells3.is_empty() {
                    return Err(perr(line, "vertex lines must precede face and cell lines"));
                }
                let mut p = [0.0f64; 3];
                for d in 0..dim {
                    p[d] = parse_num(toks[d + 1], line, "coordinate")?;
                    if !p[d].is_finite() {
                        return Err(perr(line, "non-finite coordinate"));
                    }
                }
                vertices.push(p);
            }
            "f" => {
                if dim != 3 {
                    return Err(perr(line, "face lines are only valid in 3D"));
                }
                if !cells3.is_empty() {
                    return Err(perr(line, "face lines must precede cell lines"));
                }
                let ids = toks[1..]
                    .iter()
                    .map(|t| parse_num::<usize>(t, line, "vertex id"))
                    .collect::<Result<Vec<_>>>()?;
                if let Some(&bad) = ids.iter().find(|&&v| v >= nv) {
                    return Err(perr(line, format!("vertex id {bad} out of range (nv = {nv})")));
                }
                if ids.len() < 3 {
                    return Err(perr(line, "face needs at least 3 vertices"));
                }
                faces.push(ids);
            }
            "c" => {
                if dim == 2 {
                    let ids = toks[1..]
                        .iter()
                        .map(|t| parse_num::<usize>(t, line, "vertex id"))
                        .collect::<Result<Vec<_>>>()?;
                    if let Some(&bad) = ids.iter().find(|&&v| v >= nv) {
                        return Err(perr(line, format!("vertex id {bad} out of range (nv = {nv})")));
                    }
                    cells2.push(ids);
                } else {
                    let mut cf = Vec::with_capacity(toks.len() - 1);
                    for t in &toks[1..] {
                        let (positive, rest) = match t.as_bytes().first() {
                            Some(b'+') => (true, &t[1..]),
                            Some(b'-') => (false, &t[1..]),
                            _ => return Err(perr(line, format!("face reference `{t}` needs a +/- sign"))),
                        };
                        let face: usize = parse_num(rest, line, "face id")?;
                        if face >= nface {
                            return Err(perr(line, format!("face id {face} out of range (nface = {nface})")));
                        }
                        cf.push(OrientedFace { face, positive });
                    }
                    cells3.push(cf);
                }
            }
            other => return Err(perr(line, format!("unknown record `{other}`"))),
        }
    }
    let Some((dim, nv, ncell, nface)) = header else {
        return Err(perr(0, "missing header"));
    };
    if vertices.len() != nv {
        return Err(perr(0, format!("header declares {nv} vertices, found {}", vertices.len())));
    }
    if dim == 2 {
        if cells2.len() != ncell {
            return Err(perr(0, format!("header declares {ncell} cells, found {}", cells2.len())));
        }
        let v2 = vertices.iter().map(|p| [p[0], p[1]]).collect();
        Ok(Mesh::Planar(PolyMesh2D::new(v2, cells2, orientation)?))
    } else {
        if faces.len() != nface {
            return Err(perr(0, format!("header declares {nface} faces, found {}", faces.len())));
        }
        if cells3.len() != ncell {
            return Err(perr(0, format!("header declares {ncell} cells, found {}", cells3.len())));
        }
        Ok(Mesh::Solid(PolyMesh3D::new(vertices, faces, cells3, orientation)?))
    }
}
