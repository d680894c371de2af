use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Mesh, OrientedFace, Orientation, PolyMesh2D, PolyMesh3D};
use crate::geometry::{self, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Pentagon,
    Hexagon,
    Cube,
}

impl Family {
    pub fn dim(self) -> usize {
        match self {
            Family::Pentagon | Family::Hexagon => 2,
            Family::Cube => 3,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Pentagon => "pentagon",
            Family::Hexagon => "hexagon",
            Family::Cube => "cube",
        })
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pentagon" => Ok(Family::Pentagon),
            "hexagon" => Ok(Family::Hexagon),
            "cube" => Ok(Family::Cube),
            _ => Err(format!("unknown mesh family `{s}` (pentagon | hexagon | cube)")),
        }
    }
}

/// Vertex and cell tables of a 2D unit cell on `[0, 1]²`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitCell {
    pub vertices: Vec<[f64; 2]>,
    pub cells: Vec<Vec<usize>>,
}

/// One member of a mesh family: level `ℓ` tiles the unit square (cube) with
/// `N = 2^(ℓ-1)` copies of the unit cell per direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeshFamily {
    pub family: Family,
    pub level: usize,
}

impl MeshFamily {
    pub fn new(family: Family, level: usize) -> Self {
        assert!(level >= 1, "mesh level starts at 1");
        MeshFamily { family, level }
    }

    pub fn copies_per_direction(&self) -> usize {
        1 << (self.level - 1)
    }

    pub fn unit_cell(&self) -> Option<UnitCell> {
        match self.family {
            Family::Pentagon => Some(pentagon_unit_cell()),
            Family::Hexagon => Some(hexagon_unit_cell()),
            Family::Cube => None,
        }
    }

    pub fn generate(&self) -> Mesh {
        match self.family {
            Family::Pentagon => generate_pentagon_mesh(self.level).into(),
            Family::Hexagon => generate_hexagon_mesh(self.level).into(),
            Family::Cube => generate_cube_mesh(self.level).into(),
        }
    }
}

fn pentagon_unit_cell() -> UnitCell {
    let vertices = vec![
        [0.0, 0.0],
        [0.5, 0.0],
        [1.0, 0.0],
        [0.0, 0.5],
        [0.25, 0.25],
        [0.5, 0.5],
        [0.75, 0.75],
        [1.0, 0.5],
        [0.0, 1.0],
        [0.5, 1.0],
        [1.0, 1.0],
    ];
    let cells = vec![
        vec![0, 1, 5, 4, 3],
        vec![1, 2, 7, 6, 5],
        vec![3, 4, 5, 9, 8],
        vec![5, 6, 7, 10, 9],
    ];
    UnitCell { vertices, cells }
}

fn hexagon_unit_cell() -> UnitCell {
    let vertices = vec![
        [0.0, 0.0],       // 0
        [0.5, 0.0],       // 1
        [1.0, 0.0],       // 2
        [0.0, 0.5],       // 3
        [1.0, 0.5],       // 4
        [0.0, 1.0],       // 5
        [0.5, 1.0],       // 6
        [1.0, 1.0],       // 7
        [0.4444, 0.1429], // 8  a
        [0.2222, 0.2222], // 9  b
        [0.1818, 0.4444], // 10 c
        [0.7273, 0.2857], // 11 d
        [0.8182, 0.5],    // 12 e
        [0.5556, 0.5],    // 13 f
        [0.4444, 0.8571], // 14 g
        [0.7273, 0.6667], // 15 h
        [0.2222, 0.6667], // 16 i
    ];
    let cells = vec![
        vec![0, 1, 8, 9, 10, 3],
        vec![1, 2, 4, 12, 11, 8],
        vec![9, 8, 13, 14, 16, 10],
        vec![13, 8, 11, 12, 15, 14],
        vec![12, 4, 7, 6, 14, 15],
        vec![3, 10, 16, 14, 6, 5],
    ];
    UnitCell { vertices, cells }
}

fn tile_unit_cell(unit: &UnitCell, level: usize) -> PolyMesh2D {
    assert!(level >= 1, "mesh level starts at 1");
    let n = 1usize << (level - 1);
    let nf = n as f64;
    // unit-cell loops are normalized to counter-clockwise once
    let unit_cells: Vec<Vec<usize>> = unit
        .cells
        .iter()
        .map(|lp| {
            let pts: Vec<Point> = lp.iter().map(|&v| [unit.vertices[v][0], unit.vertices[v][1], 0.0]).collect();
            let mut lp = lp.clone();
            if geometry::shoelace(&pts) < 0.0 {
                lp.reverse();
            }
            lp
        })
        .collect();
    let mut vertices: Vec<[f64; 2]> = Vec::new();
    let mut index: HashMap<(u64, u64), usize> = HashMap::new();
    let mut cells = Vec::with_capacity(n * n * unit.cells.len());
    for iy in 0..n {
        for ix in 0..n {
            let local: Vec<usize> = unit
                .vertices
                .iter()
                .map(|p| {
                    let x = (ix as f64 + p[0]) / nf;
                    let y = (iy as f64 + p[1]) / nf;
                    *index.entry((x.to_bits(), y.to_bits())).or_insert_with(|| {
                        vertices.push([x, y]);
                        vertices.len() - 1
                    })
                })
                .collect();
            for lp in &unit_cells {
                cells.push(lp.iter().map(|&v| local[v]).collect());
            }
        }
    }
    PolyMesh2D::new(vertices, cells, Orientation::Fix).expect("unit-cell tiling is a valid mesh")
}

/// Tiling of `(0,1)²` by the four-pentagon unit cell.
pub fn generate_pentagon_mesh(level: usize) -> PolyMesh2D {
    tile_unit_cell(&pentagon_unit_cell(), level)
}

/// Tiling of `(0,1)²` by the six-hexagon unit cell.
pub fn generate_hexagon_mesh(level: usize) -> PolyMesh2D {
    tile_unit_cell(&hexagon_unit_cell(), level)
}

/// `N³` axis-aligned cubes on `(0,1)³`, `N = 2^(level-1)`.
pub fn generate_cube_mesh(level: usize) -> PolyMesh3D {
    assert!(level >= 1, "mesh level starts at 1");
    let n = 1usize << (level - 1);
    let nf = n as f64;
    let vid = |i: usize, j: usize, l: usize| (l * (n + 1) + j) * (n + 1) + i;
    let mut vertices = Vec::with_capacity((n + 1).pow(3));
    for l in 0..=n {
        for j in 0..=n {
            for i in 0..=n {
                vertices.push([i as f64 / nf, j as f64 / nf, l as f64 / nf]);
            }
        }
    }
    let mut faces = Vec::with_capacity(3 * n * n * (n + 1));
    // x-normal faces at x = i
    let xf = |i: usize, j: usize, l: usize| (i * n + j) * n + l;
    for i in 0..=n {
        for j in 0..n {
            for l in 0..n {
                faces.push(vec![vid(i, j, l), vid(i, j + 1, l), vid(i, j + 1, l + 1), vid(i, j, l + 1)]);
            }
        }
    }
    let y0 = faces.len();
    let yf = |i: usize, j: usize, l: usize| y0 + (j * n + i) * n + l;
    for j in 0..=n {
        for i in 0..n {
            for l in 0..n {
                faces.push(vec![vid(i, j, l), vid(i, j, l + 1), vid(i + 1, j, l + 1), vid(i + 1, j, l)]);
            }
        }
    }
    let z0 = faces.len();
    let zf = |i: usize, j: usize, l: usize| z0 + (l * n + i) * n + j;
    for l in 0..=n {
        for i in 0..n {
            for j in 0..n {
                faces.push(vec![vid(i, j, l), vid(i + 1, j, l), vid(i + 1, j + 1, l), vid(i, j + 1, l)]);
            }
        }
    }
    let mut cells = Vec::with_capacity(n * n * n);
    for l in 0..n {
        for j in 0..n {
            for i in 0..n {
                let of = |face, positive| OrientedFace { face, positive };
                cells.push(vec![
                    of(xf(i, j, l), false),
                    of(xf(i + 1, j, l), true),
                    of(yf(i, j, l), false),
                    of(yf(i, j + 1, l), true),
                    of(zf(i, j, l), false),
                    of(zf(i, j, l + 1), true),
                ]);
            }
        }
    }
    PolyMesh3D::new(vertices, faces, cells, Orientation::Strict).expect("cube grid is a valid mesh")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pentagon_counts_and_areas() {
        let m = generate_pentagon_mesh(1);
        assert_eq!(m.num_vertices(), 11);
        assert_eq!(m.num_cells(), 4);
        assert!((m.cell_area(0) - 0.1875).abs() < 1e-15);
        let total: f64 = (0..4).map(|c| m.cell_area(c)).sum();
        assert!((total - 1.0).abs() < 1e-15);
        assert_eq!(generate_pentagon_mesh(2).num_cells(), 16);
    }

    #[test]
    fn hexagon_counts_and_areas() {
        let m = generate_hexagon_mesh(1);
        assert_eq!(m.num_vertices(), 17);
        assert_eq!(m.num_cells(), 6);
        assert!((0..6).all(|c| m.cell_area(c) > 0.0));
        assert!(m.cells().iter().all(|c| c.len() == 6));
        let total: f64 = (0..6).map(|c| m.cell_area(c)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(generate_hexagon_mesh(2).num_cells(), 24);
    }

    #[test]
    fn cube_counts() {
        let m = generate_cube_mesh(1);
        assert_eq!((m.num_vertices(), m.num_faces(), m.num_cells()), (8, 6, 1));
        let m = generate_cube_mesh(2);
        assert_eq!((m.num_vertices(), m.num_faces(), m.num_cells()), (27, 36, 8));
        assert_eq!(generate_cube_mesh(3).num_cells(), 64);
        assert!((0..8).all(|c| (m.cell_volume(c) - 0.125).abs() < 1e-15));
    }

    #[test]
    fn h_halves_per_level() {
        for fam in [Family::Pentagon, Family::Hexagon, Family::Cube] {
            let hs: Vec<f64> = (1..=4).map(|l| MeshFamily::new(fam, l).generate().h()).collect();
            for w in hs.windows(2) {
                assert!((w[1] - w[0] / 2.0).abs() <= 1e-14 * w[0], "{fam}: {hs:?}");
            }
        }
    }

    #[test]
    fn family_parse() {
        assert_eq!("cube".parse::<Family>().unwrap(), Family::Cube);
        assert!("triangle".parse::<Family>().is_err());
    }
}
