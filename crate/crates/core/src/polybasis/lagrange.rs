use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::DMatrix;

use super::gauss::gauss_lobatto;
use super::monomial::graded_exponents;
use crate::error::{Error, Result};
use crate::geometry::Point;

pub const MAX_DEGREE: usize = 5;

/// Nodal P_k basis on the reference simplex `0, e_1, .., e_d`.
///
/// Nodes are indexed by multi-indices `α` (`|α| = k`) over the reference vertices.
/// Nodes supported on exactly two vertices sit at Gauss–Lobatto positions along that
/// edge; all other nodes are principal-lattice points `Σ α_i v_i / k`.
#[derive(Debug, Clone)]
pub struct LagrangeBasis {
    pub dim: usize,
    pub degree: usize,
    pub multi_indices: Vec<[u8; 4]>,
    pub nodes: Vec<Point>,
    exponents: Vec<[u8; 3]>,
    /// `φ_j = Σ_i coeffs[(i, j)] y^{e_i}` with `y` the centered coordinates.
    coeffs: DMatrix<f64>,
}

fn reference_vertex(i: usize) -> Point {
    let mut p = [0.0; 3];
    if i > 0 {
        p[i - 1] = 1.0;
    }
    p
}

/// Node position for a multi-index given the simplex vertex coordinates.
pub fn node_position(alpha: &[u8], vertices: &[Point], k: usize, lobatto: &[f64]) -> Point {
    let support: Vec<usize> = (0..alpha.len()).filter(|&i| alpha[i] > 0).collect();
    if support.len() == 2 {
        let (a, b) = (support[0], support[1]);
        let t = lobatto[alpha[b] as usize];
        let mut p = [0.0; 3];
        for c in 0..3 {
            p[c] = (1.0 - t) * vertices[a][c] + t * vertices[b][c];
        }
        p
    } else {
        let mut p = [0.0; 3];
        for &i in &support {
            for c in 0..3 {
                p[c] += alpha[i] as f64 * vertices[i][c];
            }
        }
        for c in p.iter_mut() {
            *c /= k as f64;
        }
        p
    }
}

/// All multi-indices of length `dim + 1` summing to `k`, ordered by support size
/// (vertices, edges, faces, interior) and then lexicographically (descending).
pub fn lattice_multi_indices(dim: usize, k: usize) -> Vec<[u8; 4]> {
    let mut all = Vec::new();
    let mut cur = [0u8; 4];
    fn rec(pos: usize, dim: usize, left: usize, cur: &mut [u8; 4], out: &mut Vec<[u8; 4]>) {
        if pos == dim {
            cur[pos] = left as u8;
            out.push(*cur);
            return;
        }
        for v in (0..=left).rev() {
            cur[pos] = v as u8;
            rec(pos + 1, dim, left - v, cur, out);
        }
        cur[pos] = 0;
    }
    rec(0, dim, k, &mut cur, &mut all);
    all.sort_by_key(|a| a.iter().filter(|&&x| x > 0).count());
    all
}

impl LagrangeBasis {
    fn build(dim: usize, k: usize) -> Result<Self> {
        if !(1..=MAX_DEGREE).contains(&k) {
            return Err(Error::Unsupported(format!("Lagrange degree {k} (supported 1..={MAX_DEGREE})")));
        }
        if !(1..=3).contains(&dim) {
            return Err(Error::Unsupported(format!("Lagrange dimension {dim}")));
        }
        let lobatto = gauss_lobatto(k);
        let verts: Vec<Point> = (0..=dim).map(reference_vertex).collect();
        let multi_indices = lattice_multi_indices(dim, k);
        let nodes: Vec<Point> = multi_indices
            .iter()
            .map(|a| node_position(&a[..=dim], &verts, k, &lobatto))
            .collect();
        let exponents = graded_exponents(dim, k);
        let n = nodes.len();
        debug_assert_eq!(n, exponents.len());
        let vander = DMatrix::from_fn(n, n, |i, j| monomial(&exponents[j], &centered(dim, &nodes[i])));
        let inv = vander
            .try_inverse()
            .ok_or_else(|| Error::Geometry(format!("singular Vandermonde for d={dim} k={k}")))?;
        // V C = I  =>  φ_j(x) = Σ_i C_{ij} m_i(x)
        Ok(LagrangeBasis { dim, degree: k, multi_indices, nodes, exponents, coeffs: inv })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn eval(&self, xi: &Point) -> Vec<f64> {
        let y = centered(self.dim, xi);
        let m: Vec<f64> = self.exponents.iter().map(|e| monomial(e, &y)).collect();
        (0..self.len())
            .map(|j| (0..m.len()).map(|i| self.coeffs[(i, j)] * m[i]).sum())
            .collect()
    }

    /// Reference-coordinate gradients.
    pub fn eval_grad(&self, xi: &Point) -> Vec<Point> {
        let y = centered(self.dim, xi);
        let dm: Vec<Point> = self
            .exponents
            .iter()
            .map(|e| {
                let g = monomial_grad(e, &y);
                [CENTER_SCALE * g[0], CENTER_SCALE * g[1], CENTER_SCALE * g[2]]
            })
            .collect();
        (0..self.len())
            .map(|j| {
                let mut g = [0.0; 3];
                for (i, d) in dm.iter().enumerate() {
                    let c = self.coeffs[(i, j)];
                    for a in 0..3 {
                        g[a] += c * d[a];
                    }
                }
                g
            })
            .collect()
    }
}

const CENTER_SCALE: f64 = 2.0;

/// Coordinates centered at the reference barycenter; keeps the Vandermonde
/// system well conditioned up to degree 5.
fn centered(dim: usize, x: &Point) -> Point {
    let c = 1.0 / (dim as f64 + 1.0);
    let mut y = [0.0; 3];
    for i in 0..dim {
        y[i] = CENTER_SCALE * (x[i] - c);
    }
    y
}

fn monomial(e: &[u8; 3], x: &Point) -> f64 {
    x[0].powi(e[0] as i32) * x[1].powi(e[1] as i32) * x[2].powi(e[2] as i32)
}

fn monomial_grad(e: &[u8; 3], x: &Point) -> Point {
    let p = |i: usize, k: i32| if k < 0 { 0.0 } else { x[i].powi(k) };
    let (a, b, c) = (e[0] as i32, e[1] as i32, e[2] as i32);
    [
        a as f64 * p(0, a - 1) * p(1, b) * p(2, c),
        b as f64 * p(0, a) * p(1, b - 1) * p(2, c),
        c as f64 * p(0, a) * p(1, b) * p(2, c - 1),
    ]
}

type BasisCache = RwLock<HashMap<(usize, usize), Arc<LagrangeBasis>>>;

fn cache() -> &'static BasisCache {
    static CACHE: OnceLock<BasisCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Shared nodal P_k basis on the reference simplex of dimension `dim`.
pub fn lagrange_pk_basis(dim: usize, k: usize) -> Result<Arc<LagrangeBasis>> {
    if let Some(b) = cache().read().unwrap().get(&(dim, k)) {
        return Ok(b.clone());
    }
    let basis = Arc::new(LagrangeBasis::build(dim, k)?);
    let mut w = cache().write().unwrap();
    Ok(w.entry((dim, k)).or_insert(basis).clone())
}
