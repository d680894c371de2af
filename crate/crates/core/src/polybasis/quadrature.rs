use super::gauss::gauss_legendre;
use crate::error::{Error, Result};
use crate::geometry::Point;

/// Highest polynomial exactness served by [`simplex_quadrature`].
pub const MAX_EXACTNESS: usize = 24;

/// Quadrature rule on the reference simplex with vertices `0, e_1, .., e_d`.
#[derive(Debug, Clone)]
pub struct SimplexQuadrature {
    pub dim: usize,
    /// Reference coordinates of the points; the barycentric weight of vertex 0 is
    /// `1 - Σ ξ_i`.
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    pub exactness: usize,
}

impl SimplexQuadrature {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Barycentric coordinates of point `i` (first entry belongs to the origin vertex).
    pub fn barycentric(&self, i: usize) -> [f64; 4] {
        let p = &self.points[i];
        let mut b = [0.0; 4];
        b[0] = 1.0 - p[..self.dim].iter().sum::<f64>();
        b[1..=self.dim].copy_from_slice(&p[..self.dim]);
        b
    }

    pub fn reference_measure(dim: usize) -> f64 {
        match dim {
            1 => 1.0,
            2 => 0.5,
            3 => 1.0 / 6.0,
            _ => panic!("unsupported dimension {dim}"),
        }
    }
}

/// Collapsed (Duffy) tensor-product Gauss rule on the reference simplex exact for
/// polynomials of total degree `<= exactness`.
pub fn simplex_quadrature(dim: usize, exactness: usize) -> Result<SimplexQuadrature> {
    if exactness > MAX_EXACTNESS {
        return Err(Error::Unsupported(format!(
            "quadrature exactness {exactness} exceeds {MAX_EXACTNESS}"
        )));
    }
    if !(1..=3).contains(&dim) {
        return Err(Error::Unsupported(format!("quadrature dimension {dim}")));
    }
    let npts = |deg: usize| deg / 2 + 1;
    let mut points = Vec::new();
    let mut weights = Vec::new();
    match dim {
        1 => {
            let (x, w) = gauss_legendre(npts(exactness));
            for (x, w) in x.into_iter().zip(w) {
                points.push([x, 0.0, 0.0]);
                weights.push(w);
            }
        }
        2 => {
            // x = u, y = (1 - u) v, Jacobian (1 - u)
            let (xu, wu) = gauss_legendre(npts(exactness + 1));
            let (xv, wv) = gauss_legendre(npts(exactness));
            for (u, wu) in xu.iter().zip(&wu) {
                for (v, wv) in xv.iter().zip(&wv) {
                    points.push([*u, (1.0 - u) * v, 0.0]);
                    weights.push(wu * wv * (1.0 - u));
                }
            }
        }
        _ => {
            // x = u, y = (1-u) v, z = (1-u)(1-v) w, Jacobian (1-u)^2 (1-v)
            let (xu, wu) = gauss_legendre(npts(exactness + 2));
            let (xv, wv) = gauss_legendre(npts(exactness + 1));
            let (xw, ww) = gauss_legendre(npts(exactness));
            for (u, wu) in xu.iter().zip(&wu) {
                for (v, wv) in xv.iter().zip(&wv) {
                    for (w, ww) in xw.iter().zip(&ww) {
                        points.push([*u, (1.0 - u) * v, (1.0 - u) * (1.0 - v) * w]);
                        weights.push(wu * wv * ww * (1.0 - u) * (1.0 - u) * (1.0 - v));
                    }
                }
            }
        }
    }
    Ok(SimplexQuadrature { dim, points, weights, exactness })
}
