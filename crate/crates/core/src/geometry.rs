//! Small vector helpers. Points are stored with three components; 2D data keeps `z = 0`.

pub type Point = [f64; 3];

#[inline]
pub fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add(a: &Point, b: &Point) -> Point {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn scale(a: &Point, s: f64) -> Point {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross(a: &Point, b: &Point) -> Point {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm(a: &Point) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: &Point, b: &Point) -> f64 {
    norm(&sub(a, b))
}

/// Twice the signed area of triangle (a, b, c) in the xy-plane.
#[inline]
pub fn orient2d(a: &Point, b: &Point, c: &Point) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// Signed measure of a simplex given by `dim + 1` vertices (`dim` in 1..=3).
pub fn simplex_volume(dim: usize, v: &[Point]) -> f64 {
    match dim {
        1 => v[1][0] - v[0][0],
        2 => 0.5 * orient2d(&v[0], &v[1], &v[2]),
        3 => {
            let (a, b, c) = (sub(&v[1], &v[0]), sub(&v[2], &v[0]), sub(&v[3], &v[0]));
            dot(&a, &cross(&b, &c)) / 6.0
        }
        _ => panic!("unsupported dimension {dim}"),
    }
}

/// Signed shoelace area of a closed 2D loop.
pub fn shoelace(loop_pts: &[Point]) -> f64 {
    let n = loop_pts.len();
    if n == 0 {
        return 0.0;
    }
    // relative to the first vertex, to avoid cancellation far from the origin
    let o = loop_pts[0];
    let mut s = 0.0;
    for i in 1..n.saturating_sub(1) {
        let (p, q) = (sub(&loop_pts[i], &o), sub(&loop_pts[i + 1], &o));
        s += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * s
}

/// Newell normal of a polygon loop (length = twice the vector area).
pub fn newell_normal(loop_pts: &[Point]) -> Point {
    let n = loop_pts.len();
    let mut nrm = [0.0; 3];
    let o = loop_pts.first().copied().unwrap_or([0.0; 3]);
    for i in 0..n {
        let (p, q) = (sub(&loop_pts[i], &o), sub(&loop_pts[(i + 1) % n], &o));
        nrm[0] += (p[1] - q[1]) * (p[2] + q[2]);
        nrm[1] += (p[2] - q[2]) * (p[0] + q[0]);
        nrm[2] += (p[0] - q[0]) * (p[1] + q[1]);
    }
    nrm
}

pub fn diameter(pts: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            d = d.max(dist(&pts[i], &pts[j]));
        }
    }
    d
}

pub fn average(pts: &[Point]) -> Point {
    let mut c = [0.0; 3];
    for p in pts {
        c = add(&c, p);
    }
    scale(&c, 1.0 / pts.len() as f64)
}

/// Affine map of a reference simplex onto `vertices`: `x = v0 + J ξ`.
#[derive(Debug, Clone, Copy)]
pub struct AffineMap {
    pub dim: usize,
    pub origin: Point,
    /// Columns are the edge vectors `v_i - v_0`.
    pub jac: [[f64; 3]; 3],
    pub det: f64,
    /// Inverse Jacobian, `inv[i][j] = (J^-1)_{ij}`.
    pub inv: [[f64; 3]; 3],
}

impl AffineMap {
    pub fn new(dim: usize, vertices: &[Point]) -> Self {
        let origin = vertices[0];
        let mut jac = [[0.0; 3]; 3];
        for c in 0..dim {
            let e = sub(&vertices[c + 1], &origin);
            for r in 0..dim {
                jac[r][c] = e[r];
            }
        }
        let mut inv = [[0.0; 3]; 3];
        let det;
        match dim {
            1 => {
                det = jac[0][0];
                inv[0][0] = 1.0 / det;
            }
            2 => {
                det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
                inv[0][0] = jac[1][1] / det;
                inv[0][1] = -jac[0][1] / det;
                inv[1][0] = -jac[1][0] / det;
                inv[1][1] = jac[0][0] / det;
            }
            3 => {
                let m = &jac;
                det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                    - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                    + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
                inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
                inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
                inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
                inv[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
                inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
                inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
                inv[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
                inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
                inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
            }
            _ => panic!("unsupported dimension {dim}"),
        }
        AffineMap { dim, origin, jac, det, inv }
    }

    pub fn map(&self, xi: &Point) -> Point {
        let mut x = self.origin;
        for r in 0..self.dim {
            for c in 0..self.dim {
                x[r] += self.jac[r][c] * xi[c];
            }
        }
        x
    }

    /// Physical gradient from a reference gradient: `J^{-T} ĝ`.
    pub fn push_grad(&self, g: &Point) -> Point {
        let mut out = [0.0; 3];
        for r in 0..self.dim {
            for c in 0..self.dim {
                out[r] += self.inv[c][r] * g[c];
            }
        }
        out
    }

    /// `G = J^{-1} J^{-T}` so that `∇φ_i·∇φ_j = ĝ_iᵀ G ĝ_j`.
    pub fn metric(&self) -> [[f64; 3]; 3] {
        let mut g = [[0.0; 3]; 3];
        for a in 0..self.dim {
            for b in 0..self.dim {
                for c in 0..self.dim {
                    g[a][b] += self.inv[a][c] * self.inv[b][c];
                }
            }
        }
        g
    }
}
