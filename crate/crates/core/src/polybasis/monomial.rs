use crate::geometry::Point;

/// Number of polynomials of total degree `<= m` in `dim` variables; zero for `m < 0`.
pub fn poly_dim(dim: usize, m: isize) -> usize {
    if m < 0 {
        return 0;
    }
    let m = m as usize;
    // C(m + dim, dim)
    (1..=dim).fold(1, |acc, i| acc * (m + i) / i)
}

/// Exponents of all monomials of total degree `<= m` in graded lexicographic order.
///
/// Within one total degree the first variable's power decreases, e.g. for `dim = 2`:
/// `1, x, y, x², xy, y², ...`.
pub fn graded_exponents(dim: usize, m: usize) -> Vec<[u8; 3]> {
    let mut out = Vec::with_capacity(poly_dim(dim, m as isize));
    for deg in 0..=m {
        match dim {
            1 => out.push([deg as u8, 0, 0]),
            2 => {
                for a in (0..=deg).rev() {
                    out.push([a as u8, (deg - a) as u8, 0]);
                }
            }
            3 => {
                for a in (0..=deg).rev() {
                    for b in (0..=deg - a).rev() {
                        out.push([a as u8, b as u8, (deg - a - b) as u8]);
                    }
                }
            }
            _ => panic!("unsupported dimension {dim}"),
        }
    }
    out
}

/// Monomials `((x - center) / scale)^α`, `|α| <= degree`, used to parametrize
/// polynomial data of degree `k - 2` on cells and faces.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledMonomialBasis {
    pub dim: usize,
    pub degree: usize,
    pub center: Point,
    pub scale: f64,
    exponents: Vec<[u8; 3]>,
}

impl ScaledMonomialBasis {
    pub fn new(dim: usize, degree: usize, center: Point, scale: f64) -> Self {
        assert!((1..=3).contains(&dim));
        assert!(scale > 0.0, "monomial scale must be positive");
        ScaledMonomialBasis {
            dim,
            degree,
            center,
            scale,
            exponents: graded_exponents(dim, degree),
        }
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[[u8; 3]] {
        &self.exponents
    }

    fn scaled(&self, p: &Point) -> [f64; 3] {
        let mut s = [0.0; 3];
        for i in 0..self.dim {
            s[i] = (p[i] - self.center[i]) / self.scale;
        }
        s
    }

    /// Power tables `pw[i][e] = s_i^e` for `e <= degree`.
    fn powers(&self, s: &[f64; 3]) -> [Vec<f64>; 3] {
        let mut pw: [Vec<f64>; 3] = Default::default();
        for i in 0..3 {
            let mut v = Vec::with_capacity(self.degree + 1);
            let mut acc = 1.0;
            for _ in 0..=self.degree {
                v.push(acc);
                acc *= s[i];
            }
            pw[i] = v;
        }
        pw
    }

    pub fn eval(&self, p: &Point) -> Vec<f64> {
        let pw = self.powers(&self.scaled(p));
        self.exponents
            .iter()
            .map(|e| pw[0][e[0] as usize] * pw[1][e[1] as usize] * pw[2][e[2] as usize])
            .collect()
    }

    /// Physical-coordinate gradients of each basis function.
    pub fn eval_grad(&self, p: &Point) -> Vec<[f64; 3]> {
        let pw = self.powers(&self.scaled(p));
        let d = |i: usize, e: u8| -> f64 {
            if e == 0 {
                0.0
            } else {
                e as f64 * pw[i][e as usize - 1] / self.scale
            }
        };
        let v = |i: usize, e: u8| pw[i][e as usize];
        self.exponents
            .iter()
            .map(|e| {
                let mut g = [0.0; 3];
                g[0] = d(0, e[0]) * v(1, e[1]) * v(2, e[2]);
                if self.dim > 1 {
                    g[1] = v(0, e[0]) * d(1, e[1]) * v(2, e[2]);
                }
                if self.dim > 2 {
                    g[2] = v(0, e[0]) * v(1, e[1]) * d(2, e[2]);
                }
                g
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dims() {
        assert_eq!(poly_dim(2, -1), 0);
        assert_eq!(poly_dim(2, 0), 1);
        assert_eq!(poly_dim(2, 3), 10);
        assert_eq!(poly_dim(3, 3), 20);
        assert_eq!(poly_dim(3, 5), 56);
        for d in 1..=3 {
            for m in 0..=6 {
                assert_eq!(graded_exponents(d, m).len(), poly_dim(d, m as isize));
            }
        }
    }

    #[test]
    fn constant_and_linear() {
        let b0 = ScaledMonomialBasis::new(2, 0, [0.3, 0.7, 0.0], 2.0);
        assert_eq!(b0.eval(&[5.0, -1.0, 0.0]), vec![1.0]);
        let b1 = ScaledMonomialBasis::new(2, 1, [0.0; 3], 1.0);
        assert_eq!(b1.eval(&[0.5, 0.25, 0.0]), vec![1.0, 0.5, 0.25]);
        let b3 = ScaledMonomialBasis::new(3, 2, [0.0; 3], 1.0);
        assert_eq!(
            b3.exponents(),
            &[[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [2, 0, 0], [1, 1, 0], [1, 0, 1], [0, 2, 0], [0, 1, 1], [0, 0, 2]]
        );
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for dim in 2..=3 {
            let c = [rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>()];
            let b = ScaledMonomialBasis::new(dim, 4, c, 0.7);
            let mut p = [0.0; 3];
            for x in p.iter_mut().take(dim) {
                *x = rng.random::<f64>();
            }
            let g = b.eval_grad(&p);
            let step = 1e-6;
            for i in 0..dim {
                let (mut pp, mut pm) = (p, p);
                pp[i] += step;
                pm[i] -= step;
                let (vp, vm) = (b.eval(&pp), b.eval(&pm));
                for j in 0..b.len() {
                    let fd = (vp[j] - vm[j]) / (2.0 * step);
                    assert!((fd - g[j][i]).abs() < 1e-8, "dim={dim} j={j} i={i}");
                }
            }
        }
    }
}
