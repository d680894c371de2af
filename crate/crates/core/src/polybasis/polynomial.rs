use super::monomial::graded_exponents;
use crate::geometry::Point;

/// A polynomial in global coordinates, `Σ c_α x^α`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    pub dim: usize,
    pub terms: Vec<([u8; 3], f64)>,
}

fn pw(x: f64, e: i32) -> f64 {
    if e < 0 { 0.0 } else { x.powi(e) }
}

impl Polynomial {
    /// Coefficients in graded order of total degree `<= degree`.
    pub fn from_coeffs(dim: usize, degree: usize, coeffs: &[f64]) -> Self {
        let ex = graded_exponents(dim, degree);
        assert_eq!(ex.len(), coeffs.len(), "coefficient count");
        Polynomial { dim, terms: ex.into_iter().zip(coeffs.iter().copied()).collect() }
    }

    pub fn eval(&self, x: &Point) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c * pw(x[0], e[0] as i32) * pw(x[1], e[1] as i32) * pw(x[2], e[2] as i32))
            .sum()
    }

    /// `∂^d f` for the derivative counts `d`.
    fn derivative(&self, x: &Point, d: [i32; 3]) -> f64 {
        let fall = |e: i32, n: i32| (0..n).map(|i| (e - i) as f64).product::<f64>();
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut v = *c;
                for i in 0..3 {
                    let ei = e[i] as i32;
                    v *= fall(ei, d[i]) * pw(x[i], ei - d[i]);
                }
                v
            })
            .sum()
    }

    pub fn grad(&self, x: &Point) -> Point {
        [self.derivative(x, [1, 0, 0]), self.derivative(x, [0, 1, 0]), self.derivative(x, [0, 0, 1])]
    }

    pub fn hessian(&self, x: &Point) -> [[f64; 3]; 3] {
        let mut h = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let mut d = [0; 3];
                d[i] += 1;
                d[j] += 1;
                h[i][j] = self.derivative(x, d);
            }
        }
        h
    }
}
