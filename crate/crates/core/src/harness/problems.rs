use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::polybasis::Polynomial;
use crate::projector::ScalarField;

type Scalar = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;
type Gradient = Arc<dyn Fn(&Point) -> Point + Send + Sync>;
type Hessian = Arc<dyn Fn(&Point) -> [[f64; 3]; 3] + Send + Sync>;

/// A closed-form solution `u` of `-Δu = f` with Dirichlet data `g = u|∂Ω`.
#[derive(Clone)]
pub struct ManufacturedProblem {
    pub id: String,
    pub dim: usize,
    u: Scalar,
    grad: Gradient,
    hess: Hessian,
    f: Scalar,
}

impl fmt::Debug for ManufacturedProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ManufacturedProblem").field("id", &self.id).field("dim", &self.dim).finish()
    }
}

pub const PROBLEM_IDS: [&str; 2] = ["sinsin2d", "poly3d"];

/// Looks up a registered problem.
pub fn problem_registry(id: &str) -> Result<ManufacturedProblem> {
    match id {
        "sinsin2d" => Ok(sinsin2d()),
        "poly3d" => Ok(poly3d()),
        _ => Err(Error::UnknownProblem(id.to_string())),
    }
}

/// `u = sin(πx) sin(πy)`, `f = 2π² u`.
fn sinsin2d() -> ManufacturedProblem {
    let u = |x: &Point| (PI * x[0]).sin() * (PI * x[1]).sin();
    ManufacturedProblem {
        id: "sinsin2d".into(),
        dim: 2,
        u: Arc::new(u),
        grad: Arc::new(|x: &Point| {
            let (sx, cx, sy, cy) = ((PI * x[0]).sin(), (PI * x[0]).cos(), (PI * x[1]).sin(), (PI * x[1]).cos());
            [PI * cx * sy, PI * sx * cy, 0.0]
        }),
        hess: Arc::new(|x: &Point| {
            let (sx, cx, sy, cy) = ((PI * x[0]).sin(), (PI * x[0]).cos(), (PI * x[1]).sin(), (PI * x[1]).cos());
            let p2 = PI * PI;
            [[-p2 * sx * sy, p2 * cx * cy, 0.0], [p2 * cx * cy, -p2 * sx * sy, 0.0], [0.0; 3]]
        }),
        f: Arc::new(move |x: &Point| 2.0 * PI * PI * u(x)),
    }
}

/// `u = 2⁶ (x−x²)(y−y²)(z−z²)`.
fn poly3d() -> ManufacturedProblem {
    let b = |t: f64| t - t * t;
    let db = |t: f64| 1.0 - 2.0 * t;
    ManufacturedProblem {
        id: "poly3d".into(),
        dim: 3,
        u: Arc::new(move |x: &Point| 64.0 * b(x[0]) * b(x[1]) * b(x[2])),
        grad: Arc::new(move |x: &Point| {
            let (bx, by, bz) = (b(x[0]), b(x[1]), b(x[2]));
            [64.0 * db(x[0]) * by * bz, 64.0 * bx * db(x[1]) * bz, 64.0 * bx * by * db(x[2])]
        }),
        hess: Arc::new(move |x: &Point| {
            let v = [b(x[0]), b(x[1]), b(x[2])];
            let d = [db(x[0]), db(x[1]), db(x[2])];
            let mut h = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    h[i][j] = if i == j {
                        let (a, c) = ((i + 1) % 3, (i + 2) % 3);
                        64.0 * -2.0 * v[a] * v[c]
                    } else {
                        64.0 * d[i] * d[j] * v[3 - i - j]
                    };
                }
            }
            h
        }),
        f: Arc::new(move |x: &Point| {
            let (bx, by, bz) = (b(x[0]), b(x[1]), b(x[2]));
            128.0 * (by * bz + bx * bz + bx * by)
        }),
    }
}

impl ManufacturedProblem {
    /// Problem with a polynomial solution, `f = -Δp`.
    pub fn polynomial(id: &str, p: Polynomial) -> Self {
        let dim = p.dim;
        let p = Arc::new(p);
        let (p1, p2, p3, p4) = (p.clone(), p.clone(), p.clone(), p);
        ManufacturedProblem {
            id: id.to_string(),
            dim,
            u: Arc::new(move |x: &Point| p1.eval(x)),
            grad: Arc::new(move |x: &Point| p2.grad(x)),
            hess: Arc::new(move |x: &Point| p3.hessian(x)),
            f: Arc::new(move |x: &Point| {
                let h = p4.hessian(x);
                -(0..dim).map(|i| h[i][i]).sum::<f64>()
            }),
        }
    }

    pub fn u(&self, x: &Point) -> f64 {
        (self.u)(x)
    }

    pub fn grad(&self, x: &Point) -> Point {
        (self.grad)(x)
    }

    pub fn f(&self, x: &Point) -> f64 {
        (self.f)(x)
    }

    /// Dirichlet data.
    pub fn g(&self, x: &Point) -> f64 {
        (self.u)(x)
    }
}

impl ScalarField for ManufacturedProblem {
    fn value(&self, x: &Point) -> f64 {
        (self.u)(x)
    }

    fn hessian(&self, x: &Point) -> [[f64; 3]; 3] {
        (self.hess)(x)
    }
}
