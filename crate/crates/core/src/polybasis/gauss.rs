//! One-dimensional Gauss rules on [0, 1].

/// Legendre polynomial P_n and its derivative at `x` in [-1, 1].
fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let dp = if (1.0 - x * x).abs() < 1e-300 {
        // endpoint value of P_n'
        let s = if x > 0.0 { 1.0 } else if n % 2 == 0 { -1.0 } else { 1.0 };
        s * (n * (n + 1)) as f64 / 2.0
    } else {
        n as f64 * (x * p1 - p0) / (x * x - 1.0)
    };
    (p1, dp)
}

/// `n`-point Gauss–Legendre rule mapped to [0, 1]. Returns (abscissae, weights).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one point");
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // ascending order on [0, 1]
        xs[n - 1 - i] = 0.5 * (x + 1.0);
        ws[n - 1 - i] = 0.5 * w;
    }
    (xs, ws)
}

/// The `k + 1` Gauss–Lobatto abscissae on [0, 1], endpoints included, ascending.
pub fn gauss_lobatto(k: usize) -> Vec<f64> {
    assert!(k >= 1, "Gauss-Lobatto nodes need k >= 1");
    let mut nodes = vec![0.0; k + 1];
    nodes[k] = 1.0;
    // interior nodes are the roots of P_k'
    for j in 1..k {
        let mut x = -(std::f64::consts::PI * j as f64 / k as f64).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(k, x);
            // (1 - x^2) P'' = 2x P' - k(k+1) P
            let d2p = (2.0 * x * dp - (k * (k + 1)) as f64 * p) / (1.0 - x * x);
            let dx = dp / d2p;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[j] = 0.5 * (x + 1.0);
    }
    // enforce exact symmetry about 1/2
    for j in 1..k {
        if j < k - j {
            let a = 0.5 * (nodes[j] + 1.0 - nodes[k - j]);
            nodes[j] = a;
            nodes[k - j] = 1.0 - a;
        } else if j == k - j {
            nodes[j] = 0.5;
        }
    }
    nodes
}
