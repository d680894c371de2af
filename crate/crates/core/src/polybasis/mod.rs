//! Polynomial machinery: scaled monomials, nodal Lagrange bases on reference
//! simplices, Gauss–Lobatto edge nodes and simplex quadrature.

mod gauss;
mod lagrange;
mod monomial;
mod polynomial;
mod quadrature;

pub use gauss::{gauss_legendre, gauss_lobatto};
pub use lagrange::{lagrange_pk_basis, lattice_multi_indices, node_position, LagrangeBasis, MAX_DEGREE};
pub use monomial::{graded_exponents, poly_dim, ScaledMonomialBasis};
pub use polynomial::Polynomial;
pub use quadrature::{simplex_quadrature, SimplexQuadrature, MAX_EXACTNESS};

/// The `k + 1` Gauss–Lobatto nodes carrying the edge values of a degree-`k` trace.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeNodeSet {
    pub degree: usize,
    pub nodes: Vec<f64>,
}

impl EdgeNodeSet {
    pub fn new(degree: usize) -> Self {
        EdgeNodeSet { degree, nodes: gauss_lobatto(degree) }
    }

    /// Interior nodes only (the `k - 1` edge degrees of freedom).
    pub fn interior(&self) -> &[f64] {
        &self.nodes[1..self.degree]
    }
}

/// Quadrature exactness used for stiffness matrices.
pub fn stiffness_exactness(k: usize) -> usize {
    2 * k
}

/// Quadrature exactness used for loads and norms against non-polynomial data.
pub fn load_exactness(k: usize) -> usize {
    2 * k + 4
}
