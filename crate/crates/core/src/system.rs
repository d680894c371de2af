//! Global assembly, Dirichlet elimination and the SPD solve.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::polybasis::load_exactness;
use crate::projector::{ElementProjector, TildeDofLayout};

/// Square sparse matrix in compressed-row layout.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from triplets. Duplicates are summed in input order, so equal input
    /// gives bitwise equal output.
    pub fn from_triplets(n: usize, mut trip: Vec<(usize, usize, f64)>) -> Self {
        trip.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0; n + 1];
        let mut col_idx = Vec::with_capacity(trip.len());
        let mut values: Vec<f64> = Vec::with_capacity(trip.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in trip {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix { n, row_ptr, col_idx, values }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let row = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[row.clone()].binary_search(&c) {
            Ok(i) => self.values[row.start + i],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn matvec(&self, x: &DVector<f64>) -> DVector<f64> {
        let y: Vec<f64> = (0..self.n)
            .into_par_iter()
            .map(|r| {
                let mut s = 0.0;
                for i in self.row_ptr[r]..self.row_ptr[r + 1] {
                    s += self.values[i] * x[self.col_idx[i]];
                }
                s
            })
            .collect();
        DVector::from_vec(y)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.n, self.n);
        for r in 0..self.n {
            for i in self.row_ptr[r]..self.row_ptr[r + 1] {
                d[(r, self.col_idx[i])] = self.values[i];
            }
        }
        d
    }

    /// Largest `|a_ij - a_ji|` relative to the largest entry.
    pub fn asymmetry(&self) -> f64 {
        let amax = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut worst = 0.0f64;
        for r in 0..self.n {
            for i in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.col_idx[i];
                worst = worst.max((self.values[i] - self.get(c, r)).abs());
            }
        }
        if amax > 0.0 { worst / amax } else { 0.0 }
    }
}

/// Linear system over the free tilde DOFs.
#[derive(Debug, Clone)]
pub struct GlobalSystem {
    pub matrix: CsrMatrix,
    pub rhs: DVector<f64>,
    /// `free[i]` is the global DOF of unknown `i`.
    pub free: Vec<usize>,
    pub global_to_free: Vec<Option<usize>>,
    /// Global vector holding the Dirichlet values (zero on free DOFs).
    pub lift: DVector<f64>,
}

/// Assembles `Σ_K A_K` and `Σ_K P_Kᵀ m_K` with `(m_K)_i = ∫_K f w_i`, then eliminates
/// the boundary DOFs symmetrically using the values in `dirichlet` (zero if `None`).
pub fn assemble(
    layout: &TildeDofLayout,
    projectors: &[ElementProjector],
    f: &(dyn Fn(&Point) -> f64 + Sync),
    dirichlet: Option<&DVector<f64>>,
) -> Result<GlobalSystem> {
    let n = layout.len();
    if let Some(g) = dirichlet {
        if g.len() != n {
            return Err(Error::Mismatch(format!("Dirichlet vector has {} entries, layout {}", g.len(), n)));
        }
    }
    for (c, p) in projectors.iter().enumerate() {
        if p.cell != c || p.dofs.len() != p.stiffness.nrows() {
            return Err(Error::Mismatch(format!("projector {c} does not match the layout ordering")));
        }
    }
    let mut global_to_free = vec![None; n];
    let mut free = Vec::new();
    for d in 0..n {
        if !layout.boundary_mask[d] {
            global_to_free[d] = Some(free.len());
            free.push(d);
        }
    }
    let mut lift = DVector::zeros(n);
    if let Some(g) = dirichlet {
        for d in 0..n {
            if layout.boundary_mask[d] {
                lift[d] = g[d];
            }
        }
    }
    let ex = load_exactness(layout.degree);
    let loads: Vec<DVector<f64>> = projectors
        .par_iter()
        .map(|p| Ok(p.matrix.transpose() * p.space.load_vector(f, ex)?))
        .collect::<Result<_>>()?;
    let mut trip = Vec::new();
    let mut rhs = DVector::zeros(free.len());
    for (p, b) in projectors.iter().zip(&loads) {
        for (i, &gi) in p.dofs.iter().enumerate() {
            let Some(fi) = global_to_free[gi] else { continue };
            rhs[fi] += b[i];
            for (j, &gj) in p.dofs.iter().enumerate() {
                let a = p.stiffness[(i, j)];
                match global_to_free[gj] {
                    Some(fj) => trip.push((fi, fj, a)),
                    None => rhs[fi] -= a * lift[gj],
                }
            }
        }
    }
    Ok(GlobalSystem { matrix: CsrMatrix::from_triplets(free.len(), trip), rhs, free, global_to_free, lift })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Preconditioner {
    #[default]
    Jacobi,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    #[default]
    Cg,
    /// Dense Cholesky; only for systems with at most [`DENSE_LIMIT`] unknowns.
    DenseDirect,
}

pub const DENSE_LIMIT: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    pub tolerance: f64,
    /// Defaults to `10 n`.
    pub max_iterations: Option<usize>,
    pub preconditioner: Preconditioner,
    pub solver: SolverKind,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { tolerance: 1e-12, max_iterations: None, preconditioner: Preconditioner::Jacobi, solver: SolverKind::Cg }
    }
}

impl SolverConfig {
    /// Default configuration with the tolerance taken from `SFVEM_CG_TOL` when set.
    pub fn from_env() -> Result<Self> {
        let mut c = SolverConfig::default();
        if let Ok(s) = std::env::var("SFVEM_CG_TOL") {
            let t: f64 = s
                .trim()
                .parse()
                .map_err(|_| Error::Unsupported(format!("SFVEM_CG_TOL=`{s}` is not a number")))?;
            c.tolerance = t;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(Error::Unsupported(format!("solver tolerance {} outside (0, 1)", self.tolerance)));
        }
        if self.max_iterations == Some(0) {
            return Err(Error::Unsupported("max iterations must be at least 1".into()));
        }
        Ok(())
    }
}

/// Solution of a global system.
#[derive(Debug, Clone)]
pub struct Solution {
    /// All tilde DOFs, Dirichlet values included.
    pub dofs: DVector<f64>,
    pub iterations: usize,
    /// Final relative residual (0 for the direct solver).
    pub residual: f64,
}

fn expand(sys: &GlobalSystem, x: &DVector<f64>) -> DVector<f64> {
    let mut g = sys.lift.clone();
    for (i, &d) in sys.free.iter().enumerate() {
        g[d] = x[i];
    }
    g
}

/// Jacobi-preconditioned conjugate gradients on the free unknowns.
pub fn conjugate_gradient(sys: &GlobalSystem, cfg: &SolverConfig) -> Result<(DVector<f64>, usize, f64)> {
    cfg.validate()?;
    let a = &sys.matrix;
    let n = a.n;
    let b = &sys.rhs;
    let bnorm = b.norm();
    let mut x = DVector::zeros(n);
    if bnorm == 0.0 {
        return Ok((x, 0, 0.0));
    }
    let inv_diag: Vec<f64> = match cfg.preconditioner {
        Preconditioner::Jacobi => a
            .diagonal()
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                if d > 0.0 {
                    Ok(1.0 / d)
                } else {
                    Err(Error::NotPositiveDefinite(format!("diagonal entry {i} is {d:e}")))
                }
            })
            .collect::<Result<_>>()?,
        Preconditioner::None => vec![1.0; n],
    };
    let precond = |r: &DVector<f64>| DVector::from_iterator(n, r.iter().zip(&inv_diag).map(|(r, d)| r * d));
    let max_it = cfg.max_iterations.unwrap_or(10 * n.max(1));
    let mut r = b.clone();
    let mut z = precond(&r);
    let mut p = z.clone();
    let mut rz = r.dot(&z);
    let mut history = Vec::new();
    for it in 1..=max_it {
        let ap = a.matvec(&p);
        let pap = p.dot(&ap);
        if pap <= 0.0 {
            return Err(Error::NotPositiveDefinite(format!("pᵀAp = {pap:e} at iteration {it}")));
        }
        let alpha = rz / pap;
        x.axpy(alpha, &p, 1.0);
        r.axpy(-alpha, &ap, 1.0);
        let rel = r.norm() / bnorm;
        history.push(rel);
        if rel <= cfg.tolerance {
            return Ok((x, it, rel));
        }
        z = precond(&r);
        let rz_new = r.dot(&z);
        let beta = rz_new / rz;
        rz = rz_new;
        p = &z + &p * beta;
    }
    Err(Error::NoConvergence { iterations: max_it, residual: *history.last().unwrap_or(&1.0), history })
}

/// Dense Cholesky factor of the system matrix; the squared diagonal entries are the
/// pivots, all positive when the factorization succeeds.
pub fn dense_cholesky(sys: &GlobalSystem) -> Result<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    if sys.matrix.n > DENSE_LIMIT {
        return Err(Error::Unsupported(format!("dense solve limited to {DENSE_LIMIT} unknowns, got {}", sys.matrix.n)));
    }
    sys.matrix
        .to_dense()
        .cholesky()
        .ok_or_else(|| Error::NotPositiveDefinite("dense Cholesky hit a non-positive pivot".into()))
}

/// Smallest Cholesky pivot of the assembled matrix.
pub fn min_pivot(sys: &GlobalSystem) -> Result<f64> {
    let l = dense_cholesky(sys)?;
    let lm = l.l_dirty();
    Ok((0..sys.matrix.n).map(|i| lm[(i, i)] * lm[(i, i)]).fold(f64::INFINITY, f64::min))
}

pub fn solve(sys: &GlobalSystem, cfg: &SolverConfig) -> Result<Solution> {
    match cfg.solver {
        SolverKind::Cg => {
            let (x, iterations, residual) = conjugate_gradient(sys, cfg)?;
            Ok(Solution { dofs: expand(sys, &x), iterations, residual })
        }
        SolverKind::DenseDirect => {
            let x = if sys.matrix.n == 0 { DVector::zeros(0) } else { dense_cholesky(sys)?.solve(&sys.rhs) };
            Ok(Solution { dofs: expand(sys, &x), iterations: 0, residual: 0.0 })
        }
    }
}

/// Macro coefficients `u_h|_K = P_K ũ_K` for every cell.
pub fn reconstruct(projectors: &[ElementProjector], dofs: &DVector<f64>) -> Vec<DVector<f64>> {
    projectors.par_iter().map(|p| p.apply(dofs)).collect()
}
