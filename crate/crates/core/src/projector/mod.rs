//! The local H¹ projection from tilde DOFs onto the macro element space.
//!
//! Boundary macro nodes copy the trace; interior nodes solve
//! `S_II x_I = -S_IB x_B + M_I q`, where `q` holds the coefficients of `-Δṽ`
//! (or `-Δ_F ṽ` on a face) and `M_{iα} = ∫ w_i m_α`. In 3D each face is projected
//! once in its own plane and the result is the Dirichlet data of the cell solve.

mod layout;

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::macrofe::{build_face_space, build_macro_space, MacroFeSpace};
use crate::macrosub::{FaceTriangulation, MacroSubdivision, MeshSubdivision};
use crate::polymesh::Mesh;

pub use layout::{
    build_layout, cell_monomials, face_monomials, interpolate_exact, project_cell_data, project_face_data,
    ScalarField, TildeDofLayout,
};

/// Solves for the interior rows of a projection matrix.
///
/// `p` has its boundary rows filled; `q_cols` maps the columns of `moments` to
/// columns of `p` carrying Laplacian coefficients.
fn interior_solve(
    space: &MacroFeSpace,
    s: &DMatrix<f64>,
    p: &mut DMatrix<f64>,
    moments: Option<(&DMatrix<f64>, &[usize])>,
    what: &str,
) -> Result<()> {
    let int = space.interior_nodes();
    if int.is_empty() {
        return Ok(());
    }
    let bnd = space.boundary_nodes();
    let ni = int.len();
    let ncols = p.ncols();
    let sii = DMatrix::from_fn(ni, ni, |i, j| s[(int[i], int[j])]);
    let mut rhs = DMatrix::zeros(ni, ncols);
    for (i, &a) in int.iter().enumerate() {
        for &b in &bnd {
            let sab = s[(a, b)];
            if sab != 0.0 {
                for c in 0..ncols {
                    rhs[(i, c)] -= sab * p[(b, c)];
                }
            }
        }
        if let Some((m, cols)) = moments {
            for (alpha, &c) in cols.iter().enumerate() {
                rhs[(i, c)] += m[(a, alpha)];
            }
        }
    }
    let chol = sii.cholesky().ok_or_else(|| {
        Error::Constraint(format!("{what}: interior stiffness block is singular; check the subdivision"))
    })?;
    let x = chol.solve(&rhs);
    for (i, &a) in int.iter().enumerate() {
        for c in 0..ncols {
            p[(a, c)] = x[(i, c)];
        }
    }
    Ok(())
}

/// Projection of one mesh face onto its planar macro space (3D only).
#[derive(Debug, Clone)]
pub struct FaceProjector {
    pub face: usize,
    pub space: MacroFeSpace,
    /// Global tilde DOFs feeding the face: loop vertices, edge values, face coefficients.
    pub dofs: Vec<usize>,
    /// Face macro node values = `matrix * dofs`.
    pub matrix: DMatrix<f64>,
}

/// Builds the face projection from the shared face triangulation.
pub fn project_face(ft: &FaceTriangulation, layout: &TildeDofLayout) -> Result<FaceProjector> {
    let k = layout.degree;
    let space = build_face_space(ft, k)?;
    let mut dofs: Vec<usize> = Vec::new();
    let mut col: HashMap<usize, usize> = HashMap::new();
    let mut push = |d: usize, dofs: &mut Vec<usize>| {
        *col.entry(d).or_insert_with(|| {
            dofs.push(d);
            dofs.len() - 1
        })
    };
    let mut p_rows: Vec<(usize, usize)> = Vec::new();
    for (i, key) in space.keys.iter().enumerate() {
        if space.boundary_mask[i] {
            let d = layout.trace_dof(key).ok_or_else(|| {
                Error::Mismatch(format!("face {}: boundary node {key:?} has no trace DOF", ft.face))
            })?;
            p_rows.push((i, push(d, &mut dofs)));
        }
    }
    let q_cols: Vec<usize> = (0..layout.per_face).map(|a| push(layout.face_dof(ft.face, a), &mut dofs)).collect();
    let mut p = DMatrix::zeros(space.num_nodes(), dofs.len());
    for (i, c) in p_rows {
        p[(i, c)] = 1.0;
    }
    let s = space.local_stiffness()?;
    let m = match face_monomials(ft, k) {
        Some(b) => Some(space.moment_matrix(&b)?),
        None => None,
    };
    interior_solve(&space, &s, &mut p, m.as_ref().map(|m| (m, q_cols.as_slice())), &format!("face {}", ft.face))?;
    Ok(FaceProjector { face: ft.face, space, dofs, matrix: p })
}

/// Local projection `P_K` of one cell and the stabilizer-free stiffness `A_K`.
#[derive(Debug, Clone)]
pub struct ElementProjector {
    pub cell: usize,
    pub space: MacroFeSpace,
    /// Global tilde DOFs of the cell, in local column order.
    pub dofs: Vec<usize>,
    /// Macro node values = `matrix * local DOFs`.
    pub matrix: DMatrix<f64>,
    /// `P_Kᵀ S_K P_K`.
    pub stiffness: DMatrix<f64>,
}

impl ElementProjector {
    pub fn gather(&self, global: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.dofs.len(), self.dofs.iter().map(|&d| global[d]))
    }

    /// Macro coefficients of the projection of a global tilde vector.
    pub fn apply(&self, global: &DVector<f64>) -> DVector<f64> {
        &self.matrix * self.gather(global)
    }
}

/// Builds `P_K` for one cell. In 3D, `faces` must hold the projector of every mesh
/// face (indexed by face id).
pub fn project_element(
    mesh: &Mesh,
    sub: &MacroSubdivision,
    layout: &TildeDofLayout,
    faces: &[FaceProjector],
) -> Result<ElementProjector> {
    let k = layout.degree;
    let c = sub.cell;
    let space = build_macro_space(sub, k)?;
    let dofs = layout.cell_dofs(mesh, c);
    let col: HashMap<usize, usize> = dofs.iter().enumerate().map(|(i, &d)| (d, i)).collect();
    let mut p = DMatrix::zeros(space.num_nodes(), dofs.len());
    for (i, key) in space.keys.iter().enumerate() {
        if !space.boundary_mask[i] {
            continue;
        }
        if let Some(d) = layout.trace_dof(key) {
            p[(i, col[&d])] = 1.0;
            continue;
        }
        let fp = sub
            .parent_faces
            .iter()
            .map(|pf| &faces[pf.face])
            .find_map(|fp| fp.space.node_index(key).map(|j| (fp, j)));
        let Some((fp, j)) = fp else {
            return Err(Error::Mismatch(format!("cell {c}: boundary node {key:?} not found on any face")));
        };
        for (a, d) in fp.dofs.iter().enumerate() {
            let v = fp.matrix[(j, a)];
            if v != 0.0 {
                p[(i, col[d])] += v;
            }
        }
    }
    let s = space.local_stiffness()?;
    let m = match cell_monomials(mesh, c, k) {
        Some(b) => Some(space.moment_matrix(&b)?),
        None => None,
    };
    let q_cols: Vec<usize> = (0..layout.per_cell).map(|a| col[&layout.cell_dof(c, a)]).collect();
    interior_solve(&space, &s, &mut p, m.as_ref().map(|m| (m, q_cols.as_slice())), &format!("cell {c}"))?;
    let sp = &s * &p;
    let a = p.transpose() * sp;
    Ok(ElementProjector { cell: c, space, dofs, matrix: p, stiffness: a })
}

/// Face projectors (3D) and element projectors for every cell, in id order.
pub fn build_projectors(mesh: &Mesh, sub: &MeshSubdivision, layout: &TildeDofLayout) -> Result<Vec<ElementProjector>> {
    let faces: Vec<FaceProjector> = sub.faces.par_iter().map(|ft| project_face(ft, layout)).collect::<Result<_>>()?;
    sub.cells
        .par_iter()
        .map(|s| project_element(mesh, s, layout, &faces))
        .collect()
}

#[cfg(test)]
mod tests;
