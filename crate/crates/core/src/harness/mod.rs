//! Manufactured problems, error norms, convergence studies and the CLI.

pub mod cli;
mod problems;

use std::io::{Read, Write};
use std::ops::RangeInclusive;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::macrosub::{check_constraints, subdivide_mesh, MeshSubdivision, Strategy};
use crate::polymesh::{Family, Mesh, MeshFamily};
use crate::projector::{build_layout, build_projectors, interpolate_exact, ElementProjector, TildeDofLayout};
use crate::report::ValidationReport;
use crate::system::{self, SolverConfig};

pub use problems::{problem_registry, ManufacturedProblem, PROBLEM_IDS};

/// Everything needed to solve on one mesh at one degree.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub mesh: Mesh,
    pub degree: usize,
    pub strategy: Strategy,
    pub subdivision: MeshSubdivision,
    pub layout: TildeDofLayout,
    pub projectors: Vec<ElementProjector>,
}

/// Subdivides every cell and checks the macro constraints.
pub fn subdivide_checked(mesh: &Mesh, strategy: Strategy) -> Result<(MeshSubdivision, ValidationReport)> {
    let sub = subdivide_mesh(mesh, strategy)?;
    let reports: Vec<ValidationReport> = sub.cells.par_iter().map(check_constraints).collect();
    let mut all = ValidationReport::new();
    for (c, r) in reports.into_iter().enumerate() {
        for mut e in r.entries {
            if !e.passed {
                e.locus = Some(format!("cell {c}: {}", e.locus.unwrap_or_default()));
                all.entries.push(e);
            }
        }
    }
    if all.entries.is_empty() {
        all.pass("macro-constraints", format!("{} cells satisfy all subdivision constraints", sub.cells.len()));
    }
    Ok((sub, all))
}

impl Discretization {
    pub fn new(mesh: Mesh, degree: usize, strategy: Strategy) -> Result<Self> {
        if degree == 0 {
            return Err(Error::Unsupported("degree must be at least 1".into()));
        }
        let (subdivision, report) = subdivide_checked(&mesh, strategy)?;
        if let Some(e) = report.failures().next() {
            return Err(Error::Constraint(format!(
                "{}: {} ({})",
                e.name,
                e.detail,
                e.locus.clone().unwrap_or_default()
            )));
        }
        let layout = build_layout(&mesh, degree);
        let projectors = build_projectors(&mesh, &subdivision, &layout)?;
        Ok(Discretization { mesh, degree, strategy, subdivision, layout, projectors })
    }

    /// Tilde DOFs of the interpolant of `u`, including the Laplacian moments.
    pub fn interpolate(&self, problem: &ManufacturedProblem) -> Result<DVector<f64>> {
        check_dim(&self.mesh, problem)?;
        interpolate_exact(&self.mesh, &self.subdivision, &self.layout, problem)
    }

    pub fn assemble(&self, problem: &ManufacturedProblem) -> Result<system::GlobalSystem> {
        let g = self.interpolate(problem)?;
        system::assemble(&self.layout, &self.projectors, &|x| problem.f(x), Some(&g))
    }

    pub fn solve(&self, problem: &ManufacturedProblem, cfg: &SolverConfig) -> Result<DiscreteSolution> {
        let sys = self.assemble(problem)?;
        let sol = system::solve(&sys, cfg)?;
        let coefficients = system::reconstruct(&self.projectors, &sol.dofs);
        Ok(DiscreteSolution {
            dofs: sol.dofs,
            coefficients,
            iterations: sol.iterations,
            residual: sol.residual,
            free: sys.free.len(),
        })
    }

    /// Errors of `solution` against the reference field `Π(I_h u)`.
    pub fn errors(&self, problem: &ManufacturedProblem, solution: &DiscreteSolution, level: usize) -> Result<ErrorReport> {
        let reference = system::reconstruct(&self.projectors, &self.interpolate(problem)?);
        let (l2, h1) = error_norms(&self.projectors, &reference, &solution.coefficients)?;
        Ok(ErrorReport {
            level,
            h: self.mesh.h(),
            l2_error: l2,
            h1_error: h1,
            ndof: self.layout.len(),
            free_dofs: solution.free,
            iterations: solution.iterations,
        })
    }
}

fn check_dim(mesh: &Mesh, problem: &ManufacturedProblem) -> Result<()> {
    if mesh.dim() != problem.dim {
        return Err(Error::Mismatch(format!(
            "problem `{}` is {}D but the mesh is {}D",
            problem.id,
            problem.dim,
            mesh.dim()
        )));
    }
    Ok(())
}

/// Solution of one discrete problem.
#[derive(Debug, Clone)]
pub struct DiscreteSolution {
    /// All tilde DOFs.
    pub dofs: DVector<f64>,
    /// Macro node values per cell.
    pub coefficients: Vec<DVector<f64>>,
    pub iterations: usize,
    pub residual: f64,
    pub free: usize,
}

/// `(‖r − u_h‖₀, |r − u_h|₁)` for two piecewise macro fields given cell by cell,
/// integrated exactly with the local mass and stiffness matrices.
pub fn error_norms(
    projectors: &[ElementProjector],
    reference: &[DVector<f64>],
    uh: &[DVector<f64>],
) -> Result<(f64, f64)> {
    if reference.len() != projectors.len() || uh.len() != projectors.len() {
        return Err(Error::Mismatch("error fields do not match the number of cells".into()));
    }
    let parts: Vec<(f64, f64)> = projectors
        .par_iter()
        .zip(reference.par_iter().zip(uh.par_iter()))
        .map(|(p, (r, u))| {
            let e = r - u;
            let m = p.space.local_mass()?;
            let s = p.space.local_stiffness()?;
            Ok((e.dot(&(&m * &e)), e.dot(&(&s * &e))))
        })
        .collect::<Result<_>>()?;
    let (l2, h1) = parts.iter().fold((0.0, 0.0), |acc, x| (acc.0 + x.0, acc.1 + x.1));
    Ok((l2.max(0.0).sqrt(), h1.max(0.0).sqrt()))
}

/// Errors on one mesh.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub level: usize,
    pub h: f64,
    pub l2_error: f64,
    pub h1_error: f64,
    pub ndof: usize,
    pub free_dofs: usize,
    pub iterations: usize,
}

/// Observed rate between two consecutive levels.
pub fn observed_rate(coarse: f64, fine: f64) -> Option<f64> {
    (coarse > 0.0 && fine > 0.0).then(|| (coarse / fine).log2())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ErrorReport>,
}

impl ConvergenceReport {
    /// A rate exists only between consecutive levels whose `h` halves.
    fn rates(&self, pick: impl Fn(&ErrorReport) -> f64) -> Vec<Option<f64>> {
        (0..self.rows.len())
            .map(|i| {
                if i == 0 {
                    return None;
                }
                let (a, b) = (&self.rows[i - 1], &self.rows[i]);
                let halved = b.level == a.level + 1 && (a.h / b.h - 2.0).abs() < 1e-12;
                if halved {
                    observed_rate(pick(a), pick(b))
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn l2_rates(&self) -> Vec<Option<f64>> {
        self.rates(|r| r.l2_error)
    }

    pub fn h1_rates(&self) -> Vec<Option<f64>> {
        self.rates(|r| r.h1_error)
    }

    pub fn final_rates(&self) -> (Option<f64>, Option<f64>) {
        (self.l2_rates().last().copied().flatten(), self.h1_rates().last().copied().flatten())
    }

    pub fn to_csv_rows(&self) -> Vec<CsvRow> {
        let (l2r, h1r) = (self.l2_rates(), self.h1_rates());
        self.rows
            .iter()
            .enumerate()
            .map(|(i, r)| CsvRow {
                grid: r.level,
                l2_err: r.l2_error,
                l2_rate: l2r[i],
                h1_err: r.h1_error,
                h1_rate: h1r[i],
                ndof: r.ndof,
                iters: r.iterations,
            })
            .collect()
    }

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in self.to_csv_rows() {
            w.serialize(row).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// One line of the convergence CSV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub grid: usize,
    pub l2_err: f64,
    pub l2_rate: Option<f64>,
    pub h1_err: f64,
    pub h1_rate: Option<f64>,
    pub ndof: usize,
    pub iters: usize,
}

pub const CSV_HEADER: &str = "grid,l2_err,l2_rate,h1_err,h1_rate,ndof,iters";

fn csv_err(e: csv::Error) -> Error {
    Error::Parse { line: e.position().map_or(0, |p| p.line() as usize), msg: e.to_string() }
}

pub fn read_csv(input: impl Read) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::Parse { line: 1, msg: format!("expected header `{CSV_HEADER}`") });
    }
    r.deserialize().map(|row| row.map_err(csv_err)).collect()
}

/// Runs generate, subdivide, project, assemble, solve and measure on each level.
/// `progress` sees every finished row.
pub fn convergence_study(
    family: Family,
    degree: usize,
    levels: RangeInclusive<usize>,
    problem: &ManufacturedProblem,
    strategy: Strategy,
    cfg: &SolverConfig,
    mut progress: impl FnMut(&ErrorReport),
) -> Result<ConvergenceReport> {
    if *levels.start() == 0 || levels.is_empty() {
        return Err(Error::Unsupported(format!("levels {}..{} are not a valid range", levels.start(), levels.end())));
    }
    let mut rows = Vec::new();
    for level in levels {
        let mesh = MeshFamily::new(family, level).generate();
        let disc = Discretization::new(mesh, degree, strategy)?;
        let sol = disc.solve(problem, cfg)?;
        let row = disc.errors(problem, &sol, level)?;
        progress(&row);
        rows.push(row);
    }
    Ok(ConvergenceReport { rows })
}
