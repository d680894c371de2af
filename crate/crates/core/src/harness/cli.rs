//! `sfvem` command line.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::{convergence_study, problem_registry, subdivide_checked, Discretization, ErrorReport};
use crate::error::Error;
use crate::macrosub::Strategy;
use crate::polymesh::{parse_mesh, validate_mesh, write_mesh, Family, MeshFamily, Orientation};
use crate::projector::{build_layout, build_projectors};
use crate::system::SolverConfig;

pub const SYNOPSIS: &str = "\
usage:
  sfvem mesh --family pentagon|hexagon|cube --level L --out FILE
  sfvem check --mesh FILE --degree K [--strategy auto|kuhn|center]
  sfvem solve --mesh FILE --degree K --problem ID [--strategy S] [--out sol.json] [--errors]
  sfvem converge --family F --degree K --levels A..B --problem ID [--strategy S] --csv FILE";

#[derive(Debug, Parser)]
#[command(name = "sfvem", about = "Stabilizer-free virtual elements on polygonal and polyhedral meshes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a member of a mesh family.
    Mesh {
        #[arg(long)]
        family: Family,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=12))]
        level: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Validate a mesh and its macro subdivision.
    Check {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        degree: u32,
        #[arg(long, default_value = "auto")]
        strategy: Strategy,
    },
    /// Solve a manufactured problem on a mesh file.
    Solve {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        degree: u32,
        #[arg(long)]
        problem: String,
        #[arg(long, default_value = "auto")]
        strategy: Strategy,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the error norms against the exact solution.
        #[arg(long)]
        errors: bool,
    },
    /// Run a convergence study over consecutive levels.
    Converge {
        #[arg(long)]
        family: Family,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        degree: u32,
        #[arg(long, value_parser = parse_levels)]
        levels: (usize, usize),
        #[arg(long)]
        problem: String,
        #[arg(long, default_value = "auto")]
        strategy: Strategy,
        #[arg(long)]
        csv: PathBuf,
    },
}

fn parse_levels(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected A..B, got `{s}`"))?;
    let a: usize = a.trim().parse().map_err(|_| format!("bad level `{a}`"))?;
    let b: usize = b.trim().parse().map_err(|_| format!("bad level `{b}`"))?;
    if a == 0 || b < a {
        return Err(format!("levels must satisfy 1 <= A <= B, got {a}..{b}"));
    }
    Ok((a, b))
}

/// Serialized solution.
#[derive(Debug, Serialize)]
pub struct SolutionFile {
    pub mesh_sha256: String,
    pub degree: usize,
    pub problem: String,
    pub strategy: String,
    pub dofs: Vec<f64>,
    pub cell_coefficients: Vec<Vec<f64>>,
    pub iterations: usize,
    pub errors: Option<ErrorReport>,
}

enum Failure {
    Usage(String),
    Invalid(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownProblem(_) => Failure::Usage(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            eprintln!("{}", e.render().to_string().trim_end());
            eprintln!("{SYNOPSIS}");
            return 2;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("{SYNOPSIS}");
            2
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32, Failure> {
    match cmd {
        Command::Mesh { family, level, out } => {
            let mesh = MeshFamily::new(family, level as usize).generate();
            write_mesh(&mesh, &out)?;
            println!("wrote {family} level {level}: {} vertices, {} cells -> {}", mesh.num_vertices(), mesh.num_cells(), out.display());
            Ok(0)
        }
        Command::Check { mesh, degree, strategy } => {
            let text = std::fs::read_to_string(&mesh).map_err(Error::from)?;
            let mesh = parse_mesh(&text, Orientation::Strict)?;
            let mut report = validate_mesh(&mesh);
            if report.all_passed() {
                match subdivide_checked(&mesh, strategy) {
                    Ok((sub, r)) => {
                        report.extend(r);
                        if report.all_passed() {
                            let layout = build_layout(&mesh, degree as usize);
                            match build_projectors(&mesh, &sub, &layout) {
                                Ok(_) => report.pass(
                                    "projection",
                                    format!("local projections built for k = {degree}, {} tilde DOFs", layout.len()),
                                ),
                                Err(e) => report.fail("projection", "mesh", e.to_string()),
                            }
                        }
                    }
                    Err(e) => report.fail("subdivision", "mesh", e.to_string()),
                }
            }
            print!("{report}");
            Ok(if report.all_passed() { 0 } else { 1 })
        }
        Command::Solve { mesh, degree, problem, strategy, out, errors } => {
            let problem = problem_registry(&problem)?;
            let bytes = std::fs::read(&mesh).map_err(Error::from)?;
            let text = String::from_utf8(bytes.clone())
                .map_err(|_| Failure::Invalid(format!("{} is not UTF-8", mesh.display())))?;
            let mesh = parse_mesh(&text, Orientation::Fix)?;
            let cfg = SolverConfig::from_env().map_err(|e| Failure::Usage(e.to_string()))?;
            let disc = Discretization::new(mesh, degree as usize, strategy)?;
            let sol = disc.solve(&problem, &cfg)?;
            println!(
                "solved {} with k = {degree}: {} DOFs ({} free), {} iterations, residual {:.3e}",
                problem.id,
                disc.layout.len(),
                sol.free,
                sol.iterations,
                sol.residual
            );
            let report = if errors {
                let e = disc.errors(&problem, &sol, 0)?;
                println!("h = {:.6e}  L2 error = {:.6e}  H1 error = {:.6e}", e.h, e.l2_error, e.h1_error);
                Some(e)
            } else {
                None
            };
            if let Some(path) = out {
                let file = SolutionFile {
                    mesh_sha256: hex::encode(Sha256::digest(&bytes)),
                    degree: degree as usize,
                    problem: problem.id.clone(),
                    strategy: strategy.to_string(),
                    dofs: sol.dofs.iter().copied().collect(),
                    cell_coefficients: sol.coefficients.iter().map(|c| c.iter().copied().collect()).collect(),
                    iterations: sol.iterations,
                    errors: report,
                };
                let json = serde_json::to_string_pretty(&file).map_err(Error::from)?;
                std::fs::write(&path, json).map_err(Error::from)?;
            }
            Ok(0)
        }
        Command::Converge { family, degree, levels, problem, strategy, csv } => {
            let problem = problem_registry(&problem)?;
            if problem.dim != family.dim() {
                return Err(Failure::Usage(format!("problem `{}` does not fit the {family} family", problem.id)));
            }
            let cfg = SolverConfig::from_env().map_err(|e| Failure::Usage(e.to_string()))?;
            println!("{:>5} {:>12} {:>12} {:>10} {:>8}", "grid", "L2", "H1", "ndof", "iters");
            let report = convergence_study(family, degree as usize, levels.0..=levels.1, &problem, strategy, &cfg, |r| {
                println!("{:>5} {:>12.4e} {:>12.4e} {:>10} {:>8}", r.level, r.l2_error, r.h1_error, r.ndof, r.iterations);
            })?;
            let file = std::fs::File::create(&csv).map_err(Error::from)?;
            report.write_csv(file)?;
            let (l2, h1) = report.final_rates();
            let fmt = |r: Option<f64>| r.map_or("-".to_string(), |r| format!("{r:.2}"));
            println!("final rates: L2 {}  H1 {}", fmt(l2), fmt(h1));
            Ok(0)
        }
    }
}
