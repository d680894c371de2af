//! Stabilizer-free virtual elements for the Poisson equation on polygonal and
//! polyhedral meshes.

pub mod error;
pub mod geometry;
pub mod harness;
pub mod macrofe;
pub mod macrosub;
pub mod polybasis;
pub mod polymesh;
pub mod projector;
pub mod report;
pub mod system;

pub use error::{Error, Result};
pub use report::{CheckEntry, ValidationReport};
