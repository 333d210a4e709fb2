//! Piecewise-linear finite elements for the weighted Neumann problem on planar
//! origin-symmetric domains.

mod assembly;
mod delaunay;
mod eigen;
mod geometry;
mod mesh;
mod sparse;

pub use assembly::{assemble, gaussian_weight, triangle_rule, AssembledSystem};
pub use eigen::{solve_lowest, EigenResult, DENSE_LIMIT};
pub use geometry::{Domain2D, Shape};
pub use mesh::{mesh_domain, Mesh, MeshLocator, MAX_MESH_NODES, MIN_ANGLE_DEGREES};
pub use sparse::{CsrMatrix, EnvelopeCholesky};

use crate::error::{Error, Result};

/// Value of eigenvector `index` at `point` by linear interpolation.
pub fn eigenfunction_value(result: &EigenResult, mesh: &Mesh, index: usize, point: [f64; 2]) -> Result<f64> {
    let coeffs = result
        .eigenvectors
        .get(index)
        .ok_or_else(|| Error::Argument(format!("eigenvector {index} not computed")))?;
    let (t, bary) = MeshLocator::new(mesh).locate(point).ok_or(Error::Location { x: point[0], y: point[1] })?;
    Ok(mesh.triangles[t].iter().zip(bary).map(|(&v, l)| l * coeffs[v]).sum())
}

/// Everything produced by one finite-element solve.
#[derive(Debug, Clone)]
pub struct FemSolution {
    pub mesh: Mesh,
    pub system: AssembledSystem,
    pub result: EigenResult,
}

/// Meshes, assembles and solves for the `k + 1` lowest eigenpairs.
pub fn solve_domain(domain: &Domain2D, h: f64, k: usize) -> Result<FemSolution> {
    let mesh = mesh_domain(domain, h)?;
    let system = assemble(&mesh)?;
    let result = solve_lowest(&system, k)?;
    Ok(FemSolution { mesh, system, result })
}
