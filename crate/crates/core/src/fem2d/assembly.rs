use super::mesh::Mesh;
use super::sparse::CsrMatrix;
use crate::error::{Error, Result};
use std::f64::consts::TAU;

/// Seven-point degree-5 rule on a triangle: barycentric points and weights summing to one.
pub fn triangle_rule() -> [([f64; 3], f64); 7] {
    let s = 15f64.sqrt();
    let a = (6.0 - s) / 21.0;
    let b = (6.0 + s) / 21.0;
    let wa = (155.0 - s) / 1200.0;
    let wb = (155.0 + s) / 1200.0;
    let c = 1.0 / 3.0;
    [
        ([c, c, c], 0.225),
        ([a, a, 1.0 - 2.0 * a], wa),
        ([a, 1.0 - 2.0 * a, a], wa),
        ([1.0 - 2.0 * a, a, a], wa),
        ([b, b, 1.0 - 2.0 * b], wb),
        ([b, 1.0 - 2.0 * b, b], wb),
        ([1.0 - 2.0 * b, b, b], wb),
    ]
}

pub fn gaussian_weight(p: [f64; 2]) -> f64 {
    (-(p[0] * p[0] + p[1] * p[1]) / 2.0).exp()
}

/// Weighted stiffness and mass matrices of piecewise-linear elements, with weight
/// `e^{-|x|²/2}` (not normalized; divide integrals by 2π for γ₂).
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub stiffness: CsrMatrix,
    pub mass: CsrMatrix,
}

impl AssembledSystem {
    pub fn dimension(&self) -> usize {
        self.mass.n
    }

    /// `Σᵢⱼ Mᵢⱼ / 2π`, the discrete Gaussian measure of the meshed domain.
    pub fn gaussian_volume(&self) -> f64 {
        self.mass.val.iter().sum::<f64>() / TAU
    }
}

pub fn assemble(mesh: &Mesh) -> Result<AssembledSystem> {
    let n = mesh.nodes.len();
    let rule = triangle_rule();
    let mut kt = Vec::with_capacity(9 * mesh.triangles.len());
    let mut mt = Vec::with_capacity(9 * mesh.triangles.len());
    for (ti, tri) in mesh.triangles.iter().enumerate() {
        let p = tri.map(|i| mesh.nodes[i]);
        let area = mesh.triangle_area(ti);
        if !(area > 0.0) {
            return Err(Error::Assembly { triangle: ti, area });
        }
        // ∇λ_k = (y_{k+1} - y_{k+2}, x_{k+2} - x_{k+1}) / 2A
        let grad: [[f64; 2]; 3] = std::array::from_fn(|k| {
            let (b, c) = (p[(k + 1) % 3], p[(k + 2) % 3]);
            [(b[1] - c[1]) / (2.0 * area), (c[0] - b[0]) / (2.0 * area)]
        });
        let mut weight_total = 0.0;
        let mut local_mass = [[0.0; 3]; 3];
        for (bary, w) in &rule {
            let x = [
                bary[0] * p[0][0] + bary[1] * p[1][0] + bary[2] * p[2][0],
                bary[0] * p[0][1] + bary[1] * p[1][1] + bary[2] * p[2][1],
            ];
            let g = w * area * gaussian_weight(x);
            weight_total += g;
            for a in 0..3 {
                for b in a..3 {
                    local_mass[a][b] += g * bary[a] * bary[b];
                }
            }
        }
        for a in 0..3 {
            for b in a..3 {
                let k = (grad[a][0] * grad[b][0] + grad[a][1] * grad[b][1]) * weight_total;
                let m = local_mass[a][b];
                kt.push((tri[a], tri[b], k));
                mt.push((tri[a], tri[b], m));
                if a != b {
                    kt.push((tri[b], tri[a], k));
                    mt.push((tri[b], tri[a], m));
                }
            }
        }
    }
    Ok(AssembledSystem { stiffness: CsrMatrix::from_triplets(n, kt), mass: CsrMatrix::from_triplets(n, mt) })
}
