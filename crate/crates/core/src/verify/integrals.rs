use super::trial::TrialFunctionG;
use crate::error::Result;
use crate::fem2d::{triangle_rule, Mesh};
use crate::quadrature::{radial_integral, radial_normalizer};
use crate::radial_ode::RadialProfile;
use nalgebra::DMatrix;
use std::f64::consts::TAU;

/// Integrals over Ω with respect to dγ_m that enter the proof chain.
///
/// The tensors are `T[k][l] = ∫_Ω f(|x|) x_k x_l / |x|² dγ` for f = G², G'² and G²/|x|².
#[derive(Debug, Clone)]
pub struct DomainIntegrals {
    pub m: usize,
    /// ∫_Ω G² dγ.
    pub mass: f64,
    /// ∫_Ω G²/|x|² dγ.
    pub inverse_square: f64,
    pub tensor_mass: DMatrix<f64>,
    pub tensor_gradient: DMatrix<f64>,
    pub tensor_inverse_square: DMatrix<f64>,
    /// q[i][j] = ∫_Ω vᵢ uⱼ dγ.
    pub gram: DMatrix<f64>,
    /// ∫_Ω vᵢ dγ.
    pub means: Vec<f64>,
    /// ∫_Ω uᵢ uⱼ dγ for the eigenfunctions in use.
    pub eigen_gram: DMatrix<f64>,
    /// Relative quadrature error estimate over all of the above.
    pub quadrature_error: f64,
}

/// The same integrals over the matched ball.
#[derive(Debug, Clone, Copy)]
pub struct BallIntegrals {
    /// ∫_B G'² dγ.
    pub gradient: f64,
    /// ∫_B G²/|x|² dγ.
    pub inverse_square: f64,
    /// ∫_B G² dγ.
    pub mass: f64,
    pub quadrature_error: f64,
}

fn relative_change(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// `∫_a^b f r^(m-1) e^(-r²/2) dr` twice: on default panels and on panels of
/// width 1/16. Returns the finer value and the relative difference.
fn radial_pair(m: usize, a: f64, b: f64, kink: f64, f: impl Fn(f64) -> f64) -> Result<(f64, f64)> {
    let coarse = radial_integral(m, a, b, &[kink], &f)?;
    let panels = ((b - a) * 16.0).ceil() as usize;
    let mut breaks: Vec<f64> = (1..panels).map(|k| a + (b - a) * k as f64 / panels as f64).collect();
    breaks.push(kink);
    let fine = radial_integral(m, a, b, &breaks, &f)?;
    Ok((fine, relative_change(fine, coarse)))
}

pub fn ball_integrals(g: &TrialFunctionG) -> Result<BallIntegrals> {
    let (m, radius) = (g.m, g.matched_radius);
    let norm = radial_normalizer(m);
    let (gradient, e1) = radial_pair(m, 0.0, radius, radius, |r| g.derivative(r).powi(2))?;
    let (inverse_square, e2) = radial_pair(m, 0.0, radius, radius, |r| g.ratio(r).powi(2))?;
    let (mass, e3) = radial_pair(m, 0.0, radius, radius, |r| g.value(r).powi(2))?;
    Ok(BallIntegrals {
        gradient: norm * gradient,
        inverse_square: norm * inverse_square,
        mass: norm * mass,
        quadrature_error: e1.max(e2).max(e3),
    })
}

/// One eigenfunction of a radial domain: radial profile times a spherical
/// harmonic. Only ℓ = 1 modes carry the harmonic index `k` (the harmonic
/// xₖ/|x|); all others are orthogonal to every vᵢ.
pub struct RadialEigenfunction<'a> {
    pub profile: &'a RadialProfile,
    pub l: usize,
    pub harmonic: usize,
}

/// Integrals on the radial domain `inner < |x| < outer`, angular parts done exactly.
pub fn radial_domain_integrals(
    g: &TrialFunctionG,
    inner: f64,
    outer: f64,
    eigenfunctions: &[RadialEigenfunction<'_>],
) -> Result<DomainIntegrals> {
    let m = g.m;
    let norm = radial_normalizer(m);
    let kink = g.matched_radius;
    let (mass, e1) = radial_pair(m, inner, outer, kink, |r| g.value(r).powi(2))?;
    let (gradient, e2) = radial_pair(m, inner, outer, kink, |r| g.derivative(r).powi(2))?;
    let (inverse_square, e3) = radial_pair(m, inner, outer, kink, |r| g.ratio(r).powi(2))?;
    let mut error = e1.max(e2).max(e3);
    let n = eigenfunctions.len();
    let mut gram = DMatrix::zeros(m, n);
    for (j, u) in eigenfunctions.iter().enumerate() {
        // uⱼ = scale · g_u(r) Y(x/|x|) with the mean of Y² over the sphere equal to 1/m
        let (square, e) = radial_pair(m, inner, outer, kink, |r| u.profile.value(r).powi(2))?;
        error = error.max(e);
        let scale = (m as f64 / (norm * square)).sqrt();
        if u.l == 1 {
            let (cross, e) = radial_pair(m, inner, outer, kink, |r| g.value(r) * u.profile.value(r))?;
            error = error.max(e);
            gram[(u.harmonic, j)] = scale * norm * cross / m as f64;
        }
    }
    let share = 1.0 / m as f64;
    Ok(DomainIntegrals {
        m,
        mass: norm * mass,
        inverse_square: norm * inverse_square,
        tensor_mass: DMatrix::identity(m, m) * (share * norm * mass),
        tensor_gradient: DMatrix::identity(m, m) * (share * norm * gradient),
        tensor_inverse_square: DMatrix::identity(m, m) * (share * norm * inverse_square),
        gram,
        // ∫ xᵢ/|x| dσ = 0, and distinct harmonics are orthogonal on every sphere
        means: vec![0.0; m],
        eigen_gram: DMatrix::identity(n, n),
        quadrature_error: error,
    })
}

const MESH_QUANTITIES: usize = 20;

/// Integrand values packed as
/// [G², T_mass(3), T_grad(3), T_inv(3), q(4), means(2), uu(3), 1].
fn mesh_integrand(g: &TrialFunctionG, x: [f64; 2], u: [f64; 2]) -> [f64; MESH_QUANTITIES] {
    let r2 = x[0] * x[0] + x[1] * x[1];
    let r = r2.sqrt();
    let (gv, gp) = (g.value(r), g.derivative(r));
    let ratio = g.ratio(r);
    let c = [x[0] / r, x[1] / r];
    let dyad = [c[0] * c[0], c[0] * c[1], c[1] * c[1]];
    let v = [gv * c[0], gv * c[1]];
    let mut out = [0.0; MESH_QUANTITIES];
    out[0] = gv * gv;
    for k in 0..3 {
        out[1 + k] = gv * gv * dyad[k];
        out[4 + k] = gp * gp * dyad[k];
        out[7 + k] = ratio * ratio * dyad[k];
    }
    out[10] = v[0] * u[0];
    out[11] = v[0] * u[1];
    out[12] = v[1] * u[0];
    out[13] = v[1] * u[1];
    out[14] = v[0];
    out[15] = v[1];
    out[16] = u[0] * u[0];
    out[17] = u[0] * u[1];
    out[18] = u[1] * u[1];
    out[19] = 1.0;
    out
}

fn mesh_sums(g: &TrialFunctionG, mesh: &Mesh, u: [&[f64]; 2], subdivide: bool) -> [f64; MESH_QUANTITIES] {
    let rule = triangle_rule();
    let pieces: Vec<[[f64; 3]; 3]> = if subdivide {
        let (a, b, c) = ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]);
        let (ab, bc, ca) = ([0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]);
        vec![[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]
    } else {
        vec![[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]]
    };
    let share = 1.0 / pieces.len() as f64;
    let mut total = [0.0; MESH_QUANTITIES];
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let p = tri.map(|i| mesh.nodes[i]);
        let area = mesh.triangle_area(t) * share;
        for piece in &pieces {
            for (sub, w) in &rule {
                let lam: [f64; 3] = std::array::from_fn(|k| (0..3).map(|c| sub[c] * piece[c][k]).sum());
                let x = [
                    lam[0] * p[0][0] + lam[1] * p[1][0] + lam[2] * p[2][0],
                    lam[0] * p[0][1] + lam[1] * p[1][1] + lam[2] * p[2][1],
                ];
                let uv = [0, 1].map(|j| (0..3).map(|k| lam[k] * u[j][tri[k]]).sum::<f64>());
                let weight = w * area * (-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp() / TAU;
                for (acc, val) in total.iter_mut().zip(mesh_integrand(g, x, uv)) {
                    *acc += weight * val;
                }
            }
        }
    }
    total
}

/// Integrals over a planar mesh with piecewise-linear eigenfunctions `u`, by
/// the triangle rule on each quarter of every triangle. The rule on whole
/// triangles supplies the error estimate.
pub fn mesh_integrals(g: &TrialFunctionG, mesh: &Mesh, u: [&[f64]; 2]) -> DomainIntegrals {
    let fine = mesh_sums(g, mesh, u, true);
    let coarse = mesh_sums(g, mesh, u, false);
    let scale = fine[0].abs().max(fine[19]);
    let error = fine.iter().zip(&coarse).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale;
    let sym = |k: usize| DMatrix::from_row_slice(2, 2, &[fine[k], fine[k + 1], fine[k + 1], fine[k + 2]]);
    DomainIntegrals {
        m: 2,
        mass: fine[0],
        inverse_square: fine[7] + fine[9],
        tensor_mass: sym(1),
        tensor_gradient: sym(4),
        tensor_inverse_square: sym(7),
        gram: DMatrix::from_row_slice(2, 2, &fine[10..14]),
        means: fine[14..16].to_vec(),
        eigen_gram: sym(16),
        quadrature_error: error,
    }
}
