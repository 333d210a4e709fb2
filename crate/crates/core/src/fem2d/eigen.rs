use super::assembly::AssembledSystem;
use super::sparse::{CsrMatrix, EnvelopeCholesky};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Largest dimension solved with dense linear algebra.
pub const DENSE_LIMIT: usize = 300;
const SHIFT: f64 = -0.5;
const TARGET_RESIDUAL: f64 = 1e-10;
const MAX_ITERATIONS: usize = 400;
const START_SEED: u64 = 0x5eed_0f_5ace;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    /// Ascending, starting with μ₀ ≈ 0.
    pub eigenvalues: Vec<f64>,
    /// Coefficient vectors normalized to `xᵀ M x = 1`.
    pub eigenvectors: Vec<Vec<f64>>,
    /// `‖K x − μ M x‖ / ‖M x‖` per pair.
    pub residuals: Vec<f64>,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn residual(system: &AssembledSystem, mu: f64, x: &[f64]) -> f64 {
    let kx = system.stiffness.mul_vec(x);
    let mx = system.mass.mul_vec(x);
    let r: Vec<f64> = kx.iter().zip(&mx).map(|(k, m)| k - mu * m).collect();
    norm(&r) / norm(&mx)
}

/// The `k + 1` smallest generalized eigenpairs `K x = μ M x`.
pub fn solve_lowest(system: &AssembledSystem, k: usize) -> Result<EigenResult> {
    let n = system.dimension();
    if k == 0 || k >= n {
        return Err(Error::Argument(format!("need 1 <= k < {n}, got k = {k}")));
    }
    let (values, vectors) = if n <= DENSE_LIMIT { dense(system, k + 1)? } else { subspace_iteration(system, k + 1)? };
    let residuals = values.iter().zip(&vectors).map(|(&mu, x)| residual(system, mu, x)).collect();
    Ok(EigenResult { eigenvalues: values, eigenvectors: vectors, residuals })
}

/// Ritz pairs of the pencil (Kp, Mp), ascending, with Mp-orthonormal vectors.
fn generalized_dense(kp: DMatrix<f64>, mp: DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let chol = mp
        .cholesky()
        .ok_or_else(|| Error::Solver { radius: f64::NAN, reason: "mass matrix is not positive definite".into() })?;
    let l = chol.l();
    let linv = l.clone().try_inverse().ok_or_else(|| Error::Solver { radius: f64::NAN, reason: "singular mass factor".into() })?;
    let c = &linv * kp * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let sorted = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, linv.transpose() * sorted))
}

fn dense(system: &AssembledSystem, want: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let (values, vecs) = generalized_dense(system.stiffness.to_dense(), system.mass.to_dense())?;
    let vectors = (0..want).map(|c| vecs.column(c).iter().copied().collect()).collect();
    Ok((values[..want].to_vec(), vectors))
}

fn columns_times(a: &CsrMatrix, x: &[Vec<f64>]) -> Vec<Vec<f64>> {
    x.iter().map(|c| a.mul_vec(c)).collect()
}

fn gram(x: &[Vec<f64>], y: &[Vec<f64>]) -> DMatrix<f64> {
    let p = x.len();
    let mut g = DMatrix::zeros(p, p);
    for i in 0..p {
        for j in i..p {
            let v: f64 = x[i].iter().zip(&y[j]).map(|(a, b)| a * b).sum();
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}

/// Block shift-invert subspace iteration with Rayleigh–Ritz projection.
fn subspace_iteration(system: &AssembledSystem, want: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = system.dimension();
    let p = (2 * want + 8).min(n);
    let shifted = system.stiffness.add_scaled(-SHIFT, &system.mass);
    let factor = EnvelopeCholesky::factor(&shifted)?;
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut x: Vec<Vec<f64>> = (0..p).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let mut worst = f64::INFINITY;
    for _ in 0..MAX_ITERATIONS {
        let mx = columns_times(&system.mass, &x);
        let z: Vec<Vec<f64>> = mx.iter().map(|b| factor.solve(b)).collect();
        let kz = columns_times(&system.stiffness, &z);
        let mz = columns_times(&system.mass, &z);
        let (theta, y) = generalized_dense(gram(&z, &kz), gram(&z, &mz))?;
        let combine = |cols: &[Vec<f64>]| -> Vec<Vec<f64>> {
            (0..p)
                .map(|c| {
                    let mut out = vec![0.0; n];
                    for (r, col) in cols.iter().enumerate() {
                        let w = y[(r, c)];
                        for (o, v) in out.iter_mut().zip(col) {
                            *o += w * v;
                        }
                    }
                    out
                })
                .collect()
        };
        x = combine(&z);
        let kx = combine(&kz);
        let mxn = combine(&mz);
        worst = (0..want)
            .map(|i| {
                let r: Vec<f64> = kx[i].iter().zip(&mxn[i]).map(|(k, m)| k - theta[i] * m).collect();
                norm(&r) / norm(&mxn[i])
            })
            .fold(0.0, f64::max);
        if worst <= TARGET_RESIDUAL {
            x.truncate(want);
            return Ok((theta[..want].to_vec(), x));
        }
    }
    Err(Error::NonConvergence { iterations: MAX_ITERATIONS, residual: worst })
}
