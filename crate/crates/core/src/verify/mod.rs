//! Numerical check of the harmonic-mean inequality
//! Σ_{i<m} 1/μᵢ(Ω) ≥ (m−1)/μ₁(B) and of every step of its proof: the
//! trial functions vᵢ = G(|x|)xᵢ/|x| built from the matched ball, their
//! rotation against the eigenfunctions of Ω, the Rayleigh bounds, the chain of
//! integral inequalities and the Gaussian rearrangement comparisons.
//!
//! All integrals are taken against the normalized measure dγ_m.

mod integrals;
mod symmetrization;
mod trial;

pub use integrals::{ball_integrals, mesh_integrals, radial_domain_integrals, BallIntegrals, DomainIntegrals, RadialEigenfunction};
pub use symmetrization::{symmetrization_check, RadialFunction, SymmetrizationRecord};
pub use trial::{build_trial_functions, MonotonicityReport, TrialFunctionG, TrialFunctions};

use crate::ball_spectrum::radial_spectrum;
use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::fem2d::{solve_domain, Domain2D};
use crate::quadrature::{gaussian_ball_volume, radial_measure, radial_normalizer, volume_to_radius, GaussianVolume};
use crate::radial_ode::{RadialProblem, RadialProfile, ShootingConfig};
use nalgebra::DMatrix;
use serde::{Serialize, Serializer};
use std::f64::consts::TAU;

/// Slack floor added to every tolerance.
pub const TOLERANCE_FLOOR: f64 = 1e-8;
/// Largest admissible ∫ ṽᵢ uⱼ dγ for j < i.
pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-8;
/// Composed chain margin versus direct margin, relative to the right-hand side.
pub const COMPOSITION_TOLERANCE: f64 = 1e-6;
const MEAN_TOLERANCE: f64 = 1e-9;
const EIGEN_GRAM_TOLERANCE: f64 = 1e-6;
const DEFAULT_MESH_SIZE: f64 = 0.05;

fn rows<S: Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let out: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
    out.serialize(s)
}

/// Radius of the origin-centered ball with the given Gaussian volume.
pub fn matched_ball(m: usize, volume: GaussianVolume) -> Result<f64> {
    volume_to_radius(m, volume)
}

/// γ_m(Ω).
pub fn domain_volume(domain: &DomainSpec, m: usize) -> Result<GaussianVolume> {
    domain.validate(m)?;
    match *domain {
        DomainSpec::Ball { radius } => gaussian_ball_volume(m, radius),
        DomainSpec::Annulus { inner, outer } => {
            GaussianVolume::new((radial_normalizer(m) * radial_measure(m, inner, outer)).clamp(0.0, 1.0))
        }
        _ => GaussianVolume::new(Domain2D::from_spec(domain)?.gaussian_volume()?.clamp(0.0, 1.0)),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OrthogonalizationResult {
    /// q[i][j] = ∫ vᵢ uⱼ dγ.
    #[serde(serialize_with = "rows")]
    pub gram_q: DMatrix<f64>,
    /// Orthogonal A with A·q upper triangular.
    #[serde(serialize_with = "rows")]
    pub rotation_a: DMatrix<f64>,
    /// max over j < i of |∫ ṽᵢ uⱼ dγ| = |(A q)ᵢⱼ|.
    pub residual: f64,
    /// ‖A Aᵀ − I‖ (max entry).
    pub orthogonality_defect: f64,
    /// q is rank deficient; A is still valid but not unique.
    pub degenerate: bool,
}

impl OrthogonalizationResult {
    /// Values of the rotated family ṽᵢ = Σₖ aᵢₖ vₖ from the values vₖ.
    pub fn rotate(&self, values: &[f64]) -> Vec<f64> {
        (0..self.rotation_a.nrows()).map(|i| (0..values.len()).map(|k| self.rotation_a[(i, k)] * values[k]).sum()).collect()
    }
}

/// Householder QR q = Q R; A = Qᵀ makes A q = R upper triangular, so ṽᵢ ⟂ uⱼ for j < i.
/// Rows of A are sign-normalized so that diag(R) ≥ 0.
pub fn orthogonalize(gram_q: &DMatrix<f64>) -> Result<OrthogonalizationResult> {
    let n = gram_q.nrows();
    if n == 0 || gram_q.ncols() != n {
        return Err(Error::Argument(format!("Gram matrix must be square and nonempty, got {}x{}", n, gram_q.ncols())));
    }
    if gram_q.iter().any(|v| !v.is_finite()) {
        return Err(Error::Degenerate("Gram matrix has non-finite entries".into()));
    }
    let qr = gram_q.clone().qr();
    let mut a = qr.q().transpose();
    let r = qr.r();
    for i in 0..n {
        if r[(i, i)] < 0.0 {
            a.row_mut(i).neg_mut();
        }
    }
    let product = &a * gram_q;
    let mut residual = 0.0f64;
    for i in 0..n {
        for j in 0..i {
            residual = residual.max(product[(i, j)].abs());
        }
    }
    let defect = (&a * a.transpose() - DMatrix::identity(n, n)).abs().max();
    let scale = gram_q.abs().max();
    let degenerate = scale == 0.0 || (0..n).any(|i| r[(i, i)].abs() <= 1e-10 * scale);
    Ok(OrthogonalizationResult { gram_q: gram_q.clone(), rotation_a: a, residual, orthogonality_defect: defect, degenerate })
}

/// The steps of the proof chain, each stated as left ≤ right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainStep {
    /// ∫ ṽᵢ² ≤ (1/μᵢ) ∫ |∇ṽᵢ|².
    Admissibility,
    /// The admissibility bounds summed over i.
    SummedAdmissibility,
    /// ∫_Ω G'² ỹᵢ²/|x|² ≤ (1/m) ∫_B G'², since G' vanishes outside B.
    GradientTruncation,
    /// Σᵢ (1/μᵢ) ∫_Ω G²(1/|x|² − ỹᵢ²/|x|⁴) ≤ Σ_{i<m} (1/μᵢ) ∫_Ω G²/|x|².
    Ordering,
    /// ∫_Ω G²/|x|² ≤ ∫_B G²/|x|².
    InverseSquareSymmetrization,
    /// Ordering and the inverse-square comparison together.
    CombinedAngular,
    /// ∫_Ω G² ≤ Σᵢ ∫_B G'²/(m μᵢ) + Σ_{i<m} ∫_B (G²/|x|²)/μᵢ.
    Substitution,
    /// Replacing 1/μ_m by the mean of 1/μᵢ over i < m.
    TopEigenvalue,
    /// ∫_B G² ≤ ∫_Ω G².
    MassSymmetrization,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainRecord {
    pub step: ChainStep,
    /// 1-based coordinate index for per-coordinate steps.
    pub index: Option<usize>,
    pub left: f64,
    pub right: f64,
    /// right − left.
    pub slack: f64,
    pub tolerance: f64,
    pub satisfied: bool,
}

impl ChainRecord {
    fn new(step: ChainStep, index: Option<usize>, left: f64, right: f64, relative_error: f64) -> Self {
        let slack = right - left;
        let tolerance = TOLERANCE_FLOOR + relative_error * left.abs().max(right.abs());
        Self { step, index, left, right, slack, tolerance, satisfied: slack >= -tolerance }
    }

    /// |slack| within `relative` of the larger side.
    pub fn is_equality(&self, relative: f64) -> bool {
        self.slack.abs() <= relative * self.left.abs().max(self.right.abs())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub records: Vec<ChainRecord>,
    /// ∫_B (G'² + (m−1) G²/|x|²) dγ.
    pub ball_energy: f64,
    /// (m−1)/ball_energy × (sum of the substitution, top-eigenvalue and mass slacks).
    pub composed_margin: f64,
    pub passed: bool,
}

impl ChainReport {
    pub fn records_for(&self, step: ChainStep) -> impl Iterator<Item = &ChainRecord> {
        self.records.iter().filter(move |r| r.step == step)
    }
}

fn rotated_diagonal(a: &DMatrix<f64>, t: &DMatrix<f64>) -> Vec<f64> {
    let rotated = a * t * a.transpose();
    (0..rotated.nrows()).map(|i| rotated[(i, i)]).collect()
}

/// Rayleigh bounds for the rotated trial functions against μ₁..μ_m.
pub fn verify_rayleigh_bounds(
    integrals: &DomainIntegrals,
    mus: &[f64],
    rotation: &OrthogonalizationResult,
    relative_error: f64,
) -> Vec<ChainRecord> {
    let a = &rotation.rotation_a;
    let mass = rotated_diagonal(a, &integrals.tensor_mass);
    let gradient = rotated_diagonal(a, &integrals.tensor_gradient);
    let angular = rotated_diagonal(a, &integrals.tensor_inverse_square);
    (0..integrals.m)
        .map(|i| {
            let energy = gradient[i] + integrals.inverse_square - angular[i];
            ChainRecord::new(ChainStep::Admissibility, Some(i + 1), mass[i], energy / mus[i], relative_error)
        })
        .collect()
}

/// Evaluates both sides of every chain step from precomputed integrals.
pub fn chain_from_integrals(
    integrals: &DomainIntegrals,
    ball: &BallIntegrals,
    mus: &[f64],
    rotation: &OrthogonalizationResult,
    relative_error: f64,
) -> ChainReport {
    let m = integrals.m;
    let mf = m as f64;
    let a = &rotation.rotation_a;
    let mut records = verify_rayleigh_bounds(integrals, mus, rotation, relative_error);
    let summed: f64 = records.iter().map(|r| r.right).sum();
    records.push(ChainRecord::new(ChainStep::SummedAdmissibility, None, integrals.mass, summed, relative_error));

    let gradient = rotated_diagonal(a, &integrals.tensor_gradient);
    for (i, g) in gradient.iter().enumerate() {
        records.push(ChainRecord::new(ChainStep::GradientTruncation, Some(i + 1), *g, ball.gradient / mf, relative_error));
    }

    let angular = rotated_diagonal(a, &integrals.tensor_inverse_square);
    let inverse_sum: f64 = mus[..m - 1].iter().map(|mu| 1.0 / mu).sum();
    let full_sum: f64 = mus[..m].iter().map(|mu| 1.0 / mu).sum();
    let ordering_left: f64 = (0..m).map(|i| (integrals.inverse_square - angular[i]) / mus[i]).sum();
    records.push(ChainRecord::new(ChainStep::Ordering, None, ordering_left, inverse_sum * integrals.inverse_square, relative_error));
    records.push(ChainRecord::new(
        ChainStep::InverseSquareSymmetrization,
        None,
        integrals.inverse_square,
        ball.inverse_square,
        relative_error,
    ));
    records.push(ChainRecord::new(ChainStep::CombinedAngular, None, ordering_left, inverse_sum * ball.inverse_square, relative_error));

    let substituted = full_sum * ball.gradient / mf + inverse_sum * ball.inverse_square;
    records.push(ChainRecord::new(ChainStep::Substitution, None, integrals.mass, substituted, relative_error));
    let energy = ball.gradient + (mf - 1.0) * ball.inverse_square;
    let averaged = inverse_sum * energy / (mf - 1.0);
    records.push(ChainRecord::new(ChainStep::TopEigenvalue, None, substituted, averaged, relative_error));
    records.push(ChainRecord::new(ChainStep::MassSymmetrization, None, ball.mass, integrals.mass, relative_error));

    let closing: f64 = records
        .iter()
        .filter(|r| matches!(r.step, ChainStep::Substitution | ChainStep::TopEigenvalue | ChainStep::MassSymmetrization))
        .map(|r| r.slack)
        .sum();
    let passed = records.iter().all(|r| r.satisfied);
    ChainReport { records, ball_energy: energy, composed_margin: (mf - 1.0) / energy * closing, passed }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityReport {
    /// Σ_{i=1}^{m−1} 1/μᵢ(Ω).
    pub lhs: f64,
    /// (m−1)/μ₁(B).
    pub rhs: f64,
    pub margin: f64,
    pub tolerance: f64,
    /// lhs ≥ rhs − tolerance.
    pub satisfied: bool,
    /// |margin| ≤ tolerance and Ω is its own matched ball.
    pub equality: bool,
}

/// Σ_{i=1}^{m} 1/μᵢ(Ω) next to m/μ₁(B); reported, never asserted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FullSumExploration {
    pub domain_sum: f64,
    pub ball_sum: f64,
    pub difference: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Radial solver for balls and annuli, finite elements otherwise.
    #[default]
    Auto,
    Radial,
    Fem,
}

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    pub backend: Backend,
    /// Finite-element mesh size; the estimate uses twice this as well.
    pub mesh_size: Option<f64>,
    pub shooting: ShootingConfig,
    /// Replaces μ₁..μ_m(Ω) from the solver.
    pub spectrum_override: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeshSummary {
    pub h: f64,
    pub nodes: usize,
    pub triangles: usize,
    pub coarse_h: f64,
    /// Discrete Gaussian volume of the fine mesh.
    pub mesh_volume: f64,
}

/// Everything computed for one domain, serialized as the verification record.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationRecord {
    pub domain: DomainSpec,
    pub m: usize,
    pub backend: Backend,
    pub gaussian_volume: f64,
    pub matched_radius: f64,
    pub ball_mu1: f64,
    /// μ₁..μ_m(Ω) as used.
    pub spectrum: Vec<f64>,
    /// Per-eigenvalue uncertainty entering the tolerances.
    pub spectrum_uncertainty: Vec<f64>,
    pub mesh: Option<MeshSummary>,
    pub trial: MonotonicityReport,
    pub orthogonalization: OrthogonalizationResult,
    pub inequality: InequalityReport,
    pub chain: ChainReport,
    /// |composed − direct margin| / rhs.
    pub composition_error: f64,
    pub exploration: FullSumExploration,
    pub passed: bool,
}

struct DomainData {
    backend: Backend,
    mus: Vec<f64>,
    uncertainty: Vec<f64>,
    integrals: DomainIntegrals,
    relative_error: f64,
    mesh: Option<MeshSummary>,
}

fn resolve_backend(domain: &DomainSpec, m: usize, backend: Backend) -> Result<Backend> {
    match backend {
        Backend::Auto if domain.is_radial() => Ok(Backend::Radial),
        Backend::Auto | Backend::Fem => {
            if m != 2 {
                return Err(Error::Argument(format!("finite elements need m = 2, got {m}")));
            }
            Ok(Backend::Fem)
        }
        Backend::Radial if domain.is_radial() => Ok(Backend::Radial),
        Backend::Radial => Err(Error::Argument(format!("{} is not radial", domain.kind()))),
    }
}

fn radial_data(domain: &DomainSpec, g: &TrialFunctionG, options: &VerifyOptions) -> Result<DomainData> {
    let m = g.m;
    let (inner, outer) = match *domain {
        DomainSpec::Ball { radius } => (0.0, radius),
        DomainSpec::Annulus { inner, outer } => (inner, outer),
        _ => unreachable!("radial backend only sees balls and annuli"),
    };
    let spectrum = radial_spectrum(m, domain, m + 1, &options.shooting)?;
    let profiles: Vec<RadialProfile> = spectrum
        .entries
        .iter()
        .zip(&spectrum.modes)
        .map(|(e, pair)| {
            let l = e.angular_index_l.expect("radial spectra label every entry");
            RadialProblem::new(m, l, inner, outer).map(|p| RadialProfile::new(pair, &p))
        })
        .collect::<Result<_>>()?;
    // expand to one eigenfunction per eigenvalue, skipping μ₀
    let mut functions = Vec::new();
    let mut mus = Vec::new();
    for (entry, profile) in spectrum.entries.iter().zip(&profiles) {
        for harmonic in 0..entry.multiplicity {
            mus.push(entry.mu);
            functions.push(RadialEigenfunction { profile, l: entry.angular_index_l.unwrap_or(0), harmonic });
        }
    }
    let functions: Vec<_> = functions.into_iter().skip(1).take(m).collect();
    let mus = mus[1..=m].to_vec();
    let integrals = radial_domain_integrals(g, inner, outer, &functions)?;
    let uncertainty = vec![options.shooting.mu_tolerance; m];
    let relative_error = mus.iter().map(|mu| options.shooting.mu_tolerance / mu).fold(0.0, f64::max);
    Ok(DomainData { backend: Backend::Radial, mus, uncertainty, integrals, relative_error, mesh: None })
}

fn fem_data(domain: &DomainSpec, g: &TrialFunctionG, volume: f64, options: &VerifyOptions) -> Result<DomainData> {
    let planar = Domain2D::from_spec(domain)?;
    let h = options.mesh_size.unwrap_or_else(|| default_mesh_size(&planar));
    let fine = solve_domain(&planar, h, 2)?;
    let coarse = solve_domain(&planar, 2.0 * h, 2)?;
    let mus = fine.result.eigenvalues[1..=2].to_vec();
    let uncertainty: Vec<f64> = (1..=2).map(|i| (fine.result.eigenvalues[i] - coarse.result.eigenvalues[i]).abs()).collect();
    // coefficient vectors are normalized against e^{-|x|²/2}dx; rescale to dγ₂
    let u: Vec<Vec<f64>> = (1..=2).map(|i| fine.result.eigenvectors[i].iter().map(|c| c * TAU.sqrt()).collect()).collect();
    let integrals = mesh_integrals(g, &fine.mesh, [&u[0], &u[1]]);
    let mesh_volume = fine.system.gaussian_volume();
    let solver = fine.result.residuals.iter().copied().fold(0.0, f64::max);
    let relative_error = mus.iter().zip(&uncertainty).map(|(mu, d)| d / mu).fold(0.0, f64::max)
        + (mesh_volume - volume).abs() / volume
        + solver;
    let mesh = MeshSummary {
        h: fine.mesh.h,
        nodes: fine.mesh.nodes.len(),
        triangles: fine.mesh.triangles.len(),
        coarse_h: coarse.mesh.h,
        mesh_volume,
    };
    Ok(DomainData { backend: Backend::Fem, mus, uncertainty, integrals, relative_error, mesh: Some(mesh) })
}

/// Mesh size used when none is given: 0.05, or a fifth of the inradius for thin domains.
pub fn default_mesh_size(domain: &Domain2D) -> f64 {
    DEFAULT_MESH_SIZE.min(domain.inradius() / 5.0)
}

/// Rejects domains whose trial functions do not average to zero or whose
/// eigenfunctions are not orthonormal.
pub fn check_preconditions(integrals: &DomainIntegrals) -> Result<()> {
    if let Some((i, mean)) = integrals.means.iter().enumerate().find(|(_, v)| v.abs() > MEAN_TOLERANCE) {
        return Err(Error::Precondition(format!("trial function v{} has mean {mean:e}; the domain is not origin-symmetric", i + 1)));
    }
    let n = integrals.eigen_gram.nrows();
    let defect = (&integrals.eigen_gram - DMatrix::identity(n, n)).abs().max();
    if defect > EIGEN_GRAM_TOLERANCE {
        return Err(Error::Precondition(format!("eigenfunctions are not orthonormal (defect {defect:e})")));
    }
    Ok(())
}

/// Full verification of one domain.
pub fn verify_domain(domain: &DomainSpec, m: usize, options: &VerifyOptions) -> Result<VerificationRecord> {
    if m < 2 {
        return Err(Error::Argument(format!("the inequality needs m >= 2, got {m}")));
    }
    domain.validate(m)?;
    options.shooting.validate()?;
    let backend = resolve_backend(domain, m, options.backend)?;
    let volume = domain_volume(domain, m)?;
    if !(volume.value() > 0.0 && volume.value() < 1.0) {
        return Err(Error::Argument(format!("Gaussian volume {} is outside (0, 1)", volume.value())));
    }
    let radius = matched_ball(m, volume)?;
    let g = TrialFunctionG::new(m, radius, &options.shooting)?;
    let ball = ball_integrals(&g)?;
    let mut data = match backend {
        Backend::Fem => fem_data(domain, &g, volume.value(), options)?,
        _ => radial_data(domain, &g, options)?,
    };
    check_preconditions(&data.integrals)?;
    if let Some(values) = &options.spectrum_override {
        if values.len() < m || values[..m].iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Argument(format!("spectrum override needs {m} positive eigenvalues")));
        }
        data.mus = values[..m].to_vec();
    }
    let mus = &data.mus;
    let rotation = orthogonalize(&data.integrals.gram)?;
    let relative_error = data.relative_error + data.integrals.quadrature_error + ball.quadrature_error;
    let chain = chain_from_integrals(&data.integrals, &ball, mus, &rotation, relative_error);

    let mf = m as f64;
    let lhs: f64 = mus[..m - 1].iter().map(|mu| 1.0 / mu).sum();
    let rhs = (mf - 1.0) / g.mu;
    let margin = lhs - rhs;
    let tolerance = TOLERANCE_FLOOR
        + mus[..m - 1].iter().zip(&data.uncertainty).map(|(mu, d)| d / (mu * mu)).sum::<f64>()
        + (mf - 1.0) * options.shooting.mu_tolerance / (g.mu * g.mu);
    let inequality = InequalityReport {
        lhs,
        rhs,
        margin,
        tolerance,
        satisfied: margin >= -tolerance,
        equality: margin.abs() <= tolerance && domain.is_ball(),
    };
    let composition_error = (chain.composed_margin - margin).abs() / rhs;
    let domain_sum: f64 = mus.iter().map(|mu| 1.0 / mu).sum();
    let exploration = FullSumExploration { domain_sum, ball_sum: mf / g.mu, difference: domain_sum - mf / g.mu };
    let trial = g.monotonicity();
    let passed = inequality.satisfied
        && chain.passed
        && rotation.residual <= ORTHOGONALITY_TOLERANCE
        && rotation.orthogonality_defect <= 1e-10
        && trial.g_nondecreasing
        && trial.ratio_nonincreasing
        && composition_error <= COMPOSITION_TOLERANCE;
    Ok(VerificationRecord {
        domain: domain.clone(),
        m,
        backend: data.backend,
        gaussian_volume: volume.value(),
        matched_radius: radius,
        ball_mu1: g.mu,
        spectrum: data.mus,
        spectrum_uncertainty: data.uncertainty,
        mesh: data.mesh,
        trial,
        orthogonalization: rotation,
        inequality,
        chain,
        composition_error,
        exploration,
        passed,
    })
}

/// The main inequality with default options.
pub fn verify_main_inequality(domain: &DomainSpec, m: usize) -> Result<InequalityReport> {
    Ok(verify_domain(domain, m, &VerifyOptions::default())?.inequality)
}

/// The proof chain with default options.
pub fn verify_chain(domain: &DomainSpec, m: usize) -> Result<ChainReport> {
    Ok(verify_domain(domain, m, &VerifyOptions::default())?.chain)
}
