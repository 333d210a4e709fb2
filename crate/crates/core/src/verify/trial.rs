use crate::error::{Error, Result};
use crate::radial_ode::{mu1_ball, RadialEigenpair, RadialProblem, RadialProfile, ShootingConfig};
use serde::Serialize;

const MONOTONE_SAMPLES: usize = 4000;
const MONOTONE_TOLERANCE: f64 = 1e-10;

/// The first ℓ = 1 eigenfunction g of the matched ball `B_R`, frozen at g(R)
/// beyond R.
#[derive(Debug, Clone)]
pub struct TrialFunctionG {
    pub m: usize,
    pub matched_radius: f64,
    /// μ₁(B_R).
    pub mu: f64,
    /// g(R), the value carried to infinity.
    pub extension: f64,
    pub pair: RadialEigenpair,
    profile: RadialProfile,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonotonicityReport {
    /// Most negative step of G on the sample grid, relative to max G.
    pub worst_g_decrease: f64,
    /// Largest step up of G(r)/r on the sample grid, relative to max G / R.
    pub worst_ratio_increase: f64,
    pub g_nondecreasing: bool,
    pub ratio_nonincreasing: bool,
}

impl TrialFunctionG {
    pub fn new(m: usize, matched_radius: f64, config: &ShootingConfig) -> Result<Self> {
        let pair = mu1_ball(m, matched_radius, config)?;
        let problem = RadialProblem::ball(m, 1, matched_radius)?;
        let profile = RadialProfile::new(&pair, &problem);
        let extension = *pair.g_values.last().expect("eigenfunction grid is never empty");
        if !(extension > 0.0) {
            return Err(Error::Degenerate(format!("g(R) = {extension} is not positive")));
        }
        Ok(Self { m, matched_radius, mu: pair.mu, extension, pair, profile })
    }

    pub fn value(&self, r: f64) -> f64 {
        if r >= self.matched_radius {
            self.extension
        } else {
            self.profile.value(r)
        }
    }

    pub fn derivative(&self, r: f64) -> f64 {
        if r >= self.matched_radius {
            0.0
        } else {
            self.profile.derivative(r)
        }
    }

    /// G(r)/r, with the limit g'(0) at the origin.
    pub fn ratio(&self, r: f64) -> f64 {
        if r > 0.0 {
            self.value(r) / r
        } else {
            self.profile.derivative(0.0)
        }
    }

    /// Checks G nondecreasing and G/r nonincreasing on (0, 2R].
    pub fn monotonicity(&self) -> MonotonicityReport {
        let top = 2.0 * self.matched_radius;
        let scale = self.extension;
        let ratio_scale = scale / self.matched_radius;
        let mut worst_g = 0.0f64;
        let mut worst_ratio = 0.0f64;
        let mut prev = (self.value(0.0), self.ratio(0.0));
        for k in 1..=MONOTONE_SAMPLES {
            let r = top * k as f64 / MONOTONE_SAMPLES as f64;
            let now = (self.value(r), self.ratio(r));
            worst_g = worst_g.min((now.0 - prev.0) / scale);
            worst_ratio = worst_ratio.max((now.1 - prev.1) / ratio_scale);
            prev = now;
        }
        MonotonicityReport {
            worst_g_decrease: worst_g,
            worst_ratio_increase: worst_ratio,
            g_nondecreasing: worst_g >= -MONOTONE_TOLERANCE,
            ratio_nonincreasing: worst_ratio <= MONOTONE_TOLERANCE,
        }
    }
}

/// The family vᵢ(x) = G(|x|) xᵢ/|x|, i = 1..m.
#[derive(Debug, Clone, Copy)]
pub struct TrialFunctions<'a> {
    pub g: &'a TrialFunctionG,
    pub m: usize,
}

pub fn build_trial_functions(g: &TrialFunctionG, m: usize) -> TrialFunctions<'_> {
    TrialFunctions { g, m }
}

impl TrialFunctions<'_> {
    /// vᵢ(x) for 0-based i; zero at the origin.
    pub fn value(&self, i: usize, x: &[f64]) -> f64 {
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        if r == 0.0 {
            0.0
        } else {
            self.g.value(r) * x[i] / r
        }
    }

    /// |∇vᵢ|² = G'² xᵢ²/|x|² + G² (1/|x|² − xᵢ²/|x|⁴).
    pub fn gradient_norm_squared(&self, i: usize, x: &[f64]) -> f64 {
        let r2 = x.iter().map(|c| c * c).sum::<f64>();
        if r2 == 0.0 {
            let d = self.g.ratio(0.0);
            return d * d;
        }
        let r = r2.sqrt();
        let (g, gp) = (self.g.value(r), self.g.derivative(r));
        let c2 = x[i] * x[i] / r2;
        gp * gp * c2 + g * g * (1.0 - c2) / r2
    }
}
