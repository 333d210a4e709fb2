use super::{domain_volume, matched_ball};
use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::fem2d::Domain2D;
use crate::quadrature::{radial_integral, radial_measure, radial_normalizer, TAIL_RADIUS};
use serde::{Deserialize, Serialize};

const MONOTONE_SAMPLES: usize = 4096;
const POLAR_TOLERANCE: f64 = 1e-12;

/// A radial profile h(r) for the rearrangement comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum RadialFunction {
    Constant { value: f64 },
    /// `scale · e^(-rate r)`.
    Exponential { scale: f64, rate: f64 },
    /// `intercept + slope · r`.
    Linear { intercept: f64, slope: f64 },
    /// `values[k]` on `[breaks[k-1], breaks[k])`, with `breaks[-1] = 0` and `breaks[len] = ∞`.
    Step { breaks: Vec<f64>, values: Vec<f64> },
}

impl RadialFunction {
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            RadialFunction::Constant { value } => *value,
            RadialFunction::Exponential { scale, rate } => scale * (-rate * r).exp(),
            RadialFunction::Linear { intercept, slope } => intercept + slope * r,
            RadialFunction::Step { breaks, values } => values[breaks.partition_point(|&b| b <= r)],
        }
    }

    /// Rejects anything that increases somewhere on [0, TAIL_RADIUS].
    pub fn validate(&self) -> Result<()> {
        if let RadialFunction::Step { breaks, values } = self {
            if values.len() != breaks.len() + 1 {
                return Err(Error::Argument(format!(
                    "step function needs one more value than breaks, got {} and {}",
                    values.len(),
                    breaks.len()
                )));
            }
            if breaks.windows(2).any(|w| !(w[0] < w[1])) || breaks.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
                return Err(Error::Argument("step breaks must be positive and strictly increasing".into()));
            }
            if let Some(k) = values.windows(2).position(|w| w[1] > w[0]) {
                return Err(Error::Precondition(format!(
                    "h increases across r = {}: {} -> {}",
                    breaks[k],
                    values[k],
                    values[k + 1]
                )));
            }
            return Ok(());
        }
        let mut prev = self.eval(0.0);
        for k in 1..=MONOTONE_SAMPLES {
            let r = TAIL_RADIUS * k as f64 / MONOTONE_SAMPLES as f64;
            let now = self.eval(r);
            if !now.is_finite() {
                return Err(Error::Evaluation { node: r, value: now });
            }
            if now > prev {
                return Err(Error::Precondition(format!("h increases near r = {r}: {prev} -> {now}")));
            }
            prev = now;
        }
        Ok(())
    }

    /// `∫_a^b h(r) r^(m-1) e^(-r²/2) dr`, in closed form for piecewise constants.
    pub fn moment(&self, m: usize, a: f64, b: f64) -> Result<f64> {
        if b <= a {
            return Ok(0.0);
        }
        match self {
            RadialFunction::Constant { value } => Ok(value * radial_measure(m, a, b)),
            RadialFunction::Step { breaks, values } => {
                let mut total = 0.0;
                let mut lo = 0.0f64;
                for (k, &v) in values.iter().enumerate() {
                    let hi = breaks.get(k).copied().unwrap_or(f64::INFINITY);
                    let (s, e) = (lo.max(a), hi.min(b));
                    if e > s {
                        total += v * radial_measure(m, s, e);
                    }
                    lo = hi;
                }
                Ok(total)
            }
            _ => radial_integral(m, a, b, &[], |r| self.eval(r)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetrizationRecord {
    pub gaussian_volume: f64,
    pub matched_radius: f64,
    /// ∫_Ω h(|x|) dγ.
    pub domain_side: f64,
    /// ∫_B h(|x|) dγ.
    pub ball_side: f64,
    /// ball_side − domain_side.
    pub slack: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Compares ∫_Ω h(|x|) dγ_m with the same integral over the ball of equal Gaussian volume.
pub fn symmetrization_check(domain: &DomainSpec, m: usize, h: &RadialFunction) -> Result<SymmetrizationRecord> {
    domain.validate(m)?;
    h.validate()?;
    let volume = domain_volume(domain, m)?;
    let radius = matched_ball(m, volume)?;
    let norm = radial_normalizer(m);
    let (domain_side, quadrature_error) = match *domain {
        DomainSpec::Ball { radius } => (norm * h.moment(m, 0.0, radius)?, 0.0),
        DomainSpec::Annulus { inner, outer } => (norm * h.moment(m, inner, outer)?, 0.0),
        _ => {
            let planar = Domain2D::from_spec(domain)?;
            let failure = std::cell::Cell::new(None);
            let (value, err) = planar.polar_integral(
                |r_in, r_out| {
                    h.moment(2, r_in, r_out).unwrap_or_else(|e| {
                        failure.set(Some(e));
                        0.0
                    })
                },
                POLAR_TOLERANCE,
            )?;
            if let Some(e) = failure.into_inner() {
                return Err(e);
            }
            (value, err)
        }
    };
    let ball_side = norm * h.moment(m, 0.0, radius)?;
    let scale = domain_side.abs().max(ball_side.abs());
    let tolerance = quadrature_error + 1e-11 * scale + 1e-14;
    let slack = ball_side - domain_side;
    Ok(SymmetrizationRecord {
        gaussian_volume: volume.value(),
        matched_radius: radius,
        domain_side,
        ball_side,
        slack,
        tolerance,
        passed: slack >= -tolerance,
    })
}
