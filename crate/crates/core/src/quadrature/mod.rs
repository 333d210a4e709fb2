//! Gaussian-measure primitives.
//!
//! Everything here works with the radial density `r^(m-1) e^(-r²/2)`; the normalized
//! measure of an origin-centered ball is `γ_m(B_R) = P(m/2, R²/2)`.

mod gamma;
mod legendre;

pub use gamma::{gamma_half_integer, ln_gamma, regularized_gamma, regularized_gamma_p, regularized_gamma_q};
pub use legendre::gauss_legendre;

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Radius beyond which the remaining Gaussian mass is below 1e-14 for m ≤ 6.
pub const TAIL_RADIUS: f64 = 12.0;
pub const DEFAULT_ORDER: usize = 16;
pub const MAX_PANEL_WIDTH: f64 = 0.25;

/// Normalized Gaussian measure of a set, in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GaussianVolume(f64);

impl GaussianVolume {
    pub fn new(value: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::Argument(format!("Gaussian volume {value} outside [0, 1]")));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Weighted radial quadrature: `Σ wᵢ f(rᵢ) ≈ ∫_a^b f(r) r^(m-1) e^(-r²/2) dr`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub interval_start: f64,
    pub interval_end: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub dimension_m: usize,
}

impl QuadratureRule {
    /// The rule's value for `f ≡ 1`.
    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }
}

fn check_dimension(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::Argument("dimension m must be at least 1".into()));
    }
    Ok(())
}

/// `γ_m(B_R)`, the normalized Gaussian measure of the origin-centered ball of radius R.
pub fn gaussian_ball_volume(m: usize, radius: f64) -> Result<GaussianVolume> {
    check_dimension(m)?;
    if !radius.is_finite() || radius < 0.0 {
        return Err(Error::Argument(format!("radius must be finite and non-negative, got {radius}")));
    }
    Ok(GaussianVolume(regularized_gamma_p(m as f64 / 2.0, radius * radius / 2.0)))
}

/// `1 - γ_m(B_R)` without cancellation.
pub fn gaussian_ball_complement(m: usize, radius: f64) -> f64 {
    regularized_gamma_q(m as f64 / 2.0, radius * radius / 2.0)
}

/// Normalization turning `∫ f(r) r^(m-1) e^(-r²/2) dr` into `∫ f(|x|) dγ_m`:
/// `(2π)^(-m/2) |S^(m-1)| = 1 / (2^(m/2-1) Γ(m/2))`.
pub fn radial_normalizer(m: usize) -> f64 {
    1.0 / (2f64.powf(m as f64 / 2.0 - 1.0) * gamma_half_integer(m))
}

/// Closed form of `∫_a^b r^(m-1) e^(-r²/2) dr`.
pub fn radial_measure(m: usize, a: f64, b: f64) -> f64 {
    let shape = m as f64 / 2.0;
    let (xa, xb) = (a * a / 2.0, b * b / 2.0);
    // difference of Q values in the upper tail keeps relative accuracy
    let diff = if xa > shape + 1.0 {
        regularized_gamma_q(shape, xa) - regularized_gamma_q(shape, xb)
    } else {
        regularized_gamma_p(shape, xb) - regularized_gamma_p(shape, xa)
    };
    diff / radial_normalizer(m)
}

/// Radius R of the origin-centered ball with `γ_m(B_R) = volume`.
pub fn volume_to_radius(m: usize, volume: GaussianVolume) -> Result<f64> {
    check_dimension(m)?;
    let v = volume.value();
    if v >= 1.0 {
        return Err(Error::UnattainableVolume(v));
    }
    if v == 0.0 {
        return Ok(0.0);
    }
    let upper_tail = v > 0.5;
    let target = if upper_tail { 1.0 - v } else { v };
    // residual(R) is increasing in R
    let residual = |r: f64| -> f64 {
        if upper_tail {
            target - gaussian_ball_complement(m, r)
        } else {
            gaussian_ball_volume(m, r).map(|g| g.value()).unwrap_or(f64::NAN) - target
        }
    };
    let density = |r: f64| radial_normalizer(m) * r.powi(m as i32 - 1) * (-r * r / 2.0).exp();

    let mut lo = 0.0;
    let mut hi = 1.0;
    while residual(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e3 {
            return Err(Error::UnattainableVolume(v));
        }
    }
    let mut r = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = residual(r);
        if f == 0.0 {
            return Ok(r);
        }
        if f < 0.0 {
            lo = r;
        } else {
            hi = r;
        }
        let d = density(r);
        let newton = r - f / d;
        let next = if d > 0.0 && newton >= lo && newton <= hi { newton } else { 0.5 * (lo + hi) };
        if (next - r).abs() <= 4.0 * f64::EPSILON * r || hi - lo < 1e-15 * hi.max(1.0) {
            return Ok(next);
        }
        r = next;
    }
    Ok(r)
}

/// Composite Gauss–Legendre rule on [a, b] with panels no wider than 0.25, weights
/// already multiplied by the radial Gaussian density.
pub fn radial_rule(m: usize, a: f64, b: f64, order: usize) -> Result<QuadratureRule> {
    check_dimension(m)?;
    if !(a.is_finite() && b.is_finite()) || a < 0.0 || a >= b {
        return Err(Error::Argument(format!("radial interval must satisfy 0 <= a < b < inf, got [{a}, {b}]")));
    }
    if order < 2 {
        return Err(Error::Argument(format!("quadrature order must be at least 2, got {order}")));
    }
    let (x, w) = gauss_legendre(order);
    let panels = ((b - a) / MAX_PANEL_WIDTH).ceil().max(1.0) as usize;
    let width = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let left = a + p as f64 * width;
        let half = 0.5 * width;
        for (xi, wi) in x.iter().zip(&w) {
            let r = left + half * (1.0 + xi);
            nodes.push(r);
            weights.push(half * wi * r.powi(m as i32 - 1) * (-r * r / 2.0).exp());
        }
    }
    Ok(QuadratureRule { interval_start: a, interval_end: b, nodes, weights, dimension_m: m })
}

/// `Σ wᵢ f(rᵢ)`; fails on the first node where f is not finite.
pub fn integrate_radial(rule: &QuadratureRule, f: impl Fn(f64) -> f64) -> Result<f64> {
    let mut sum = 0.0;
    for (&r, &w) in rule.nodes.iter().zip(&rule.weights) {
        let value = f(r);
        if !value.is_finite() {
            return Err(Error::Evaluation { node: r, value });
        }
        sum += w * value;
    }
    Ok(sum)
}

/// `∫_a^b f(r) r^(m-1) e^(-r²/2) dr` on the default rule, with panel breaks at `breaks`.
pub fn radial_integral(m: usize, a: f64, b: f64, breaks: &[f64], f: impl Fn(f64) -> f64) -> Result<f64> {
    let mut cuts: Vec<f64> = vec![a];
    cuts.extend(breaks.iter().copied().filter(|&t| t > a && t < b));
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    let mut total = 0.0;
    for pair in cuts.windows(2) {
        if pair[1] - pair[0] <= 1e-15 * pair[1].max(1.0) {
            continue;
        }
        let rule = radial_rule(m, pair[0], pair[1], DEFAULT_ORDER)?;
        total += integrate_radial(&rule, &f)?;
    }
    Ok(total)
}

// Gauss–Kronrod 7/15 abscissae and weights on [-1, 1].
const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS_K: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GK_WEIGHTS_G: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = GK_WEIGHTS_K[7] * fc;
    let mut gauss = GK_WEIGHTS_G[3] * fc;
    for j in 0..7 {
        let dx = h * GK_NODES[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += GK_WEIGHTS_K[j] * s;
        if j % 2 == 1 {
            gauss += GK_WEIGHTS_G[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Globally adaptive Gauss–Kronrod integration of a plain function on [a, b].
/// Returns (value, error estimate).
pub fn adaptive_integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let f = &f as &dyn Fn(f64) -> f64;
    let (v, e) = gk15(f, a, b);
    let mut intervals = vec![(a, b, v, e)];
    for _ in 0..2000 {
        let total_err: f64 = intervals.iter().map(|iv| iv.3).sum();
        let total: f64 = intervals.iter().map(|iv| iv.2).sum();
        if total_err <= tol.max(tol * total.abs()) {
            break;
        }
        let worst = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let (lo, hi, _, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(f, lo, mid);
        let (v2, e2) = gk15(f, mid, hi);
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
    let value = intervals.iter().map(|iv| iv.2).sum();
    let err = intervals.iter().map(|iv| iv.3).sum();
    (value, err)
}
