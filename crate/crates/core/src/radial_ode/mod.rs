//! Shooting solver for the radial Neumann problem
//!
//! ```text
//! g'' + ((m-1)/r - r) g' + (μ - ℓ(ℓ+m-2)/r²) g = 0,   r ∈ (R₁, R₂),
//! ```
//!
//! with `g'(R₂) = 0` and either regularity at the origin (`R₁ = 0`, `g ~ r^ℓ`) or
//! `g'(R₁) = 0`. Separated eigenfunctions of `-Δu + x·∇u` on balls and annuli are
//! `g(r) Y_ℓ(θ)` with `Y_ℓ` a degree-ℓ spherical harmonic.
//!
//! Eigenvalues are bracketed by scanning μ and bisected on the Wronskian of a
//! solution launched from the inner boundary against one launched from the outer
//! boundary, matched at an interior radius. Integrating inward from `R₂` is stable
//! against the `e^{r²/2}` mode, so the assembled eigenfunction satisfies both
//! boundary conditions even on large balls where a one-sided shot is dominated by
//! that mode.

mod dopri;
mod profile;

pub use profile::RadialProfile;

use crate::error::{Error, Result};
use dopri::{integrate, State, Tolerances};
use serde::{Deserialize, Serialize};

/// Number of uniform intervals of the stored eigenfunction grid.
pub const GRID_INTERVALS: usize = 2048;
/// Largest angular index the solver accepts; `r^ℓ` start values underflow beyond it.
pub const MAX_ANGULAR_INDEX: usize = 48;
const MAX_STEP_HALVINGS: usize = 10;
const MAX_MATCH_OFFSET: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InnerCondition {
    RegularAtOrigin,
    Neumann,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialProblem {
    pub dimension_m: usize,
    pub angular_index_l: usize,
    pub inner_radius: f64,
    pub outer_radius: f64,
    pub inner_condition: InnerCondition,
}

impl RadialProblem {
    pub fn new(m: usize, l: usize, inner_radius: f64, outer_radius: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Argument("dimension m must be at least 1".into()));
        }
        if l > MAX_ANGULAR_INDEX {
            return Err(Error::Argument(format!("angular index {l} exceeds {MAX_ANGULAR_INDEX}")));
        }
        if m == 1 && l > 1 {
            return Err(Error::Argument("in one dimension only l = 0 (even) and l = 1 (odd) exist".into()));
        }
        if !(inner_radius.is_finite() && outer_radius.is_finite()) || inner_radius < 0.0 || outer_radius <= inner_radius {
            return Err(Error::Argument(format!(
                "radii must satisfy 0 <= inner < outer < inf, got [{inner_radius}, {outer_radius}]"
            )));
        }
        let inner_condition = if inner_radius == 0.0 { InnerCondition::RegularAtOrigin } else { InnerCondition::Neumann };
        Ok(Self { dimension_m: m, angular_index_l: l, inner_radius, outer_radius, inner_condition })
    }

    pub fn ball(m: usize, l: usize, radius: f64) -> Result<Self> {
        if radius <= 0.0 {
            return Err(Error::Argument(format!("ball radius must be positive, got {radius}")));
        }
        Self::new(m, l, 0.0, radius)
    }

    pub fn annulus(m: usize, l: usize, inner: f64, outer: f64) -> Result<Self> {
        if inner <= 0.0 {
            return Err(Error::Argument(format!("annulus inner radius must be positive, got {inner}")));
        }
        Self::new(m, l, inner, outer)
    }

    /// ℓ(ℓ+m-2); equals m-1 for ℓ = 1.
    pub fn centrifugal(&self) -> f64 {
        let l = self.angular_index_l as f64;
        l * (l + self.dimension_m as f64 - 2.0)
    }

    pub fn span(&self) -> f64 {
        self.outer_radius - self.inner_radius
    }

    /// Coefficient c₂ of the regular branch `g = r^ℓ (1 + c₂ r² + …)`.
    pub fn series_coefficient(&self, mu: f64) -> f64 {
        let l = self.angular_index_l as f64;
        (l - mu) / (2.0 * (2.0 * l + self.dimension_m as f64))
    }

    /// g'' from the ODE, given g and g' at r > 0.
    pub fn second_derivative(&self, mu: f64, r: f64, g: f64, gp: f64) -> f64 {
        let m1 = self.dimension_m as f64 - 1.0;
        -(m1 / r - r) * gp - (mu - self.centrifugal() / (r * r)) * g
    }

    /// Lower bound for the spectrum: the Rayleigh quotient is at least ℓ(ℓ+m-2)/R₂².
    fn spectral_floor(&self) -> f64 {
        self.centrifugal() / (self.outer_radius * self.outer_radius)
    }

    fn weight(&self, r: f64) -> f64 {
        r.powi(self.dimension_m as i32 - 1) * (-r * r / 2.0).exp()
    }

    fn grid(&self) -> Vec<f64> {
        let dr = self.span() / GRID_INTERVALS as f64;
        (0..=GRID_INTERVALS).map(|i| self.inner_radius + i as f64 * dr).collect()
    }

    /// Grid index of the matching radius.
    fn match_index(&self) -> usize {
        let offset = (0.5 * self.span()).min(MAX_MATCH_OFFSET);
        let idx = (offset / self.span() * GRID_INTERVALS as f64).round() as usize;
        idx.clamp(1, GRID_INTERVALS - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingConfig {
    /// Launch radius of the series start; `None` means 1e-6 times the outer span.
    pub series_start_radius: Option<f64>,
    pub mu_bracket_step: f64,
    pub mu_tolerance: f64,
    pub rtol: f64,
    pub atol: f64,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        Self { series_start_radius: None, mu_bracket_step: 0.25, mu_tolerance: 1e-10, rtol: 1e-11, atol: 1e-13 }
    }
}

impl ShootingConfig {
    pub fn validate(&self) -> Result<()> {
        let start_ok = self.series_start_radius.is_none_or(|r| r > 0.0);
        if !(start_ok && self.mu_bracket_step > 0.0 && self.mu_tolerance > 0.0 && self.rtol > 0.0 && self.atol > 0.0) {
            return Err(Error::Argument(format!("shooting configuration needs positive tolerances: {self:?}")));
        }
        Ok(())
    }

    fn tolerances(&self) -> Tolerances {
        Tolerances { rtol: self.rtol, atol: self.atol }
    }

    fn series_start(&self, problem: &RadialProblem) -> f64 {
        self.series_start_radius.unwrap_or(1e-6 * problem.span())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialSample {
    pub r: f64,
    pub g: f64,
    pub g_prime: f64,
}

/// Result of a one-sided shot from the inner boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Shot {
    /// g'(R₂; μ) with the inner normalization `g ~ r^ℓ` (ball) or `g(R₁) = 1` (annulus).
    pub mismatch: f64,
    /// `R₂^(m-1) e^(-R₂²/2) g'(R₂) / max|g|`, the Sturm–Liouville flux through the outer sphere.
    pub weighted_flux: f64,
    pub trace: Vec<RadialSample>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialEigenpair {
    pub mu: f64,
    pub grid: Vec<f64>,
    pub g_values: Vec<f64>,
    pub g_prime_values: Vec<f64>,
    pub radial_index_n: usize,
}

impl RadialEigenpair {
    pub fn max_abs_g(&self) -> f64 {
        self.g_values.iter().fold(0.0_f64, |acc, g| acc.max(g.abs()))
    }

    /// max |g'' + ((m-1)/r - r) g' + (μ - ℓ(ℓ+m-2)/r²) g| / ((1 + μ) max|g|) over interior
    /// grid points, with g'' from fourth-order differences of the stored g'.
    pub fn ode_residual(&self, problem: &RadialProblem) -> f64 {
        let n = self.grid.len();
        if n < 6 {
            return f64::INFINITY;
        }
        let h = self.grid[1] - self.grid[0];
        let gp = &self.g_prime_values;
        let mut worst = 0.0_f64;
        for i in 1..n - 1 {
            let r = self.grid[i];
            if r <= 0.0 {
                continue;
            }
            let gpp = if i >= 2 && i + 2 < n {
                (-gp[i + 2] + 8.0 * gp[i + 1] - 8.0 * gp[i - 1] + gp[i - 2]) / (12.0 * h)
            } else if i < 2 {
                (-3.0 * gp[i - 1] - 10.0 * gp[i] + 18.0 * gp[i + 1] - 6.0 * gp[i + 2] + gp[i + 3]) / (12.0 * h)
            } else {
                (3.0 * gp[i + 1] + 10.0 * gp[i] - 18.0 * gp[i - 1] + 6.0 * gp[i - 2] - gp[i - 3]) / (12.0 * h)
            };
            let res = gpp - problem.second_derivative(self.mu, r, self.g_values[i], gp[i]);
            worst = worst.max(res.abs());
        }
        worst / ((1.0 + self.mu.abs()) * self.max_abs_g())
    }

    /// Boundary-condition defects relative to max|g|: (inner, outer).
    pub fn boundary_residual(&self, problem: &RadialProblem) -> (f64, f64) {
        let scale = self.max_abs_g();
        let inner = match problem.inner_condition {
            InnerCondition::RegularAtOrigin if problem.angular_index_l > 0 => self.g_values[0].abs(),
            InnerCondition::RegularAtOrigin => 0.0,
            InnerCondition::Neumann => self.g_prime_values[0].abs(),
        };
        let outer = self.g_prime_values.last().copied().unwrap_or(f64::NAN).abs();
        (inner / scale, outer / scale)
    }

    /// ∫ g² r^(m-1) e^(-r²/2) dr on the stored grid.
    pub fn weighted_norm_squared(&self, problem: &RadialProblem) -> f64 {
        let values: Vec<f64> = self.grid.iter().zip(&self.g_values).map(|(&r, &g)| g * g * problem.weight(r)).collect();
        grid_integral(&self.grid, &values)
    }

    pub fn sign_changes(&self) -> usize {
        count_sign_changes(&self.g_values)
    }
}

/// Boole's rule on uniform grids with a multiple of four intervals, Simpson or
/// trapezoid otherwise.
pub fn grid_integral(grid: &[f64], values: &[f64]) -> f64 {
    let n = grid.len();
    if n < 2 {
        return 0.0;
    }
    let intervals = n - 1;
    let h = (grid[n - 1] - grid[0]) / intervals as f64;
    let uniform = grid.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs());
    if uniform && intervals % 4 == 0 {
        let mut s = 0.0;
        for k in (0..intervals).step_by(4) {
            s += 7.0 * values[k] + 32.0 * values[k + 1] + 12.0 * values[k + 2] + 32.0 * values[k + 3] + 7.0 * values[k + 4];
        }
        return s * 2.0 * h / 45.0;
    }
    if uniform && intervals % 2 == 0 {
        let mut s = values[0] + values[intervals];
        for (k, v) in values.iter().enumerate().take(intervals).skip(1) {
            s += if k % 2 == 1 { 4.0 * v } else { 2.0 * v };
        }
        return s * h / 3.0;
    }
    grid.windows(2).zip(values.windows(2)).map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])).sum()
}

fn count_sign_changes(values: &[f64]) -> usize {
    let scale = values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let floor = 1e-12 * scale;
    let mut last = 0.0_f64;
    let mut changes = 0;
    for &v in values {
        if v.abs() <= floor {
            continue;
        }
        if last != 0.0 && v.signum() != last.signum() {
            changes += 1;
        }
        last = v;
    }
    changes
}

fn system(problem: &RadialProblem, mu: f64) -> impl Fn(f64, &State) -> State + '_ {
    move |r: f64, y: &State| [y[1], problem.second_derivative(mu, r, y[0], y[1])]
}

/// Inner launch point and state. For the ball the regular branch is divided by
/// `r₀^ℓ` so that large ℓ do not underflow; `leading_scale` undoes that.
struct Launch {
    r0: f64,
    state: State,
    leading_scale: f64,
}

fn launch(problem: &RadialProblem, mu: f64, config: &ShootingConfig) -> Launch {
    match problem.inner_condition {
        InnerCondition::Neumann => Launch { r0: problem.inner_radius, state: [1.0, 0.0], leading_scale: 1.0 },
        InnerCondition::RegularAtOrigin => {
            let r0 = config.series_start(problem);
            let l = problem.angular_index_l as f64;
            let c2 = problem.series_coefficient(mu);
            let g = 1.0 + c2 * r0 * r0;
            let gp = l / r0 * g + 2.0 * c2 * r0;
            Launch { r0, state: [g, gp], leading_scale: r0.powi(problem.angular_index_l as i32) }
        }
    }
}

/// Series values of the scaled regular branch at r = 0.
fn origin_state(problem: &RadialProblem, r0: f64) -> State {
    match problem.angular_index_l {
        0 => [1.0, 0.0],
        1 => [0.0, 1.0 / r0],
        _ => [0.0, 0.0],
    }
}

/// Integrates the initial-value problem from the inner boundary and reports g'(R₂).
pub fn shoot(problem: &RadialProblem, mu: f64, config: &ShootingConfig) -> Result<Shot> {
    config.validate()?;
    let start = launch(problem, mu, config);
    let f = system(problem, mu);
    let mut raw = Vec::new();
    let out = integrate(&f, start.r0, start.state, &[problem.outer_radius], config.tolerances(), Some(&mut raw))?;
    let s = start.leading_scale;
    let mut trace = Vec::with_capacity(raw.len() + 1);
    if problem.inner_condition == InnerCondition::RegularAtOrigin {
        let o = origin_state(problem, start.r0);
        trace.push(RadialSample { r: 0.0, g: o[0] * s, g_prime: o[1] * s });
    }
    trace.extend(raw.iter().map(|(r, y)| RadialSample { r: *r, g: y[0] * s, g_prime: y[1] * s }));
    let mismatch = out[0][1] * s;
    let max_g = trace.iter().fold(0.0_f64, |a, p| a.max(p.g.abs()));
    let weighted_flux = problem.weight(problem.outer_radius) * mismatch / max_g;
    Ok(Shot { mismatch, weighted_flux, trace })
}

/// Two-sided shooting at a fixed μ.
struct Matcher<'a> {
    problem: &'a RadialProblem,
    config: &'a ShootingConfig,
    grid: Vec<f64>,
    match_index: usize,
}

impl<'a> Matcher<'a> {
    fn new(problem: &'a RadialProblem, config: &'a ShootingConfig) -> Self {
        Self { problem, config, grid: problem.grid(), match_index: problem.match_index() }
    }

    fn r_match(&self) -> f64 {
        self.grid[self.match_index]
    }

    /// Normalized Wronskian of the inner and outer solutions at the matching radius.
    fn wronskian(&self, mu: f64) -> Result<f64> {
        let start = launch(self.problem, mu, self.config);
        let f = system(self.problem, mu);
        let tol = self.config.tolerances();
        let left = integrate(&f, start.r0, start.state, &[self.r_match()], tol, None)?[0];
        let right = integrate(&f, self.problem.outer_radius, [1.0, 0.0], &[self.r_match()], tol, None)?[0];
        let nl = left[0].hypot(left[1]);
        let nr = right[0].hypot(right[1]);
        Ok((left[0] * right[1] - left[1] * right[0]) / (nl * nr))
    }

    fn eigenpair(&self, mu: f64) -> Result<RadialEigenpair> {
        let start = launch(self.problem, mu, self.config);
        let f = system(self.problem, mu);
        let tol = self.config.tolerances();
        let k = self.match_index;
        let n = self.grid.len();

        let mut g = vec![0.0; n];
        let mut gp = vec![0.0; n];

        let (first, left_stops) = match self.problem.inner_condition {
            InnerCondition::RegularAtOrigin => {
                let o = origin_state(self.problem, start.r0);
                g[0] = o[0];
                gp[0] = o[1];
                (1, &self.grid[1..=k])
            }
            InnerCondition::Neumann => (0, &self.grid[0..=k]),
        };
        let left = integrate(&f, start.r0, start.state, left_stops, tol, None)?;
        for (i, y) in left.iter().enumerate() {
            g[first + i] = y[0];
            gp[first + i] = y[1];
        }

        let right_stops: Vec<f64> = self.grid[k..].iter().rev().copied().collect();
        let right = integrate(&f, self.problem.outer_radius, [1.0, 0.0], &right_stops, tol, None)?;
        let at_match = right.last().copied().unwrap_or([1.0, 0.0]);
        let denom = at_match[0] * at_match[0] + at_match[1] * at_match[1];
        let scale = (g[k] * at_match[0] + gp[k] * at_match[1]) / denom;
        for (j, y) in right.iter().enumerate() {
            let i = n - 1 - j;
            if i == k {
                continue;
            }
            g[i] = scale * y[0];
            gp[i] = scale * y[1];
        }

        let mut pair = RadialEigenpair { mu, grid: self.grid.clone(), g_values: g, g_prime_values: gp, radial_index_n: 0 };
        normalize(&mut pair, self.problem)?;
        pair.radial_index_n = pair.sign_changes();
        Ok(pair)
    }
}

/// Unit weighted L² norm; the entry of largest magnitude is made positive.
fn normalize(pair: &mut RadialEigenpair, problem: &RadialProblem) -> Result<()> {
    let (imax, _) = pair
        .g_values
        .iter()
        .enumerate()
        .fold((0, 0.0_f64), |(bi, bv), (i, v)| if v.abs() > bv { (i, v.abs()) } else { (bi, bv) });
    let peak = pair.g_values[imax];
    if peak == 0.0 || !peak.is_finite() {
        return Err(Error::Degenerate("eigenfunction vanishes on the grid".into()));
    }
    for v in pair.g_values.iter_mut().chain(pair.g_prime_values.iter_mut()) {
        *v /= peak;
    }
    let norm = pair.weighted_norm_squared(problem).sqrt();
    for v in pair.g_values.iter_mut().chain(pair.g_prime_values.iter_mut()) {
        *v /= norm;
    }
    Ok(())
}

enum Stop {
    Count(usize),
    /// Every eigenvalue up to the limit, but no more than the given count.
    Below(f64, usize),
}

fn bisect(matcher: &Matcher, mut lo: f64, mut hi: f64, mut wlo: f64, tol: f64) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol.max(4.0 * f64::EPSILON * mid.abs()) {
            return Ok(mid);
        }
        let wmid = matcher.wronskian(mid)?;
        if wmid == 0.0 {
            return Ok(mid);
        }
        if wmid.signum() == wlo.signum() {
            lo = mid;
            wlo = wmid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn scan_with_step(problem: &RadialProblem, config: &ShootingConfig, stop: &Stop, step: f64) -> Result<Vec<RadialEigenpair>> {
    let matcher = Matcher::new(problem, config);
    let mut found: Vec<RadialEigenpair> = Vec::new();
    let mut mu = problem.spectral_floor() - 0.5 * step;
    let mut w = matcher.wronskian(mu)?;
    loop {
        match *stop {
            Stop::Count(n) if found.len() >= n => break,
            Stop::Below(limit, n) if mu > limit || found.len() >= n => break,
            _ => {}
        }
        if mu > 1e9 {
            return Err(Error::Solver { radius: problem.outer_radius, reason: "eigenvalue scan ran past 1e9".into() });
        }
        let next = mu + step;
        let w_next = matcher.wronskian(next)?;
        if w_next == 0.0 || w_next.signum() != w.signum() {
            let root = if w_next == 0.0 { next } else { bisect(&matcher, mu, next, w, config.mu_tolerance)? };
            let pair = matcher.eigenpair(root)?;
            if pair.radial_index_n != found.len() {
                return Err(Error::Rescan { expected: found.len(), found: pair.radial_index_n, step });
            }
            found.push(pair);
            if w_next == 0.0 {
                // step past the exact root so the next bracket starts clean
                let nudged = next + 0.5 * step;
                mu = nudged;
                w = matcher.wronskian(nudged)?;
                continue;
            }
        }
        mu = next;
        w = w_next;
    }
    if let Stop::Below(limit, _) = *stop {
        found.retain(|p| p.mu <= limit);
    }
    Ok(found)
}

fn scan(problem: &RadialProblem, config: &ShootingConfig, stop: Stop) -> Result<Vec<RadialEigenpair>> {
    config.validate()?;
    let mut step = config.mu_bracket_step;
    let mut last_err = None;
    for _ in 0..=MAX_STEP_HALVINGS {
        match scan_with_step(problem, config, &stop, step) {
            Ok(pairs) => return Ok(pairs),
            Err(e @ Error::Rescan { .. }) => {
                last_err = Some(e);
                step *= 0.5;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::Solver { radius: problem.outer_radius, reason: "scan failed".into() }))
}

/// The `count` smallest eigenpairs of the radial problem, ascending.
pub fn eigenvalues(problem: &RadialProblem, count: usize, config: &ShootingConfig) -> Result<Vec<RadialEigenpair>> {
    if count == 0 {
        return Err(Error::Argument("eigenvalue count must be at least 1".into()));
    }
    scan(problem, config, Stop::Count(count))
}

/// All eigenpairs with μ ≤ limit, at most `max_count` of them.
pub fn eigenvalues_below(problem: &RadialProblem, limit: f64, max_count: usize, config: &ShootingConfig) -> Result<Vec<RadialEigenpair>> {
    scan(problem, config, Stop::Below(limit, max_count))
}

/// First nonzero Neumann eigenpair of the ball `B_R ⊂ ℝ^m` (the ℓ = 1 ground state), with g ≥ 0.
pub fn mu1_ball(m: usize, radius: f64, config: &ShootingConfig) -> Result<RadialEigenpair> {
    if m < 2 {
        return Err(Error::Argument(format!("mu1_ball needs m >= 2, got {m}")));
    }
    let problem = RadialProblem::ball(m, 1, radius)?;
    let mut pairs = eigenvalues(&problem, 1, config)?;
    Ok(pairs.remove(0))
}

/// `∫(g'² + ℓ(ℓ+m-2) g²/r²) w / ∫ g² w` with `w = r^(m-1) e^(-r²/2)`, on the stored grid.
pub fn rayleigh_quotient(pair: &RadialEigenpair, problem: &RadialProblem) -> Result<f64> {
    let c = problem.centrifugal();
    let mut num = Vec::with_capacity(pair.grid.len());
    let mut den = Vec::with_capacity(pair.grid.len());
    for ((&r, &g), &gp) in pair.grid.iter().zip(&pair.g_values).zip(&pair.g_prime_values) {
        let w = problem.weight(r);
        // g/r → g'(0) at the origin
        let ratio = if r > 0.0 { g / r } else { gp };
        let centrifugal = if c == 0.0 || w == 0.0 { 0.0 } else { c * ratio * ratio * w };
        num.push(gp * gp * w + centrifugal);
        den.push(g * g * w);
    }
    let denominator = grid_integral(&pair.grid, &den);
    if !(denominator > 0.0) {
        return Err(Error::Degenerate("zero denominator in Rayleigh quotient".into()));
    }
    Ok(grid_integral(&pair.grid, &num) / denominator)
}

/// Sign diagnostics of the first ℓ = 1 ball eigenfunction: g' > 0 inside, and
/// H(r) = g'(r) − g(r)/r ≤ 0 on (0, R] with H(R) = −g(R)/R < 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma23Report {
    pub min_interior_g_prime: f64,
    pub max_h: f64,
    pub h_at_outer: f64,
    pub tolerance: f64,
    pub derivative_positive: bool,
    pub h_nonpositive: bool,
    pub h_outer_negative: bool,
}

impl Lemma23Report {
    pub fn passed(&self) -> bool {
        self.derivative_positive && self.h_nonpositive && self.h_outer_negative
    }
}

pub const LEMMA23_TOLERANCE: f64 = 1e-8;

pub fn lemma23_check(pair: &RadialEigenpair) -> Lemma23Report {
    let peak = pair.g_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let trough = pair.g_values.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = if peak.abs() >= trough.abs() { peak } else { trough };
    let n = pair.grid.len();
    let mut min_gp = f64::INFINITY;
    let mut max_h = f64::NEG_INFINITY;
    for i in 0..n {
        let r = pair.grid[i];
        let g = pair.g_values[i] / scale;
        let gp = pair.g_prime_values[i] / scale;
        if i > 0 && i + 1 < n {
            min_gp = min_gp.min(gp);
        }
        if r > 0.0 {
            max_h = max_h.max(gp - g / r);
        }
    }
    let r_out = pair.grid[n - 1];
    let h_at_outer = (pair.g_prime_values[n - 1] - pair.g_values[n - 1] / r_out) / scale;
    Lemma23Report {
        min_interior_g_prime: min_gp,
        max_h,
        h_at_outer,
        tolerance: LEMMA23_TOLERANCE,
        derivative_positive: min_gp > 0.0,
        h_nonpositive: max_h <= LEMMA23_TOLERANCE,
        h_outer_negative: h_at_outer < 0.0,
    }
}
