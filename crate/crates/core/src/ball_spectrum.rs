//! Full Neumann spectra of balls and annuli, assembled from radial modes over
//! angular indices ℓ with the dimension of degree-ℓ spherical harmonics as
//! multiplicity.

use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::radial_ode::{eigenvalues, eigenvalues_below, RadialEigenpair, RadialProblem, ShootingConfig, MAX_ANGULAR_INDEX};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub mu: f64,
    #[serde(rename = "l")]
    pub angular_index_l: Option<usize>,
    #[serde(rename = "n")]
    pub radial_index_n: Option<usize>,
    #[serde(rename = "mult")]
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub domain: DomainSpec,
    pub m: usize,
    pub entries: Vec<SpectrumEntry>,
    /// Radial eigenpairs behind each entry, when the spectrum came from the radial solver.
    #[serde(skip)]
    pub modes: Vec<RadialEigenpair>,
    /// Smallest eigenvalue among the angular indices that were not needed.
    #[serde(skip)]
    pub cutoff_ground: Option<f64>,
}

impl Spectrum {
    /// Eigenvalues μ₀ ≤ μ₁ ≤ … with multiplicity.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.entries.iter().flat_map(|e| std::iter::repeat_n(e.mu, e.multiplicity)).collect()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    /// μ₁, …, μ_k (μ₀ = 0 skipped).
    pub fn nonzero(&self, k: usize) -> Result<Vec<f64>> {
        let all = self.eigenvalues();
        if all.len() < k + 1 {
            return Err(Error::Argument(format!("spectrum has {} eigenvalues, {} requested", all.len(), k + 1)));
        }
        Ok(all[1..=k].to_vec())
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Dimension of the space of degree-ℓ spherical harmonics on S^(m-1).
pub fn harmonic_multiplicity(m: usize, l: usize) -> Result<usize> {
    if m < 2 {
        return Err(Error::Argument(format!("harmonic multiplicity needs m >= 2, got {m}")));
    }
    if l == 0 {
        return Ok(1);
    }
    // homogeneous polynomials of degree ℓ minus those of degree ℓ-2 (times |x|²)
    Ok(binomial(l + m - 1, m - 1) - if l >= 2 { binomial(l + m - 3, m - 1) } else { 0 })
}

pub fn ball_neumann_spectrum(m: usize, radius: f64, count: usize) -> Result<Spectrum> {
    ball_neumann_spectrum_with(m, radius, count, &ShootingConfig::default())
}

pub fn ball_neumann_spectrum_with(m: usize, radius: f64, count: usize, config: &ShootingConfig) -> Result<Spectrum> {
    if m < 2 || !(radius > 0.0) {
        return Err(Error::Argument(format!("ball spectrum needs m >= 2 and R > 0, got m={m}, R={radius}")));
    }
    assemble(m, 0.0, radius, count, config, DomainSpec::Ball { radius })
}

pub fn annulus_neumann_spectrum(m: usize, inner: f64, outer: f64, count: usize) -> Result<Spectrum> {
    annulus_neumann_spectrum_with(m, inner, outer, count, &ShootingConfig::default())
}

pub fn annulus_neumann_spectrum_with(
    m: usize,
    inner: f64,
    outer: f64,
    count: usize,
    config: &ShootingConfig,
) -> Result<Spectrum> {
    if m < 2 {
        return Err(Error::Argument(format!("annulus spectrum needs m >= 2, got {m}")));
    }
    if !(inner > 0.0 && inner < outer) {
        return Err(Error::Argument(format!("annulus needs 0 < R1 < R2, got R1={inner}, R2={outer}")));
    }
    assemble(m, inner, outer, count, config, DomainSpec::Annulus { inner, outer })
}

/// Spectrum of a radial domain described by `domain`.
pub fn radial_spectrum(m: usize, domain: &DomainSpec, count: usize, config: &ShootingConfig) -> Result<Spectrum> {
    match *domain {
        DomainSpec::Ball { radius } => ball_neumann_spectrum_with(m, radius, count, config),
        DomainSpec::Annulus { inner, outer } => annulus_neumann_spectrum_with(m, inner, outer, count, config),
        _ => Err(Error::Argument(format!("{} is not a radial domain", domain.kind()))),
    }
}

struct Mode {
    l: usize,
    multiplicity: usize,
    pair: RadialEigenpair,
}

/// Every mode with μ ≤ limit, over ℓ = 0, 1, … until the ℓ-ground state exceeds the limit.
/// Returns the modes and the ground eigenvalue of the first excluded ℓ.
fn modes_below(m: usize, inner: f64, outer: f64, limit: f64, count: usize, config: &ShootingConfig) -> Result<(Vec<Mode>, f64)> {
    let mut modes = Vec::new();
    let mut previous_ground = f64::NEG_INFINITY;
    for l in 0..=MAX_ANGULAR_INDEX {
        let problem = RadialProblem::new(m, l, inner, outer)?;
        let ground = eigenvalues(&problem, 1, config)?.remove(0);
        if ground.mu <= previous_ground {
            return Err(Error::Solver {
                radius: outer,
                reason: format!("ground eigenvalue not increasing in l at l={l}: {} <= {previous_ground}", ground.mu),
            });
        }
        previous_ground = ground.mu;
        if ground.mu > limit {
            return Ok((modes, ground.mu));
        }
        let multiplicity = harmonic_multiplicity(m, l)?;
        let pairs = if count > 1 { eigenvalues_below(&problem, limit, count, config)? } else { vec![ground] };
        modes.extend(pairs.into_iter().map(|pair| Mode { l, multiplicity, pair }));
    }
    Err(Error::Solver { radius: outer, reason: format!("spectrum needs angular index beyond {MAX_ANGULAR_INDEX}") })
}

fn assemble(m: usize, inner: f64, outer: f64, count: usize, config: &ShootingConfig, domain: DomainSpec) -> Result<Spectrum> {
    if count == 0 {
        return Err(Error::Argument("eigenvalue count must be at least 1".into()));
    }
    let mut limit = {
        let problem = RadialProblem::new(m, 1, inner, outer)?;
        eigenvalues(&problem, 1, config)?[0].mu
    };
    loop {
        let (mut modes, cutoff) = modes_below(m, inner, outer, limit, count, config)?;
        let total: usize = modes.iter().map(|md| md.multiplicity).sum();
        if total >= count {
            modes.sort_by(|a, b| a.pair.mu.total_cmp(&b.pair.mu).then(a.l.cmp(&b.l)));
            let mut entries = Vec::new();
            let mut pairs = Vec::new();
            let mut covered = 0;
            for md in modes {
                if covered >= count {
                    break;
                }
                covered += md.multiplicity;
                entries.push(SpectrumEntry {
                    mu: md.pair.mu,
                    angular_index_l: Some(md.l),
                    radial_index_n: Some(md.pair.radial_index_n),
                    multiplicity: md.multiplicity,
                });
                pairs.push(md.pair);
            }
            let top = entries.last().map_or(0.0, |e| e.mu);
            if cutoff <= top {
                return Err(Error::Solver { radius: outer, reason: format!("angular cutoff {cutoff} below returned maximum {top}") });
            }
            return Ok(Spectrum { domain, m, entries, modes: pairs, cutoff_ground: Some(cutoff) });
        }
        limit = 2.0 * limit + 2.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplicities() {
        for m in 2..7 {
            assert_eq!(harmonic_multiplicity(m, 0).unwrap(), 1);
            assert_eq!(harmonic_multiplicity(m, 1).unwrap(), m);
        }
        for l in 1..6 {
            assert_eq!(harmonic_multiplicity(2, l).unwrap(), 2);
            assert_eq!(harmonic_multiplicity(3, l).unwrap(), 2 * l + 1);
        }
        assert!(harmonic_multiplicity(1, 0).is_err());
    }

    #[test]
    fn closed_form_multiplicity() {
        // (2ℓ+m-2)(ℓ+m-3)! / (ℓ!(m-2)!)
        fn fact(n: usize) -> f64 {
            (1..=n).map(|k| k as f64).product()
        }
        for m in 3..8 {
            for l in 1..8 {
                let closed = (2 * l + m - 2) as f64 * fact(l + m - 3) / (fact(l) * fact(m - 2));
                assert_eq!(harmonic_multiplicity(m, l).unwrap() as f64, closed);
            }
        }
    }

    #[test]
    fn ball_spectrum_structure() {
        let s = ball_neumann_spectrum(3, 1.0, 6).unwrap();
        assert_eq!(s.entries[0].mu, 0.0);
        assert_eq!(s.entries[0].multiplicity, 1);
        assert_eq!(s.entries[1].angular_index_l, Some(1));
        assert_eq!(s.entries[1].multiplicity, 3);
        assert!(s.total_multiplicity() >= 6);
        assert_eq!(s.modes.len(), s.entries.len());
        assert!(s.cutoff_ground.unwrap() > s.entries.last().unwrap().mu);
        let nz = s.nonzero(3).unwrap();
        assert!(nz.iter().all(|&v| v == nz[0]));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(annulus_neumann_spectrum(2, 1.0, 1.0, 3).is_err());
        assert!(ball_neumann_spectrum(1, 1.0, 3).is_err());
        assert!(ball_neumann_spectrum(2, 1.0, 0).is_err());
    }
}
