mod common;

use common::*;
use gauss_neumann::quadrature::radial_integral;
use gauss_neumann::radial_ode::*;
use proptest::prelude::*;

fn cfg() -> ShootingConfig {
    ShootingConfig::default()
}

#[test]
fn bessel_oracle_is_consistent_with_frozen_value() {
    let j = first_zero_of_j1_prime();
    assert!((j * j - J1_PRIME_ZERO_SQUARED).abs() < 1e-10);
}

#[test]
fn first_ball_eigenvalue_matches_reference_table() {
    for (m, row) in MU1_TABLE {
        for (&radius, &expected) in MU1_TABLE_RADII.iter().zip(&row) {
            let mu = mu1_ball(m, radius, &cfg()).unwrap().mu;
            // table entries carry six significant digits
            assert!(((mu - expected) / expected).abs() < 5e-5, "m={m} R={radius}: {mu} vs {expected}");
        }
    }
}

#[test]
fn eigenvalues_match_kummer_roots() {
    for m in 2..=4 {
        for l in 0..=3 {
            for &radius in &[0.7, 1.5, 3.0] {
                let problem = RadialProblem::ball(m, l, radius).unwrap();
                let pairs = eigenvalues(&problem, 3, &cfg()).unwrap();
                for (k, pair) in pairs.iter().enumerate() {
                    let oracle = kummer_eigenvalue(m, l, radius, k, -0.013);
                    assert!(
                        (pair.mu - oracle).abs() < 1e-8 * (1.0 + oracle),
                        "m={m} l={l} R={radius} k={k}: {} vs {oracle}",
                        pair.mu
                    );
                }
            }
        }
    }
}

#[test]
fn whole_space_levels_on_large_ball() {
    for m in [2, 3] {
        let expect: [(usize, &[f64]); 3] = [(0, &[0.0, 2.0, 4.0]), (1, &[1.0, 3.0]), (2, &[2.0, 4.0])];
        for (l, levels) in expect {
            let problem = RadialProblem::ball(m, l, 8.0).unwrap();
            let pairs = eigenvalues(&problem, levels.len(), &cfg()).unwrap();
            for (pair, level) in pairs.iter().zip(levels) {
                assert!((pair.mu - level).abs() < 1e-6, "m={m} l={l}: {} vs {level}", pair.mu);
            }
        }
    }
    let mu = mu1_ball(3, 8.0, &cfg()).unwrap().mu;
    assert!((mu - 1.0).abs() < 1e-6);
}

#[test]
fn small_disk_approaches_euclidean_limit() {
    let radius = 0.05;
    let mu = mu1_ball(2, radius, &cfg()).unwrap().mu;
    let oracle = first_zero_of_j1_prime().powi(2);
    assert!((mu * radius * radius - oracle).abs() <= 0.02);
    assert!((mu * radius * radius - 3.39100).abs() < 1e-4);
}

#[test]
fn solved_pairs_satisfy_invariants() {
    for m in 1..=5 {
        for l in 0..=2.min(if m == 1 { 1 } else { 2 }) {
            for &(inner, outer) in &[(0.0, 0.5), (0.0, 2.0), (0.0, 6.0), (0.3, 1.2), (1.0, 4.0)] {
                let problem = RadialProblem::new(m, l, inner, outer).unwrap();
                let pairs = eigenvalues(&problem, 4, &cfg()).unwrap();
                for (n, pair) in pairs.iter().enumerate() {
                    let label = format!("m={m} l={l} [{inner},{outer}] n={n}");
                    assert_eq!(pair.radial_index_n, n, "{label}");
                    assert!(pair.ode_residual(&problem) < 1e-7, "{label}: {}", pair.ode_residual(&problem));
                    let (bi, bo) = pair.boundary_residual(&problem);
                    assert!(bi < 1e-8 && bo < 1e-8, "{label}: {bi} {bo}");
                    assert!((pair.weighted_norm_squared(&problem) - 1.0).abs() < 1e-8, "{label}");
                    let q = rayleigh_quotient(pair, &problem).unwrap();
                    let err = if pair.mu.abs() < 1e-9 { q.abs() } else { ((q - pair.mu) / pair.mu).abs() };
                    assert!(err <= 1e-8, "{label}: q={q} mu={}", pair.mu);
                }
                assert!(pairs.windows(2).all(|w| w[1].mu > w[0].mu));
            }
        }
    }
}

#[test]
fn first_eigenvalue_decreases_and_stays_above_one() {
    for m in 2..=5 {
        let mus: Vec<f64> = (1..=16).map(|k| mu1_ball(m, 0.25 * k as f64, &cfg()).unwrap().mu).collect();
        for w in mus.windows(2) {
            assert!(w[0] - w[1] > 10.0 * cfg().mu_tolerance, "m={m}: {w:?}");
        }
        assert!(mus.iter().all(|&mu| mu > 1.0));
    }
}

#[test]
fn sign_structure_of_first_eigenfunction() {
    for m in 2..=4 {
        for &radius in &[0.5, 1.0, 2.0, 4.0] {
            let pair = mu1_ball(m, radius, &cfg()).unwrap();
            assert!(pair.g_values.iter().all(|&g| g >= 0.0));
            let report = lemma23_check(&pair);
            assert!(report.passed(), "m={m} R={radius}: {report:?}");
        }
    }
}

fn trial_quotient(m: usize, radius: f64, phi: impl Fn(f64) -> f64, dphi: impl Fn(f64) -> f64) -> f64 {
    let c = (m - 1) as f64;
    let num = radial_integral(m, 0.0, radius, &[], |r| dphi(r).powi(2) + c * (phi(r) / r).powi(2)).unwrap();
    let den = radial_integral(m, 0.0, radius, &[], |r| phi(r).powi(2)).unwrap();
    num / den
}

#[test]
fn trial_functions_bound_first_eigenvalue_from_above() {
    use std::f64::consts::PI;
    for m in 2..=5 {
        for &radius in &[0.5, 1.0, 2.0, 3.0] {
            let mu = mu1_ball(m, radius, &cfg()).unwrap().mu;
            let k = PI / (2.0 * radius);
            let sine = trial_quotient(m, radius, |r| (k * r).sin(), |r| k * (k * r).cos());
            let parabola = trial_quotient(m, radius, |r| r * (2.0 * radius - r), |r| 2.0 * radius - 2.0 * r);
            assert!(sine >= mu - 1e-8, "m={m} R={radius}");
            assert!(parabola >= mu - 1e-8, "m={m} R={radius}");
        }
    }
}

#[test]
fn annulus_with_tiny_hole_is_close_to_disk() {
    let disk = mu1_ball(2, 1.0, &cfg()).unwrap().mu;
    let problem = RadialProblem::annulus(2, 1, 0.01, 1.0).unwrap();
    let mu = eigenvalues(&problem, 1, &cfg()).unwrap()[0].mu;
    assert!((mu - disk).abs() < 2e-2);
}

#[test]
fn profile_interpolates_between_grid_points() {
    let problem = RadialProblem::ball(3, 1, 1.7).unwrap();
    let pair = eigenvalues(&problem, 1, &cfg()).unwrap().remove(0);
    let profile = RadialProfile::new(&pair, &problem);
    let h = pair.grid[1] - pair.grid[0];
    for i in (0..pair.grid.len() - 1).step_by(37) {
        let r = pair.grid[i] + 0.5 * h;
        let (g, gp) = profile.evaluate(r);
        // the ODE holds at interior points of the interpolant as well
        let (_, gp_hi) = profile.evaluate(r + 1e-4);
        let (_, gp_lo) = profile.evaluate(r - 1e-4);
        let gpp = (gp_hi - gp_lo) / 2e-4;
        let res = gpp - problem.second_derivative(pair.mu, r, g, gp);
        assert!(res.abs() < 1e-5, "r={r}: {res}");
    }
    assert_eq!(profile.value(pair.grid[10]), pair.g_values[10]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn first_eigenvalue_is_monotone_in_radius(m in 2usize..=5, radius in 0.3f64..4.0, delta in 0.05f64..0.5) {
        let a = mu1_ball(m, radius, &cfg()).unwrap().mu;
        let b = mu1_ball(m, radius + delta, &cfg()).unwrap().mu;
        prop_assert!(a > b);
        prop_assert!(b > 1.0);
    }

    #[test]
    fn solver_agrees_with_kummer_oracle(m in 2usize..=5, l in 0usize..=3, radius in 0.4f64..3.5) {
        let problem = RadialProblem::ball(m, l, radius).unwrap();
        let pair = eigenvalues(&problem, 2, &cfg()).unwrap().remove(1);
        let oracle = kummer_eigenvalue(m, l, radius, 1, -0.013);
        prop_assert!((pair.mu - oracle).abs() < 1e-8 * (1.0 + oracle));
    }

    #[test]
    fn mismatch_is_continuous_in_mu(m in 2usize..=4, radius in 0.5f64..3.0, mu in 0.5f64..20.0) {
        let problem = RadialProblem::ball(m, 1, radius).unwrap();
        let a = shoot(&problem, mu, &cfg()).unwrap().mismatch;
        let b = shoot(&problem, mu + 1e-7, &cfg()).unwrap().mismatch;
        prop_assert!((a - b).abs() < 1e-4 * (1.0 + a.abs()));
    }
}
