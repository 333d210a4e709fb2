use gauss_neumann::quadrature::*;
use gauss_neumann::Error;
use proptest::prelude::*;
use std::f64::consts::PI;

/// Composite Simpson on [a, b] with n (even) intervals.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// γ_m(B_R) without the incomplete gamma function: closed form for even m,
/// Simpson on the normalized density for odd m.
fn ball_volume_oracle(m: usize, r: f64) -> f64 {
    let x = r * r / 2.0;
    if m % 2 == 0 {
        let mut term = 1.0;
        let mut sum = 0.0;
        for j in 0..m / 2 {
            if j > 0 {
                term *= x / j as f64;
            }
            sum += term;
        }
        1.0 - (-x).exp() * sum
    } else {
        // (2π)^{-m/2} |S^{m-1}| with |S^{m-1}| = 2 π^{m/2} / Γ(m/2)
        let gamma_half: f64 = {
            let mut g = PI.sqrt();
            let mut a = 0.5;
            while a < m as f64 / 2.0 - 1e-9 {
                g *= a;
                a += 1.0;
            }
            g
        };
        let c = 2.0 / (2f64.powf(m as f64 / 2.0) * gamma_half);
        simpson(|t| c * t.powi(m as i32 - 1) * (-t * t / 2.0).exp(), 0.0, r, 20000)
    }
}

fn radii() -> Vec<f64> {
    (1..=50).map(|k| 0.1 * k as f64).collect()
}

#[test]
fn volume_examples() {
    for m in 1..=6 {
        assert_eq!(gaussian_ball_volume(m, 0.0).unwrap().value(), 0.0);
    }
    assert!((gaussian_ball_volume(2, 1.177410).unwrap().value() - 0.5).abs() < 1e-6);
    assert!((gaussian_ball_volume(1, 10.0).unwrap().value() - 1.0).abs() < 1e-12);
    assert!(matches!(gaussian_ball_volume(0, 1.0), Err(Error::Argument(_))));
    assert!(matches!(gaussian_ball_volume(3, -0.5), Err(Error::Argument(_))));
}

#[test]
fn volume_matches_independent_oracle() {
    for m in 1..=6 {
        for r in radii() {
            let v = gaussian_ball_volume(m, r).unwrap().value();
            let tol = if m % 2 == 0 { 1e-13 } else { 1e-11 };
            assert!((v - ball_volume_oracle(m, r)).abs() < tol, "m={m} R={r}");
        }
    }
    for r in radii() {
        let closed = 1.0 - (-r * r / 2.0f64).exp();
        assert!((gaussian_ball_volume(2, r).unwrap().value() - closed).abs() < 1e-12);
    }
}

#[test]
fn volume_strictly_increasing_and_invertible_on_grid() {
    for m in 1..=6 {
        let mut last = 0.0;
        for r in radii() {
            let v = gaussian_ball_volume(m, r).unwrap();
            assert!(v.value() > last, "m={m} R={r}");
            last = v.value();
            if v.value() < 1.0 {
                let back = volume_to_radius(m, v).unwrap();
                assert!((back - r).abs() < 1e-9, "m={m} R={r} -> {back}");
            }
        }
    }
}

#[test]
fn radius_hits_requested_volume() {
    for m in 1..=6 {
        for k in 1..100 {
            let target = k as f64 / 100.0;
            let r = volume_to_radius(m, GaussianVolume::new(target).unwrap()).unwrap();
            assert!((gaussian_ball_volume(m, r).unwrap().value() - target).abs() < 1e-12, "m={m} V={target}");
        }
    }
    assert_eq!(volume_to_radius(4, GaussianVolume::new(0.0).unwrap()).unwrap(), 0.0);
    let r = volume_to_radius(2, GaussianVolume::new(0.5).unwrap()).unwrap();
    assert!((r - (2.0 * 2f64.ln()).sqrt()).abs() < 1e-12);
    assert!(matches!(volume_to_radius(2, GaussianVolume::new(1.0).unwrap()), Err(Error::UnattainableVolume(_))));
    assert!(matches!(GaussianVolume::new(-0.2), Err(Error::Argument(_))));
}

#[test]
fn rule_examples() {
    let rule = radial_rule(2, 0.0, 1.0, DEFAULT_ORDER).unwrap();
    assert!((integrate_radial(&rule, |_| 1.0).unwrap() - 0.393469).abs() < 1e-6);
    let rule = radial_rule(1, 0.0, TAIL_RADIUS, DEFAULT_ORDER).unwrap();
    assert!((rule.measure() - (PI / 2.0).sqrt()).abs() < 1e-12);
    assert!(matches!(radial_rule(2, 1.0, 0.5, 8), Err(Error::Argument(_))));
}

#[test]
fn rule_invariants() {
    for m in 1..=6 {
        for (a, b) in [(0.0, 0.3), (0.0, 2.0), (0.7, 3.1), (2.0, TAIL_RADIUS)] {
            let rule = radial_rule(m, a, b, DEFAULT_ORDER).unwrap();
            assert!(rule.nodes.iter().all(|&r| (a..=b).contains(&r)));
            assert!(rule.weights.iter().all(|&w| w > 0.0));
            let exact = simpson(|t| t.powi(m as i32 - 1) * (-t * t / 2.0).exp(), a, b, 40000);
            assert!(((rule.measure() - exact) / exact).abs() < 1e-12, "m={m} [{a},{b}]");
        }
    }
}

#[test]
fn doubling_order_shrinks_error() {
    // ∫_0^3 r⁴ · r e^{-r²/2} dr
    let exact = simpson(|r| r.powi(5) * (-r * r / 2.0).exp(), 0.0, 3.0, 40000);
    let err = |order| {
        let rule = radial_rule(2, 0.0, 3.0, order).unwrap();
        (integrate_radial(&rule, |r| r.powi(4)).unwrap() - exact).abs()
    };
    for order in [2, 3] {
        assert!(err(2 * order) * 10.0 <= err(order), "order {order}");
    }
}

#[test]
fn integrate_examples() {
    let rule = radial_rule(3, 0.0, TAIL_RADIUS, DEFAULT_ORDER).unwrap();
    assert_eq!(integrate_radial(&rule, |_| 0.0).unwrap(), 0.0);
    assert_eq!(integrate_radial(&rule, |_| 1.0).unwrap(), rule.measure());
    // ∫_0^∞ r⁴ e^{-r²/2} dr = 3√(π/2)
    let v = integrate_radial(&rule, |r| r * r).unwrap();
    assert!((v - 3.0 * (PI / 2.0).sqrt()).abs() < 1e-12);
    let simpson_value = simpson(|r| r.powi(4) * (-r * r / 2.0).exp(), 0.0, TAIL_RADIUS, 40000);
    assert!((v - simpson_value).abs() < 1e-11);
    match integrate_radial(&rule, |r| if r > 5.0 { f64::NAN } else { 1.0 }) {
        Err(Error::Evaluation { node, .. }) => assert!(node > 5.0),
        other => panic!("expected evaluation error, got {other:?}"),
    }
}

#[test]
fn measure_closed_form_and_panel_integral_agree() {
    for m in 1..=6 {
        for (a, b) in [(0.0, 1.0), (0.5, 2.5), (3.0, 7.0)] {
            let closed = radial_measure(m, a, b);
            let quad = radial_integral(m, a, b, &[1.3], |_| 1.0).unwrap();
            assert!(((closed - quad) / closed).abs() < 1e-12);
            assert!(((radial_normalizer(m) * radial_measure(m, 0.0, b)) - gaussian_ball_volume(m, b).unwrap().value()).abs() < 1e-13);
        }
    }
}

proptest! {
    #[test]
    fn round_trip_random(m in 1usize..=8, r in 0.01f64..6.0) {
        let v = gaussian_ball_volume(m, r).unwrap();
        prop_assume!(v.value() < 1.0 - 1e-10);
        let back = volume_to_radius(m, v).unwrap();
        prop_assert!((back - r).abs() < 1e-9 * r.max(1.0), "{} vs {}", back, r);
    }

    #[test]
    fn volume_monotone_random(m in 1usize..=8, a in 0.0f64..6.0, d in 1e-3f64..1.0) {
        let va = gaussian_ball_volume(m, a).unwrap().value();
        let vb = gaussian_ball_volume(m, a + d).unwrap().value();
        prop_assert!(vb >= va);
        prop_assert!((0.0..=1.0).contains(&va));
    }
}
