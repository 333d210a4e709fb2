//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

/// Confluent hypergeometric M(a, b, z) by its power series; adequate for z ≲ 20.
pub fn kummer_m(a: f64, b: f64, z: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..2000 {
        let k = k as f64;
        term *= (a + k) / (b + k) * z / (k + 1.0);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() && k > z {
            break;
        }
    }
    sum
}

/// Sign-carrying part of g'(R) for the regular solution `g = r^ℓ M((ℓ-μ)/2, ℓ+m/2, r²/2)`.
pub fn kummer_flux(m: usize, l: usize, radius: f64, mu: f64) -> f64 {
    let lf = l as f64;
    let a = (lf - mu) / 2.0;
    let b = lf + m as f64 / 2.0;
    let z = radius * radius / 2.0;
    lf * kummer_m(a, b, z) + 2.0 * z * (a / b) * kummer_m(a + 1.0, b + 1.0, z)
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 * hi.abs().max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// The `k`-th (0-based) root in μ of the Kummer flux, scanning upward from `start`.
pub fn kummer_eigenvalue(m: usize, l: usize, radius: f64, k: usize, start: f64) -> f64 {
    let f = |mu: f64| kummer_flux(m, l, radius, mu);
    let step = 0.01 * (1.0 + 1.0 / (radius * radius));
    let mut lo = start;
    let mut flo = f(lo);
    let mut found = 0;
    loop {
        let hi = lo + step;
        let fhi = f(hi);
        if (fhi > 0.0) != (flo > 0.0) {
            if found == k {
                return bisect(f, lo, hi);
            }
            found += 1;
        }
        lo = hi;
        flo = fhi;
    }
}

/// J_n(x) from its power series.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = half.powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
    let mut sum = term;
    for k in 1..200 {
        let k = k as f64;
        term *= -half * half / (k * (k + n as f64));
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// First positive zero of J₁', by bisection on J₁' = (J₀ - J₂)/2.
pub fn first_zero_of_j1_prime() -> f64 {
    bisect(|x| bessel_j(0, x) - bessel_j(2, x), 1.0, 3.0)
}

/// μ₁(B_R) for m = 2..5 and R = 0.25, 0.5, 1, 2, 4 from an arbitrary-precision
/// hypergeometric root finder.
pub const MU1_TABLE: [(usize, [f64; 5]); 4] = [
    (2, [54.6595, 13.9855, 3.83762, 1.38420, 1.002479]),
    (3, [69.686, 17.695, 4.71569, 1.54682, 1.005262]),
    (4, [84.945, 21.474, 5.62178, 1.72631, 1.009905]),
    (5, [100.365, 25.3006, 6.54781, 1.91901, 1.016974]),
];
pub const MU1_TABLE_RADII: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

/// (j'₁,₁)², frozen from the arbitrary-precision value.
pub const J1_PRIME_ZERO_SQUARED: f64 = 3.38995771667;

/// Outer radius of the annulus `inner < |x| < outer` in ℝ^m with Gaussian volume `volume`.
pub fn annulus_outer_for_volume(m: usize, inner: f64, volume: f64) -> f64 {
    use gauss_neumann::quadrature::{gaussian_ball_volume, volume_to_radius, GaussianVolume};
    let total = gaussian_ball_volume(m, inner).unwrap().value() + volume;
    volume_to_radius(m, GaussianVolume::new(total).unwrap()).unwrap()
}

/// The scale b for which `make(b)` has Gaussian volume `volume`, by bisection.
pub fn planar_scale_for_volume(make: impl Fn(f64) -> gauss_neumann::fem2d::Domain2D, volume: f64) -> f64 {
    let (mut lo, mut hi) = (1e-3, 10.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if make(mid).gaussian_volume().unwrap() < volume {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
