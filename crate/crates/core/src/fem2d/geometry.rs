use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::quadrature::adaptive_integrate;
use std::f64::consts::{PI, TAU};

const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Disk { radius: f64 },
    Ellipse { a: f64, b: f64 },
    Rectangle { a: f64, b: f64 },
    Annulus { inner: f64, outer: f64 },
    /// Counter-clockwise vertex list.
    Polygon { vertices: Vec<[f64; 2]> },
}

/// A planar domain together with whether it is invariant under `x → -x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain2D {
    pub shape: Shape,
    pub symmetric: bool,
}

fn cross(u: [f64; 2], v: [f64; 2]) -> f64 {
    u[0] * v[1] - u[1] * v[0]
}

fn sub(u: [f64; 2], v: [f64; 2]) -> [f64; 2] {
    [u[0] - v[0], u[1] - v[1]]
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Mesh(format!("degenerate domain: {name} = {v}")))
    }
}

pub fn polygon_signed_area(vertices: &[[f64; 2]]) -> f64 {
    let n = vertices.len();
    0.5 * (0..n).map(|i| cross(vertices[i], vertices[(i + 1) % n])).sum::<f64>()
}

impl Domain2D {
    pub fn disk(radius: f64) -> Result<Self> {
        positive("radius", radius)?;
        Ok(Self { shape: Shape::Disk { radius }, symmetric: true })
    }

    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        positive("a", a)?;
        positive("b", b)?;
        Ok(Self { shape: Shape::Ellipse { a, b }, symmetric: true })
    }

    pub fn rectangle(a: f64, b: f64) -> Result<Self> {
        positive("a", a)?;
        positive("b", b)?;
        Ok(Self { shape: Shape::Rectangle { a, b }, symmetric: true })
    }

    pub fn annulus(inner: f64, outer: f64) -> Result<Self> {
        positive("inner", inner)?;
        if outer <= inner {
            return Err(Error::Mesh(format!("degenerate annulus: inner {inner} >= outer {outer}")));
        }
        Ok(Self { shape: Shape::Annulus { inner, outer }, symmetric: true })
    }

    /// Polygon from a vertex list in either orientation; symmetry is detected.
    pub fn polygon(mut vertices: Vec<[f64; 2]>) -> Result<Self> {
        if vertices.len() < 3 || vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::Mesh("polygon needs at least three finite vertices".into()));
        }
        let area = polygon_signed_area(&vertices);
        let scale = vertices.iter().map(|v| v[0].abs().max(v[1].abs())).fold(0.0, f64::max);
        if area.abs() <= 1e-14 * scale * scale {
            return Err(Error::Mesh("degenerate polygon with zero area".into()));
        }
        if area < 0.0 {
            vertices.reverse();
        }
        let symmetric = vertices.iter().all(|v| {
            vertices.iter().any(|w| (w[0] + v[0]).abs() <= SYMMETRY_TOL * scale.max(1.0) && (w[1] + v[1]).abs() <= SYMMETRY_TOL * scale.max(1.0))
        });
        Ok(Self { shape: Shape::Polygon { vertices }, symmetric })
    }

    pub fn from_spec(spec: &DomainSpec) -> Result<Self> {
        match spec {
            DomainSpec::Ball { radius } => Self::disk(*radius),
            DomainSpec::Annulus { inner, outer } => Self::annulus(*inner, *outer),
            DomainSpec::Ellipse { a, b } => Self::ellipse(*a, *b),
            DomainSpec::Rectangle { a, b } => Self::rectangle(*a, *b),
            DomainSpec::Polygon { vertices } => Self::polygon(vertices.clone()),
        }
    }

    pub fn to_spec(&self) -> DomainSpec {
        match &self.shape {
            Shape::Disk { radius } => DomainSpec::Ball { radius: *radius },
            Shape::Annulus { inner, outer } => DomainSpec::Annulus { inner: *inner, outer: *outer },
            Shape::Ellipse { a, b } => DomainSpec::Ellipse { a: *a, b: *b },
            Shape::Rectangle { a, b } => DomainSpec::Rectangle { a: *a, b: *b },
            Shape::Polygon { vertices } => DomainSpec::Polygon { vertices: vertices.clone() },
        }
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        let [x, y] = p;
        match &self.shape {
            Shape::Disk { radius } => x * x + y * y <= radius * radius,
            Shape::Ellipse { a, b } => (x / a).powi(2) + (y / b).powi(2) <= 1.0,
            Shape::Rectangle { a, b } => x.abs() <= *a && y.abs() <= *b,
            Shape::Annulus { inner, outer } => {
                let r2 = x * x + y * y;
                r2 >= inner * inner && r2 <= outer * outer
            }
            Shape::Polygon { vertices } => point_in_polygon(vertices, p),
        }
    }

    pub fn area(&self) -> f64 {
        match &self.shape {
            Shape::Disk { radius } => PI * radius * radius,
            Shape::Ellipse { a, b } => PI * a * b,
            Shape::Rectangle { a, b } => 4.0 * a * b,
            Shape::Annulus { inner, outer } => PI * (outer * outer - inner * inner),
            Shape::Polygon { vertices } => polygon_signed_area(vertices),
        }
    }

    /// A lower bound on the radius of the largest inscribed disk.
    pub fn inradius(&self) -> f64 {
        match &self.shape {
            Shape::Disk { radius } => *radius,
            Shape::Ellipse { a, b } | Shape::Rectangle { a, b } => a.min(*b),
            Shape::Annulus { inner, outer } => 0.5 * (outer - inner),
            Shape::Polygon { vertices } => {
                // twice the area over the perimeter, exact for tangential polygons
                let n = vertices.len();
                let perimeter: f64 = (0..n).map(|i| {
                    let d = sub(vertices[(i + 1) % n], vertices[i]);
                    d[0].hypot(d[1])
                }).sum();
                polygon_signed_area(vertices) / perimeter
            }
        }
    }

    /// Whether every ray from the origin meets the domain in one segment `[r_in, r_out]`.
    pub fn is_star_shaped(&self) -> bool {
        match &self.shape {
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                (0..n).all(|i| cross(vertices[i], vertices[(i + 1) % n]) >= -1e-14)
            }
            _ => true,
        }
    }

    /// The segment `[r_in, r_out]` cut from the ray at angle θ; `(0, 0)` if it misses.
    pub fn radial_extent(&self, theta: f64) -> (f64, f64) {
        let (s, c) = theta.sin_cos();
        match &self.shape {
            Shape::Disk { radius } => (0.0, *radius),
            Shape::Annulus { inner, outer } => (*inner, *outer),
            Shape::Ellipse { a, b } => (0.0, 1.0 / ((c / a).powi(2) + (s / b).powi(2)).sqrt()),
            Shape::Rectangle { a, b } => {
                let tx = if c.abs() > 0.0 { a / c.abs() } else { f64::INFINITY };
                let ty = if s.abs() > 0.0 { b / s.abs() } else { f64::INFINITY };
                (0.0, tx.min(ty))
            }
            Shape::Polygon { vertices } => {
                let d = [c, s];
                let n = vertices.len();
                let mut best = f64::INFINITY;
                for i in 0..n {
                    let p = vertices[i];
                    let e = sub(vertices[(i + 1) % n], p);
                    let denom = cross(d, e);
                    if denom.abs() < 1e-300 {
                        continue;
                    }
                    let t = cross(p, e) / denom;
                    let u = cross(p, d) / denom;
                    if t > 1e-12 && (-1e-12..=1.0 + 1e-12).contains(&u) {
                        best = best.min(t);
                    }
                }
                if best.is_finite() && self.contains([0.5 * best * c, 0.5 * best * s]) {
                    (0.0, best)
                } else {
                    (0.0, 0.0)
                }
            }
        }
    }

    /// Angles in [0, 2π) where the radial extent fails to be smooth.
    pub fn angular_breaks(&self) -> Vec<f64> {
        let mut breaks: Vec<f64> = match &self.shape {
            Shape::Rectangle { a, b } => {
                let t = b.atan2(*a);
                vec![t, PI - t, PI + t, TAU - t]
            }
            Shape::Polygon { vertices } => vertices.iter().map(|v| v[1].atan2(v[0]).rem_euclid(TAU)).collect(),
            _ => Vec::new(),
        };
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        breaks
    }

    /// `(1/2π) ∫₀^{2π} f(r_in(θ), r_out(θ)) dθ` by adaptive quadrature between
    /// angular breaks. Returns (value, error estimate).
    pub fn polar_integral(&self, f: impl Fn(f64, f64) -> f64, tol: f64) -> Result<(f64, f64)> {
        if !self.is_star_shaped() {
            return Err(Error::Argument("polar integrals need a domain star-shaped about the origin".into()));
        }
        let mut cuts = vec![0.0];
        cuts.extend(self.angular_breaks().into_iter().filter(|&t| t > 0.0 && t < TAU));
        cuts.push(TAU);
        let mut value = 0.0;
        let mut err = 0.0;
        let pieces = (cuts.len() - 1) as f64;
        for w in cuts.windows(2) {
            let (v, e) = adaptive_integrate(
                |t| {
                    let (ri, ro) = self.radial_extent(t);
                    f(ri, ro)
                },
                w[0],
                w[1],
                tol / pieces,
            );
            value += v;
            err += e;
        }
        Ok((value / TAU, err / TAU))
    }

    /// Normalized Gaussian measure γ₂(Ω).
    pub fn gaussian_volume(&self) -> Result<f64> {
        let (v, _) = self.polar_integral(|a, b| (-a * a / 2.0).exp() - (-b * b / 2.0).exp(), 1e-14)?;
        Ok(v)
    }
}

pub(crate) fn point_in_polygon(vertices: &[[f64; 2]], p: [f64; 2]) -> bool {
    let n = vertices.len();
    let mut inside = false;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        // on-edge points count as inside
        let e = sub(b, a);
        let w = sub(p, a);
        let len2 = e[0] * e[0] + e[1] * e[1];
        let t = (w[0] * e[0] + w[1] * e[1]) / len2;
        if cross(e, w).abs() <= 1e-12 * len2.sqrt() && (-1e-12..=1.0 + 1e-12).contains(&t) {
            return true;
        }
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * e[0];
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gaussian_ball_volume;

    #[test]
    fn disk_volume_matches_closed_form() {
        let d = Domain2D::disk(1.0).unwrap();
        let v = d.gaussian_volume().unwrap();
        assert!((v - gaussian_ball_volume(2, 1.0).unwrap().value()).abs() < 1e-13);
    }

    #[test]
    fn rectangle_volume_is_product_of_error_functions() {
        // γ₂([-a,a]×[-b,b]) = erf(a/√2) erf(b/√2); erf(1/√2) = 0.682689492137086
        let d = Domain2D::rectangle(1.0, 1.0).unwrap();
        let v = d.gaussian_volume().unwrap();
        assert!((v - 0.682_689_492_137_086f64.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn polygon_symmetry_detection() {
        let hex: Vec<[f64; 2]> = (0..6).map(|k| {
            let t = k as f64 * PI / 3.0;
            [t.cos(), t.sin()]
        }).collect();
        let d = Domain2D::polygon(hex).unwrap();
        assert!(d.symmetric);
        let tri = Domain2D::polygon(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert!(!tri.symmetric);
        assert!(Domain2D::polygon(vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]).is_err());
    }

    #[test]
    fn polygon_orientation_is_normalized() {
        let cw = vec![[-1.0, -1.0], [-1.0, 1.0], [1.0, 1.0], [1.0, -1.0]];
        let d = Domain2D::polygon(cw).unwrap();
        assert!((d.area() - 4.0).abs() < 1e-15);
        assert!(d.symmetric);
        let square = Domain2D::rectangle(1.0, 1.0).unwrap();
        for k in 0..40 {
            let t = k as f64 * 0.157;
            let (_, a) = d.radial_extent(t);
            let (_, b) = square.radial_extent(t);
            assert!((a - b).abs() < 1e-12, "theta={t}");
        }
    }

    #[test]
    fn half_disk_extent_vanishes_below_axis() {
        let mut v: Vec<[f64; 2]> = (0..=32).map(|k| {
            let t = PI * k as f64 / 32.0;
            [t.cos(), t.sin()]
        }).collect();
        v.push([0.0, 0.0]);
        let d = Domain2D::polygon(v).unwrap();
        assert!(!d.symmetric);
        assert_eq!(d.radial_extent(-PI / 2.0), (0.0, 0.0));
        assert!(d.radial_extent(PI / 2.0).1 > 0.99);
    }

    #[test]
    fn containment() {
        let e = Domain2D::ellipse(2.0, 1.0).unwrap();
        assert!(e.contains([1.9, 0.0]) && !e.contains([1.9, 0.5]));
        let a = Domain2D::annulus(0.5, 1.0).unwrap();
        assert!(!a.contains([0.1, 0.1]) && a.contains([0.7, 0.0]));
    }
}
