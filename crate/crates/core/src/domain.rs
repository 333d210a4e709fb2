//! Serializable description of the domains the toolkit knows how to solve on.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DomainSpec {
    /// Origin-centered ball of the given radius.
    Ball { radius: f64 },
    /// Spherical shell `inner < |x| < outer`.
    Annulus { inner: f64, outer: f64 },
    /// Planar ellipse with semi-axes `a` (x) and `b` (y).
    Ellipse { a: f64, b: f64 },
    /// Planar rectangle `[-a, a] × [-b, b]`.
    Rectangle { a: f64, b: f64 },
    /// Planar polygon, vertices in counter-clockwise order.
    Polygon { vertices: Vec<[f64; 2]> },
}

impl DomainSpec {
    pub fn is_radial(&self) -> bool {
        matches!(self, DomainSpec::Ball { .. } | DomainSpec::Annulus { .. })
    }

    pub fn is_ball(&self) -> bool {
        matches!(self, DomainSpec::Ball { .. })
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Argument(format!("{name} must be positive and finite, got {v}")))
            }
        };
        match self {
            DomainSpec::Ball { radius } => positive("radius", *radius),
            DomainSpec::Annulus { inner, outer } => {
                positive("inner", *inner)?;
                positive("outer", *outer)?;
                if inner >= outer {
                    return Err(Error::Argument(format!("annulus needs inner < outer, got {inner} >= {outer}")));
                }
                Ok(())
            }
            planar => {
                if m != 2 {
                    return Err(Error::Argument(format!("{} domains are planar; m must be 2, got {m}", planar.kind())));
                }
                match planar {
                    DomainSpec::Ellipse { a, b } | DomainSpec::Rectangle { a, b } => {
                        positive("a", *a)?;
                        positive("b", *b)
                    }
                    DomainSpec::Polygon { vertices } if vertices.len() < 3 => {
                        Err(Error::Argument("polygon needs at least three vertices".into()))
                    }
                    _ => Ok(()),
                }
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            DomainSpec::Ball { .. } => "ball",
            DomainSpec::Annulus { .. } => "annulus",
            DomainSpec::Ellipse { .. } => "ellipse",
            DomainSpec::Rectangle { .. } => "rectangle",
            DomainSpec::Polygon { .. } => "polygon",
        }
    }
}
