//! Rational magnetic flux and Bloch quasi-momentum.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

/// Reduced rational flux p/q with γ = 2πp/q through the fundamental cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FluxRational {
    p: i64,
    q: i64,
}

impl FluxRational {
    /// Reduce p/q on construction; q must be positive after sign normalization.
    pub fn new(p: i64, q: i64) -> Result<FluxRational> {
        if q == 0 {
            return Err(Error::InvalidFlux {
                p,
                q,
                reason: "denominator is zero".into(),
            });
        }
        let (mut p, mut q) = if q < 0 { (-p, -q) } else { (p, q) };
        let g = if p == 0 { q } else { gcd(p, q) };
        p /= g;
        q /= g;
        Ok(FluxRational { p, q })
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn q_usize(&self) -> usize {
        self.q as usize
    }

    /// Flux per cell, γ = 2πp/q.
    pub fn gamma(&self) -> f64 {
        2.0 * PI * self.p as f64 / self.q as f64
    }

    /// Flux fraction p/q as a real number.
    pub fn fraction(&self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

impl std::fmt::Display for FluxRational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

/// A Bloch point θ = (θ₁, θ₂); every consumer is 2π-periodic in each coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaPoint {
    pub theta1: f64,
    pub theta2: f64,
}

impl ThetaPoint {
    pub fn new(theta1: f64, theta2: f64) -> ThetaPoint {
        debug_assert!(theta1.is_finite() && theta2.is_finite());
        ThetaPoint { theta1, theta2 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_on_construction() {
        let f = FluxRational::new(2, 4).unwrap();
        assert_eq!((f.p(), f.q()), (1, 2));
        let f = FluxRational::new(-3, 6).unwrap();
        assert_eq!((f.p(), f.q()), (-1, 2));
        let f = FluxRational::new(3, -6).unwrap();
        assert_eq!((f.p(), f.q()), (-1, 2));
        let f = FluxRational::new(0, 7).unwrap();
        assert_eq!((f.p(), f.q()), (0, 1));
    }

    #[test]
    fn gamma_matches_definition() {
        let f = FluxRational::new(3, 2).unwrap();
        assert!((f.gamma() - 3.0 * PI).abs() < 1e-15);
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(FluxRational::new(1, 0).is_err());
    }
}
