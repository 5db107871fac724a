//! Real polynomials in one variable, with companion-matrix root finding.

use ndarray::prelude::*;
use ndarray_linalg::Eig;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Real polynomial stored as coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealPolynomial {
    coefficients: Vec<f64>,
}

impl RealPolynomial {
    /// Build from ascending coefficients, trimming a trailing tail that is
    /// below 1e−10 of the largest coefficient.
    pub fn new(coefficients: Vec<f64>) -> RealPolynomial {
        let mut p = RealPolynomial { coefficients };
        p.trim();
        p
    }

    pub fn zero() -> RealPolynomial {
        RealPolynomial { coefficients: vec![] }
    }

    pub fn constant(c: f64) -> RealPolynomial {
        RealPolynomial::new(vec![c])
    }

    /// Monic polynomial with the given real roots, Π(λ − rᵢ).
    pub fn from_roots(roots: &[f64]) -> RealPolynomial {
        // ascending coefficients, multiplied by (λ − r) in place
        let mut coeffs = vec![1.0];
        for &r in roots {
            coeffs.push(0.0);
            for k in (1..coeffs.len()).rev() {
                coeffs[k] = coeffs[k - 1] - r * coeffs[k];
            }
            coeffs[0] *= -r;
        }
        RealPolynomial { coefficients: coeffs }
    }

    fn trim(&mut self) {
        let max = self
            .coefficients
            .iter()
            .fold(0.0f64, |m, c| m.max(c.abs()));
        let tol = 1e-10 * max;
        while let Some(&last) = self.coefficients.last() {
            if last.abs() <= tol {
                self.coefficients.pop();
            } else {
                break;
            }
        }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Coefficient of λ^k (0 when k exceeds the degree).
    pub fn coeff(&self, k: usize) -> f64 {
        self.coefficients.get(k).copied().unwrap_or(0.0)
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coefficients
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> RealPolynomial {
        if self.coefficients.len() <= 1 {
            return RealPolynomial::zero();
        }
        let coeffs = self
            .coefficients
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| k as f64 * c)
            .collect();
        RealPolynomial { coefficients: coeffs }
    }

    pub fn scaled(&self, s: f64) -> RealPolynomial {
        RealPolynomial::new(self.coefficients.iter().map(|&c| c * s).collect())
    }

    /// self + s·other.
    pub fn add_scaled(&self, other: &RealPolynomial, s: f64) -> RealPolynomial {
        let n = self.coefficients.len().max(other.coefficients.len());
        let coeffs = (0..n)
            .map(|k| self.coeff(k) + s * other.coeff(k))
            .collect();
        RealPolynomial::new(coeffs)
    }

    pub fn mul(&self, other: &RealPolynomial) -> RealPolynomial {
        if self.is_zero() || other.is_zero() {
            return RealPolynomial::zero();
        }
        let mut coeffs = vec![0.0; self.coefficients.len() + other.coefficients.len() - 1];
        for (i, &a) in self.coefficients.iter().enumerate() {
            for (j, &b) in other.coefficients.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        RealPolynomial::new(coeffs)
    }

    /// Composition self(inner(λ)).
    pub fn compose(&self, inner: &RealPolynomial) -> RealPolynomial {
        let mut acc = RealPolynomial::zero();
        for &c in self.coefficients.iter().rev() {
            acc = acc.mul(inner).add_scaled(&RealPolynomial::constant(c), 1.0);
        }
        acc
    }

    /// Divide out (λ − r)^m by synthetic division; the remainder is dropped.
    pub fn deflate(&self, r: f64, multiplicity: usize) -> RealPolynomial {
        let mut coeffs = self.coefficients.clone();
        for _ in 0..multiplicity {
            if coeffs.len() <= 1 {
                return RealPolynomial::zero();
            }
            let mut out = vec![0.0; coeffs.len() - 1];
            let mut carry = *coeffs.last().unwrap();
            for k in (0..coeffs.len() - 1).rev() {
                out[k] = carry;
                carry = coeffs[k] + r * carry;
            }
            coeffs = out;
        }
        RealPolynomial::new(coeffs)
    }

    /// Max |p| over `samples` equispaced points of [lo, hi].
    pub fn sup_norm_on(&self, lo: f64, hi: f64, samples: usize) -> f64 {
        let n = samples.max(2);
        (0..n)
            .map(|i| {
                let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
                self.eval(x).abs()
            })
            .fold(0.0, f64::max)
    }

    /// All roots, required to be real: companion-matrix eigenvalues of the
    /// monic rescaled polynomial, followed by a Newton polish that handles
    /// touching-band double roots through derivative polynomials.
    ///
    /// Fails when any eigenvalue has an imaginary part above
    /// 1e−8·(1+|Re|), which a caller treats as a fallback signal.
    pub fn real_roots(&self) -> Result<Vec<f64>> {
        let n = self.degree();
        if n == 0 {
            return Ok(vec![]);
        }
        let lead = *self.coefficients.last().unwrap();
        // Cauchy bound on |root| of the monic polynomial, used as the scale.
        let scale = self
            .coefficients
            .iter()
            .take(n)
            .map(|c| (c / lead).abs())
            .fold(0.0f64, f64::max)
            .max(1.0)
            .min(1.0 + self
                .coefficients
                .iter()
                .take(n)
                .map(|c| (c / lead).abs())
                .fold(0.0f64, f64::max));
        // monic coefficients of p(scale·t)/(lead·scale^n)
        let mut monic = Vec::with_capacity(n + 1);
        for (k, &c) in self.coefficients.iter().enumerate() {
            monic.push(c / lead * scale.powi(k as i32 - n as i32));
        }
        let mut companion = Array2::<f64>::zeros((n, n));
        for i in 1..n {
            companion[[i, i - 1]] = 1.0;
        }
        for i in 0..n {
            companion[[i, n - 1]] = -monic[i];
        }
        let (eigs, _) = companion
            .eig()
            .map_err(|e| Error::CompanionRoots(format!("eigensolver failed: {e}")))?;
        let mut roots = Vec::with_capacity(n);
        for ev in eigs.iter() {
            let lambda = ev * scale;
            if lambda.im.abs() > 1e-8 * (1.0 + lambda.re.abs()) * scale.max(1.0) {
                return Err(Error::CompanionRoots(format!(
                    "complex root {:.6e}+{:.6e}i beyond tolerance",
                    lambda.re, lambda.im
                )));
            }
            roots.push(lambda.re);
        }
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        self.polish_roots(&mut roots);
        Ok(roots)
    }

    /// Newton polish of sorted companion roots. Clusters of m nearby roots
    /// (exact m-fold roots at touching bands) are refined on the (m−1)-th
    /// derivative, where the multiple root is simple; a refinement is kept
    /// only if it does not increase |p|.
    fn polish_roots(&self, roots: &mut [f64]) {
        let cluster_tol = |x: f64| 2e-5 * (1.0 + x.abs());
        let mut i = 0;
        while i < roots.len() {
            let mut j = i + 1;
            while j < roots.len() && roots[j] - roots[j - 1] <= cluster_tol(roots[j]) {
                j += 1;
            }
            let m = j - i;
            let center = roots[i..j].iter().sum::<f64>() / m as f64;
            let mut target = self.clone();
            for _ in 1..m {
                target = target.derivative();
            }
            if let Some(refined) = newton(&target, center) {
                if self.eval(refined).abs() <= self.eval(center).abs().max(self.eval(roots[i]).abs()) {
                    for r in roots[i..j].iter_mut() {
                        *r = refined;
                    }
                }
            }
            i = j;
        }
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    }
}

fn newton(p: &RealPolynomial, start: f64) -> Option<f64> {
    let dp = p.derivative();
    let mut x = start;
    for _ in 0..60 {
        let f = p.eval(x);
        let d = dp.eval(x);
        if d == 0.0 {
            return None;
        }
        let step = f / d;
        let next = x - step;
        if !next.is_finite() || (next - start).abs() > 1.0 + 1e-2 * (1.0 + start.abs()) {
            return None;
        }
        if (next - x).abs() <= 1e-15 * (1.0 + x.abs()) {
            return Some(next);
        }
        x = next;
    }
    Some(x)
}

impl std::fmt::Display for RealPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, &c) in self.coefficients.iter().enumerate().rev() {
            if c == 0.0 && self.degree() > 0 {
                continue;
            }
            if !first {
                write!(f, " {} ", if c < 0.0 { "-" } else { "+" })?;
            } else if c < 0.0 {
                f.write_str("-")?;
            }
            let a = c.abs();
            match k {
                0 => write!(f, "{a}")?,
                1 if a == 1.0 => write!(f, "λ")?,
                1 => write!(f, "{a}·λ")?,
                _ if a == 1.0 => write!(f, "λ^{k}")?,
                _ => write!(f, "{a}·λ^{k}")?,
            }
            first = false;
        }
        Ok(())
    }
}
