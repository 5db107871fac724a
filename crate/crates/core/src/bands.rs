//! Band structures from Chambers decompositions and from θ-grid sampling.
//!
//! When every coupling polynomial is a constant multiple of one common
//! polynomial R, the characteristic polynomial is base(λ) + g(θ)·R(λ) with a
//! scalar coupling g(θ) = Σ kⱼ·patternⱼ(qθ). Eigenvalue branches are then
//! monotone in g, so the k-th band is the interval swept between the k-th
//! sorted roots at g = min g and g = max g; flat bands appear as indices with
//! identical edge roots.

use ndarray_linalg::{EigValsh, UPLO};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::charpoly::{
    self, extract_chambers, lambda_star, ChambersForm, ChambersOptions, TrigPattern,
};
use crate::error::{Error, Result};
use crate::flux::{FluxRational, ThetaPoint};
use crate::lattice::{self, ModelSpec};
use crate::poly::RealPolynomial;

/// One spectral band [lo, hi]; flat bands have lo = hi and carry their
/// eigenvalue multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
    pub flat: bool,
    pub multiplicity: usize,
}

impl Band {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// How a band structure was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BandMethod {
    Chambers,
    Grid,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BandStructure {
    pub model: ModelSpec,
    pub flux: FluxRational,
    pub method: BandMethod,
    pub bands: Vec<Band>,
    /// λ values where consecutive bands touch, plus embedded flat-band
    /// contact points.
    pub touching_points: Vec<f64>,
}

impl BandStructure {
    /// Total eigenvalue count = Σ multiplicities (equals the matrix dimension).
    pub fn total_multiplicity(&self) -> usize {
        self.bands.iter().map(|b| b.multiplicity).sum()
    }
}

fn touching_points(bands: &[Band]) -> Vec<f64> {
    let mut points = Vec::new();
    for pair in bands.windows(2) {
        if (pair[1].lo - pair[0].hi).abs() <= FLAT_TOL * (1.0 + pair[0].hi.abs()) {
            points.push(pair[0].hi);
        }
    }
    // embedded flat bands touch the band whose closure contains them
    for (i, b) in bands.iter().enumerate() {
        if !b.flat {
            continue;
        }
        for (j, other) in bands.iter().enumerate() {
            if i != j && !other.flat && other.lo <= b.lo && b.lo <= other.hi {
                points.push(b.lo);
            }
        }
    }
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    points.dedup_by(|a, b| (*a - *b).abs() <= 1e-8);
    points
}

/// Range of the scalar coupling g(θ) with its extremizing Bloch points.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CouplingRange {
    pub gmin: f64,
    pub gmax: f64,
    pub argmin: ThetaPoint,
    pub argmax: ThetaPoint,
}

/// The common-factor structure of the couplings: cⱼ(λ) = kⱼ · R(λ).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CouplingAnalysis {
    /// Common polynomial factor R, normalized monic (constant 1 when the
    /// couplings are plain constants).
    pub common: RealPolynomial,
    pub constants: Vec<(TrigPattern, f64)>,
    /// Worst relative deviation of a coupling from kⱼ·R.
    pub mismatch: f64,
    pub range: CouplingRange,
}

impl CouplingAnalysis {
    /// base + g·R for a fixed coupling value g.
    pub fn edge_polynomial(&self, form: &ChambersForm, g: f64) -> RealPolynomial {
        form.base.add_scaled(&self.common, g)
    }
}

/// Extract the common factor R and the coupling constants from a fitted
/// Chambers form, and compute the range of g(θ).
pub fn coupling_analysis(form: &ChambersForm) -> Result<CouplingAnalysis> {
    if form.couplings.is_empty() {
        let zero = ThetaPoint::new(0.0, 0.0);
        return Ok(CouplingAnalysis {
            common: RealPolynomial::constant(1.0),
            constants: vec![],
            mismatch: 0.0,
            range: CouplingRange {
                gmin: 0.0,
                gmax: 0.0,
                argmin: zero,
                argmax: zero,
            },
        });
    }
    // pick the largest coupling as the reference for R
    let scale = |p: &RealPolynomial| p.coefficients().iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let (_, reference) = form
        .couplings
        .iter()
        .max_by(|a, b| scale(&a.1).partial_cmp(&scale(&b.1)).unwrap())
        .unwrap();
    let lead = *reference.coefficients().last().unwrap();
    let common = reference.scaled(1.0 / lead);
    let rr: f64 = common.coefficients().iter().map(|c| c * c).sum();
    let r_norm = scale(&common);

    let mut constants = Vec::new();
    let mut mismatch = 0.0f64;
    for (pat, poly) in &form.couplings {
        let dot: f64 = (0..=common.degree().max(poly.degree()))
            .map(|k| poly.coeff(k) * common.coeff(k))
            .sum();
        let k = dot / rr;
        for d in 0..=common.degree().max(poly.degree()) {
            mismatch = mismatch.max((poly.coeff(d) - k * common.coeff(d)).abs() / r_norm);
        }
        constants.push((*pat, k));
    }
    let worst_const = constants.iter().fold(0.0f64, |m, (_, k)| m.max(k.abs()));
    if mismatch > 1e-7 * worst_const.max(1.0) {
        return Err(Error::CouplingStructure { mismatch });
    }
    let range = coupling_range_from_constants(form.flux, &constants);
    Ok(CouplingAnalysis {
        common,
        constants,
        mismatch,
        range,
    })
}

/// Range of the scalar coupling of a fitted form; errors when the couplings
/// share no common polynomial factor.
pub fn coupling_range(form: &ChambersForm) -> Result<CouplingRange> {
    Ok(coupling_analysis(form)?.range)
}

/// Range and extremizers of g(θ) = Σ kⱼ·patternⱼ(qθ), by closed form where
/// available and a grid-plus-Newton search otherwise.
pub fn coupling_range_from_constants(
    flux: FluxRational,
    constants: &[(TrigPattern, f64)],
) -> CouplingRange {
    let q = flux.q() as f64;
    let to_theta = |x: f64, xi: f64| ThetaPoint::new(x / q, xi / q);
    let cos_only = constants
        .iter()
        .all(|(p, _)| TrigPattern::COSINES.contains(p));

    if cos_only && constants.len() <= 2 {
        // patterns are functionally independent: each attains ±|k| freely
        let mut gmax = 0.0;
        let mut gmin = 0.0;
        let mut max_vals = Vec::new();
        let mut min_vals = Vec::new();
        for (pat, k) in constants {
            gmax += k.abs();
            gmin -= k.abs();
            max_vals.push((*pat, if *k >= 0.0 { 0.0 } else { PI }));
            min_vals.push((*pat, if *k >= 0.0 { PI } else { 0.0 }));
        }
        let solve = |targets: &[(TrigPattern, f64)]| -> (f64, f64) {
            // find (x, ξ) with each pattern argument equal to its target
            let (mut x, mut xi) = (0.0, 0.0);
            let mut have_x = false;
            let mut have_xi = false;
            for (pat, t) in targets {
                match pat {
                    TrigPattern::CosTheta1 => {
                        x = *t;
                        have_x = true;
                    }
                    TrigPattern::CosTheta2 => {
                        xi = *t;
                        have_xi = true;
                    }
                    _ => {}
                }
            }
            for (pat, t) in targets {
                if matches!(pat, TrigPattern::CosDiff) {
                    if have_x {
                        xi = x - t;
                    } else if have_xi {
                        x = xi + t;
                    } else {
                        x = *t;
                    }
                }
            }
            (x, xi)
        };
        let (xa, xia) = solve(&max_vals);
        let (xb, xib) = solve(&min_vals);
        return CouplingRange {
            gmin,
            gmax,
            argmin: to_theta(xb, xib),
            argmax: to_theta(xa, xia),
        };
    }

    if cos_only && constants.len() == 3 {
        let mut k = [0.0f64; 3];
        for (pat, v) in constants {
            let idx = TrigPattern::COSINES.iter().position(|p| p == pat).unwrap();
            k[idx] = *v;
        }
        let mag = k[0].abs();
        if (k[1].abs() - mag).abs() < 1e-9 * mag.max(1.0)
            && (k[2].abs() - mag).abs() < 1e-9 * mag.max(1.0)
        {
            // equal magnitudes: reduce to ±mag·p^△ by half-period shifts
            let product = k[0].signum() * k[1].signum() * k[2].signum();
            let plus = product > 0.0;
            // shifts x → x+aπ, ξ → ξ+bπ that make the first two signs match
            let target = if plus { 1.0 } else { -1.0 };
            let a = if k[0].signum() == target { 0.0 } else { PI };
            let b = if k[1].signum() == target { 0.0 } else { PI };
            // g = ±mag·p^△(x+a, ξ+b); p^△ ranges over [−3/2, 3] with
            // max at (0,0) and min at (2π/3, −2π/3)
            let (at_max, at_min) = ((-a, -b), (2.0 * PI / 3.0 - a, -2.0 * PI / 3.0 - b));
            let (gmin, gmax, lo_pt, hi_pt) = if plus {
                (-1.5 * mag, 3.0 * mag, at_min, at_max)
            } else {
                (-3.0 * mag, 1.5 * mag, at_max, at_min)
            };
            return CouplingRange {
                gmin,
                gmax,
                argmin: to_theta(lo_pt.0, lo_pt.1),
                argmax: to_theta(hi_pt.0, hi_pt.1),
            };
        }
    }

    // generic fallback: coarse scan plus Newton refinement on the gradient
    let g = |x: f64, xi: f64| -> f64 {
        constants.iter().map(|(p, k)| k * p.value(x, xi)).sum()
    };
    let n = 181;
    let (mut best_min, mut best_max) = ((0.0, 0.0, f64::MAX), (0.0, 0.0, f64::MIN));
    for i in 0..n {
        for j in 0..n {
            let x = 2.0 * PI * i as f64 / n as f64;
            let xi = 2.0 * PI * j as f64 / n as f64;
            let v = g(x, xi);
            if v < best_min.2 {
                best_min = (x, xi, v);
            }
            if v > best_max.2 {
                best_max = (x, xi, v);
            }
        }
    }
    let refine = |start: (f64, f64, f64)| -> (f64, f64, f64) {
        let (mut x, mut xi, _) = start;
        for _ in 0..40 {
            let mut gx = 0.0;
            let mut gxi = 0.0;
            let (mut hxx, mut hxxi, mut hxixi) = (0.0, 0.0, 0.0);
            for (p, k) in constants {
                // derivatives of each pattern in (x, ξ)
                let (dx, dxi, ddxx, ddxxi, ddxixi) = match p {
                    TrigPattern::CosTheta1 => (-x.sin(), 0.0, -x.cos(), 0.0, 0.0),
                    TrigPattern::CosTheta2 => (0.0, -xi.sin(), 0.0, 0.0, -xi.cos()),
                    TrigPattern::CosDiff => {
                        let d = x - xi;
                        (-d.sin(), d.sin(), -d.cos(), d.cos(), -d.cos())
                    }
                    TrigPattern::SinTheta1 => (x.cos(), 0.0, -x.sin(), 0.0, 0.0),
                    TrigPattern::SinTheta2 => (0.0, xi.cos(), 0.0, 0.0, -xi.sin()),
                    TrigPattern::SinDiff => {
                        let d = x - xi;
                        (d.cos(), -d.cos(), -d.sin(), d.sin(), -d.sin())
                    }
                };
                gx += k * dx;
                gxi += k * dxi;
                hxx += k * ddxx;
                hxxi += k * ddxxi;
                hxixi += k * ddxixi;
            }
            let det = hxx * hxixi - hxxi * hxxi;
            if det.abs() < 1e-12 {
                break;
            }
            let step_x = (hxixi * gx - hxxi * gxi) / det;
            let step_xi = (hxx * gxi - hxxi * gx) / det;
            x -= step_x;
            xi -= step_xi;
            if step_x.abs() + step_xi.abs() < 1e-14 {
                break;
            }
        }
        (x, xi, g(x, xi))
    };
    let rmin = refine(best_min);
    let rmax = refine(best_max);
    let best_min = if rmin.2 <= best_min.2 { rmin } else { best_min };
    let best_max = if rmax.2 >= best_max.2 { rmax } else { best_max };
    CouplingRange {
        gmin: best_min.2,
        gmax: best_max.2,
        argmin: to_theta(best_min.0, best_min.1),
        argmax: to_theta(best_max.0, best_max.1),
    }
}

/// A θ away from every symmetry point, for multiplicity counting.
pub fn theta_generic() -> ThetaPoint {
    ThetaPoint::new(0.37, 1.13)
}

const FLAT_TOL: f64 = 1e-9;

/// Band structure from the Chambers decomposition: edge roots at the two
/// coupling extremes, paired in sorted order.
pub fn bands_from_chambers(
    model: &ModelSpec,
    flux: FluxRational,
    options: &ChambersOptions,
) -> Result<BandStructure> {
    let form = extract_chambers(model, flux, options)?;
    band_structure_from_form(model, flux, &form)
}

pub fn band_structure_from_form(
    model: &ModelSpec,
    flux: FluxRational,
    form: &ChambersForm,
) -> Result<BandStructure> {
    let analysis = coupling_analysis(form)?;
    let dim = model.dim(flux);
    let lo_poly = analysis.edge_polynomial(form, analysis.range.gmin);
    let hi_poly = analysis.edge_polynomial(form, analysis.range.gmax);

    // Companion roots are accurate up to moderate degree; past that (or when
    // validation fails) fall back to eigenvalues at the extremizing θ, which
    // stay perfectly conditioned and only miss second-order in the θ* error.
    let roots = if dim <= 40 {
        match (lo_poly.real_roots(), hi_poly.real_roots()) {
            (Ok(a), Ok(b)) if a.len() == dim && b.len() == dim => Some((a, b)),
            _ => None,
        }
    } else {
        None
    };
    let (roots_lo, roots_hi) = match roots {
        Some(pair) => pair,
        None => (
            eigenvalues_at(model, flux, analysis.range.argmin)?,
            eigenvalues_at(model, flux, analysis.range.argmax)?,
        ),
    };

    let bands = pair_edges(&roots_lo, &roots_hi);
    let touching = touching_points(&bands);
    Ok(BandStructure {
        model: *model,
        flux,
        method: BandMethod::Chambers,
        bands,
        touching_points: touching,
    })
}

/// Fast Chambers-structured band computation for butterfly sweeps.
///
/// Avoids the coefficient-space fit entirely — characteristic-polynomial
/// coefficients span ~10^38 of dynamic range by q = 50 and the linear fit
/// drowns. Instead the scalar coupling is sampled at a single λ₀ above the
/// spectrum, where det(λ₀I − M(θ)) = base(λ₀) + g(θ)·R(λ₀) is an affine
/// function of the three cosine patterns with perfectly conditioned values:
///
/// 1. det(λ₀I−M) at the four Hadamard nodes (qθ ∈ {0,π}²) determines the
///    affine coefficients exactly; an off-grid node certifies the ansatz.
/// 2. The fitted constants are kⱼ·R(λ₀), proportional to the true kⱼ, so
///    they locate the extremizers of g (a sign flip in R(λ₀) only swaps
///    argmin/argmax, which `pair_edges` absorbs).
/// 3. Two eigensolves at the extremizers give every band edge.
pub fn bands_direct(model: &ModelSpec, flux: FluxRational) -> Result<BandStructure> {
    let q = flux.q() as f64;
    let lambda0 = model.spectral_bound() + 1.0;
    let at = |x: f64, xi: f64| -> Result<f64> {
        let m = lattice::model_matrix(model, flux, ThetaPoint::new(x / q, xi / q));
        let v = charpoly::char_value(&m, num_complex::Complex64::new(lambda0, 0.0))?;
        Ok(v.re)
    };
    let f = [
        at(0.0, 0.0)?,
        at(PI, 0.0)?,
        at(0.0, PI)?,
        at(PI, PI)?,
    ];
    let a = 0.25 * (f[0] + f[1] + f[2] + f[3]);
    let b1 = 0.25 * (f[0] - f[1] + f[2] - f[3]); // cos qθ₁
    let b2 = 0.25 * (f[0] + f[1] - f[2] - f[3]); // cos qθ₂
    let b3 = 0.25 * (f[0] - f[1] - f[2] + f[3]); // cos q(θ₁−θ₂)

    // certificate at an off-grid point
    let (xv, xiv) = (2.399_331, 1.733_177);
    let fv = at(xv, xiv)?;
    let predicted = a + b1 * xv.cos() + b2 * xiv.cos() + b3 * (xv - xiv).cos();
    let scale = f
        .iter()
        .fold(fv.abs(), |m, v| m.max(v.abs()))
        .max(1.0);
    let residual = (fv - predicted).abs() / scale;
    if residual > 1e-8 {
        return Err(Error::FitResidual {
            residual,
            tolerance: 1e-8,
        });
    }

    let constants = [
        (TrigPattern::CosTheta1, b1),
        (TrigPattern::CosTheta2, b2),
        (TrigPattern::CosDiff, b3),
    ];
    let range = coupling_range_from_constants(flux, &constants);
    let roots_lo = eigenvalues_at(model, flux, range.argmin)?;
    let roots_hi = eigenvalues_at(model, flux, range.argmax)?;
    let bands = pair_edges(&roots_lo, &roots_hi);
    let touching = touching_points(&bands);
    Ok(BandStructure {
        model: *model,
        flux,
        method: BandMethod::Chambers,
        bands,
        touching_points: touching,
    })
}

fn eigenvalues_at(model: &ModelSpec, flux: FluxRational, theta: ThetaPoint) -> Result<Vec<f64>> {
    let m = lattice::model_matrix(model, flux, theta);
    let eigs = m.eigvalsh(UPLO::Lower)?;
    Ok(eigs.to_vec())
}

/// Pair sorted edge roots index by index and collapse zero-width runs into
/// flat bands with their multiplicity.
fn pair_edges(roots_lo: &[f64], roots_hi: &[f64]) -> Vec<Band> {
    let raw: Vec<(f64, f64)> = roots_lo
        .iter()
        .zip(roots_hi.iter())
        .map(|(&a, &b)| (a.min(b), a.max(b)))
        .collect();
    let mut bands = Vec::new();
    let mut i = 0;
    while i < raw.len() {
        let (lo, hi) = raw[i];
        let tol = FLAT_TOL * (1.0 + lo.abs());
        if hi - lo <= tol {
            let value = 0.5 * (lo + hi);
            let mut mult = 1;
            while i + mult < raw.len() {
                let (nlo, nhi) = raw[i + mult];
                if nhi - nlo <= FLAT_TOL * (1.0 + nlo.abs()) && (nlo - value).abs() <= 10.0 * tol {
                    mult += 1;
                } else {
                    break;
                }
            }
            bands.push(Band {
                lo: value,
                hi: value,
                flat: true,
                multiplicity: mult,
            });
            i += mult;
        } else {
            bands.push(Band {
                lo,
                hi,
                flat: false,
                multiplicity: 1,
            });
            i += 1;
        }
    }
    bands
}

/// Band structure by brute-force eigenvalue sampling on an n×n θ grid over
/// one period [0, 2π/q]², endpoints included.
pub fn bands_from_grid(
    model: &ModelSpec,
    flux: FluxRational,
    n: usize,
) -> Result<BandStructure> {
    Ok(bands_from_grid_detailed(model, flux, n)?.0)
}

/// Grid band structure plus, per band index, the max eigenvalue jump between
/// adjacent grid points — the effective resolution of each edge.
pub fn bands_from_grid_detailed(
    model: &ModelSpec,
    flux: FluxRational,
    n: usize,
) -> Result<(BandStructure, Vec<f64>)> {
    if n < 2 {
        return Err(Error::InvalidArgument("grid needs at least 2 points".into()));
    }
    let q = flux.q() as f64;
    let dim = model.dim(flux);
    let period = 2.0 * PI / q;
    let mut lo = vec![f64::MAX; dim];
    let mut hi = vec![f64::MIN; dim];
    let mut jump = vec![0.0f64; dim];
    // half-open grid [0, 2π/q)², spacing period/n; periodicity covers the
    // missing endpoint, and divisible n puts symmetry points on the grid
    // (e.g. n = 201 hits θ = π/3 where kagome bands touch)
    let mut prev_line: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        let t1 = period * i as f64 / n as f64;
        let mut line: Vec<Vec<f64>> = Vec::with_capacity(n);
        for j in 0..n {
            let t2 = period * j as f64 / n as f64;
            let eigs = eigenvalues_at(model, flux, ThetaPoint::new(t1, t2))?;
            for (k, &e) in eigs.iter().enumerate() {
                lo[k] = lo[k].min(e);
                hi[k] = hi[k].max(e);
                if j > 0 {
                    jump[k] = jump[k].max((e - line[j - 1][k]).abs());
                }
                if i > 0 {
                    jump[k] = jump[k].max((e - prev_line[j][k]).abs());
                }
            }
            line.push(eigs);
        }
        prev_line = line;
    }
    let bands = pair_edges(&lo, &hi);
    let touching = touching_points(&bands);
    Ok((
        BandStructure {
            model: *model,
            flux,
            method: BandMethod::Grid,
            bands,
            touching_points: touching,
        },
        jump,
    ))
}

/// The scalar coupling value t(λ) = −base(λ)/R(λ) that puts λ on the Fermi
/// surface; λ is in the spectrum iff t(λ) ∈ [gmin, gmax].
pub fn coupling_parameter(
    form: &ChambersForm,
    analysis: &CouplingAnalysis,
    lambda: f64,
) -> f64 {
    -form.base.eval(lambda) / analysis.common.eval(lambda)
}

/// Result of the flat-band criterion at one (flux, ω).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FlatBandTest {
    pub flat: bool,
    /// |base(λ*)| of the fitted base polynomial (Q_ω evaluated at λ*).
    pub residual: f64,
    pub lambda_star: f64,
    /// Eigenvalue count within 1e−7 of λ* at a generic θ; 0 when not flat.
    pub multiplicity: usize,
}

/// Flat-band criterion: the kagome model has a flat band at
/// λ* = −2cos(3ω − γ/8) iff the base polynomial Q_ω vanishes there.
pub fn flat_band_test(flux: FluxRational, omega: f64) -> Result<FlatBandTest> {
    let target = lambda_star(flux, omega);
    let model = ModelSpec::kagome(omega);
    let form = extract_chambers(&model, flux, &ChambersOptions::fast())?;
    let residual = form.base.eval(target).abs();
    let w = model.spectral_bound() + 1.0;
    let scale = form.base.sup_norm_on(-w, w, 256);
    let mut flat = residual < 1e-8 * (1.0 + scale);
    let mut mult = 0;
    if flat {
        mult = usize::MAX;
        for theta in [theta_generic(), ThetaPoint::new(2.11, 0.59)] {
            let eigs = eigenvalues_at(&model, flux, theta)?;
            let count = eigs.iter().filter(|e| (*e - target).abs() < 1e-7).count();
            mult = mult.min(count);
        }
        if mult == 0 {
            flat = false;
        }
    }
    Ok(FlatBandTest {
        flat,
        residual,
        lambda_star: target,
        multiplicity: mult,
    })
}

/// All ω in [0, 2π/3) (one period of the flat-band condition) at which the
/// kagome model has a flat band.
///
/// A flat band exists iff f(ω) = det(λ*(ω)I − M_K(θ₀, ω)) vanishes, for any
/// fixed θ₀ — the θ-dependent part of the determinant carries the factor
/// R(λ*) = 0. Transversal zeros are bisected on f; tangential zeros (where
/// f touches 0 quadratically) are located by bisecting the numerical
/// derivative of f around each near-zero local minimum of |f|.
pub fn flat_band_omegas(flux: FluxRational) -> Result<Vec<f64>> {
    flat_band_omegas_with(flux, 4096)
}

pub fn flat_band_omegas_with(flux: FluxRational, scan_points: usize) -> Result<Vec<f64>> {
    let theta0 = theta_generic();
    let f = |omega: f64| -> Result<f64> {
        let m = lattice::model_matrix(&ModelSpec::kagome(omega), flux, theta0);
        let v = charpoly::char_value(
            &m,
            num_complex::Complex64::new(lambda_star(flux, omega), 0.0),
        )?;
        Ok(v.re)
    };
    let period = 2.0 * PI / 3.0;
    let n = scan_points.max(64);
    let mut samples = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let w = period * i as f64 / n as f64;
        samples.push((w, f(w)?));
    }
    let scale = samples.iter().fold(0.0f64, |m, (_, v)| m.max(v.abs())).max(1.0);

    let mut candidates: Vec<f64> = Vec::new();
    for w in samples.windows(2) {
        let ((w0, f0), (w1, f1)) = (w[0], w[1]);
        if f0 == 0.0 {
            candidates.push(w0);
        } else if f0 * f1 < 0.0 {
            // transversal: plain bisection
            let (mut a, mut b, mut fa) = (w0, w1, f0);
            for _ in 0..80 {
                let mid = 0.5 * (a + b);
                let fm = f(mid)?;
                if fa * fm <= 0.0 {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
            }
            candidates.push(0.5 * (a + b));
        }
    }
    // tangential zeros: local minima of |f| that dip toward zero
    let h = 1e-6;
    for i in 1..samples.len() - 1 {
        let (wm, fm) = samples[i];
        if fm.abs() < samples[i - 1].1.abs()
            && fm.abs() < samples[i + 1].1.abs()
            && fm.abs() < 1e-4 * scale
        {
            // bisect df/dω (central difference) over the bracketing interval
            let df = |w: f64| -> Result<f64> { Ok((f(w + h)? - f(w - h)?) / (2.0 * h)) };
            let (mut a, mut b) = (samples[i - 1].0, samples[i + 1].0);
            let mut da = df(a)?;
            if da * df(b)? < 0.0 {
                for _ in 0..80 {
                    let mid = 0.5 * (a + b);
                    let dm = df(mid)?;
                    if da * dm <= 0.0 {
                        b = mid;
                    } else {
                        a = mid;
                        da = dm;
                    }
                }
                candidates.push(0.5 * (a + b));
            } else {
                candidates.push(wm);
            }
        }
    }

    // verify against the spectrum and dedupe
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut roots: Vec<f64> = Vec::new();
    for w in candidates {
        // fold into the half-open period [0, 2π/3)
        let w = if w < 0.0 { w + period } else { w };
        let w = if w >= period - 1e-7 { w - period } else { w };
        let w = w.max(0.0);
        if roots.iter().any(|r| (r - w).abs() < 1e-7) {
            continue;
        }
        if flat_band_test(flux, w)?.flat {
            roots.push(w);
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(roots)
}

/// A spectral gap between consecutive bands.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Gap {
    /// Index of the band below the gap.
    pub below: usize,
    pub lo: f64,
    pub hi: f64,
    pub width: f64,
    /// Gaps of width ≤ 1e−9 count as closed (touching bands).
    pub closed: bool,
}

pub fn gap_report(structure: &BandStructure) -> Vec<Gap> {
    let mut gaps = Vec::new();
    for (i, pair) in structure.bands.windows(2).enumerate() {
        let width = (pair[1].lo - pair[0].hi).max(0.0);
        gaps.push(Gap {
            below: i,
            lo: pair[0].hi,
            hi: pair[1].lo,
            width,
            closed: width <= FLAT_TOL * (1.0 + pair[0].hi.abs()),
        });
    }
    gaps
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flux(p: i64, q: i64) -> FluxRational {
        FluxRational::new(p, q).unwrap()
    }

    #[test]
    fn harper_zero_flux_band() {
        // q = 1 half-normalized Harper: spectrum [−2, 2]
        let bs = bands_from_chambers(
            &ModelSpec::square(),
            flux(0, 1),
            &ChambersOptions::default(),
        )
        .unwrap();
        assert_eq!(bs.bands.len(), 1);
        assert!((bs.bands[0].lo + 2.0).abs() < 1e-10);
        assert!((bs.bands[0].hi - 2.0).abs() < 1e-10);
    }

    #[test]
    fn harper_half_flux_bands() {
        // q = 2: λ² = cos²θ₁ + cos²θ₂ ∈ [0, 2] → bands ±[0, √2], touching at 0
        let bs = bands_from_chambers(
            &ModelSpec::square(),
            flux(1, 2),
            &ChambersOptions::default(),
        )
        .unwrap();
        assert_eq!(bs.bands.len(), 2);
        let s = 2.0f64.sqrt();
        assert!((bs.bands[0].lo + s).abs() < 1e-10);
        assert!(bs.bands[0].hi.abs() < 1e-7);
        assert!(bs.bands[1].lo.abs() < 1e-7);
        assert!((bs.bands[1].hi - s).abs() < 1e-10);
        let gaps = gap_report(&bs);
        assert!(gaps[0].closed);
    }

    #[test]
    fn chambers_and_grid_agree_for_triangular() {
        let f = flux(1, 3);
        let model = ModelSpec::triangular();
        let cb = bands_from_chambers(&model, f, &ChambersOptions::default()).unwrap();
        let (gb, jumps) = bands_from_grid_detailed(&model, f, 60).unwrap();
        assert_eq!(cb.total_multiplicity(), gb.total_multiplicity());
        let mut ci = 0;
        for (k, band) in gb.bands.iter().enumerate() {
            let tol = 3.0 * jumps[k].max(1e-9);
            assert!((band.lo - cb.bands[ci].lo).abs() < tol, "band {k} lo");
            assert!((band.hi - cb.bands[ci].hi).abs() < tol, "band {k} hi");
            ci += 1;
        }
    }

    #[test]
    fn kagome_zero_flux_flat_band() {
        // (0,1), ω = 0: flat band at −2 inside bands {−2}, [−2, 1], [1, 4]
        let bs = bands_from_chambers(
            &ModelSpec::kagome(0.0),
            flux(0, 1),
            &ChambersOptions::default(),
        )
        .unwrap();
        assert_eq!(bs.bands.len(), 3);
        assert!(bs.bands[0].flat);
        assert!((bs.bands[0].lo + 2.0).abs() < 1e-9);
        assert!((bs.bands[1].lo + 2.0).abs() < 1e-9);
        assert!((bs.bands[1].hi - 1.0).abs() < 1e-9);
        assert!((bs.bands[2].hi - 4.0).abs() < 1e-9);
        let fb = flat_band_test(flux(0, 1), 0.0).unwrap();
        assert!(fb.flat);
        assert!((fb.lambda_star + 2.0).abs() < 1e-12);
        assert_eq!(fb.multiplicity, 1);
        // ω = π/12 is not a flat-band phase: |Q(−√2)| = 2√2
        let fb = flat_band_test(flux(0, 1), PI / 12.0).unwrap();
        assert!(!fb.flat);
        assert!((fb.residual - 2.0 * 2f64.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn kagome_omega_scan_zero_flux() {
        let roots = flat_band_omegas_with(flux(0, 1), 720).unwrap();
        let expect = [0.0, PI / 6.0, PI / 3.0, PI / 2.0];
        assert_eq!(roots.len(), expect.len(), "roots: {roots:?}");
        for (r, e) in roots.iter().zip(expect) {
            assert!((r - e).abs() < 1e-8, "root {r} vs {e}");
        }
    }

    #[test]
    fn coupling_range_p_triangle_form() {
        // g = 2(cos x + cos ξ + cos(x−ξ)) = 2p^△: range [−3, 6]
        let constants = [
            (TrigPattern::CosTheta1, 2.0),
            (TrigPattern::CosTheta2, 2.0),
            (TrigPattern::CosDiff, 2.0),
        ];
        let r = coupling_range_from_constants(flux(0, 1), &constants);
        assert!((r.gmin + 3.0).abs() < 1e-12);
        assert!((r.gmax - 6.0).abs() < 1e-12);
    }

    #[test]
    fn coupling_range_sign_flipped() {
        // g = −2cos x − 2cos ξ + 2cos(x−ξ): product of signs is +, so the
        // range is still 2·[−3/2, 3] after half-period shifts
        let constants = [
            (TrigPattern::CosTheta1, -2.0),
            (TrigPattern::CosTheta2, -2.0),
            (TrigPattern::CosDiff, 2.0),
        ];
        let r = coupling_range_from_constants(flux(0, 1), &constants);
        assert!((r.gmin + 3.0).abs() < 1e-12);
        assert!((r.gmax - 6.0).abs() < 1e-12);
        // verify the extremizers actually attain the extremes
        let g = |t: ThetaPoint| -> f64 {
            constants
                .iter()
                .map(|(p, k)| k * p.value(t.theta1, t.theta2))
                .sum()
        };
        assert!((g(r.argmin) - r.gmin).abs() < 1e-12);
        assert!((g(r.argmax) - r.gmax).abs() < 1e-12);
    }

    #[test]
    fn coupling_range_odd_sign_product() {
        // g = 2cos x + 2cos ξ − 2cos(x−ξ): sign product −, range 2·[−3, 3/2]
        let constants = [
            (TrigPattern::CosTheta1, 2.0),
            (TrigPattern::CosTheta2, 2.0),
            (TrigPattern::CosDiff, -2.0),
        ];
        let r = coupling_range_from_constants(flux(0, 1), &constants);
        assert!((r.gmin + 6.0).abs() < 1e-12);
        assert!((r.gmax - 3.0).abs() < 1e-12);
    }

    #[test]
    fn coupling_range_generic_matches_closed_form() {
        // unequal magnitudes force the grid/Newton path; compare against a
        // dense direct scan
        let constants = [
            (TrigPattern::CosTheta1, 1.0),
            (TrigPattern::CosTheta2, 2.0),
            (TrigPattern::CosDiff, 0.7),
        ];
        let r = coupling_range_from_constants(flux(0, 1), &constants);
        let g = |x: f64, xi: f64| -> f64 {
            constants.iter().map(|(p, k)| k * p.value(x, xi)).sum()
        };
        let mut lo = f64::MAX;
        let mut hi = f64::MIN;
        for i in 0..1000 {
            for j in 0..1000 {
                let v = g(2.0 * PI * i as f64 / 1000.0, 2.0 * PI * j as f64 / 1000.0);
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        assert!(r.gmin <= lo + 1e-9 && r.gmin >= lo - 1e-4);
        assert!(r.gmax >= hi - 1e-9 && r.gmax <= hi + 1e-4);
    }

    #[test]
    fn grid_bands_match_multiplicity() {
        let f = flux(1, 2);
        let model = ModelSpec::hexagonal();
        let bs = bands_from_grid(&model, f, 40).unwrap();
        assert_eq!(bs.total_multiplicity(), model.dim(f));
    }
}
