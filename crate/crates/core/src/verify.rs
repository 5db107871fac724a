//! Identity suites: algebraic symmetries, trace identities, and the two
//! determinant theorems, all checked numerically at pseudo-random sample
//! points with named residuals.

use ndarray_linalg::{Eigh, UPLO};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use crate::bands;
use crate::charpoly::{
    self, char_poly_hermitian, graphene_factorization_check, verify_kagome_theorem,
    ChambersOptions,
};
use crate::error::Result;
use crate::flux::{FluxRational, ThetaPoint};
use crate::lattice::{self, adjoint, max_diff, phase, unitary_defect, CMatrix, ModelSpec};
use crate::report::IdentityReport;
use crate::semiclassical;

const EXACT_TOL: f64 = 1e-10;

/// Symmetry residuals at one (flux, ω): commutation relations, the S-matrix
/// similarity, char-poly invariance of N under the torus rotation r and the
/// swap s, and the λ→−λ symmetry of the graphene spectrum.
pub fn verify_symmetries(
    flux: FluxRational,
    omega: f64,
    samples: usize,
    seed: u64,
) -> Result<IdentityReport> {
    verify_symmetries_with_fault(flux, omega, samples, seed, 0.0)
}

/// Negative-control variant: `fault` is added to one entry of J before the
/// commutation check, so a nonzero fault must produce a failing report.
#[doc(hidden)]
pub fn verify_symmetries_with_fault(
    flux: FluxRational,
    omega: f64,
    samples: usize,
    seed: u64,
    fault: f64,
) -> Result<IdentityReport> {
    let mut report = IdentityReport::new(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = flux.q_usize();
    let gamma = flux.gamma();

    let mut j = lattice::clock_matrix(flux);
    j[[0, 0]] += num_complex::Complex64::new(fault, 0.0);
    let k = lattice::shift_matrix(q);
    let ks = adjoint(&k);

    // JK = e^{−iγ}KJ
    let r1 = max_diff(&j.dot(&k), &k.dot(&j).mapv(|z| z * phase(-gamma)));
    report.push("commutation jk", r1, EXACT_TOL);
    // K*J = e^{−iγ}JK*
    let r2 = max_diff(&ks.dot(&j), &j.dot(&ks).mapv(|z| z * phase(-gamma)));
    report.push("commutation ksj", r2, EXACT_TOL);

    let mut worst_s = 0.0f64;
    let mut worst_rot = 0.0f64;
    let mut worst_swap = 0.0f64;
    let mut worst_graphene = 0.0f64;
    for _ in 0..samples.max(1) {
        let theta = ThetaPoint::new(rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI));

        // W* M_K W equals the explicit reduced form S(θ)
        let m = lattice::model_matrix(&ModelSpec::kagome(omega), flux, theta);
        let w = lattice::s_conjugator(flux, theta);
        let conj = adjoint(&w).dot(&m).dot(&w);
        let s = lattice::s_matrix_explicit(flux, theta, omega);
        worst_s = worst_s.max(max_diff(&conj, &s));

        // char poly of N(θ) invariant under r and s
        let n0 = lattice::n_matrix(flux, theta, omega);
        let p0 = char_poly_hermitian(&n0)?;
        let scale = p0
            .coefficients()
            .iter()
            .fold(1.0f64, |m, c| m.max(c.abs()));
        for (variant, worst) in [
            (lattice::rotate_theta(theta), &mut worst_rot),
            (lattice::swap_theta(theta), &mut worst_swap),
        ] {
            let pv = char_poly_hermitian(&lattice::n_matrix(flux, variant, omega))?;
            for d in 0..=p0.degree().max(pv.degree()) {
                *worst = worst.max((p0.coeff(d) - pv.coeff(d)).abs() / scale);
            }
        }

        // graphene spectrum symmetric under λ → −λ
        let mg = lattice::model_matrix(&ModelSpec::hexagonal(), flux, theta);
        let (eigs, _) = mg.eigh(UPLO::Lower)?;
        let n = eigs.len();
        for i in 0..n {
            worst_graphene = worst_graphene.max((eigs[i] + eigs[n - 1 - i]).abs());
        }
    }
    report.push("s-similarity", worst_s, EXACT_TOL);
    report.push("n-rotation-invariance", worst_rot, EXACT_TOL);
    report.push("n-swap-invariance", worst_swap, EXACT_TOL);
    report.push("graphene-lambda-symmetry", worst_graphene, EXACT_TOL);
    Ok(report)
}

fn coprime_fluxes(qmax: i64) -> Vec<FluxRational> {
    let mut out = Vec::new();
    for q in 1..=qmax {
        for p in 0..q.max(1) {
            if num_gcd(p, q) == 1 || (p == 0 && q == 1) {
                out.push(FluxRational::new(p, q).unwrap());
            }
        }
    }
    out
}

fn num_gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

/// Unitarity of J, K, U, V; J^q = K^q = I; the Fourier and V conjugation
/// relations f2–f6 — exhaustively for all reduced fluxes with q ≤ qmax.
pub fn verify_algebra(qmax: i64) -> Result<IdentityReport> {
    let mut report = IdentityReport::new(0);
    let tol = 1e-12;
    let mut r_unitary = 0.0f64;
    let mut r_power = 0.0f64;
    let mut r_fourier = 0.0f64;
    let mut r_v = 0.0f64;
    for flux in coprime_fluxes(qmax) {
        let q = flux.q_usize();
        let j = lattice::clock_matrix(flux);
        let k = lattice::shift_matrix(q);
        let u = lattice::fourier_unitary(flux);
        let v = lattice::v_unitary(flux);
        let l = lattice::l_matrix(flux);
        for m in [&j, &k, &u, &v] {
            r_unitary = r_unitary.max(unitary_defect(m));
        }
        let eye = CMatrix::eye(q);
        let mut jq = eye.clone();
        let mut kq = eye.clone();
        for _ in 0..q {
            jq = jq.dot(&j);
            kq = kq.dot(&k);
        }
        r_power = r_power.max(max_diff(&jq, &eye)).max(max_diff(&kq, &eye));

        let us = adjoint(&u);
        r_fourier = r_fourier
            .max(max_diff(&us.dot(&adjoint(&k)).dot(&u), &j))
            .max(max_diff(&us.dot(&j).dot(&u), &k));
        let vs = adjoint(&v);
        r_v = r_v
            .max(max_diff(&vs.dot(&adjoint(&k)).dot(&v), &j))
            .max(max_diff(&vs.dot(&j).dot(&v), &l))
            .max(max_diff(&vs.dot(&l).dot(&v), &adjoint(&k)));
    }
    report.push("unitarity j k u v", r_unitary, tol);
    report.push("powers jq kq", r_power, tol);
    report.push("fourier conjugation f2 f3", r_fourier, tol);
    report.push("v conjugation f4 f5 f6", r_v, tol);
    Ok(report)
}

/// Trace identity Tr(J^a K^b), exhaustive over 0 ≤ a, b < 3q for all
/// reduced fluxes with q ≤ qmax.
pub fn verify_traces(qmax: i64) -> Result<IdentityReport> {
    let mut report = IdentityReport::new(0);
    let mut worst = 0.0f64;
    for flux in coprime_fluxes(qmax) {
        let q = flux.q_usize();
        let j = lattice::clock_matrix(flux);
        let k = lattice::shift_matrix(q);
        let mut ja = CMatrix::eye(q);
        for a in 0..(3 * q as u32) {
            let mut m = ja.clone();
            for b in 0..(3 * q as u32) {
                let tr: num_complex::Complex64 = (0..q).map(|i| m[[i, i]]).sum();
                worst = worst.max((tr - lattice::trace_word(flux, a, b)).norm());
                m = m.dot(&k);
            }
            ja = ja.dot(&j);
        }
    }
    report.push("trace identity", worst, EXACT_TOL);
    Ok(report)
}

/// Hermiticity of every model matrix and eigenvalue invariance under
/// θ → θ + (2π/q)(m,n), at pseudo-random samples.
pub fn verify_model_invariants(seed: u64, samples: usize) -> Result<IdentityReport> {
    let mut report = IdentityReport::new(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let models = [
        ModelSpec::square(),
        ModelSpec::triangular(),
        ModelSpec::hexagonal(),
        ModelSpec::kagome(0.3),
    ];
    let mut r_herm = 0.0f64;
    let mut r_period = 0.0f64;
    for _ in 0..samples.max(1) {
        let q = rng.gen_range(1..=8i64);
        let p = rng.gen_range(0..=q);
        let flux = FluxRational::new(p, q).unwrap();
        let theta = ThetaPoint::new(rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI));
        let model = models[rng.gen_range(0..models.len())];
        let m = lattice::model_matrix(&model, flux, theta);
        r_herm = r_herm.max(lattice::hermitian_defect(&m));

        let shift = 2.0 * PI / flux.q() as f64;
        let (mm, nn) = (rng.gen_range(-2..=2), rng.gen_range(-2..=2));
        let shifted = ThetaPoint::new(
            theta.theta1 + shift * mm as f64,
            theta.theta2 + shift * nn as f64,
        );
        let (e1, _) = m.eigh(UPLO::Lower)?;
        let (e2, _) = lattice::model_matrix(&model, flux, shifted)
            .eigh(UPLO::Lower)?;
        for (a, b) in e1.iter().zip(e2.iter()) {
            r_period = r_period.max((a - b).abs());
        }
    }
    report.push("model hermiticity", r_herm, 1e-12);
    report.push("theta periodicity", r_period, EXACT_TOL);
    Ok(report)
}

/// The full consolidated suite behind `verify`: §2 symmetries, §3 traces,
/// Theorem 1, Theorem 2, the §6 closed-form examples, and the §7
/// semiclassical checks.
pub fn verify_all(seed: u64) -> Result<IdentityReport> {
    let mut report = IdentityReport::new(seed);
    report.merge(verify_algebra(8)?);
    report.merge(verify_traces(8)?);
    report.merge(verify_model_invariants(seed, 100)?);

    for (p, q, omega) in [(0, 1, 0.0), (1, 3, 0.3), (3, 2, PI / 8.0), (2, 5, 0.7)] {
        let flux = FluxRational::new(p, q).unwrap();
        let sub = verify_symmetries(flux, omega, 8, seed)?;
        for c in sub.checks {
            report.bump(&c.name, c.residual, c.tolerance);
        }
    }

    // Theorem 1
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_t1 = 0.0f64;
    for (p, q) in [(0, 1), (1, 2), (1, 3), (2, 5)] {
        let flux = FluxRational::new(p, q).unwrap();
        worst_t1 = worst_t1.max(graphene_factorization_check(flux, 100, &mut rng)?);
    }
    report.push("theorem 1 factorization", worst_t1, EXACT_TOL);

    // Theorem 2 structure at random (p, q, ω) with q ≤ 8
    let mut worst_structure = 0.0f64;
    let mut worst_constant = 0.0f64;
    let mut worst_fit = 0.0f64;
    for _ in 0..10 {
        let q = rng.gen_range(1..=8i64);
        let mut p = rng.gen_range(0..=q);
        while num_gcd(p, q) != 1 && !(p == 0 && q == 1) {
            p = rng.gen_range(0..=q);
        }
        let flux = FluxRational::new(p, q).unwrap();
        let omega = rng.gen_range(0.0..2.0 * PI / 3.0);
        let rep = verify_kagome_theorem(flux, omega, &ChambersOptions::default())?;
        worst_structure = worst_structure.max(rep.structure_mismatch);
        worst_fit = worst_fit.max(rep.fit_residual);
        for c in rep.constants {
            worst_constant = worst_constant.max((c.abs() - 2.0).abs());
        }
        worst_constant = worst_constant
            .max((rep.constants[0] - rep.constants[1]).abs())
            .max((rep.constants[0] - rep.expected_sign * rep.constants[2]).abs());
    }
    report.push("theorem 2 coupling structure", worst_structure, 1e-8);
    report.push("theorem 2 constants", worst_constant, 1e-8);
    report.push("theorem 2 fit residual", worst_fit, 1e-8);

    // §6 closed-form examples
    report.merge(verify_section6_examples()?);

    // §7 semiclassical checks
    let sc = semiclassical::subprincipal_report(32)?;
    report.push("semiclassical dh-lambda", sc.max_dh_error, 1e-6);
    report.push("semiclassical correction", sc.max_correction_error, 1e-5);
    report.push("semiclassical sigma min", (sc.sigma_min + 0.75).abs(), 1e-6);
    report.push("semiclassical sigma max", sc.sigma_max.abs(), 1e-6);

    Ok(report)
}

/// The §6 examples with closed-form answers: graphene (1,2) bands and closed
/// gaps, triangular (1,6) gap closure, kagome (3,2) ω=π/8 band list.
pub fn verify_section6_examples() -> Result<IdentityReport> {
    let mut report = IdentityReport::new(0);
    let opts = ChambersOptions::default();

    // graphene (1,2): bands ±[√3,√6] and ±[0,√3], gaps closed at −√3, 0, √3
    let flux = FluxRational::new(1, 2).unwrap();
    let bs = bands::bands_from_chambers(&ModelSpec::hexagonal(), flux, &opts)?;
    let s3 = 3f64.sqrt();
    let s6 = 6f64.sqrt();
    let expect = [(-s6, -s3), (-s3, 0.0), (0.0, s3), (s3, s6)];
    let mut r = 0.0f64;
    if bs.bands.len() == expect.len() {
        for (b, (lo, hi)) in bs.bands.iter().zip(expect) {
            r = r.max((b.lo - lo).abs()).max((b.hi - hi).abs());
        }
    } else {
        r = f64::MAX;
    }
    report.push("graphene 1/2 bands", r, 1e-9);
    let gaps = bands::gap_report(&bs);
    let all_closed = gaps.iter().all(|g| g.closed) && gaps.len() == 3;
    report.push(
        "graphene 1/2 closed gaps",
        if all_closed { 0.0 } else { 1.0 },
        0.5,
    );

    // triangular (1,6), φ = −γ/2: the gap-closing edge polynomial Q_T has a
    // double root at −√3
    let flux = FluxRational::new(1, 6).unwrap();
    let form = charpoly::extract_chambers(&ModelSpec::triangular(), flux, &opts)?;
    let analysis = bands::coupling_analysis(&form)?;
    let e1 = analysis.edge_polynomial(&form, analysis.range.gmin);
    let e2 = analysis.edge_polynomial(&form, analysis.range.gmax);
    let qt = if e1.eval(-s3).abs() <= e2.eval(-s3).abs() {
        e1
    } else {
        e2
    };
    report.push("triangular 1/6 qt value", qt.eval(-s3).abs(), 1e-7);
    report.push(
        "triangular 1/6 qt derivative",
        qt.derivative().eval(-s3).abs(),
        1e-6,
    );
    let bs = bands::bands_from_chambers(&ModelSpec::triangular(), flux, &opts)?;
    let gaps = bands::gap_report(&bs);
    let second_closed = gaps.len() >= 2 && gaps[1].closed;
    report.push(
        "triangular 1/6 second gap closed",
        if second_closed { 0.0 } else { 1.0 },
        0.5,
    );

    // kagome (3,2), ω = π/8: flat {−2}×2 then four dispersive bands
    let flux = FluxRational::new(3, 2).unwrap();
    let bs = bands::bands_from_chambers(&ModelSpec::kagome(PI / 8.0), flux, &opts)?;
    let mut r = 0.0f64;
    if bs.bands.len() == 5 && bs.bands[0].flat && bs.bands[0].multiplicity == 2 {
        r = r.max((bs.bands[0].lo + 2.0).abs());
        let e = [
            (1.0 - s6, 1.0 - s3),
            (1.0 - s3, 1.0),
            (1.0, 1.0 + s3),
            (1.0 + s3, 1.0 + s6),
        ];
        for (b, (lo, hi)) in bs.bands[1..].iter().zip(e) {
            r = r.max((b.lo - lo).abs()).max((b.hi - hi).abs());
        }
    } else {
        r = f64::MAX;
    }
    report.push("kagome 3/2 bands", r, 1e-9);
    Ok(report)
}
