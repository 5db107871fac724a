//! Cross-module invariants and randomized property tests.

use proptest::prelude::*;
use std::f64::consts::PI;

use butterfly_lab::bands;
use butterfly_lab::butterfly;
use butterfly_lab::BandMethod;
use butterfly_lab::charpoly::{self, ChambersOptions};
use butterfly_lab::flux::{FluxRational, ThetaPoint};
use butterfly_lab::lattice::{self, hermitian_defect, ModelSpec};
use butterfly_lab::poly::RealPolynomial;

fn models() -> [ModelSpec; 4] {
    [
        ModelSpec::square(),
        ModelSpec::triangular(),
        ModelSpec::hexagonal(),
        ModelSpec::kagome(0.3),
    ]
}

#[test]
fn square_butterfly_flux_reflection_symmetry() {
    // complex conjugation maps M_H(p/q) to M_H((q−p)/q): identical band multisets
    let ds = butterfly::generate_butterfly(&ModelSpec::square(), 8, BandMethod::Chambers);
    for q in 1..=8i64 {
        for p in 0..=q {
            let a: Vec<_> = ds
                .records
                .iter()
                .filter(|r| r.p == p && r.q == q)
                .collect();
            let b: Vec<_> = ds
                .records
                .iter()
                .filter(|r| r.p == q - p && r.q == q)
                .collect();
            if a.is_empty() {
                continue;
            }
            assert_eq!(a.len(), b.len(), "at {p}/{q}");
            for (ra, rb) in a.iter().zip(&b) {
                assert!(
                    (ra.lo - rb.lo).abs() < 1e-9 && (ra.hi - rb.hi).abs() < 1e-9,
                    "{p}/{q} band {} vs reflected",
                    ra.band_index
                );
            }
        }
    }
}

#[test]
fn record_count_equals_dimension_counting_multiplicity() {
    for model in models() {
        let ds = butterfly::generate_butterfly(&model, 6, BandMethod::Chambers);
        for flux in butterfly::enumerate_fluxes(6) {
            let total: usize = ds
                .records
                .iter()
                .filter(|r| r.p == flux.p() && r.q == flux.q())
                .map(|r| r.multiplicity)
                .sum();
            assert_eq!(total, model.dim(flux), "{} {:?}", model.kind, flux);
        }
    }
}

#[test]
fn enumerate_fluxes_reduced_and_sorted() {
    let fluxes = butterfly::enumerate_fluxes(30);
    for w in fluxes.windows(2) {
        assert!((w[0].q(), w[0].p()) < (w[1].q(), w[1].p()));
    }
    for f in &fluxes {
        assert!(f.fraction() >= 0.0 && f.fraction() <= 1.0);
        // constructor reduces; re-reducing must be the identity
        let again = FluxRational::new(f.p(), f.q()).unwrap();
        assert_eq!((again.p(), again.q()), (f.p(), f.q()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn model_matrices_hermitian_and_bounded(
        q in 1i64..=8,
        p in 0i64..=8,
        t1 in 0.0..(2.0 * PI),
        t2 in 0.0..(2.0 * PI),
        model_idx in 0usize..4,
    ) {
        let flux = FluxRational::new(p % (q + 1), q).unwrap();
        let model = models()[model_idx];
        let theta = ThetaPoint::new(t1, t2);
        let m = lattice::model_matrix(&model, flux, theta);
        prop_assert!(hermitian_defect(&m) < 1e-12);
        let eigs = charpoly::hermitian_eigenvalues(&m, 1e-10).unwrap();
        let bound = model.spectral_bound() + 1e-9;
        for e in eigs {
            prop_assert!(e.abs() <= bound, "|{e}| > {bound} for {}", model.kind);
        }
    }

    #[test]
    fn chambers_form_matches_determinant(
        q in 1i64..=5,
        p in 0i64..=5,
        t1 in 0.0..(2.0 * PI),
        t2 in 0.0..(2.0 * PI),
        lambda in -5.0..5.0f64,
        model_idx in 0usize..4,
    ) {
        let flux = FluxRational::new(p % (q + 1), q).unwrap();
        let model = models()[model_idx];
        let form = charpoly::extract_chambers(&model, flux, &ChambersOptions::default()).unwrap();
        let theta = ThetaPoint::new(t1, t2);
        let m = lattice::model_matrix(&model, flux, theta);
        let exact = charpoly::char_value(&m, num_complex::Complex64::new(lambda, 0.0)).unwrap();
        let fitted = form.eval(theta, lambda);
        let denom = 1.0 + exact.norm() + fitted.abs();
        prop_assert!((exact.re - fitted).abs() / denom < 1e-9);
        prop_assert!(exact.im.abs() / denom < 1e-9);
    }

    #[test]
    fn polynomial_roots_round_trip(
        mut roots in proptest::collection::vec(-5.0..5.0f64, 1..7),
    ) {
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // keep roots separated so the expected count is unambiguous
        prop_assume!(roots.windows(2).all(|w| w[1] - w[0] > 1e-3));
        let p = RealPolynomial::from_roots(&roots);
        let found = p.real_roots().unwrap();
        prop_assert_eq!(found.len(), roots.len());
        for (a, b) in found.iter().zip(&roots) {
            prop_assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn grid_and_direct_bands_agree(
        q in 1i64..=6,
        p in 0i64..=6,
        model_idx in 0usize..4,
    ) {
        let flux = FluxRational::new(p % (q + 1), q).unwrap();
        let model = models()[model_idx];
        let direct = bands::bands_direct(&model, flux).unwrap();
        let (grid, jumps) = bands::bands_from_grid_detailed(&model, flux, 60).unwrap();
        let res = jumps.iter().fold(1e-9f64, |m, j| m.max(*j));
        prop_assert_eq!(direct.total_multiplicity(), grid.total_multiplicity());
        let expand = |bs: &bands::BandStructure| {
            let mut v = Vec::new();
            for b in &bs.bands {
                for _ in 0..b.multiplicity {
                    v.push((b.lo, b.hi));
                }
            }
            v
        };
        for ((alo, ahi), (glo, ghi)) in expand(&direct).iter().zip(expand(&grid)) {
            prop_assert!((alo - glo).abs() <= 3.0 * res);
            prop_assert!((ahi - ghi).abs() <= 3.0 * res);
        }
    }

    #[test]
    fn trace_word_matches_direct_product(
        q in 1i64..=6,
        p in 0i64..=6,
        a in 0u32..12,
        b in 0u32..12,
    ) {
        let flux = FluxRational::new(p % (q + 1), q).unwrap();
        let qd = flux.q_usize();
        let j = lattice::clock_matrix(flux);
        let k = lattice::shift_matrix(qd);
        let mut m = ndarray::Array2::eye(qd).mapv(|v: f64| num_complex::Complex64::new(v, 0.0));
        for _ in 0..a {
            m = m.dot(&j);
        }
        for _ in 0..b {
            m = m.dot(&k);
        }
        let tr: num_complex::Complex64 = (0..qd).map(|i| m[[i, i]]).sum();
        prop_assert!((tr - lattice::trace_word(flux, a, b)).norm() < 1e-10);
    }
}

#[test]
fn butterfly_json_round_trips() {
    let ds = butterfly::generate_butterfly(&ModelSpec::kagome(0.0), 3, BandMethod::Chambers);
    let json = butterfly::json_string(&ds);
    let back: butterfly_lab::ButterflyDataset = serde_json::from_str(&json).unwrap();
    assert_eq!(back.records.len(), ds.records.len());
    assert_eq!(butterfly::json_string(&back), json);
}

#[test]
fn band_structure_json_round_trips() {
    let bs = bands::bands_from_chambers(
        &ModelSpec::kagome(PI / 8.0),
        FluxRational::new(3, 2).unwrap(),
        &ChambersOptions::default(),
    )
    .unwrap();
    let json = serde_json::to_string_pretty(&bs).unwrap();
    let back: bands::BandStructure = serde_json::from_str(&json).unwrap();
    assert_eq!(back.bands.len(), bs.bands.len());
    assert_eq!(back.total_multiplicity(), bs.total_multiplicity());
}
