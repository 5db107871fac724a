//! Floquet matrices of the four magnetic lattice models and their
//! symmetry unitaries.
//!
//! At rational flux γ = 2πp/q the models reduce to finite Hermitian matrix
//! families over the Bloch torus, built from the clock matrix
//! J = diag(e^{i(j−1)γ}) and the cyclic shift K, which satisfy
//! JK = e^{−iγ}KJ.

use ndarray::prelude::*;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::flux::{FluxRational, ThetaPoint};

/// Dense complex matrix; all model matrices are small (dimension ≤ 3q).
pub type CMatrix = Array2<Complex64>;

pub fn phase(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, x)
}

/// Max entrywise deviation from self-adjointness, |M − M*|.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let d = (m[[i, j]] - m[[j, i]].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

/// Max entrywise deviation from unitarity, |M*M − I|.
pub fn unitary_defect(m: &CMatrix) -> f64 {
    let prod = m.t().mapv(|z| z.conj()).dot(m);
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let expect = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            worst = worst.max((prod[[i, j]] - expect).norm());
        }
    }
    worst
}

/// Max entrywise difference between two matrices.
pub fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for (x, y) in a.iter().zip(b.iter()) {
        worst = worst.max((x - y).norm());
    }
    worst
}

pub fn adjoint(m: &CMatrix) -> CMatrix {
    m.t().mapv(|z| z.conj())
}

/// Clock matrix J_{p,q} = diag(e^{i(j−1)γ}), j = 1..q.
pub fn clock_matrix(flux: FluxRational) -> CMatrix {
    let q = flux.q_usize();
    let gamma = flux.gamma();
    Array2::from_shape_fn((q, q), |(j, k)| {
        if j == k {
            phase(j as f64 * gamma)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Cyclic shift K_q: entry (j,k) = 1 iff k ≡ j+1 mod q.
pub fn shift_matrix(q: usize) -> CMatrix {
    assert!(q >= 1);
    Array2::from_shape_fn((q, q), |(j, k)| {
        if k == (j + 1) % q {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Discrete Fourier unitary U_{j,k} = q^{−1/2} e^{−iγ(j−1)(k−1)};
/// conjugates K* into J and J into K.
pub fn fourier_unitary(flux: FluxRational) -> CMatrix {
    let q = flux.q_usize();
    let gamma = flux.gamma();
    let scale = 1.0 / (q as f64).sqrt();
    Array2::from_shape_fn((q, q), |(j, k)| {
        phase(-gamma * j as f64 * k as f64) * scale
    })
}

/// L_{p,q} = (−1)^p e^{−iγ/2} J* K, the third member of the triple that
/// V cycles through: V*K*V = J, V*JV = L, V*LV = K*.
pub fn l_matrix(flux: FluxRational) -> CMatrix {
    let c = minus_one_pow(flux.p()) * phase(-flux.gamma() / 2.0);
    adjoint(&clock_matrix(flux)).dot(&shift_matrix(flux.q_usize())).mapv(|z| z * c)
}

/// V = UD with d₁ = 1, d_{j+1} = d_j · c · e^{−i(j−1)γ} and
/// c = (−1)^p e^{−iγ/2}.
pub fn v_unitary(flux: FluxRational) -> CMatrix {
    let q = flux.q_usize();
    let gamma = flux.gamma();
    let c = minus_one_pow(flux.p()) * phase(-gamma / 2.0);
    let mut d = vec![Complex64::new(1.0, 0.0); q];
    for j in 1..q {
        d[j] = d[j - 1] * c * phase(-((j - 1) as f64) * gamma);
    }
    let u = fourier_unitary(flux);
    let mut v = u;
    for (k, col) in v.columns_mut().into_iter().enumerate() {
        let dk = d[k];
        let mut col = col;
        col.mapv_inplace(|z| z * dk);
    }
    v
}

fn minus_one_pow(p: i64) -> Complex64 {
    if p.rem_euclid(2) == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(-1.0, 0.0)
    }
}

/// Tr(J^a K^b); vanishes unless a ≡ 0 and b ≡ 0 mod q.
pub fn trace_word(flux: FluxRational, a: u32, b: u32) -> Complex64 {
    let q = flux.q();
    if (b as i64).rem_euclid(q) != 0 {
        return Complex64::new(0.0, 0.0);
    }
    let gamma = flux.gamma();
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..q {
        sum += phase(a as f64 * j as f64 * gamma);
    }
    sum
}

/// Which lattice a Floquet matrix describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeKind {
    Square,
    Triangular,
    Hexagonal,
    Kagome,
}

impl LatticeKind {
    /// Floquet matrix dimension at flux p/q.
    pub fn dim(&self, flux: FluxRational) -> usize {
        let q = flux.q_usize();
        match self {
            LatticeKind::Square | LatticeKind::Triangular => q,
            LatticeKind::Hexagonal => 2 * q,
            LatticeKind::Kagome => 3 * q,
        }
    }

    /// Upper bound on |eigenvalue| from the max absolute row sum.
    pub fn spectral_bound(&self, half_normalized: bool) -> f64 {
        match self {
            LatticeKind::Square => {
                if half_normalized {
                    2.0
                } else {
                    4.0
                }
            }
            LatticeKind::Triangular => 6.0,
            LatticeKind::Hexagonal => 3.0,
            LatticeKind::Kagome => 4.0,
        }
    }
}

impl std::fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            LatticeKind::Square => "square",
            LatticeKind::Triangular => "triangular",
            LatticeKind::Hexagonal => "hexagonal",
            LatticeKind::Kagome => "kagome",
        };
        f.write_str(s)
    }
}

/// A lattice model together with its free parameters.
///
/// `phi` applies to the triangular model only (`None` means the canonical
/// φ = −γ/2); `omega` applies to the kagome model only. The square model
/// carries a 1/2 prefactor when `harper_half_normalization` is set, matching
/// the usual convention that puts its spectrum in [−2, 2].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: LatticeKind,
    pub phi: Option<f64>,
    pub omega: f64,
    pub harper_half_normalization: bool,
}

impl ModelSpec {
    pub fn square() -> ModelSpec {
        ModelSpec {
            kind: LatticeKind::Square,
            phi: None,
            omega: 0.0,
            harper_half_normalization: true,
        }
    }

    pub fn triangular() -> ModelSpec {
        ModelSpec {
            kind: LatticeKind::Triangular,
            phi: None,
            omega: 0.0,
            harper_half_normalization: true,
        }
    }

    pub fn triangular_with_phi(phi: f64) -> ModelSpec {
        ModelSpec {
            phi: Some(phi),
            ..ModelSpec::triangular()
        }
    }

    pub fn hexagonal() -> ModelSpec {
        ModelSpec {
            kind: LatticeKind::Hexagonal,
            phi: None,
            omega: 0.0,
            harper_half_normalization: true,
        }
    }

    pub fn kagome(omega: f64) -> ModelSpec {
        ModelSpec {
            kind: LatticeKind::Kagome,
            phi: None,
            omega,
            harper_half_normalization: true,
        }
    }

    /// Effective triangular phase; defaults to −γ/2.
    pub fn phi_for(&self, flux: FluxRational) -> f64 {
        self.phi.unwrap_or(-flux.gamma() / 2.0)
    }

    pub fn dim(&self, flux: FluxRational) -> usize {
        self.kind.dim(flux)
    }

    pub fn spectral_bound(&self) -> f64 {
        self.kind.spectral_bound(self.harper_half_normalization)
    }
}

/// The Floquet matrix M(θ) of the given model at flux p/q.
pub fn model_matrix(model: &ModelSpec, flux: FluxRational, theta: ThetaPoint) -> CMatrix {
    let m = match model.kind {
        LatticeKind::Square => square_matrix(flux, theta, model.harper_half_normalization),
        LatticeKind::Triangular => triangular_matrix(flux, theta, model.phi_for(flux)),
        LatticeKind::Hexagonal => hexagonal_matrix(flux, theta),
        LatticeKind::Kagome => kagome_matrix(flux, theta, model.omega),
    };
    debug_assert!(hermitian_defect(&m) <= 1e-12 * max_abs(&m).max(1.0));
    m
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn square_matrix(flux: FluxRational, theta: ThetaPoint, half: bool) -> CMatrix {
    let j = clock_matrix(flux);
    let k = shift_matrix(flux.q_usize());
    let mut m = scaled(&j, phase(theta.theta1));
    m += &scaled(&adjoint(&j), phase(-theta.theta1));
    m += &scaled(&k, phase(theta.theta2));
    m += &scaled(&adjoint(&k), phase(-theta.theta2));
    if half {
        m.mapv_inplace(|z| z * 0.5);
    }
    m
}

fn triangular_matrix(flux: FluxRational, theta: ThetaPoint, phi: f64) -> CMatrix {
    let j = clock_matrix(flux);
    let k = shift_matrix(flux.q_usize());
    let jks = j.dot(&adjoint(&k));
    let mut m = scaled(&j, phase(theta.theta1));
    m += &scaled(&adjoint(&j), phase(-theta.theta1));
    m += &scaled(&k, phase(theta.theta2));
    m += &scaled(&adjoint(&k), phase(-theta.theta2));
    m += &scaled(&jks, phase(phi + theta.theta1 - theta.theta2));
    m += &scaled(&adjoint(&jks), phase(-phi + theta.theta2 - theta.theta1));
    m
}

/// The off-diagonal block of the graphene matrix,
/// 𝒜 = I + e^{iθ₁}J + e^{iθ₂}K.
pub fn graphene_block(flux: FluxRational, theta: ThetaPoint) -> CMatrix {
    let q = flux.q_usize();
    let mut a = CMatrix::eye(q);
    a += &scaled(&clock_matrix(flux), phase(theta.theta1));
    a += &scaled(&shift_matrix(q), phase(theta.theta2));
    a
}

fn hexagonal_matrix(flux: FluxRational, theta: ThetaPoint) -> CMatrix {
    let q = flux.q_usize();
    let a = graphene_block(flux, theta);
    let mut m = CMatrix::zeros((2 * q, 2 * q));
    set_block(&mut m, 0, q, &a);
    set_block(&mut m, q, 0, &adjoint(&a));
    m
}

/// The three q×q blocks of the kagome matrix.
pub fn kagome_blocks(flux: FluxRational, theta: ThetaPoint, omega: f64) -> (CMatrix, CMatrix, CMatrix) {
    let gamma = flux.gamma();
    let q = flux.q_usize();
    let j = clock_matrix(flux);
    let js = adjoint(&j);
    let k = shift_matrix(q);
    let ks = adjoint(&k);
    let w = phase(omega + gamma / 8.0);
    let (t1, t2) = (theta.theta1, theta.theta2);

    // A = e^{i(ω+γ/8)} (e^{−iθ₁}J* + e^{−iγ/2} e^{−i(θ₁−θ₂)} J*K)
    let mut a = scaled(&js, phase(-t1));
    a += &scaled(&js.dot(&k), phase(-gamma / 2.0 - (t1 - t2)));
    a.mapv_inplace(|z| z * w);

    // B = e^{−i(ω+γ/8)} (e^{−iθ₁}J* + e^{−iθ₂}K*)
    let mut b = scaled(&js, phase(-t1));
    b += &scaled(&ks, phase(-t2));
    b.mapv_inplace(|z| z * w.conj());

    // C = e^{i(ω+γ/8)} (e^{−iγ/2} e^{i(θ₁−θ₂)} JK* + e^{−iθ₂}K*)
    let mut c = scaled(&j.dot(&ks), phase(-gamma / 2.0 + (t1 - t2)));
    c += &scaled(&ks, phase(-t2));
    c.mapv_inplace(|z| z * w);

    (a, b, c)
}

fn kagome_matrix(flux: FluxRational, theta: ThetaPoint, omega: f64) -> CMatrix {
    let q = flux.q_usize();
    let (a, b, c) = kagome_blocks(flux, theta, omega);
    let mut m = CMatrix::zeros((3 * q, 3 * q));
    set_block(&mut m, 0, q, &a);
    set_block(&mut m, 0, 2 * q, &b);
    set_block(&mut m, q, 2 * q, &c);
    set_block(&mut m, q, 0, &adjoint(&a));
    set_block(&mut m, 2 * q, 0, &adjoint(&b));
    set_block(&mut m, 2 * q, q, &adjoint(&c));
    m
}

fn scaled(m: &CMatrix, c: Complex64) -> CMatrix {
    m.mapv(|z| z * c)
}

fn set_block(m: &mut CMatrix, row: usize, col: usize, b: &CMatrix) {
    let (r, c) = b.dim();
    m.slice_mut(s![row..row + r, col..col + c]).assign(b);
}

/// Block-diagonal conjugator diag(e^{−iθ₁}J*, I, e^{iθ₂}K) that carries
/// the kagome matrix onto its reduced similar form.
pub fn s_conjugator(flux: FluxRational, theta: ThetaPoint) -> CMatrix {
    let q = flux.q_usize();
    let mut w = CMatrix::zeros((3 * q, 3 * q));
    set_block(&mut w, 0, 0, &scaled(&adjoint(&clock_matrix(flux)), phase(-theta.theta1)));
    set_block(&mut w, q, q, &CMatrix::eye(q));
    set_block(&mut w, 2 * q, 2 * q, &scaled(&shift_matrix(q), phase(theta.theta2)));
    w
}

/// The reduced similar form S(θ) of the kagome matrix, written out
/// explicitly; equals W* M_K W with W = `s_conjugator`.
pub fn s_matrix_explicit(flux: FluxRational, theta: ThetaPoint, omega: f64) -> CMatrix {
    let gamma = flux.gamma();
    let q = flux.q_usize();
    let j = clock_matrix(flux);
    let k = shift_matrix(q);
    let ks = adjoint(&k);
    let w = phase(omega + gamma / 8.0);
    let (t1, t2) = (theta.theta1, theta.theta2);
    let eye = CMatrix::eye(q);

    // S₁₂ = e^{iω'}(I + e^{−iγ/2} e^{iθ₂} K)
    let mut s12 = eye.clone();
    s12 += &scaled(&k, phase(-gamma / 2.0 + t2));
    s12.mapv_inplace(|z| z * w);
    // S₁₃ = e^{−iω'}(e^{iθ₂}K + e^{iθ₁}J)
    let mut s13 = scaled(&k, phase(t2));
    s13 += &scaled(&j, phase(t1));
    s13.mapv_inplace(|z| z * w.conj());
    // S₂₃ = e^{iω'}(e^{−iγ/2} e^{iθ₁} J + I)
    let mut s23 = scaled(&j, phase(-gamma / 2.0 + t1));
    s23 += &eye;
    s23.mapv_inplace(|z| z * w);

    let s21 = adjoint(&s12);
    // equivalently e^{−iω'}(I + e^{iγ/2} e^{−iθ₂} K*)
    debug_assert!({
        let mut alt = eye.clone();
        alt += &scaled(&ks, phase(gamma / 2.0 - t2));
        alt.mapv_inplace(|z| z * w.conj());
        max_diff(&s21, &alt) < 1e-14
    });
    let s31 = adjoint(&s13);
    let s32 = adjoint(&s23);

    let mut s = CMatrix::zeros((3 * q, 3 * q));
    set_block(&mut s, 0, q, &s12);
    set_block(&mut s, 0, 2 * q, &s13);
    set_block(&mut s, q, 0, &s21);
    set_block(&mut s, q, 2 * q, &s23);
    set_block(&mut s, 2 * q, 0, &s31);
    set_block(&mut s, 2 * q, q, &s32);
    s
}

/// N(θ) = (−1)^p M_K(θ₁+pπ, θ₂+pπ, ω); its characteristic polynomial is
/// invariant under the rotation r and the swap s of the torus.
pub fn n_matrix(flux: FluxRational, theta: ThetaPoint, omega: f64) -> CMatrix {
    use std::f64::consts::PI;
    let shift = flux.p() as f64 * PI;
    let shifted = ThetaPoint::new(theta.theta1 + shift, theta.theta2 + shift);
    let mut m = kagome_matrix(flux, shifted, omega);
    if flux.p().rem_euclid(2) == 1 {
        m.mapv_inplace(|z| -z);
    }
    m
}

/// r(θ₁,θ₂) = (−θ₁+θ₂, −θ₁), the order-3 rotation leaving p^△ invariant.
pub fn rotate_theta(theta: ThetaPoint) -> ThetaPoint {
    ThetaPoint::new(-theta.theta1 + theta.theta2, -theta.theta1)
}

/// s(θ₁,θ₂) = (θ₂,θ₁).
pub fn swap_theta(theta: ThetaPoint) -> ThetaPoint {
    ThetaPoint::new(theta.theta2, theta.theta1)
}
