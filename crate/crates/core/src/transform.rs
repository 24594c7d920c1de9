//! The unitary transformation that diagonalizes the resonant Jaynes-Cummings
//! Hamiltonian, the four-term decomposition of the transformed
//! counter-rotating coupling, and the interaction-picture effective
//! frequencies that select which term each approximating model retains.

use ndarray::prelude::*;
use num_complex::Complex64 as C64;
use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::fock::{
    boson_operators, identity, kron_embed, spin_operators, OperatorMatrix, Spin,
};
use crate::models::ModelParams;

/// `K(n)`: the coefficient `(sqrt(2) - 1) / (2 sqrt(2))` on the field ground
/// state and zero elsewhere (projector semantics).
pub fn k_fn(n: usize) -> f64 {
    if n == 0 {
        (SQRT_2 - 1.0) / (2.0 * SQRT_2)
    } else {
        0.0
    }
}

/// `L(n) = 1 / sqrt(2n + 2)`.
pub fn l_fn(n: usize) -> f64 {
    1.0 / ((2 * n + 2) as f64).sqrt()
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn field_diag(n_max: usize, f: impl Fn(usize) -> f64) -> Array2<C64> {
    Array2::from_diag(&Array1::from_iter((0..=n_max).map(|n| real(f(n)))))
}

/// The diagonalizing unitary in closed form:
/// `U = 1/sqrt(2) + K(n)(1 - sigma_z) + sigma_plus L(n) a - sigma_minus a^dag L(n)`.
///
/// Exactly unitary on the untruncated space; on the truncated space the
/// defect of `U^dag U - 1` is confined to the cutoff boundary.
pub fn build_u(p: &ModelParams) -> Result<OperatorMatrix> {
    p.require_resonant()?;
    let s = spin_operators();
    let b = boson_operators(p.n_max)?;
    let n_max = p.n_max;

    let k_diag = OperatorMatrix::new(field_diag(n_max, k_fn));
    let l_diag = field_diag(n_max, l_fn);
    let la = OperatorMatrix::new(l_diag.dot(b.a.entries()));
    let adag_l = OperatorMatrix::new(b.a_dag.entries().dot(&l_diag));
    let one_minus_sz = OperatorMatrix::new(identity(2).entries() - s.sigma_z.entries());

    let u = identity(p.dim()).entries() * real(1.0 / SQRT_2)
        + kron_embed(&one_minus_sz, &k_diag)?.entries()
        + kron_embed(&s.sigma_plus, &la)?.entries()
        - kron_embed(&s.sigma_minus, &adag_l)?.entries();
    Ok(OperatorMatrix::new(u))
}

/// Conjugation `U H U^dag`. On the guarded interior `U^dag` coincides with
/// `U^{-1}`.
pub fn conjugate(u: &OperatorMatrix, h: &OperatorMatrix) -> Result<OperatorMatrix> {
    if u.dim() != h.dim() {
        return Err(Error::DimensionMismatch { left: u.dim(), right: h.dim() });
    }
    let uh = u.entries().dot(h.entries());
    let udag = u.entries().t().mapv(|z| z.conj());
    Ok(OperatorMatrix::new(uh.dot(&udag)))
}

/// The transformed counter-rotating term split into its four physical pieces:
/// three-photon atomic transitions (`v1`), simultaneous excitation of atom and
/// field (`v2`), and two-photon field processes with (`v3`) and without (`v4`)
/// a spin factor.
#[derive(Debug, Clone)]
pub struct VDecomposition {
    pub v1: OperatorMatrix,
    pub v2: OperatorMatrix,
    pub v3: OperatorMatrix,
    pub v4: OperatorMatrix,
}

impl VDecomposition {
    /// Entrywise sum `v1 + v2 + v3 + v4`.
    pub fn sum(&self) -> OperatorMatrix {
        OperatorMatrix::new(
            self.v1.entries() + self.v2.entries() + self.v3.entries() + self.v4.entries(),
        )
    }
}

/// `F_1 = -L(n) L(n+2)`.
pub fn f1_fn(n: usize) -> f64 {
    -l_fn(n) * l_fn(n + 2)
}

/// `F_2 = (1 + 2 sqrt(2) K(n)) / 2`; equals 1/2 for every `n >= 1`.
pub fn f2_fn(n: usize) -> f64 {
    0.5 * (1.0 + 2.0 * SQRT_2 * k_fn(n))
}

/// `F_3 = (L(n) + L(n+1)(1 + 2 sqrt(2) K(n))) / (2 sqrt(2))`.
pub fn f3_fn(n: usize) -> f64 {
    (l_fn(n) + l_fn(n + 1) * (1.0 + 2.0 * SQRT_2 * k_fn(n))) / (2.0 * SQRT_2)
}

/// `F_4 = (L(n) - L(n+1)(1 + 2 sqrt(2) K(n))) / (2 sqrt(2))`.
pub fn f4_fn(n: usize) -> f64 {
    (l_fn(n) - l_fn(n + 1) * (1.0 + 2.0 * SQRT_2 * k_fn(n))) / (2.0 * SQRT_2)
}

/// Build the four transformed counter-rotating pieces:
/// `V1 = g (sigma_plus F1(n) a^3 + h.c.)`,
/// `V2 = g (sigma_plus a^dag F2(n) + h.c.)`,
/// `V3 = g sigma_z (F3(n) a^2 + h.c.)`,
/// `V4 = g (F4(n) a^2 + h.c.)`.
///
/// Operator products are assembled exactly in the written order; no normal
/// ordering is applied.
pub fn decompose_v(p: &ModelParams) -> Result<VDecomposition> {
    p.require_resonant()?;
    let s = spin_operators();
    let b = boson_operators(p.n_max)?;
    let n_max = p.n_max;
    let g = real(p.g);

    let a = b.a.entries();
    let a_dag = b.a_dag.entries();
    let a2 = a.dot(a);
    let a_dag2 = a_dag.dot(a_dag);
    let a3 = a2.dot(a);
    let a_dag3 = a_dag2.dot(a_dag);

    let f1 = field_diag(n_max, f1_fn);
    let f2 = field_diag(n_max, f2_fn);
    let f3 = field_diag(n_max, f3_fn);
    let f4 = field_diag(n_max, f4_fn);

    let v1 = (kron_embed(&s.sigma_plus, &OperatorMatrix::new(f1.dot(&a3)))?.entries()
        + kron_embed(&s.sigma_minus, &OperatorMatrix::new(a_dag3.dot(&f1)))?.entries())
        * g;
    let v2 = (kron_embed(&s.sigma_plus, &OperatorMatrix::new(a_dag.dot(&f2)))?.entries()
        + kron_embed(&s.sigma_minus, &OperatorMatrix::new(f2.dot(a)))?.entries())
        * g;
    let two_photon_3 = OperatorMatrix::new(f3.dot(&a2) + a_dag2.dot(&f3));
    let v3 = kron_embed(&s.sigma_z, &two_photon_3)?.entries() * g;
    let two_photon_4 = OperatorMatrix::new(f4.dot(&a2) + a_dag2.dot(&f4));
    let v4 = kron_embed(&identity(2), &two_photon_4)?.entries() * g;

    Ok(VDecomposition {
        v1: OperatorMatrix::hermitian_checked(v1)?,
        v2: OperatorMatrix::hermitian_checked(v2)?,
        v3: OperatorMatrix::hermitian_checked(v3)?,
        v4: OperatorMatrix::hermitian_checked(v4)?,
    })
}

/// Exact interaction-picture oscillation frequencies of the three transformed
/// coupling families, evaluated at photon number `n` and spin `s`:
///
/// * `w1 = 2 omega - g (sqrt(n+3) + sqrt(n+1))` (three-photon terms),
/// * `w2 = 2 omega + g (sqrt(n+2) + sqrt(n))` (joint excitation terms),
/// * `w3 = 2 omega + g (sqrt(n) - sqrt(n+2))`
///   `+ (g/2)(s+1)(sqrt(n+3) + sqrt(n+2) - sqrt(n+1) - sqrt(n))` (two-photon
///   terms; the second line vanishes for spin down).
pub fn effective_frequencies(n: usize, spin: Spin, p: &ModelParams) -> (f64, f64, f64) {
    let nf = n as f64;
    let omega = p.omega;
    let g = p.g;
    let s = spin.sign();
    let w1 = 2.0 * omega - g * ((nf + 3.0).sqrt() + (nf + 1.0).sqrt());
    let w2 = 2.0 * omega + g * ((nf + 2.0).sqrt() + nf.sqrt());
    let w3 = 2.0 * omega + g * (nf.sqrt() - (nf + 2.0).sqrt())
        + 0.5 * g * (s + 1.0)
            * ((nf + 3.0).sqrt() + (nf + 2.0).sqrt() - (nf + 1.0).sqrt() - nf.sqrt());
    (w1, w2, w3)
}

/// Large-n approximations of the effective frequencies:
/// `w1 ~ 2(omega - g sqrt(n+1))`, `w2 ~ 2(omega + g sqrt(n+1))`, `w3 ~ 2 omega`.
pub fn approx_frequencies(n: usize, p: &ModelParams) -> (f64, f64, f64) {
    let root = ((n + 1) as f64).sqrt();
    (
        2.0 * (p.omega - p.g * root),
        2.0 * (p.omega + p.g * root),
        2.0 * p.omega,
    )
}
