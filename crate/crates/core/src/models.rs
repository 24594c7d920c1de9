//! Hamiltonian builders: the Rabi model, its Jaynes-Cummings part and
//! counter-rotating remainder, the diagonal form of the Jaynes-Cummings
//! Hamiltonian at resonance, the explicit operator forms of the two solvable
//! approximating Hamiltonians H1 and H2, and the two parity unitaries whose
//! conjugation flips the sign of the coupling.
//!
//! The H1/H2 builders here are deliberately independent of the unitary
//! transform in [`crate::transform`]; their agreement with the conjugation
//! route is asserted by the verification suite, so the two code paths share
//! no sub-expressions.

use ndarray::prelude::*;
use num_complex::Complex64 as C64;
use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::fock::{
    boson_operators, identity, kron_embed, spin_operators, HamiltonianMatrix, OperatorMatrix,
};
use crate::transform::l_fn;

/// Physical parameters and truncation controls.
///
/// Units use hbar = 1; `omega` is the atomic frequency, `nu` the field
/// frequency and `g` the coupling constant, all in the same energy units.
/// `n_max` is the Fock cutoff and `guard` the interior margin on which
/// algebraic identities are asserted (H1 couples n to n + 3, and the
/// diagonalizing unitary shifts n by one more).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub omega: f64,
    pub nu: f64,
    pub g: f64,
    pub n_max: usize,
    pub guard: usize,
}

/// Default guard-band width.
pub const DEFAULT_GUARD: usize = 5;

impl ModelParams {
    pub fn new(omega: f64, nu: f64, g: f64, n_max: usize, guard: usize) -> Result<Self> {
        if !(omega > 0.0) {
            return Err(Error::InvalidParams { reason: format!("omega must be positive, got {omega}") });
        }
        if !nu.is_finite() || !g.is_finite() {
            return Err(Error::InvalidParams { reason: "nu and g must be finite".into() });
        }
        if n_max < guard + 4 {
            return Err(Error::InvalidParams {
                reason: format!("n_max = {n_max} too small: need n_max >= guard + 4 = {}", guard + 4),
            });
        }
        Ok(Self { omega, nu, g, n_max, guard })
    }

    /// Resonant parameters (`nu = omega`) with the default guard band.
    pub fn resonant(omega: f64, g: f64, n_max: usize) -> Result<Self> {
        Self::new(omega, omega, g, n_max, DEFAULT_GUARD)
    }

    pub fn is_resonant(&self) -> bool {
        self.nu == self.omega
    }

    pub fn require_resonant(&self) -> Result<()> {
        if self.is_resonant() {
            Ok(())
        } else {
            Err(Error::OffResonance { nu: self.nu, omega: self.omega })
        }
    }

    /// Same parameters with the coupling sign flipped.
    pub fn with_g(&self, g: f64) -> Self {
        Self { g, ..*self }
    }

    pub fn field_dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn dim(&self) -> usize {
        2 * (self.n_max + 1)
    }

    /// Largest photon index inside the guard band.
    pub fn interior_n(&self) -> usize {
        self.n_max - self.guard
    }

    /// Cutoff heuristic for a number initial state `|n0>`: keeps the
    /// truncation tail of the dynamics below 1e-12 at desk-scale couplings.
    pub fn n_max_for_number(n0: usize) -> usize {
        n0 + 40
    }

    /// Cutoff heuristic for a coherent initial state with amplitude `alpha`.
    pub fn n_max_for_coherent(alpha: C64) -> usize {
        let m = alpha.norm();
        (m * m + 10.0 * m + 20.0).ceil() as usize
    }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Diagonal field-space matrix with entries `f(n)`.
fn field_diag(n_max: usize, f: impl Fn(usize) -> f64) -> Array2<C64> {
    Array2::from_diag(&Array1::from_iter((0..=n_max).map(|n| real(f(n)))))
}

/// Rabi Hamiltonian:
/// `H = (omega/2) sigma_z + nu a^dag a + g (sigma_plus + sigma_minus)(a + a^dag)`.
pub fn build_rabi(p: &ModelParams) -> Result<HamiltonianMatrix> {
    let s = spin_operators();
    let b = boson_operators(p.n_max)?;
    let id_f = identity(p.field_dim());

    let sz = kron_embed(&s.sigma_z, &id_f)?;
    let n_joint = kron_embed(&identity(2), &b.n_hat)?;
    let sx = OperatorMatrix::new(s.sigma_plus.entries() + s.sigma_minus.entries());
    let x = OperatorMatrix::new(b.a.entries() + b.a_dag.entries());
    let coupling = kron_embed(&sx, &x)?;

    let h = sz.entries() * real(0.5 * p.omega)
        + n_joint.entries() * real(p.nu)
        + coupling.entries() * real(p.g);
    HamiltonianMatrix::hermitian_checked(h)
}

/// Jaynes-Cummings Hamiltonian:
/// `H_JC = (omega/2) sigma_z + nu a^dag a + g (sigma_plus a + sigma_minus a^dag)`.
pub fn build_jc(p: &ModelParams) -> Result<HamiltonianMatrix> {
    let s = spin_operators();
    let b = boson_operators(p.n_max)?;
    let id_f = identity(p.field_dim());

    let sz = kron_embed(&s.sigma_z, &id_f)?;
    let n_joint = kron_embed(&identity(2), &b.n_hat)?;
    let rotating = kron_embed(&s.sigma_plus, &b.a)?.entries()
        + kron_embed(&s.sigma_minus, &b.a_dag)?.entries();

    let h = sz.entries() * real(0.5 * p.omega)
        + n_joint.entries() * real(p.nu)
        + rotating * real(p.g);
    HamiltonianMatrix::hermitian_checked(h)
}

/// Counter-rotating term `V = g (sigma_plus a^dag + sigma_minus a)`.
pub fn build_v(p: &ModelParams) -> Result<HamiltonianMatrix> {
    let s = spin_operators();
    let b = boson_operators(p.n_max)?;
    let v = (kron_embed(&s.sigma_plus, &b.a_dag)?.entries()
        + kron_embed(&s.sigma_minus, &b.a)?.entries())
        * real(p.g);
    HamiltonianMatrix::hermitian_checked(v)
}

/// Diagonal form of the Jaynes-Cummings Hamiltonian at resonance: the entry at
/// `|s, n>` is `(omega/2) s + omega n + (g/2)((s+1) sqrt(n+1) + (s-1) sqrt(n))`
/// with `s = -1` for spin down and `s = +1` for spin up.
pub fn build_jc_diag(p: &ModelParams) -> Result<HamiltonianMatrix> {
    p.require_resonant()?;
    let fdim = p.field_dim();
    let mut h = Array2::<C64>::zeros((p.dim(), p.dim()));
    for (si, s) in [(0usize, -1.0f64), (1, 1.0)] {
        for n in 0..fdim {
            let nf = n as f64;
            let e = 0.5 * p.omega * s
                + p.omega * nf
                + 0.5 * p.g * ((s + 1.0) * (nf + 1.0).sqrt() + (s - 1.0) * nf.sqrt());
            h[[si * fdim + n, si * fdim + n]] = real(e);
        }
    }
    HamiltonianMatrix::hermitian_checked(h)
}

/// Correction bracket shared by the H1/H2 builders. `delta_sign` is the sign
/// in front of `delta(n_hat)` and `two_photon_sign` the sign of the
/// `(1 + sigma_z) L(n_hat) a^2` term; H1 uses (-, +), H2 uses (+, -).
fn approximant_bracket(p: &ModelParams, delta_sign: f64, two_photon_sign: f64) -> Result<Array2<C64>> {
    let s = spin_operators();
    let b = boson_operators(p.n_max)?;
    let n_max = p.n_max;
    let g = p.g;

    let a = b.a.entries();
    let a2 = a.dot(a);
    let a3 = a2.dot(a);

    // 1 -/+ delta(n_hat) as a field diagonal.
    let one_pm_delta = field_diag(n_max, |n| if n == 0 { 1.0 + delta_sign } else { 1.0 });
    let ll2 = field_diag(n_max, |n| l_fn(n) * l_fn(n + 2));
    let l0 = field_diag(n_max, l_fn);
    let l1 = field_diag(n_max, |n| l_fn(n + 1));

    // Spin projectors 1 + sigma_z = 2|up><up|, 1 - sigma_z = 2|down><down|.
    let one_plus_sz = OperatorMatrix::new(identity(2).entries() + s.sigma_z.entries());
    let one_minus_sz = OperatorMatrix::new(identity(2).entries() - s.sigma_z.entries());

    let t1 = kron_embed(&s.sigma_plus, &OperatorMatrix::new(ll2.dot(&a3)))?.entries()
        * real(-0.5 * g);
    let t2 = kron_embed(&s.sigma_minus, &OperatorMatrix::new(one_pm_delta.dot(a)))?.entries()
        * real(0.25 * g);
    let t3 = kron_embed(&one_plus_sz, &OperatorMatrix::new(l0.dot(&a2)))?.entries()
        * real(two_photon_sign * 0.25 * g / SQRT_2);
    let t4 = kron_embed(&one_minus_sz, &OperatorMatrix::new(one_pm_delta.dot(&l1).dot(&a2)))?
        .entries()
        * real(-two_photon_sign * 0.25 * g / SQRT_2);

    let half = t1 + t2 + t3 + t4;
    let adj = half.t().mapv(|z| z.conj());
    Ok(&half + &adj)
}

/// Explicit operator form of the first approximating Hamiltonian:
/// `H_JC` plus intensity-dependent multi-photon corrections
/// (three-photon `sigma_plus L(n) L(n+2) a^3`, one-photon
/// `sigma_minus (1 - delta(n)) a`, and spin-conditioned two-photon terms),
/// with Hermitian conjugates.
pub fn build_h1_explicit(p: &ModelParams) -> Result<HamiltonianMatrix> {
    p.require_resonant()?;
    let h = build_jc(p)?.into_entries() + approximant_bracket(p, -1.0, 1.0)?;
    HamiltonianMatrix::hermitian_checked(h)
}

/// Explicit operator form of the second approximating Hamiltonian; differs
/// from H1 by the signs of the `delta(n_hat)` and two-photon terms.
pub fn build_h2_explicit(p: &ModelParams) -> Result<HamiltonianMatrix> {
    p.require_resonant()?;
    let h = build_jc(p)?.into_entries() + approximant_bracket(p, 1.0, -1.0)?;
    HamiltonianMatrix::hermitian_checked(h)
}

/// The two unitaries whose conjugation maps `H(g)` to `H(-g)`.
///
/// `parity_field` is `exp(i pi a^dag a)` embedded in the joint basis: diagonal
/// `(-1)^n`, flipping the sign of `a` and `a^dag`. `parity_spin` realizes
/// `exp(i (pi/2)(sigma_z + 1))`, which evaluates to exactly +1 on spin down
/// and -1 on spin up (no residual global phase with this generator), flipping
/// the sign of `sigma_plus` and `sigma_minus`.
pub fn sign_flip_unitaries(p: &ModelParams) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let fdim = p.field_dim();
    let parity_field = kron_embed(
        &identity(2),
        &OperatorMatrix::new(field_diag(p.n_max, |n| if n % 2 == 0 { 1.0 } else { -1.0 })),
    )?;
    let mut spin = Array2::<C64>::zeros((2, 2));
    spin[[0, 0]] = real(1.0);
    spin[[1, 1]] = real(-1.0);
    let parity_spin = kron_embed(&OperatorMatrix::new(spin), &identity(fdim))?;
    Ok((parity_field, parity_spin))
}
