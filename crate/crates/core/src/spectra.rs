//! Closed-form eigensystems of the two approximating Hamiltonians: the
//! two-state pair families, the three special eigenstates of each model, and
//! the corresponding eigenvectors in the original (untransformed) picture.

use num_complex::Complex64 as C64;
use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::fock::{joint_index, HamiltonianMatrix, JointState, Spin};
use crate::models::ModelParams;

/// Which approximating Hamiltonian a spectral quantity belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AhmModel {
    H1,
    H2,
}

/// Branch of a two-state pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    Minus,
    Plus,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Branch::Minus => write!(f, "-"),
            Branch::Plus => write!(f, "+"),
        }
    }
}

/// Label of a closed-form eigenstate: a pair member or one of the three
/// special states (indexed 0..3 in order of their transformed-basis photon
/// index).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EigenLabel {
    Pair { n: usize, branch: Branch },
    Special(usize),
}

impl std::fmt::Display for EigenLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EigenLabel::Pair { n, branch } => write!(f, "pair({n},{branch})"),
            EigenLabel::Special(i) => write!(f, "special({i})"),
        }
    }
}

/// One closed-form eigenpair: its label, energy, sparse components in the
/// transformed basis, and the untransformed eigenvector.
#[derive(Debug, Clone)]
pub struct EigenRecord {
    pub label: EigenLabel,
    pub value: f64,
    /// Sparse `(joint basis index, amplitude)` list in the transformed picture.
    pub transformed: Vec<(usize, C64)>,
    /// Unit-norm eigenvector of the untransformed explicit Hamiltonian.
    pub vector: JointState,
}

/// Pair coefficients of the two-state families.
///
/// For H1, `a` and `b` are the mixing amplitudes `A_n`, `B_n` of the pair
/// spanned by `|up,n>` and `|down,n+3>`; `mu`, `eta` and `delta` are the
/// off-diagonal element, level splitting and gap of the underlying 2x2 block.
/// The H2 coefficients `C_n`, `D_n` are the same functions at `-g`.
#[derive(Debug, Clone, Copy)]
pub struct AhmCoefficients {
    pub n: usize,
    pub alpha: f64,
    pub mu: f64,
    pub eta: f64,
    pub delta: f64,
    pub a: f64,
    pub b: f64,
}

/// Pair coefficients for H1:
/// `mu = g sqrt(n+2)`, `eta = 2 omega - g (sqrt(n+1) + sqrt(n+3))`,
/// `delta = sqrt(mu^2 + eta^2)`, `alpha = mu / (delta + eta)`,
/// `A = 1/sqrt(1+alpha^2)`, `B = alpha/sqrt(1+alpha^2)`.
///
/// When `eta < 0` the quotient `mu / (delta + eta)` cancels catastrophically,
/// so the algebraically equal form `(delta - eta) / mu` is used instead; the
/// branch is genuinely degenerate only when `mu = 0` with `eta <= 0`.
pub fn ahm1_coefficients(n: usize, p: &ModelParams) -> Result<AhmCoefficients> {
    p.require_resonant()?;
    let nf = n as f64;
    let mu = p.g * (nf + 2.0).sqrt();
    let eta = 2.0 * p.omega - p.g * ((nf + 1.0).sqrt() + (nf + 3.0).sqrt());
    let delta = mu.hypot(eta);
    let alpha = if eta >= 0.0 {
        if delta + eta == 0.0 {
            // mu = 0 and eta = 0.
            return Err(Error::DegenerateBranch { n });
        }
        mu / (delta + eta)
    } else {
        if mu == 0.0 {
            return Err(Error::DegenerateBranch { n });
        }
        (delta - eta) / mu
    };
    let norm = (1.0 + alpha * alpha).sqrt();
    Ok(AhmCoefficients { n, alpha, mu, eta, delta, a: 1.0 / norm, b: alpha / norm })
}

/// Pair eigenvalues of H1:
/// `kappa_pm = ((2n+3) omega + g (sqrt(n+1) - sqrt(n+3)) pm delta_n) / 2`.
pub fn ahm1_eigenvalues(n: usize, p: &ModelParams) -> Result<(f64, f64)> {
    p.require_resonant()?;
    let nf = n as f64;
    let c = ahm1_coefficients(n, p)?;
    let center = 0.5 * ((2.0 * nf + 3.0) * p.omega + p.g * ((nf + 1.0).sqrt() - (nf + 3.0).sqrt()));
    Ok((center - 0.5 * c.delta, center + 0.5 * c.delta))
}

/// Pair coefficients of H2, obtained from the H1 functions at `-g`:
/// `C_n(g) = A_n(-g)`, `D_n(g) = B_n(-g)`.
pub fn ahm2_coefficients(n: usize, p: &ModelParams) -> Result<AhmCoefficients> {
    ahm1_coefficients(n, &p.with_g(-p.g))
}

/// Pair eigenvalues of H2: `lambda_pm(g) = kappa_pm(-g)`.
pub fn ahm2_eigenvalues(n: usize, p: &ModelParams) -> Result<(f64, f64)> {
    ahm1_eigenvalues(n, &p.with_g(-p.g))
}

/// Coefficients of the two H2 special states that mix `|down,0>` and `|up,1>`.
#[derive(Debug, Clone, Copy)]
pub struct H2SpecialCoefficients {
    pub gamma: f64,
    pub epsilon: f64,
    pub c: f64,
    pub d: f64,
}

/// `epsilon = sqrt(g^2 + sqrt(2) g omega + omega^2)`,
/// `gamma = -g / (g + sqrt(2)(omega + epsilon))`,
/// `c = 1/sqrt(1+gamma^2)`, `d = gamma/sqrt(1+gamma^2)`.
pub fn h2_special_coefficients(p: &ModelParams) -> Result<H2SpecialCoefficients> {
    p.require_resonant()?;
    let g = p.g;
    let omega = p.omega;
    let epsilon = (g * g + SQRT_2 * g * omega + omega * omega).sqrt();
    let gamma = -g / (g + SQRT_2 * (omega + epsilon));
    let norm = (1.0 + gamma * gamma).sqrt();
    Ok(H2SpecialCoefficients { gamma, epsilon, c: 1.0 / norm, d: gamma / norm })
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// The three special eigenstates of H1. In the transformed picture they are
/// `|down,0>`, `|down,1>`, `|down,2>` with eigenvalues `-omega/2`,
/// `omega/2 - g`, `3 omega/2 - sqrt(2) g`; the untransformed vectors are
/// `|down,0>`, `(|down,1> - |up,0>)/sqrt(2)`, `(|down,2> - |up,1>)/sqrt(2)`.
pub fn ahm1_specials(p: &ModelParams) -> Result<[EigenRecord; 3]> {
    p.require_resonant()?;
    let n_max = p.n_max;
    let isq2 = 1.0 / SQRT_2;
    let values = [
        -0.5 * p.omega,
        0.5 * p.omega - p.g,
        1.5 * p.omega - SQRT_2 * p.g,
    ];
    let chi0 = JointState::from_components(&[(Spin::Down, 0, real(1.0))], n_max)?;
    let chi1 = JointState::from_components(
        &[(Spin::Down, 1, real(isq2)), (Spin::Up, 0, real(-isq2))],
        n_max,
    )?;
    let chi2 = JointState::from_components(
        &[(Spin::Down, 2, real(isq2)), (Spin::Up, 1, real(-isq2))],
        n_max,
    )?;
    let records = [chi0, chi1, chi2];
    let mut out = Vec::with_capacity(3);
    for (i, vector) in records.into_iter().enumerate() {
        out.push(EigenRecord {
            label: EigenLabel::Special(i),
            value: values[i],
            transformed: vec![(joint_index(Spin::Down, i, n_max), real(1.0))],
            vector,
        });
    }
    Ok(out.try_into().expect("three specials"))
}

/// The three special eigenstates of H2: the pair-like combinations of
/// `|down,0>` and `|up,1>` with eigenvalues `(omega + sqrt(2) g pm 2 epsilon)/2`
/// and the state `|up,0>` (transformed picture) with eigenvalue `omega/2 + g`.
pub fn ahm2_specials(p: &ModelParams) -> Result<[EigenRecord; 3]> {
    let sc = h2_special_coefficients(p)?;
    let n_max = p.n_max;
    let isq2 = 1.0 / SQRT_2;
    let l_minus = 0.5 * (p.omega + SQRT_2 * p.g - 2.0 * sc.epsilon);
    let l_plus = 0.5 * (p.omega + SQRT_2 * p.g + 2.0 * sc.epsilon);
    let l_zero = 0.5 * p.omega + p.g;

    // |xi_minus> = |down>(c|0> + d/sqrt(2)|2>) + d/sqrt(2) |up,1>
    let xi_minus = JointState::from_components(
        &[
            (Spin::Down, 0, real(sc.c)),
            (Spin::Down, 2, real(sc.d * isq2)),
            (Spin::Up, 1, real(sc.d * isq2)),
        ],
        n_max,
    )?;
    // |xi_plus> = |down>(d|0> - c/sqrt(2)|2>) - c/sqrt(2) |up,1>
    let xi_plus = JointState::from_components(
        &[
            (Spin::Down, 0, real(sc.d)),
            (Spin::Down, 2, real(-sc.c * isq2)),
            (Spin::Up, 1, real(-sc.c * isq2)),
        ],
        n_max,
    )?;
    // |xi_0> = (|down,1> + |up,0>)/sqrt(2)
    let xi_zero = JointState::from_components(
        &[(Spin::Down, 1, real(isq2)), (Spin::Up, 0, real(isq2))],
        n_max,
    )?;

    Ok([
        EigenRecord {
            label: EigenLabel::Special(0),
            value: l_minus,
            transformed: vec![
                (joint_index(Spin::Down, 0, n_max), real(sc.c)),
                (joint_index(Spin::Up, 1, n_max), real(sc.d)),
            ],
            vector: xi_minus,
        },
        EigenRecord {
            label: EigenLabel::Special(1),
            value: l_plus,
            transformed: vec![
                (joint_index(Spin::Down, 0, n_max), real(sc.d)),
                (joint_index(Spin::Up, 1, n_max), real(-sc.c)),
            ],
            vector: xi_plus,
        },
        EigenRecord {
            label: EigenLabel::Special(2),
            value: l_zero,
            transformed: vec![(joint_index(Spin::Up, 0, n_max), real(1.0))],
            vector: xi_zero,
        },
    ])
}

/// Untransformed pair eigenvectors. Each is a superposition of exactly four
/// joint basis states; for H1 branch minus,
/// `|phi_minus_n> = (1/sqrt(2)) [ A|down,n+1> + B|down,n+3> - B|up,n+2> + A|up,n> ]`.
///
/// Requires `n + 3 <= n_max - guard` so that no component touches the
/// truncation boundary.
pub fn untransformed_pair_states(
    model: AhmModel,
    n: usize,
    p: &ModelParams,
) -> Result<(EigenRecord, EigenRecord)> {
    if n + 3 > p.interior_n() {
        return Err(Error::CutoffViolation { n: n + 3, n_max: p.interior_n() });
    }
    let n_max = p.n_max;
    let isq2 = 1.0 / SQRT_2;
    match model {
        AhmModel::H1 => {
            let c = ahm1_coefficients(n, p)?;
            let (k_minus, k_plus) = ahm1_eigenvalues(n, p)?;
            let minus = JointState::from_components(
                &[
                    (Spin::Down, n + 1, real(c.a * isq2)),
                    (Spin::Down, n + 3, real(c.b * isq2)),
                    (Spin::Up, n + 2, real(-c.b * isq2)),
                    (Spin::Up, n, real(c.a * isq2)),
                ],
                n_max,
            )?;
            let plus = JointState::from_components(
                &[
                    (Spin::Down, n + 1, real(c.b * isq2)),
                    (Spin::Down, n + 3, real(-c.a * isq2)),
                    (Spin::Up, n + 2, real(c.a * isq2)),
                    (Spin::Up, n, real(c.b * isq2)),
                ],
                n_max,
            )?;
            Ok((
                EigenRecord {
                    label: EigenLabel::Pair { n, branch: Branch::Minus },
                    value: k_minus,
                    transformed: vec![
                        (joint_index(Spin::Up, n, n_max), real(c.a)),
                        (joint_index(Spin::Down, n + 3, n_max), real(c.b)),
                    ],
                    vector: minus,
                },
                EigenRecord {
                    label: EigenLabel::Pair { n, branch: Branch::Plus },
                    value: k_plus,
                    transformed: vec![
                        (joint_index(Spin::Up, n, n_max), real(c.b)),
                        (joint_index(Spin::Down, n + 3, n_max), real(-c.a)),
                    ],
                    vector: plus,
                },
            ))
        }
        AhmModel::H2 => {
            let c = ahm2_coefficients(n, p)?;
            let (l_minus, l_plus) = ahm2_eigenvalues(n, p)?;
            let minus = JointState::from_components(
                &[
                    (Spin::Down, n + 1, real(c.a * isq2)),
                    (Spin::Down, n + 3, real(c.b * isq2)),
                    (Spin::Up, n + 2, real(c.b * isq2)),
                    (Spin::Up, n, real(-c.a * isq2)),
                ],
                n_max,
            )?;
            let plus = JointState::from_components(
                &[
                    (Spin::Down, n + 1, real(c.b * isq2)),
                    (Spin::Down, n + 3, real(-c.a * isq2)),
                    (Spin::Up, n + 2, real(-c.a * isq2)),
                    (Spin::Up, n, real(-c.b * isq2)),
                ],
                n_max,
            )?;
            Ok((
                EigenRecord {
                    label: EigenLabel::Pair { n, branch: Branch::Minus },
                    value: l_minus,
                    transformed: vec![
                        (joint_index(Spin::Down, n + 1, n_max), real(c.a)),
                        (joint_index(Spin::Up, n + 2, n_max), real(c.b)),
                    ],
                    vector: minus,
                },
                EigenRecord {
                    label: EigenLabel::Pair { n, branch: Branch::Plus },
                    value: l_plus,
                    transformed: vec![
                        (joint_index(Spin::Down, n + 1, n_max), real(c.b)),
                        (joint_index(Spin::Up, n + 2, n_max), real(-c.a)),
                    ],
                    vector: plus,
                },
            ))
        }
    }
}

/// All closed-form eigenpairs supported on the guarded interior: the three
/// special states followed by the pair records in ascending `n`, minus branch
/// before plus. The count is `2 (n_pair_max + 1) + 3` with
/// `n_pair_max = n_max - guard - 3`.
pub fn full_eigenbasis(model: AhmModel, p: &ModelParams) -> Result<Vec<EigenRecord>> {
    let n_pair_max = p.interior_n().checked_sub(3).ok_or_else(|| Error::InvalidParams {
        reason: "interior too small for any pair state".into(),
    })?;
    let mut records = Vec::with_capacity(2 * (n_pair_max + 1) + 3);
    let specials = match model {
        AhmModel::H1 => ahm1_specials(p)?,
        AhmModel::H2 => ahm2_specials(p)?,
    };
    records.extend(specials);
    for n in 0..=n_pair_max {
        let (minus, plus) = untransformed_pair_states(model, n, p)?;
        records.push(minus);
        records.push(plus);
    }
    Ok(records)
}

/// Euclidean residual `|| H v - E v ||_2` of a record against an explicitly
/// built Hamiltonian.
pub fn residual_norm(h: &HamiltonianMatrix, record: &EigenRecord) -> Result<f64> {
    let applied = h.apply(record.vector.amplitudes())?;
    let e = real(record.value);
    Ok(applied
        .iter()
        .zip(record.vector.amplitudes().iter())
        .map(|(hv, v)| (hv - e * v).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::inner;
    use crate::models::{build_h1_explicit, build_h2_explicit};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn params() -> ModelParams {
        ModelParams::resonant(1.0, 0.1, 40).unwrap()
    }

    /// Eigenvalues and minus-branch eigenvector ratio of the symmetric 2x2
    /// matrix [[d1, off], [off, d2]], by direct diagonalization.
    fn solve_2x2(d1: f64, d2: f64, off: f64) -> (f64, f64, f64) {
        let center = 0.5 * (d1 + d2);
        let half = 0.5 * (d1 - d2);
        let gap = (half * half + off * off).sqrt();
        let e_minus = center - gap;
        let e_plus = center + gap;
        // (d1 - e) x + off y = 0  =>  y/x = (e - d1) / off
        let ratio = (e_minus - d1) / off;
        (e_minus, e_plus, ratio)
    }

    #[test]
    fn decoupled_limit() {
        let p = ModelParams::resonant(1.0, 0.0, 40).unwrap();
        for n in 0..20 {
            let c = ahm1_coefficients(n, &p).unwrap();
            assert_eq!(c.alpha, 0.0);
            assert_eq!(c.a, 1.0);
            assert_eq!(c.b, 0.0);
            assert_abs_diff_eq!(c.delta, 2.0 * p.omega, epsilon = 1e-15);
            let (km, kp) = ahm1_eigenvalues(n, &p).unwrap();
            let nf = n as f64;
            assert_abs_diff_eq!(kp, (2.0 * nf + 5.0) * p.omega / 2.0, epsilon = 1e-12);
            assert_abs_diff_eq!(km, (2.0 * nf + 1.0) * p.omega / 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn weak_coupling_mixing_stays_small() {
        // At omega = 1, g = 0.1 the pair states remain close to the
        // Jaynes-Cummings ones for low n: A_n^2 >= 0.99 for n <= 20.
        let p = params();
        for n in 0..=20 {
            let c = ahm1_coefficients(n, &p).unwrap();
            assert!(c.a * c.a >= 0.99, "A_{n}^2 = {}", c.a * c.a);
        }
    }

    #[test]
    fn n0_block_against_dense_2x2() {
        let p = params();
        let c = ahm1_coefficients(0, &p).unwrap();
        assert_abs_diff_eq!(c.mu, 0.1 * 2.0_f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(c.eta, 2.0 - 0.1 * (1.0 + 3.0_f64.sqrt()), epsilon = 1e-15);

        // 2x2 block of the transformed H1 spanned by |up,0>, |down,3>:
        // diagonals from the diagonalized JC form, off-diagonal -mu/2.
        let d1 = 0.5 * p.omega + p.g; // |up,0>
        let d2 = -0.5 * p.omega + 3.0 * p.omega - p.g * 3.0_f64.sqrt(); // |down,3>
        let (e_minus, e_plus, ratio) = solve_2x2(d1, d2, -0.5 * c.mu);
        let (km, kp) = ahm1_eigenvalues(0, &p).unwrap();
        assert_abs_diff_eq!(km, e_minus, epsilon = 1e-13);
        assert_abs_diff_eq!(kp, e_plus, epsilon = 1e-13);
        // Eigenvector ratio (component on |down,3>) / (component on |up,0>):
        // alpha = B/A, and the off-diagonal sign makes the ratio +alpha.
        assert_abs_diff_eq!(ratio, c.alpha, epsilon = 1e-13);
    }

    #[test]
    fn branch_difference_is_delta() {
        let p = params();
        for n in 0..30 {
            let c = ahm1_coefficients(n, &p).unwrap();
            let (km, kp) = ahm1_eigenvalues(n, &p).unwrap();
            assert_abs_diff_eq!(kp - km, c.delta, epsilon = 1e-13);
        }
    }

    #[test]
    fn cross_pair_gap_approaches_jcm_rabi_frequency() {
        // kappa_minus_{n+2} - kappa_plus_n ~ 2 g sqrt(n+1) for n >> 1.
        let p = ModelParams::resonant(1.0, 0.01, 40).unwrap();
        let n = 400;
        let (km2, _) = ahm1_eigenvalues(n + 2, &p).unwrap();
        let (_, kp) = ahm1_eigenvalues(n, &p).unwrap();
        let approx = 2.0 * p.g * ((n + 1) as f64).sqrt();
        assert!(((km2 - kp) - approx).abs() < 0.01 * approx);
    }

    #[test]
    fn strong_coupling_branch_is_stable() {
        // eta < 0 territory: the stabilized quotient keeps A^2 + B^2 = 1.
        let p = ModelParams::resonant(1.0, 0.9, 40).unwrap();
        for n in 0..30 {
            let c = ahm1_coefficients(n, &p).unwrap();
            if n > 2 {
                assert!(c.eta < 0.0);
            }
            assert_abs_diff_eq!(c.a * c.a + c.b * c.b, 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(c.delta, c.mu.hypot(c.eta), epsilon = 1e-14);
        }
    }

    #[test]
    fn h1_specials_values_and_vectors() {
        let p = params();
        let specials = ahm1_specials(&p).unwrap();
        assert_abs_diff_eq!(specials[0].value, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(specials[1].value, 0.5 - p.g, epsilon = 1e-15);
        assert_abs_diff_eq!(specials[2].value, 1.5 - SQRT_2 * p.g, epsilon = 1e-15);

        // |chi_1> = (|down,1> - |up,0>)/sqrt(2)
        let chi1 = &specials[1].vector;
        assert_abs_diff_eq!(chi1.amp(Spin::Down, 1).re, 1.0 / SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(chi1.amp(Spin::Up, 0).re, -1.0 / SQRT_2, epsilon = 1e-15);

        let h1 = build_h1_explicit(&p).unwrap();
        for s in &specials {
            assert!(residual_norm(&h1, s).unwrap() < 1e-10);
        }
    }

    #[test]
    fn h2_symmetry_relations() {
        let p = params();
        for n in 0..=50 {
            let c2 = ahm2_coefficients(n, &p).unwrap();
            let c1_neg = ahm1_coefficients(n, &p.with_g(-p.g)).unwrap();
            assert_eq!(c2.a, c1_neg.a);
            assert_eq!(c2.b, c1_neg.b);
            let (lm, lp) = ahm2_eigenvalues(n, &p).unwrap();
            let (km, kp) = ahm1_eigenvalues(n, &p.with_g(-p.g)).unwrap();
            assert_eq!(lp, kp);
            assert_eq!(lm, km);
        }
        let p0 = ModelParams::resonant(1.0, 0.0, 40).unwrap();
        assert_eq!(ahm2_coefficients(3, &p0).unwrap().a, 1.0);
    }

    #[test]
    fn h2_pair_block_against_dense_2x2() {
        // Independent check of the symmetry relations: diagonalize the 2x2
        // block of the transformed H2 spanned by |down,n+1>, |up,n+2>.
        let p = params();
        for n in 0..10 {
            let nf = n as f64;
            let d1 = -0.5 * p.omega + p.omega * (nf + 1.0) - p.g * (nf + 1.0).sqrt();
            let d2 = 0.5 * p.omega + p.omega * (nf + 2.0) + p.g * (nf + 3.0).sqrt();
            let off = 0.5 * p.g * (nf + 2.0).sqrt(); // g F2(n+1) sqrt(n+2)
            let (e_minus, e_plus, ratio) = solve_2x2(d1, d2, off);
            let (lm, lp) = ahm2_eigenvalues(n, &p).unwrap();
            let c = ahm2_coefficients(n, &p).unwrap();
            assert_abs_diff_eq!(lm, e_minus, epsilon = 1e-12);
            assert_abs_diff_eq!(lp, e_plus, epsilon = 1e-12);
            // minus branch is (C, D) on (|down,n+1>, |up,n+2>)
            assert_abs_diff_eq!(ratio, c.b / c.a, epsilon = 1e-12);
        }
    }

    #[test]
    fn h2_specials_limits_and_residuals() {
        let p0 = ModelParams::resonant(1.0, 0.0, 40).unwrap();
        let sc = h2_special_coefficients(&p0).unwrap();
        assert_abs_diff_eq!(sc.epsilon, p0.omega, epsilon = 1e-15);
        assert_eq!(sc.gamma, 0.0);
        assert_eq!(sc.c, 1.0);
        assert_eq!(sc.d, 0.0);
        let specials0 = ahm2_specials(&p0).unwrap();
        assert_abs_diff_eq!(specials0[0].value, (1.0 - 2.0) / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(specials0[1].value, (1.0 + 2.0) / 2.0, epsilon = 1e-15);

        let p = params();
        let specials = ahm2_specials(&p).unwrap();
        assert_abs_diff_eq!(specials[2].value, 0.5 * p.omega + p.g, epsilon = 1e-15);
        let h2 = build_h2_explicit(&p).unwrap();
        for s in &specials {
            assert!(residual_norm(&h2, s).unwrap() < 1e-10, "residual for {}", s.label);
        }
    }

    #[test]
    fn pair_states_structure() {
        let p = params();
        let (minus, plus) = untransformed_pair_states(AhmModel::H1, 4, &p).unwrap();
        for rec in [&minus, &plus] {
            let nonzero = rec
                .vector
                .amplitudes()
                .iter()
                .filter(|z| z.norm() > 0.0)
                .count();
            assert_eq!(nonzero, 4);
            assert_abs_diff_eq!(rec.vector.norm(), 1.0, epsilon = 1e-14);
        }
        let overlap = inner(&plus.vector, &minus.vector).unwrap();
        assert_abs_diff_eq!(overlap.norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn pair_states_cutoff_violation() {
        let p = ModelParams::resonant(1.0, 0.1, 12).unwrap();
        // interior is 7, so n = 5 needs component 8 and must fail
        assert!(untransformed_pair_states(AhmModel::H1, 5, &p).is_err());
        assert!(untransformed_pair_states(AhmModel::H1, 4, &p).is_ok());
    }

    #[test]
    fn eigenbasis_is_orthonormal_with_small_residuals() {
        let p = ModelParams::resonant(1.0, 0.1, 30).unwrap();
        for model in [AhmModel::H1, AhmModel::H2] {
            let basis = full_eigenbasis(model, &p).unwrap();
            let n_pair_max = p.interior_n() - 3;
            assert_eq!(basis.len(), 2 * (n_pair_max + 1) + 3);

            for (i, ri) in basis.iter().enumerate() {
                for (j, rj) in basis.iter().enumerate() {
                    let ip = inner(&ri.vector, &rj.vector).unwrap();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (ip - real(expect)).norm() < 1e-10,
                        "gram defect at ({i},{j}) for {:?}",
                        model
                    );
                }
            }

            let h = match model {
                AhmModel::H1 => build_h1_explicit(&p).unwrap(),
                AhmModel::H2 => build_h2_explicit(&p).unwrap(),
            };
            for rec in &basis {
                assert!(
                    residual_norm(&h, rec).unwrap() < 1e-10,
                    "residual for {} of {:?}",
                    rec.label,
                    model
                );
            }
        }
    }

    proptest! {
        #[test]
        fn pair_coefficients_normalized(n in 0usize..400, g in -2.0f64..2.0) {
            let p = ModelParams::resonant(1.0, g, 20).unwrap();
            if let Ok(c) = ahm1_coefficients(n, &p) {
                prop_assert!((c.a * c.a + c.b * c.b - 1.0).abs() < 1e-14);
                prop_assert!((c.delta - c.mu.hypot(c.eta)).abs() < 1e-14);
                prop_assert!(c.delta >= 0.0);
            }
        }

        #[test]
        fn eigenvalue_gap_positive(n in 0usize..200, g in 0.001f64..1.5) {
            let p = ModelParams::resonant(1.0, g, 20).unwrap();
            let c = ahm1_coefficients(n, &p).unwrap();
            let (km, kp) = ahm1_eigenvalues(n, &p).unwrap();
            prop_assert!(kp - km > 0.0);
            prop_assert!(((kp - km) - c.delta).abs() < 1e-12);
        }
    }
}
