//! Truncated Fock-space representation: field and joint (spin x field) states,
//! elementary boson and spin operators as dense matrices, inner products and
//! expectation values.
//!
//! Basis ordering is spin-major throughout the crate: the joint basis index of
//! the state `|s, n>` is `s * (n_max + 1) + n` with `s = 0` for spin down and
//! `s = 1` for spin up. Every matrix builder in this crate uses this ordering.

use ndarray::prelude::*;
use ndarray::linalg::kron;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Absolute tolerance for unit-norm checks on constructed states.
pub const NORM_TOL: f64 = 1e-12;
/// Absolute max-norm tolerance for Hermiticity checks.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Maximum admissible truncation tail mass for constructed field states.
pub const TAIL_TOL: f64 = 1e-12;

/// Spin projection of the two-level atom. `Down` is the sigma_z eigenstate
/// with eigenvalue -1, `Up` the one with eigenvalue +1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Down,
    Up,
}

impl Spin {
    /// Basis-ordering index: 0 for down, 1 for up.
    pub fn index(self) -> usize {
        match self {
            Spin::Down => 0,
            Spin::Up => 1,
        }
    }

    /// sigma_z eigenvalue, -1.0 or +1.0.
    pub fn sign(self) -> f64 {
        match self {
            Spin::Down => -1.0,
            Spin::Up => 1.0,
        }
    }
}

/// Index of `|s, n>` in the spin-major joint basis with field cutoff `n_max`.
pub fn joint_index(spin: Spin, n: usize, n_max: usize) -> usize {
    spin.index() * (n_max + 1) + n
}

/// Largest entry magnitude of `m` restricted to the guarded interior: rows and
/// columns whose photon index satisfies `n <= n_max - guard`, both spin
/// sectors. Truncation artifacts live outside this block.
pub fn interior_max_abs(m: &Array2<C64>, n_max: usize, guard: usize) -> f64 {
    let dim = 2 * (n_max + 1);
    assert_eq!(m.nrows(), dim, "matrix does not match the joint basis");
    let cut = n_max - guard;
    let mut max = 0.0_f64;
    for si in 0..2 {
        for sj in 0..2 {
            for ni in 0..=cut {
                for nj in 0..=cut {
                    let v = m[[si * (n_max + 1) + ni, sj * (n_max + 1) + nj]].norm();
                    if v > max {
                        max = v;
                    }
                }
            }
        }
    }
    max
}

fn hermiticity_defect(m: &Array2<C64>) -> f64 {
    let n = m.nrows();
    let mut defect = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            let d = (m[[i, j]] - m[[j, i]].conj()).norm();
            if d > defect {
                defect = d;
            }
        }
    }
    defect
}

/// Dense complex square matrix with a Hermiticity flag.
///
/// The flag is set by construction only when `max |M - M^dag| < 1e-12`.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    entries: Array2<C64>,
    hermitian: bool,
}

/// Hamiltonians are operator matrices whose Hermitian flag is set.
pub type HamiltonianMatrix = OperatorMatrix;

impl OperatorMatrix {
    /// Wrap a square matrix, detecting Hermiticity automatically.
    pub fn new(entries: Array2<C64>) -> Self {
        assert_eq!(entries.nrows(), entries.ncols(), "operator must be square");
        let hermitian = hermiticity_defect(&entries) < HERMITICITY_TOL;
        Self { entries, hermitian }
    }

    /// Wrap a matrix that must be Hermitian; errors with the measured defect
    /// otherwise.
    pub fn hermitian_checked(entries: Array2<C64>) -> Result<Self> {
        assert_eq!(entries.nrows(), entries.ncols(), "operator must be square");
        let defect = hermiticity_defect(&entries);
        if defect < HERMITICITY_TOL {
            Ok(Self { entries, hermitian: true })
        } else {
            Err(Error::NotHermitian { defect })
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn entries(&self) -> &Array2<C64> {
        &self.entries
    }

    pub fn into_entries(self) -> Array2<C64> {
        self.entries
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let adj = self.entries.t().mapv(|z| z.conj());
        Self { entries: adj.as_standard_layout().to_owned(), hermitian: self.hermitian }
    }

    /// Matrix product `self * rhs`.
    pub fn dot(&self, rhs: &Self) -> Result<Self> {
        if self.dim() != rhs.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: rhs.dim() });
        }
        Ok(Self::new(self.entries.dot(&rhs.entries)))
    }

    /// Apply to a raw amplitude vector. The result is generally unnormalized.
    pub fn apply(&self, v: &Array1<C64>) -> Result<Array1<C64>> {
        if self.dim() != v.len() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: v.len() });
        }
        Ok(self.entries.dot(v))
    }

    /// Largest entry magnitude of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim());
        let mut max = 0.0_f64;
        for (a, b) in self.entries.iter().zip(other.entries.iter()) {
            let d = (a - b).norm();
            if d > max {
                max = d;
            }
        }
        max
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl std::ops::Deref for OperatorMatrix {
    type Target = Array2<C64>;

    fn deref(&self) -> &Self::Target {
        &self.entries
    }
}

/// Field state: complex amplitudes over the Fock basis `|0> ... |n_max>`.
/// Unit-norm within 1e-12 after construction.
#[derive(Debug, Clone)]
pub struct FieldState {
    amps: Array1<C64>,
    n_max: usize,
}

impl FieldState {
    /// Number state `|n>`.
    pub fn number(n: usize, n_max: usize) -> Result<Self> {
        if n > n_max {
            return Err(Error::CutoffViolation { n, n_max });
        }
        let mut amps = Array1::zeros(n_max + 1);
        amps[n] = C64::new(1.0, 0.0);
        Ok(Self { amps, n_max })
    }

    /// Truncated coherent state with amplitude `alpha`,
    /// `c_n = exp(-|alpha|^2/2) alpha^n / sqrt(n!)`, renormalized after
    /// truncation. Amplitudes are evaluated in log space (accumulated
    /// log-factorials), which stays finite for n well beyond 200.
    ///
    /// Errors if the untruncated Poissonian leaves more than 1e-12 of its
    /// mass above `n_max`; the error names the smallest adequate cutoff.
    pub fn coherent(alpha: C64, n_max: usize) -> Result<Self> {
        if alpha.norm() == 0.0 {
            return Self::number(0, n_max);
        }
        let lambda = alpha.norm_sqr();
        let ln_mag = alpha.norm().ln();
        let phase = alpha.arg();

        let mut ln_fact = 0.0_f64; // ln n!
        let mut amps = Array1::zeros(n_max + 1);
        let mut mass = 0.0_f64; // untruncated Poisson mass up to n_max
        for n in 0..=n_max {
            if n > 0 {
                ln_fact += (n as f64).ln();
            }
            let ln_amp = -0.5 * lambda + n as f64 * ln_mag - 0.5 * ln_fact;
            let mag = ln_amp.exp();
            amps[n] = C64::from_polar(mag, n as f64 * phase);
            mass += mag * mag;
        }
        let tail = (1.0 - mass).max(0.0);
        if tail >= TAIL_TOL {
            return Err(Error::InsufficientCutoff {
                n_max,
                tail,
                required: Self::adequate_coherent_cutoff(lambda, n_max, ln_fact),
            });
        }
        let norm = mass.sqrt();
        amps.mapv_inplace(|z| z / norm);
        Ok(Self { amps, n_max })
    }

    /// Smallest cutoff for which the Poisson tail drops below 1e-12,
    /// continuing the mass sum past `from`.
    fn adequate_coherent_cutoff(lambda: f64, from: usize, ln_fact_at_from: f64) -> usize {
        let mut ln_fact = ln_fact_at_from;
        let mut mass = 0.0_f64;
        let mut ln_pmf;
        // Rebuild the cumulative mass from scratch to keep this independent of
        // the caller's partial sum.
        ln_fact = 0.0;
        for n in 0..=from {
            if n > 0 {
                ln_fact += (n as f64).ln();
            }
            ln_pmf = -lambda + n as f64 * lambda.ln() - ln_fact;
            mass += ln_pmf.exp();
        }
        let mut n = from;
        while 1.0 - mass >= TAIL_TOL && n < from + 1_000_000 {
            n += 1;
            ln_fact += (n as f64).ln();
            ln_pmf = -lambda + n as f64 * lambda.ln() - ln_fact;
            mass += ln_pmf.exp();
        }
        n
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    /// Amplitude `<n|f>`; zero above the cutoff.
    pub fn amp(&self, n: usize) -> C64 {
        if n <= self.n_max {
            self.amps[n]
        } else {
            C64::new(0.0, 0.0)
        }
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Mean photon number `<n_hat>`.
    pub fn mean_photon_number(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(n, z)| n as f64 * z.norm_sqr())
            .sum()
    }

    /// Probability weight strictly above photon index `n`.
    pub fn weight_above(&self, n: usize) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(k, _)| *k > n)
            .map(|(_, z)| z.norm_sqr())
            .sum()
    }
}

/// Joint atom-field state over the spin-major basis; length `2 (n_max + 1)`,
/// unit-norm within 1e-12.
#[derive(Debug, Clone)]
pub struct JointState {
    amps: Array1<C64>,
    n_max: usize,
}

impl JointState {
    /// Product state `|spin> (x) |f>`.
    pub fn pure(spin: Spin, f: &FieldState) -> Self {
        let fdim = f.dim();
        let mut amps = Array1::zeros(2 * fdim);
        let base = spin.index() * fdim;
        for n in 0..fdim {
            amps[base + n] = f.amps[n];
        }
        Self { amps, n_max: f.n_max }
    }

    /// Wrap raw amplitudes (length `2 (n_max + 1)`), checking the norm.
    pub fn from_amplitudes(amps: Array1<C64>, n_max: usize) -> Result<Self> {
        if amps.len() != 2 * (n_max + 1) {
            return Err(Error::DimensionMismatch { left: amps.len(), right: 2 * (n_max + 1) });
        }
        let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let defect = (norm - 1.0).abs();
        if defect > NORM_TOL {
            return Err(Error::NotNormalized { defect });
        }
        Ok(Self { amps, n_max })
    }

    /// Build from a sparse list of `(spin, n, amplitude)` components and
    /// normalize is NOT applied: components must already form a unit vector.
    pub fn from_components(components: &[(Spin, usize, C64)], n_max: usize) -> Result<Self> {
        let mut amps = Array1::zeros(2 * (n_max + 1));
        for &(s, n, z) in components {
            if n > n_max {
                return Err(Error::CutoffViolation { n, n_max });
            }
            amps[joint_index(s, n, n_max)] = z;
        }
        Self::from_amplitudes(amps, n_max)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amp(&self, spin: Spin, n: usize) -> C64 {
        self.amps[joint_index(spin, n, self.n_max)]
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Sesquilinear inner product `<x|y>`, conjugate-linear in the first argument.
pub fn inner(x: &JointState, y: &JointState) -> Result<C64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { left: x.dim(), right: y.dim() });
    }
    Ok(x.amps
        .iter()
        .zip(y.amps.iter())
        .map(|(a, b)| a.conj() * b)
        .sum())
}

/// Expectation value `<x|op|x>`. Real within 1e-12 for Hermitian `op`.
pub fn expectation(op: &OperatorMatrix, x: &JointState) -> Result<C64> {
    let applied = op.apply(&x.amps)?;
    Ok(x.amps
        .iter()
        .zip(applied.iter())
        .map(|(a, b)| a.conj() * b)
        .sum())
}

/// Elementary boson operators on the truncated Fock space.
#[derive(Debug, Clone)]
pub struct BosonOps {
    /// Annihilation operator: entries sqrt(n) at (n-1, n).
    pub a: OperatorMatrix,
    /// Creation operator, the adjoint of `a`.
    pub a_dag: OperatorMatrix,
    /// Number operator, diagonal (0, 1, ..., n_max).
    pub n_hat: OperatorMatrix,
    /// Projector |0><0| onto the field ground state (delta(n_hat)).
    pub vac_proj: OperatorMatrix,
}

/// Build the boson operators for cutoff `n_max >= 1`.
///
/// On the truncated space `[a, a_dag] = 1` holds exactly except in the last
/// row/column: the commutator's diagonal entry at `n_max` is `-n_max`.
pub fn boson_operators(n_max: usize) -> Result<BosonOps> {
    if n_max < 1 {
        return Err(Error::InvalidParams { reason: "boson operators need n_max >= 1".into() });
    }
    let dim = n_max + 1;
    let mut a = Array2::<C64>::zeros((dim, dim));
    for n in 1..dim {
        a[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
    }
    let a = OperatorMatrix::new(a);
    let a_dag = a.adjoint();
    let n_hat = OperatorMatrix::new(Array2::from_diag(
        &Array1::from_iter((0..dim).map(|n| C64::new(n as f64, 0.0))),
    ));
    let mut vac = Array2::<C64>::zeros((dim, dim));
    vac[[0, 0]] = C64::new(1.0, 0.0);
    let vac_proj = OperatorMatrix::new(vac);
    Ok(BosonOps { a, a_dag, n_hat, vac_proj })
}

/// Spin-1/2 ladder and z operators on the 2-dimensional spin space.
#[derive(Debug, Clone)]
pub struct SpinOps {
    pub sigma_plus: OperatorMatrix,
    pub sigma_minus: OperatorMatrix,
    pub sigma_z: OperatorMatrix,
}

/// Build the 2x2 spin operators in the (down, up) ordering:
/// `sigma_plus |down> = |up>`, `sigma_z |up> = +|up>`.
pub fn spin_operators() -> SpinOps {
    let one = C64::new(1.0, 0.0);
    let mut sp = Array2::<C64>::zeros((2, 2));
    sp[[1, 0]] = one;
    let mut sm = Array2::<C64>::zeros((2, 2));
    sm[[0, 1]] = one;
    let mut sz = Array2::<C64>::zeros((2, 2));
    sz[[0, 0]] = -one;
    sz[[1, 1]] = one;
    SpinOps {
        sigma_plus: OperatorMatrix::new(sp),
        sigma_minus: OperatorMatrix::new(sm),
        sigma_z: OperatorMatrix::new(sz),
    }
}

/// Tensor product `spin_op (x) field_op` in the spin-major joint basis.
pub fn kron_embed(spin_op: &OperatorMatrix, field_op: &OperatorMatrix) -> Result<OperatorMatrix> {
    if spin_op.dim() != 2 {
        return Err(Error::DimensionMismatch { left: spin_op.dim(), right: 2 });
    }
    Ok(OperatorMatrix::new(kron(spin_op.entries(), field_op.entries())))
}

/// Identity matrix of the given dimension.
pub fn identity(dim: usize) -> OperatorMatrix {
    OperatorMatrix::new(Array2::from_diag(&Array1::from_elem(dim, C64::new(1.0, 0.0))))
}
