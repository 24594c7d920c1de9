//! Time evolution of the excited-state survival probability
//! `P(t) = (1 + <sigma_z(t)>)/2` for the initial state `|up, f>`:
//! numerically exact propagation by dense Hermitian diagonalization, the
//! closed-form resonant Jaynes-Cummings series, the closed-form H1 series,
//! the H2 series by spectral resolution over the closed-form eigenbasis, and
//! aligned multi-model comparisons.

use ndarray::prelude::*;
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::fock::{FieldState, HamiltonianMatrix, JointState, NORM_TOL};
use crate::models::{build_h1_explicit, build_rabi, ModelParams};
use crate::spectra::{ahm1_coefficients, ahm1_eigenvalues, full_eigenbasis, AhmModel};

/// Uniform time grid: `steps` samples covering `[t_start, t_end]` inclusive,
/// in units of 1/omega.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, steps: usize) -> Result<Self> {
        if !(t_start >= 0.0) {
            return Err(Error::InvalidGrid { reason: format!("t_start must be >= 0, got {t_start}") });
        }
        if !(t_end > t_start) {
            return Err(Error::InvalidGrid {
                reason: format!("t_end must exceed t_start, got [{t_start}, {t_end}]"),
            });
        }
        if steps < 2 {
            return Err(Error::InvalidGrid { reason: format!("need at least 2 steps, got {steps}") });
        }
        Ok(Self { t_start, t_end, steps })
    }

    pub fn dt(&self) -> f64 {
        (self.t_end - self.t_start) / (self.steps - 1) as f64
    }

    pub fn times(&self) -> Vec<f64> {
        let dt = self.dt();
        (0..self.steps).map(|i| self.t_start + i as f64 * dt).collect()
    }
}

/// Model identifier carried by a survival series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelTag {
    /// Rabi Hamiltonian, propagated numerically.
    Rh,
    /// First approximating Hamiltonian, closed-form series.
    Ahm1,
    /// Second approximating Hamiltonian, spectral resolution.
    Ahm2,
    /// Resonant Jaynes-Cummings model, closed form.
    Jcm,
}

impl ModelTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelTag::Rh => "RH",
            ModelTag::Ahm1 => "AHM1",
            ModelTag::Ahm2 => "AHM2",
            ModelTag::Jcm => "JCM",
        }
    }

    /// Canonical CSV column order.
    pub const CANONICAL_ORDER: [ModelTag; 4] =
        [ModelTag::Rh, ModelTag::Ahm1, ModelTag::Ahm2, ModelTag::Jcm];
}

impl std::fmt::Display for ModelTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ModelTag {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "rh" | "rabi" => Ok(ModelTag::Rh),
            "ahm1" | "h1" => Ok(ModelTag::Ahm1),
            "ahm2" | "h2" => Ok(ModelTag::Ahm2),
            "jcm" | "jc" => Ok(ModelTag::Jcm),
            other => Err(format!("unknown model '{other}' (expected rh, ahm1, ahm2 or jcm)")),
        }
    }
}

/// Survival probability samples for one model on a shared grid.
#[derive(Debug, Clone)]
pub struct SurvivalSeries {
    pub model: ModelTag,
    pub times: Vec<f64>,
    pub p: Vec<f64>,
}

impl SurvivalSeries {
    /// Largest pointwise deviation from another series on the same grid.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.p.len(), other.p.len(), "series on different grids");
        self.p
            .iter()
            .zip(other.p.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.p.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.p.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Propagate `psi0` under the Hermitian `h` by one-shot spectral
/// decomposition (exact for a time-independent Hamiltonian) and sample the
/// survival probability on the grid.
///
/// The propagated state's norm is checked to stay within 1e-10 of unity at
/// every sample.
pub fn propagate_survival(
    tag: ModelTag,
    h: &HamiltonianMatrix,
    psi0: &JointState,
    grid: &TimeGrid,
) -> Result<SurvivalSeries> {
    if !h.is_hermitian() {
        return Err(Error::NotHermitian { defect: f64::NAN });
    }
    if h.dim() != psi0.dim() {
        return Err(Error::DimensionMismatch { left: h.dim(), right: psi0.dim() });
    }
    let norm_defect = (psi0.norm() - 1.0).abs();
    if norm_defect > NORM_TOL {
        return Err(Error::NotNormalized { defect: norm_defect });
    }

    let (energies, vectors) = h
        .entries()
        .eigh(UPLO::Lower)
        .map_err(|e| Error::Eigensolver(e.to_string()))?;
    let coeffs = vectors.t().mapv(|z| z.conj()).dot(psi0.amplitudes());

    let dim = h.dim();
    let fdim = dim / 2;
    let times = grid.times();

    // Evolve in blocks: Psi_block = V . diag-free phase matrix, one zgemm per
    // block keeps memory bounded on long grids.
    const BLOCK: usize = 1024;
    let mut p = vec![0.0_f64; times.len()];
    for (block_idx, chunk) in times.chunks(BLOCK).enumerate() {
        let mut phases = Array2::<C64>::zeros((dim, chunk.len()));
        for (j, &t) in chunk.iter().enumerate() {
            for k in 0..dim {
                phases[[k, j]] = coeffs[k] * C64::from_polar(1.0, -energies[k] * t);
            }
        }
        let psi_block = vectors.dot(&phases);
        for j in 0..chunk.len() {
            let col = psi_block.column(j);
            let p_down: f64 = col.iter().take(fdim).map(|z| z.norm_sqr()).sum();
            let p_up: f64 = col.iter().skip(fdim).map(|z| z.norm_sqr()).sum();
            let norm_defect = (p_down + p_up - 1.0).abs();
            if norm_defect > 1e-10 {
                return Err(Error::NotNormalized { defect: norm_defect });
            }
            p[block_idx * BLOCK + j] = 0.5 * (1.0 + p_up - p_down);
        }
    }
    Ok(SurvivalSeries { model: tag, times, p })
}

/// Closed-form resonant Jaynes-Cummings survival probability:
/// `P(t) = (1 + sum_n |<n|f>|^2 cos(2 g sqrt(n+1) t)) / 2`.
pub fn survival_jcm_analytic(
    f: &FieldState,
    p: &ModelParams,
    grid: &TimeGrid,
) -> Result<SurvivalSeries> {
    p.require_resonant()?;
    let weights: Vec<(f64, f64)> = f
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm_sqr() > 0.0)
        .map(|(n, c)| (c.norm_sqr(), 2.0 * p.g * ((n + 1) as f64).sqrt()))
        .collect();
    let times = grid.times();
    let values: Vec<f64> = times
        .par_iter()
        .map(|&t| {
            0.5 * (1.0 + weights.iter().map(|&(w, freq)| w * (freq * t).cos()).sum::<f64>())
        })
        .collect();
    Ok(SurvivalSeries { model: ModelTag::Jcm, times, p: values })
}

/// Overlaps of the initial state `|up, f>` with the H1 pair eigenstates:
/// `F_minus_n = (A_n <n|f> - B_n <n+2|f>) / sqrt(2)`,
/// `F_plus_n  = (A_n <n+2|f> + B_n <n|f>) / sqrt(2)`.
pub fn overlaps_f(n: usize, f: &FieldState, p: &ModelParams) -> Result<(C64, C64)> {
    if n + 3 > p.interior_n() {
        return Err(Error::CutoffViolation { n: n + 3, n_max: p.interior_n() });
    }
    let c = ahm1_coefficients(n, p)?;
    let fn0 = f.amp(n);
    let fn2 = f.amp(n + 2);
    let isq2 = 1.0 / SQRT_2;
    let f_minus = (fn0 * c.a - fn2 * c.b) * isq2;
    let f_plus = (fn2 * c.a + fn0 * c.b) * isq2;
    Ok((f_minus, f_plus))
}

fn check_field_tail(f: &FieldState, p: &ModelParams) -> Result<()> {
    let interior = p.interior_n().saturating_sub(3);
    let tail = f.weight_above(interior);
    if tail >= 1e-12 {
        return Err(Error::UnsupportedFieldTail { tail, interior });
    }
    Ok(())
}

/// One oscillating contribution `w exp(i freq t)` to the survival series.
struct Tone {
    weight: C64,
    freq: f64,
}

fn eval_tones(half: f64, tones: &[Tone], times: &[f64]) -> Vec<f64> {
    times
        .par_iter()
        .map(|&t| {
            let osc: f64 = tones
                .iter()
                .map(|tone| {
                    let ph = C64::from_polar(1.0, tone.freq * t);
                    (tone.weight * ph).re
                })
                .sum();
            half + osc
        })
        .collect()
}

/// Closed-form H1 survival probability: the four pair-pair term families
/// (cross terms between the `n` and `n+2` pairs, which are the only nonzero
/// sigma_z matrix elements) plus the special-state bracket coupling the
/// `n = 0, 1` pairs to the two special states that overlap `|up, f>`.
///
/// The special bracket pairs `<0|f>` with `k_1` and `<1|f>` with `k_2`; an
/// independent expansion over the eigenbasis confirms this printed pairing
/// exactly (the special state containing `|up,0>` is the one with eigenvalue
/// `k_1`), so the series is exact, not approximate.
pub fn survival_ahm1_analytic(
    f: &FieldState,
    p: &ModelParams,
    grid: &TimeGrid,
) -> Result<SurvivalSeries> {
    p.require_resonant()?;
    check_field_tail(f, p)?;

    let n_pair_max = p.interior_n() - 3;
    let mut coeff = Vec::with_capacity(n_pair_max + 1);
    let mut kappa = Vec::with_capacity(n_pair_max + 1);
    let mut f_overlaps = Vec::with_capacity(n_pair_max + 1);
    for n in 0..=n_pair_max {
        coeff.push(ahm1_coefficients(n, p)?);
        kappa.push(ahm1_eigenvalues(n, p)?);
        f_overlaps.push(overlaps_f(n, f, p)?);
    }

    const WEIGHT_FLOOR: f64 = 1e-18;
    let mut tones: Vec<Tone> = Vec::new();
    for n in 0..=n_pair_max.saturating_sub(2) {
        let (a_n, b_n) = (coeff[n].a, coeff[n].b);
        let (a_n2, b_n2) = (coeff[n + 2].a, coeff[n + 2].b);
        let (km_n, kp_n) = kappa[n];
        let (km_n2, kp_n2) = kappa[n + 2];
        let (fm_n, fp_n) = f_overlaps[n];
        let (fm_n2, fp_n2) = f_overlaps[n + 2];

        let families = [
            (fm_n2.conj() * fp_n * (a_n * a_n2), km_n2 - kp_n),
            (fm_n2.conj() * fm_n * (-b_n * a_n2), km_n2 - km_n),
            (fp_n2.conj() * fp_n * (a_n * b_n2), kp_n2 - kp_n),
            (fp_n2.conj() * fm_n * (-b_n * b_n2), kp_n2 - km_n),
        ];
        for (weight, freq) in families {
            if weight.norm() > WEIGHT_FLOOR {
                tones.push(Tone { weight, freq });
            }
        }
    }

    // Special-state bracket: eigenvalues k_1 = omega/2 - g and
    // k_2 = 3 omega/2 - sqrt(2) g.
    let k1 = 0.5 * p.omega - p.g;
    let k2 = 1.5 * p.omega - SQRT_2 * p.g;
    let isq2 = 1.0 / SQRT_2;
    let f0 = f.amp(0);
    let f1 = f.amp(1);
    let specials = [
        (f0 * coeff[0].a * f_overlaps[0].0.conj() * isq2, kappa[0].0 - k1),
        (f0 * coeff[0].b * f_overlaps[0].1.conj() * isq2, kappa[0].1 - k1),
        (f1 * coeff[1].a * f_overlaps[1].0.conj() * isq2, kappa[1].0 - k2),
        (f1 * coeff[1].b * f_overlaps[1].1.conj() * isq2, kappa[1].1 - k2),
    ];
    for (weight, freq) in specials {
        if weight.norm() > WEIGHT_FLOOR {
            tones.push(Tone { weight, freq });
        }
    }

    let times = grid.times();
    let p_vals = eval_tones(0.5, &tones, &times);
    Ok(SurvivalSeries { model: ModelTag::Ahm1, times, p: p_vals })
}

/// Survival probability from the closed-form eigenbasis of an approximating
/// Hamiltonian: resolve `|up, f>` over the records, attach phases, and sum
/// the up-spin probability. No matrix diagonalization is involved.
pub fn survival_spectral(
    model: AhmModel,
    f: &FieldState,
    p: &ModelParams,
    grid: &TimeGrid,
) -> Result<SurvivalSeries> {
    p.require_resonant()?;
    check_field_tail(f, p)?;
    let basis = full_eigenbasis(model, p)?;
    let psi0 = JointState::pure(crate::fock::Spin::Up, f);

    // Sparse expansion: keep each record's overlap and components.
    struct Mode {
        energy: f64,
        coeff: C64,
        components: Vec<(usize, C64)>,
    }
    let fdim = p.field_dim();
    let modes: Vec<Mode> = basis
        .iter()
        .filter_map(|rec| {
            let coeff: C64 = rec
                .vector
                .amplitudes()
                .iter()
                .zip(psi0.amplitudes().iter())
                .map(|(e, s)| e.conj() * s)
                .sum();
            if coeff.norm() <= 1e-18 {
                return None;
            }
            let components: Vec<(usize, C64)> = rec
                .vector
                .amplitudes()
                .iter()
                .enumerate()
                .filter(|(_, z)| z.norm() > 0.0)
                .map(|(i, z)| (i, *z))
                .collect();
            Some(Mode { energy: rec.value, coeff, components })
        })
        .collect();

    let completeness: f64 = modes.iter().map(|m| m.coeff.norm_sqr()).sum();
    let defect = (completeness - 1.0).abs();
    if defect > 1e-10 {
        return Err(Error::UnsupportedFieldTail { tail: defect, interior: p.interior_n() });
    }

    let tag = match model {
        AhmModel::H1 => ModelTag::Ahm1,
        AhmModel::H2 => ModelTag::Ahm2,
    };
    let times = grid.times();
    let dim = p.dim();
    let p_vals: Vec<f64> = times
        .par_iter()
        .map(|&t| {
            let mut psi = vec![C64::new(0.0, 0.0); dim];
            for mode in &modes {
                let phase = mode.coeff * C64::from_polar(1.0, -mode.energy * t);
                for &(idx, amp) in &mode.components {
                    psi[idx] += phase * amp;
                }
            }
            let p_down: f64 = psi.iter().take(fdim).map(|z| z.norm_sqr()).sum();
            let p_up: f64 = psi.iter().skip(fdim).map(|z| z.norm_sqr()).sum();
            0.5 * (1.0 + p_up - p_down)
        })
        .collect();
    Ok(SurvivalSeries { model: tag, times, p: p_vals })
}

/// H2 survival probability via spectral resolution over the closed-form H2
/// eigenbasis.
pub fn survival_ahm2_analytic(
    f: &FieldState,
    p: &ModelParams,
    grid: &TimeGrid,
) -> Result<SurvivalSeries> {
    survival_spectral(AhmModel::H2, f, p, grid)
}

/// Evaluate one aligned survival series per requested model. The Rabi series
/// is always numerically propagated; the approximating models and the
/// Jaynes-Cummings model use their closed forms.
pub fn compare_models(
    f: &FieldState,
    p: &ModelParams,
    grid: &TimeGrid,
    models: &[ModelTag],
) -> Result<Vec<SurvivalSeries>> {
    if models.is_empty() {
        return Err(Error::EmptyModelSet);
    }
    let mut out = Vec::new();
    for tag in ModelTag::CANONICAL_ORDER {
        if !models.contains(&tag) {
            continue;
        }
        let series = match tag {
            ModelTag::Rh => {
                let h = build_rabi(p)?;
                let psi0 = JointState::pure(crate::fock::Spin::Up, f);
                propagate_survival(ModelTag::Rh, &h, &psi0, grid)?
            }
            ModelTag::Ahm1 => survival_ahm1_analytic(f, p, grid)?,
            ModelTag::Ahm2 => survival_ahm2_analytic(f, p, grid)?,
            ModelTag::Jcm => survival_jcm_analytic(f, p, grid)?,
        };
        out.push(series);
    }
    Ok(out)
}

/// Windowed discrete Fourier spectrum of `p(t) - mean(p)`: Hann window, then
/// magnitudes of the positive-frequency bins. Bin `k` corresponds to the
/// angular frequency `2 pi k / (steps * dt)`.
fn windowed_spectrum(series: &SurvivalSeries) -> (Vec<f64>, f64) {
    let n = series.p.len();
    let mean = series.p.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<rustfft::num_complex::Complex<f64>> = series
        .p
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let w = 0.5 * (1.0 - (2.0 * PI * i as f64 / n as f64).cos());
            rustfft::num_complex::Complex::new((v - mean) * w, 0.0)
        })
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    let mags: Vec<f64> = buf.iter().take(n / 2).map(|z| z.norm()).collect();
    let dt = series.times[1] - series.times[0];
    let bin_width = 2.0 * PI / (n as f64 * dt);
    (mags, bin_width)
}

/// Angular frequency (radians per unit time) of the dominant spectral peak of
/// `p(t) - mean`, located by quadratic interpolation around the maximum bin.
pub fn dominant_angular_frequency(series: &SurvivalSeries) -> f64 {
    let (mags, bin_width) = windowed_spectrum(series);
    let mut k_max = 1;
    for k in 1..mags.len() {
        if mags[k] > mags[k_max] {
            k_max = k;
        }
    }
    let delta = if k_max > 0 && k_max + 1 < mags.len() {
        let (alpha, beta, gamma) = (mags[k_max - 1], mags[k_max], mags[k_max + 1]);
        let denom = alpha - 2.0 * beta + gamma;
        if denom.abs() > 0.0 {
            0.5 * (alpha - gamma) / denom
        } else {
            0.0
        }
    } else {
        0.0
    };
    (k_max as f64 + delta) * bin_width
}

/// Width of one DFT frequency bin for the series' grid, in angular units.
pub fn frequency_bin_width(series: &SurvivalSeries) -> f64 {
    let dt = series.times[1] - series.times[0];
    2.0 * PI / (series.p.len() as f64 * dt)
}

/// Total spectral power of `p(t) - mean` in the angular band `[lo, hi]`.
pub fn band_power(series: &SurvivalSeries, lo: f64, hi: f64) -> f64 {
    let (mags, bin_width) = windowed_spectrum(series);
    mags.iter()
        .enumerate()
        .filter(|(k, _)| {
            let w = *k as f64 * bin_width;
            w >= lo && w <= hi
        })
        .map(|(_, m)| m * m)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::Spin;
    use crate::models::build_jc;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn grid(t_end: f64, steps: usize) -> TimeGrid {
        TimeGrid::new(0.0, t_end, steps).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(-1.0, 1.0, 10).is_err());
        assert!(TimeGrid::new(1.0, 1.0, 10).is_err());
        assert!(TimeGrid::new(0.0, 1.0, 1).is_err());
        let g = TimeGrid::new(0.0, 2.0, 5).unwrap();
        assert_eq!(g.times(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    }

    #[test]
    fn survival_starts_at_one() {
        let p = ModelParams::resonant(1.0, 0.1, 46).unwrap();
        let f = FieldState::number(6, p.n_max).unwrap();
        let psi0 = JointState::pure(Spin::Up, &f);
        let h = build_rabi(&p).unwrap();
        let series = propagate_survival(ModelTag::Rh, &h, &psi0, &grid(10.0, 101)).unwrap();
        assert_abs_diff_eq!(series.p[0], 1.0, epsilon = 1e-12);
        assert!(series.p.iter().all(|&v| (-1e-10..=1.0 + 1e-10).contains(&v)));
    }

    #[test]
    fn zero_coupling_freezes_survival() {
        let p = ModelParams::resonant(1.0, 0.0, 30).unwrap();
        let f = FieldState::number(3, p.n_max).unwrap();
        let psi0 = JointState::pure(Spin::Up, &f);
        let h = build_rabi(&p).unwrap();
        let series = propagate_survival(ModelTag::Rh, &h, &psi0, &grid(50.0, 201)).unwrap();
        for &v in &series.p {
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12);
        }

        let ahm1 = survival_ahm1_analytic(&f, &p, &grid(50.0, 201)).unwrap();
        for &v in &ahm1.p {
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12);
        }
        let ahm2 = survival_ahm2_analytic(&f, &p, &grid(50.0, 201)).unwrap();
        for &v in &ahm2.p {
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn jcm_single_tone_for_number_state() {
        let p = ModelParams::resonant(1.0, 0.1, 46).unwrap();
        let f = FieldState::number(6, p.n_max).unwrap();
        let g = grid(30.0, 301);
        let series = survival_jcm_analytic(&f, &p, &g).unwrap();
        let freq = 2.0 * p.g * 7.0_f64.sqrt();
        for (i, &t) in series.times.iter().enumerate() {
            assert_abs_diff_eq!(series.p[i], 0.5 * (1.0 + (freq * t).cos()), epsilon = 1e-14);
        }
    }

    #[test]
    fn jcm_closed_form_matches_matrix_propagation() {
        let p = ModelParams::resonant(1.0, 0.1, 46).unwrap();
        let f = FieldState::number(6, p.n_max).unwrap();
        let g = grid(50.0, 501);
        let analytic = survival_jcm_analytic(&f, &p, &g).unwrap();
        let h = build_jc(&p).unwrap();
        let psi0 = JointState::pure(Spin::Up, &f);
        let propagated = propagate_survival(ModelTag::Jcm, &h, &psi0, &g).unwrap();
        assert!(analytic.max_abs_diff(&propagated) < 1e-10);
    }

    #[test]
    fn overlaps_for_number_state() {
        let p = ModelParams::resonant(1.0, 0.1, 46).unwrap();
        let f = FieldState::number(6, p.n_max).unwrap();
        let c4 = ahm1_coefficients(4, &p).unwrap();
        let c6 = ahm1_coefficients(6, &p).unwrap();
        let isq2 = 1.0 / SQRT_2;

        let (fm6, fp6) = overlaps_f(6, &f, &p).unwrap();
        assert_abs_diff_eq!(fm6.re, c6.a * isq2, epsilon = 1e-15);
        assert_abs_diff_eq!(fp6.re, c6.b * isq2, epsilon = 1e-15);
        let (fm4, fp4) = overlaps_f(4, &f, &p).unwrap();
        assert_abs_diff_eq!(fm4.re, -c4.b * isq2, epsilon = 1e-15);
        assert_abs_diff_eq!(fp4.re, c4.a * isq2, epsilon = 1e-15);
        for n in [0usize, 1, 2, 3, 5, 7, 8] {
            let (fm, fp) = overlaps_f(n, &f, &p).unwrap();
            assert_eq!(fm.norm() + fp.norm(), 0.0);
        }
    }

    #[test]
    fn overlaps_match_inner_product_oracle() {
        let p = ModelParams::resonant(1.0, 0.1, 44).unwrap();
        let f = FieldState::coherent(C64::new(2.0, 0.7), p.n_max).unwrap();
        let psi0 = JointState::pure(Spin::Up, &f);
        for n in 0..20 {
            let (fm, fp) = overlaps_f(n, &f, &p).unwrap();
            let (minus, plus) =
                crate::spectra::untransformed_pair_states(AhmModel::H1, n, &p).unwrap();
            let fm_direct = crate::fock::inner(&minus.vector, &psi0).unwrap();
            let fp_direct = crate::fock::inner(&plus.vector, &psi0).unwrap();
            assert!((fm - fm_direct).norm() < 1e-12);
            assert!((fp - fp_direct).norm() < 1e-12);
        }
    }

    #[test]
    fn overlaps_cutoff_violation() {
        let p = ModelParams::resonant(1.0, 0.1, 20).unwrap();
        let f = FieldState::number(3, p.n_max).unwrap();
        assert!(overlaps_f(13, &f, &p).is_err());
        assert!(overlaps_f(12, &f, &p).is_ok());
    }

    #[test]
    fn ahm1_series_matches_matrix_propagation() {
        let p = ModelParams::resonant(1.0, 0.1, 46).unwrap();
        let f = FieldState::number(6, p.n_max).unwrap();
        let g = grid(250.0, 1001); // t up to 25/g
        let analytic = survival_ahm1_analytic(&f, &p, &g).unwrap();
        let h1 = build_h1_explicit(&p).unwrap();
        let psi0 = JointState::pure(Spin::Up, &f);
        let propagated = propagate_survival(ModelTag::Ahm1, &h1, &psi0, &g).unwrap();
        assert!(analytic.max_abs_diff(&propagated) < 1e-8);
    }

    #[test]
    fn ahm1_series_matches_spectral_resolution() {
        // Independent origin for the closed-form series: expansion over the
        // eigenbasis records. Also covers the vanishing special bracket for
        // fields with no n = 0, 1 components.
        let p = ModelParams::resonant(1.0, 0.1, 46).unwrap();
        let f = FieldState::number(6, p.n_max).unwrap();
        let g = grid(100.0, 401);
        let series = survival_ahm1_analytic(&f, &p, &g).unwrap();
        let spectral = survival_spectral(AhmModel::H1, &f, &p, &g).unwrap();
        assert!(series.max_abs_diff(&spectral) < 1e-10);
    }

    #[test]
    fn ahm1_weak_coupling_tracks_jcm_at_short_times() {
        let p = ModelParams::resonant(1.0, 0.1, 46).unwrap();
        let f = FieldState::number(6, p.n_max).unwrap();
        let g = grid(5.0, 201);
        let ahm1 = survival_ahm1_analytic(&f, &p, &g).unwrap();
        let jcm = survival_jcm_analytic(&f, &p, &g).unwrap();
        assert!(ahm1.max_abs_diff(&jcm) < 0.05);
    }

    #[test]
    fn ahm1_field_tail_rejected() {
        let p = ModelParams::resonant(1.0, 0.1, 20).unwrap();
        // number state at the interior edge: weight above interior - 3 = 12
        let f = FieldState::number(14, p.n_max).unwrap();
        assert!(matches!(
            survival_ahm1_analytic(&f, &p, &grid(10.0, 11)),
            Err(Error::UnsupportedFieldTail { .. })
        ));
    }

    #[test]
    fn h1_h2_survival_symmetry() {
        // P_H1(g, t) = P_H2(-g, t) exactly for a field with no overlap on any
        // special state of either model.
        let p = ModelParams::resonant(1.0, 0.1, 46).unwrap();
        let f = FieldState::number(6, p.n_max).unwrap();
        let g = grid(100.0, 401);
        let h1 = survival_ahm1_analytic(&f, &p, &g).unwrap();
        let h2_neg = survival_ahm2_analytic(&f, &p.with_g(-p.g), &g).unwrap();
        assert!(h1.max_abs_diff(&h2_neg) < 1e-10);
    }

    #[test]
    fn ahm2_matches_matrix_propagation() {
        let p = ModelParams::resonant(1.0, 0.1, 46).unwrap();
        let f = FieldState::number(6, p.n_max).unwrap();
        let g = grid(100.0, 401);
        let analytic = survival_ahm2_analytic(&f, &p, &g).unwrap();
        let h2 = crate::models::build_h2_explicit(&p).unwrap();
        let psi0 = JointState::pure(Spin::Up, &f);
        let propagated = propagate_survival(ModelTag::Ahm2, &h2, &psi0, &g).unwrap();
        assert!(analytic.max_abs_diff(&propagated) < 1e-8);
    }

    #[test]
    fn up_vacuum_decomposes_over_xi0_and_first_pair() {
        // Expansion of |up,0> in the H2 eigenbasis: the xi_pm specials carry
        // no |up,0> component; the weight splits between xi_0 (one half) and
        // the n = 0 pair (the other half).
        let p = ModelParams::resonant(1.0, 0.1, 30).unwrap();
        let f = FieldState::number(0, p.n_max).unwrap();
        let psi0 = JointState::pure(Spin::Up, &f);
        let basis = full_eigenbasis(AhmModel::H2, &p).unwrap();
        let mut xi_pm_weight = 0.0;
        let mut xi0_weight = 0.0;
        let mut pair0_weight = 0.0;
        let mut rest = 0.0;
        for rec in &basis {
            let c = crate::fock::inner(&rec.vector, &psi0).unwrap().norm_sqr();
            match rec.label {
                crate::spectra::EigenLabel::Special(0) | crate::spectra::EigenLabel::Special(1) => {
                    xi_pm_weight += c
                }
                crate::spectra::EigenLabel::Special(2) => xi0_weight += c,
                crate::spectra::EigenLabel::Pair { n: 0, .. } => pair0_weight += c,
                _ => rest += c,
            }
        }
        assert_abs_diff_eq!(xi_pm_weight, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(xi0_weight, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(pair0_weight, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(rest, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn coherent_revival_near_jcm_estimate() {
        // alpha = 8: first revival of the closed-form JCM series near
        // 2 pi sqrt(64) / g.
        let p = ModelParams::resonant(1.0, 0.1, 164).unwrap();
        let f = FieldState::coherent(C64::new(8.0, 0.0), p.n_max).unwrap();
        let g = TimeGrid::new(420.0, 580.0, 801).unwrap();
        let series = survival_jcm_analytic(&f, &p, &g).unwrap();
        assert!(series.max() > 0.65);
        // and the mid-collapse region is quiet
        let quiet = TimeGrid::new(100.0, 300.0, 801).unwrap();
        let quiet_series = survival_jcm_analytic(&f, &p, &quiet).unwrap();
        assert!(quiet_series.max() < 0.6);
    }

    #[test]
    fn compare_models_orders_and_filters() {
        let p = ModelParams::resonant(1.0, 0.1, 46).unwrap();
        let f = FieldState::number(6, p.n_max).unwrap();
        let g = grid(10.0, 21);
        let table =
            compare_models(&f, &p, &g, &[ModelTag::Jcm, ModelTag::Rh, ModelTag::Ahm1]).unwrap();
        let tags: Vec<ModelTag> = table.iter().map(|s| s.model).collect();
        assert_eq!(tags, vec![ModelTag::Rh, ModelTag::Ahm1, ModelTag::Jcm]);
        assert!(table.iter().all(|s| s.p.len() == 21));
        assert!(matches!(compare_models(&f, &p, &g, &[]), Err(Error::EmptyModelSet)));
    }

    #[test]
    fn dominant_frequency_of_pure_tone() {
        let times: Vec<f64> = (0..4000).map(|i| i as f64 * 0.025).collect();
        let freq = 0.529;
        let p: Vec<f64> = times.iter().map(|&t| 0.5 + 0.5 * (freq * t).cos()).collect();
        let series = SurvivalSeries { model: ModelTag::Jcm, times, p };
        let measured = dominant_angular_frequency(&series);
        assert!((measured - freq).abs() < 0.2 * frequency_bin_width(&series));
    }

    #[test]
    fn band_power_detects_fast_component() {
        let times: Vec<f64> = (0..4000).map(|i| i as f64 * 0.025).collect();
        let slow: Vec<f64> = times.iter().map(|&t| 0.5 + 0.3 * (0.5 * t).cos()).collect();
        let mixed: Vec<f64> = times
            .iter()
            .map(|&t| 0.5 + 0.3 * (0.5 * t).cos() + 0.05 * (2.0 * t).cos())
            .collect();
        let slow_series = SurvivalSeries { model: ModelTag::Jcm, times: times.clone(), p: slow };
        let mixed_series = SurvivalSeries { model: ModelTag::Ahm1, times, p: mixed };
        let band = (1.8, 2.2);
        let ratio = band_power(&mixed_series, band.0, band.1)
            / band_power(&slow_series, band.0, band.1).max(f64::MIN_POSITIVE);
        assert!(ratio > 10.0);
    }

    proptest! {
        // Rotation invariance of the pair overlaps:
        // |F_minus|^2 + |F_plus|^2 = (|<n|f>|^2 + |<n+2|f>|^2)/2.
        #[test]
        fn overlap_norm_identity(n in 0usize..30, re in -3.0f64..3.0, im in -3.0f64..3.0) {
            let p = ModelParams::resonant(1.0, 0.1, 60).unwrap();
            let alpha = C64::new(re, im);
            let f = FieldState::coherent(alpha, p.n_max).unwrap();
            let (fm, fp) = overlaps_f(n, &f, &p).unwrap();
            let lhs = fm.norm_sqr() + fp.norm_sqr();
            let rhs = 0.5 * (f.amp(n).norm_sqr() + f.amp(n + 2).norm_sqr());
            prop_assert!((lhs - rhs).abs() < 1e-14);
        }
    }
}
