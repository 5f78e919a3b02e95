//! Closed-form metrological gain for twirling-symmetric families.
//!
//! Isotropic states (invariant under `U ⊗ U*`) and Werner states (invariant
//! under `U ⊗ U`) admit exact gain formulas for any local Hamiltonian whose
//! two parts share an eigenvalue vector `h`: everything depends on the state
//! parameter and a single shape functional of the spectrum,
//!
//! ```text
//! r(H) = (d·Σ h_k² − (Σ h_k)²) / (2 (h_max − h_min)²),
//! ```
//!
//! maximized by the alternating diagonal `diag(+1, −1, +1, …)` and minimized
//! by `diag(+1, −1, 0, …, 0)`. The formulas give usefulness thresholds in
//! closed form, and — because twirling cannot increase the gain — lower
//! bounds on the gain of an arbitrary state from just its entanglement
//! fraction or flip expectation. These are the ground truth the numeric
//! optimizer is validated against.

use crate::error::{Error, Result};
use crate::linalg::{spectral_decompose, HermitianOperator};

/// Parity offset `α`: 1 for odd local dimension, 0 for even. Odd dimensions
/// cannot balance the alternating diagonal, which costs `α` in every best
/// gain below.
pub fn parity_offset(d: usize) -> f64 {
    (d % 2) as f64
}

/// The single-party Hamiltonian with the largest shape ratio: alternating
/// `diag(+1, −1, +1, …)`.
pub fn best_diagonal(d: usize) -> HermitianOperator {
    let diag: Vec<f64> = (0..d).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect();
    HermitianOperator::from_diagonal(&diag)
}

/// The single-party Hamiltonian with the smallest shape ratio:
/// `diag(+1, −1, 0, …, 0)`.
pub fn worst_diagonal(d: usize) -> HermitianOperator {
    let mut diag = vec![0.0; d];
    diag[0] = 1.0;
    diag[1] = -1.0;
    HermitianOperator::from_diagonal(&diag)
}

/// Shape ratio `r(H)` of a single-party Hamiltonian; only its spectrum
/// matters. Errors when the spectrum has no spread (`H` proportional to the
/// identity), where the gain is undefined.
pub fn hamiltonian_ratio(h: &HermitianOperator) -> Result<f64> {
    let eigs = spectral_decompose(h)?.eigenvalues;
    let d = eigs.len() as f64;
    let sum: f64 = eigs.iter().sum();
    let sum_sq: f64 = eigs.iter().map(|x| x * x).sum();
    let range = eigs[eigs.len() - 1] - eigs[0];
    if range < 1e-12 {
        return Err(Error::Degenerate(
            "Hamiltonian is proportional to the identity; the shape ratio is undefined".into(),
        ));
    }
    Ok((d * sum_sq - sum * sum) / (2.0 * range * range))
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "local dimension must be at least 2, got {d}"
        )));
    }
    Ok(())
}

fn check_weight(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "entangled weight must lie in [0, 1], got {p}"
        )));
    }
    Ok(())
}

fn check_phi(phi: f64) -> Result<()> {
    if !(-1.0..=0.0).contains(&phi) {
        return Err(Error::InvalidArgument(format!(
            "flip weight must lie in [-1, 0] for the gain formula, got {phi}"
        )));
    }
    Ok(())
}

/// Gain of the isotropic state with entangled weight `p` on dimension `d`,
/// measured with `H` on one party and its conjugate on the other:
/// `16 p² / (p d² + 2(1 − p)) · r(H)`.
pub fn isotropic_gain(d: usize, p: f64, h: &HermitianOperator) -> Result<f64> {
    check_dim(d)?;
    check_weight(p)?;
    if h.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "Hamiltonian dimension {} does not match d = {d}",
            h.dim()
        )));
    }
    let r = hamiltonian_ratio(h)?;
    let df = d as f64;
    Ok(16.0 * p * p / (p * df * df + 2.0 * (1.0 - p)) * r)
}

/// Largest gain over local Hamiltonians for the isotropic state:
/// `2 p² (d² − α) / (p d² + 2(1 − p))`, reached by [`best_diagonal`].
pub fn isotropic_gain_best(d: usize, p: f64) -> Result<f64> {
    check_dim(d)?;
    check_weight(p)?;
    let df = d as f64;
    let a = parity_offset(d);
    Ok(2.0 * p * p * (df * df - a) / (p * df * df + 2.0 * (1.0 - p)))
}

/// Entangled weight above which the isotropic state is useful (best gain
/// exceeds one). Converges to 1/2 as `d → ∞`.
pub fn isotropic_threshold(d: usize) -> Result<f64> {
    check_dim(d)?;
    let df = d as f64;
    let a = parity_offset(d);
    let m = df * df - a;
    let half_lin = (df * df - 2.0) / (4.0 * m);
    Ok(half_lin + (half_lin * half_lin + 1.0 / m).sqrt())
}

/// Gain of the Werner state with flip weight `φ ∈ [−1, 0]` on dimension
/// `d`, measured with `H` on one party and `−H` on the other:
/// `8 φ² / (d² + φ d) · r(H)`.
pub fn werner_gain(d: usize, phi: f64, h: &HermitianOperator) -> Result<f64> {
    check_dim(d)?;
    check_phi(phi)?;
    if h.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "Hamiltonian dimension {} does not match d = {d}",
            h.dim()
        )));
    }
    let r = hamiltonian_ratio(h)?;
    let df = d as f64;
    Ok(8.0 * phi * phi / (df * df + phi * df) * r)
}

/// Largest gain over local Hamiltonians for the Werner state:
/// `φ² (d² − α) / (d² + φ d)`, reached by [`best_diagonal`] and maximal at
/// `φ = −1`.
pub fn werner_gain_best(d: usize, phi: f64) -> Result<f64> {
    check_dim(d)?;
    check_phi(phi)?;
    let df = d as f64;
    let a = parity_offset(d);
    Ok(phi * phi * (df * df - a) / (df * df + phi * df))
}

/// Flip weight below which the Werner state is useful (best gain exceeds
/// one); always in `(−1, 0)`.
pub fn werner_threshold(d: usize) -> Result<f64> {
    check_dim(d)?;
    let df = d as f64;
    let a = parity_offset(d);
    let m = df * df - a;
    let half_lin = df / (2.0 * m);
    Ok(half_lin - (half_lin * half_lin + df * df / m).sqrt())
}

/// Lower bound on the optimal gain of ANY state with entanglement fraction
/// `F` on `d × d`: twirling to the isotropic state cannot increase the
/// gain, so the isotropic state's best gain at the same fraction bounds it
/// from below. Zero for `F ≤ 1/d²` (at or below white noise).
pub fn twirl_lower_bound_isotropic(fraction: f64, d: usize) -> Result<f64> {
    check_dim(d)?;
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidArgument(format!(
            "entanglement fraction must lie in [0, 1], got {fraction}"
        )));
    }
    let df = d as f64;
    if fraction <= 1.0 / (df * df) {
        return Ok(0.0);
    }
    let a = parity_offset(d);
    let num = 2.0 * (df * df - a) * (df * df * fraction - 1.0).powi(2);
    let den = df * df * (df * df - 1.0) * (1.0 - 2.0 * fraction + df * df * fraction);
    Ok(num / den)
}

/// Lower bound on the optimal gain of ANY state with flip expectation
/// `⟨V⟩` on `d × d`, via twirling to the Werner state with
/// `φ = (d⟨V⟩ − 1)/(d − ⟨V⟩)`. Zero when that weight is positive (the
/// formula's regime does not certify usefulness there).
pub fn twirl_lower_bound_werner(flip_expectation: f64, d: usize) -> Result<f64> {
    check_dim(d)?;
    if !(-1.0..=1.0).contains(&flip_expectation) {
        return Err(Error::InvalidArgument(format!(
            "flip expectation must lie in [-1, 1], got {flip_expectation}"
        )));
    }
    let df = d as f64;
    let phi = (df * flip_expectation - 1.0) / (df - flip_expectation);
    if phi > 0.0 {
        return Ok(0.0);
    }
    werner_gain_best(d, phi.max(-1.0))
}

/// A family's closed-form summary: the best gain at the given parameter,
/// the single-party Hamiltonian that reaches it, and the usefulness
/// threshold.
#[derive(Debug, Clone)]
pub struct AnalyticGain {
    /// Best gain at the requested state parameter.
    pub gain: f64,
    /// Single-party Hamiltonian reaching it (used on both parties, the
    /// second conjugated or negated depending on the family).
    pub optimal_part: HermitianOperator,
    /// State parameter at which the best gain crosses one.
    pub threshold: f64,
}

/// Closed-form summary for the isotropic family at entangled weight `p`.
pub fn isotropic_analysis(d: usize, p: f64) -> Result<AnalyticGain> {
    Ok(AnalyticGain {
        gain: isotropic_gain_best(d, p)?,
        optimal_part: best_diagonal(d),
        threshold: isotropic_threshold(d)?,
    })
}

/// Closed-form summary for the Werner family at flip weight `φ`.
pub fn werner_analysis(d: usize, phi: f64) -> Result<AnalyticGain> {
    Ok(AnalyticGain {
        gain: werner_gain_best(d, phi)?,
        optimal_part: best_diagonal(d),
        threshold: werner_threshold(d)?,
    })
}
