//! Core metrological quantities for phase estimation with local Hamiltonians.
//!
//! The estimation scenario: a state `ρ` acquires a phase `θ` under
//! `U = exp(−iθH)` where `H = Σₙ Hₙ` acts locally on each subsystem, and `θ`
//! is read out from some observable `M`. This module computes
//!
//! * the quantum Fisher information [`qfi`], the best achievable `1/Var(θ)`
//!   over all measurements,
//! * the error-propagation variance [`error_propagation`] of a concrete
//!   observable,
//! * the optimal observable [`sld`] (symmetric logarithmic derivative, up to
//!   normalization) that saturates the Fisher bound,
//! * the largest Fisher information separable states can reach under the same
//!   local Hamiltonian, [`separable_bound`], and
//! * their ratio, the metrological gain [`gain_for_hamiltonian`]: a state is "useful"
//!   when its gain exceeds one, since it then beats every separable state at
//!   the same estimation task.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{embed_local, spectral_decompose, ComplexMatrix, HermitianOperator};
use crate::states::DensityMatrix;

/// Eigenvalue-pair cutoff for Fisher-information and SLD sums: terms with
/// `λ_k + λ_l` at or below this are dropped. Results are stable for cutoffs
/// anywhere in `[1e-14, 1e-10]`; rank-deficient states (pure or projected)
/// rely on it.
pub const SPECTRAL_CUTOFF: f64 = 1e-12;

/// Separable bounds at or below this are treated as zero (both parts
/// proportional to the identity), making the gain undefined.
const SEP_BOUND_FLOOR: f64 = 1e-12;

/// A Hamiltonian acting locally on each subsystem: `H = Σₙ 𝟙⊗…⊗Hₙ⊗…⊗𝟙`,
/// with each part's eigenvalues confined to `[−cₙ, cₙ]` for stated bound
/// constants `cₙ > 0`.
///
/// The bounds matter because the separable-state comparison is only fair at
/// fixed operator norms; optimizers saturate them (all eigenvalues `±cₙ`).
/// Spectral ranges are computed once at construction, so
/// [`separable_bound`] is infallible.
#[derive(Debug, Clone)]
pub struct LocalHamiltonian {
    parts: Vec<HermitianOperator>,
    bounds: Vec<f64>,
    ranges: Vec<(f64, f64)>,
}

impl LocalHamiltonian {
    /// Builds a Hamiltonian from `(part, bound)` pairs, one per subsystem in
    /// composite-index order (leftmost most significant). Requires at least
    /// two parts, every bound positive, and every part's eigenvalues within
    /// `[−cₙ − 1e-9, cₙ + 1e-9]`.
    pub fn from_parts(parts: Vec<(HermitianOperator, f64)>) -> Result<Self> {
        if parts.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "a local Hamiltonian needs at least two subsystem parts, got {}",
                parts.len()
            )));
        }
        let mut ops = Vec::with_capacity(parts.len());
        let mut bounds = Vec::with_capacity(parts.len());
        let mut ranges = Vec::with_capacity(parts.len());
        for (index, (op, c)) in parts.into_iter().enumerate() {
            if !c.is_finite() || c <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "bound constant for part {index} must be positive and finite, got {c}"
                )));
            }
            let spectrum = spectral_decompose(&op)?;
            let min = spectrum.eigenvalues[0];
            let max = spectrum.eigenvalues[spectrum.eigenvalues.len() - 1];
            if min < -c - 1e-9 || max > c + 1e-9 {
                return Err(Error::InvalidArgument(format!(
                    "part {index} has eigenvalues in [{min:.12}, {max:.12}], \
                     outside the stated bound ±{c}"
                )));
            }
            ops.push(op);
            bounds.push(c);
            ranges.push((min, max));
        }
        Ok(Self {
            parts: ops,
            bounds,
            ranges,
        })
    }

    /// Builds a two-subsystem Hamiltonian `H₁⊗𝟙 + 𝟙⊗H₂` with bounds
    /// `c₁, c₂`.
    pub fn bipartite(h1: HermitianOperator, h2: HermitianOperator, c1: f64, c2: f64) -> Result<Self> {
        Self::from_parts(vec![(h1, c1), (h2, c2)])
    }

    /// Builds a Hamiltonian whose bound constants are each part's spectral
    /// radius (the tightest valid choice). Rejects parts that are zero.
    pub fn with_derived_bounds(parts: Vec<HermitianOperator>) -> Result<Self> {
        let mut pairs = Vec::with_capacity(parts.len());
        for op in parts {
            let spectrum = spectral_decompose(&op)?;
            let min = spectrum.eigenvalues[0];
            let max = spectrum.eigenvalues[spectrum.eigenvalues.len() - 1];
            let radius = min.abs().max(max.abs());
            pairs.push((op, radius));
        }
        Self::from_parts(pairs)
    }

    /// The per-subsystem operators, in composite-index order.
    pub fn parts(&self) -> &[HermitianOperator] {
        &self.parts
    }

    /// The per-subsystem bound constants `cₙ`.
    pub fn bounds(&self) -> &[f64] {
        &self.bounds
    }

    /// First subsystem's part.
    pub fn h1(&self) -> &HermitianOperator {
        &self.parts[0]
    }

    /// Second subsystem's part.
    pub fn h2(&self) -> &HermitianOperator {
        &self.parts[1]
    }

    /// First subsystem's bound constant.
    pub fn c1(&self) -> f64 {
        self.bounds[0]
    }

    /// Second subsystem's bound constant.
    pub fn c2(&self) -> f64 {
        self.bounds[1]
    }

    /// Per-subsystem dimensions.
    pub fn dims(&self) -> Vec<usize> {
        self.parts.iter().map(HermitianOperator::dim).collect()
    }

    /// Total Hilbert-space dimension (product of the part dimensions).
    pub fn total_dim(&self) -> usize {
        self.parts.iter().map(HermitianOperator::dim).product()
    }

    /// The full operator `Σₙ 𝟙⊗…⊗Hₙ⊗…⊗𝟙` on the composite space.
    pub fn total_operator(&self) -> HermitianOperator {
        let dims = self.dims();
        let total = self.total_dim();
        let mut sum = ComplexMatrix::zeros(total, total);
        for (site, part) in self.parts.iter().enumerate() {
            let embedded = embed_local(part.matrix(), &dims, site)
                .expect("parts embed into their own dimension list");
            sum = sum.add(&embedded);
        }
        HermitianOperator::new(sum).expect("sum of Hermitian embeddings is Hermitian")
    }
}

/// Outcome of an optimization or a direct gain evaluation.
#[derive(Debug, Clone)]
pub struct GainResult {
    /// Fisher information divided by the separable bound; above one means the
    /// state outperforms every separable state.
    pub gain: f64,
    /// Quantum Fisher information of the state with the reported Hamiltonian.
    pub qfi: f64,
    /// Largest Fisher information separable states reach with the same
    /// Hamiltonian.
    pub sep_bound: f64,
    /// The local Hamiltonian achieving (or given for) this gain.
    pub hamiltonian: LocalHamiltonian,
    /// Observable saturating the Fisher bound for this state and Hamiltonian.
    pub measurement: HermitianOperator,
    /// Iterations used by the best optimizer trial (zero for direct
    /// evaluations).
    pub iterations: usize,
    /// Per-iteration record of the best trial: the best gain-normalized
    /// objective (`1/Var(θ)` divided by the current separable bound) reached
    /// up to each iteration. Non-decreasing by construction even when bound
    /// rebalancing moves the instantaneous objective down; the last entry
    /// equals `gain`.
    pub trace: Vec<f64>,
}

/// Largest quantum Fisher information any separable state attains under the
/// Hamiltonian: `Σₙ (max eig Hₙ − min eig Hₙ)²`. With every part's spectrum
/// saturating `±cₙ` this equals `4Σₙcₙ²`.
pub fn separable_bound(h: &LocalHamiltonian) -> f64 {
    h.ranges.iter().map(|(lo, hi)| (hi - lo) * (hi - lo)).sum()
}

fn check_dims(rho: &DensityMatrix, op_dim: usize, what: &str) -> Result<()> {
    if rho.total_dim() != op_dim {
        return Err(Error::DimensionMismatch(format!(
            "{what} has dimension {} but the state has total dimension {}",
            op_dim,
            rho.total_dim()
        )));
    }
    Ok(())
}

/// Quantum Fisher information of `ρ` for the generator `H`:
/// `2 Σ_{k,l} (λ_k−λ_l)²/(λ_k+λ_l) |⟨k|H|l⟩|²` over the eigendecomposition
/// `ρ = Σ λ_k |k⟩⟨k|`, with pairs below [`SPECTRAL_CUTOFF`] dropped. For pure
/// states this is `4·Var(H)`.
pub fn qfi(rho: &DensityMatrix, h: &HermitianOperator) -> Result<f64> {
    check_dims(rho, h.dim(), "the Hamiltonian")?;
    let lambdas = rho.eigenvalues();
    let he = rho.spectrum().to_eigenbasis(h.matrix());
    let n = lambdas.len();
    let mut acc = 0.0;
    for k in 0..n {
        for l in (k + 1)..n {
            let sum = lambdas[k] + lambdas[l];
            if sum <= SPECTRAL_CUTOFF {
                continue;
            }
            let diff = lambdas[k] - lambdas[l];
            acc += diff * diff / sum * he.at(k, l).norm_sqr();
        }
    }
    Ok(4.0 * acc)
}

/// Quantum Fisher information of `ρ` for the full operator of a local
/// Hamiltonian; the per-subsystem dimensions must match the state's.
pub fn qfi_local(rho: &DensityMatrix, h: &LocalHamiltonian) -> Result<f64> {
    if rho.dims() != h.dims() {
        return Err(Error::DimensionMismatch(format!(
            "local Hamiltonian dims {:?} do not match state dims {:?}",
            h.dims(),
            rho.dims()
        )));
    }
    qfi(rho, &h.total_operator())
}

/// Result of the error-propagation formula `Var(θ) = Var(M)/⟨i[M,H]⟩²`.
///
/// When the commutator expectation vanishes the observable carries no phase
/// signal and the variance is infinite; that case is tagged rather than made
/// an error because optimizers legitimately pass through such points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ErrorPropagation {
    /// A finite phase-estimation variance.
    Finite {
        /// `Var(M)/⟨i[M,H]⟩²`.
        variance: f64,
    },
    /// Vanishing commutator expectation: no signal, infinite variance.
    Degenerate,
}

impl ErrorPropagation {
    /// The variance, if finite.
    pub fn variance(self) -> Option<f64> {
        match self {
            Self::Finite { variance } => Some(variance),
            Self::Degenerate => None,
        }
    }

    /// `1/Var(θ)` in Fisher-information units; zero for the degenerate case.
    pub fn inverse(self) -> f64 {
        match self {
            Self::Finite { variance } => 1.0 / variance,
            Self::Degenerate => 0.0,
        }
    }

    /// Whether the commutator expectation vanished.
    pub fn is_degenerate(self) -> bool {
        matches!(self, Self::Degenerate)
    }
}

/// Phase-estimation variance of reading `θ` from observable `M` when the
/// generator is `H`: `Var(M)/⟨i[M,H]⟩²`. Satisfies
/// `1/Var(θ) ≤ qfi(ρ, H)`, with equality for `M` = [`sld`]. Commutator
/// expectations with square at or below `1e-24` yield
/// [`ErrorPropagation::Degenerate`].
pub fn error_propagation(
    rho: &DensityMatrix,
    h: &HermitianOperator,
    m: &HermitianOperator,
) -> Result<ErrorPropagation> {
    check_dims(rho, h.dim(), "the Hamiltonian")?;
    check_dims(rho, m.dim(), "the observable")?;
    // ⟨i[M,H]⟩ = i·Tr(ρMH) − i·Tr(ρHM) = −2·Im Tr(ρMH).
    let mh = m.matrix().matmul(h.matrix());
    let mut t = Complex64::new(0.0, 0.0);
    let n = rho.total_dim();
    for i in 0..n {
        for k in 0..n {
            t += rho.matrix().at(i, k) * mh.at(k, i);
        }
    }
    let comm = -2.0 * t.im;
    if comm * comm <= 1e-24 {
        return Ok(ErrorPropagation::Degenerate);
    }
    let m2 = m.matrix().matmul(m.matrix());
    let mean_sq = {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                acc += rho.matrix().at(i, k) * m2.at(k, i);
            }
        }
        acc.re
    };
    let mean = m.expectation(rho.matrix());
    let variance = mean_sq - mean * mean;
    Ok(ErrorPropagation::Finite {
        variance: variance / (comm * comm),
    })
}

/// The optimal observable for estimating the phase generated by `H` on `ρ`
/// (the symmetric logarithmic derivative up to convention):
/// `M = 2i Σ_{k,l} (λ_k−λ_l)/(λ_k+λ_l) ⟨k|H|l⟩ |k⟩⟨l|`, pairs below
/// [`SPECTRAL_CUTOFF`] dropped. Satisfies `Tr(Mρ) = 0`, `Tr(M²ρ) = qfi`, and
/// `1/Var(θ)_M = qfi`.
pub fn sld(rho: &DensityMatrix, h: &HermitianOperator) -> Result<HermitianOperator> {
    check_dims(rho, h.dim(), "the Hamiltonian")?;
    let lambdas = rho.eigenvalues();
    let he = rho.spectrum().to_eigenbasis(h.matrix());
    let n = lambdas.len();
    let mut me = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        for l in 0..n {
            if k == l {
                continue;
            }
            let sum = lambdas[k] + lambdas[l];
            if sum <= SPECTRAL_CUTOFF {
                continue;
            }
            let factor = 2.0 * (lambdas[k] - lambdas[l]) / sum;
            me.set(k, l, Complex64::new(0.0, factor) * he.at(k, l));
        }
    }
    let m = rho.spectrum().from_eigenbasis(&me);
    HermitianOperator::new(m)
}

/// Metrological gain of `ρ` under a fixed local Hamiltonian:
/// `qfi / separable_bound`. Fails with [`Error::UndefinedGain`] when the
/// separable bound vanishes (every part proportional to the identity).
pub fn gain_for_hamiltonian(rho: &DensityMatrix, h: &LocalHamiltonian) -> Result<GainResult> {
    let sep = separable_bound(h);
    if sep <= SEP_BOUND_FLOOR {
        return Err(Error::UndefinedGain);
    }
    let fisher = qfi_local(rho, h)?;
    let total = h.total_operator();
    let measurement = sld(rho, &total)?;
    let gain = fisher / sep;
    Ok(GainResult {
        gain,
        qfi: fisher,
        sep_bound: sep,
        hamiltonian: h.clone(),
        measurement,
        iterations: 0,
        trace: vec![gain],
    })
}
