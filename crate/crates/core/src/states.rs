//! Density matrices and constructors for the state families under study.
//!
//! A [`DensityMatrix`] couples a validated positive-semidefinite unit-trace
//! matrix with a list of subsystem dimensions and caches its spectral
//! decomposition (most consumers — Fisher information, see-saw iterations —
//! work in the state's eigenbasis).
//!
//! Three noise parametrizations appear in the literature for the same
//! families and are kept as separate constructors here to avoid conversion
//! bugs:
//!
//! * [`noisy_max_entangled`]`(d, p)` — `p` is the *white-noise weight*:
//!   `(1-p)|Φ⟩⟨Φ| + p·1/d²`;
//! * [`isotropic_state`]`(d, F)` — `F` is the *entanglement fraction*
//!   `Tr(ρ|Φ⟩⟨Φ|)`; the projector weight is `(F·d²−1)/(d²−1)`, i.e. the
//!   complement of the noise weight above;
//! * [`werner_state`]`(d, φ)` — `φ` weights the flip operator `V`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{
    partial_trace, spectral_decompose, ComplexMatrix, HermitianOperator, SpectralDecomposition,
};

/// Negativity window for constructor-built states: eigenvalues in
/// `[-NEGATIVITY_CLIP, 0)` are clipped to zero and the spectrum renormalized;
/// anything more negative is a hard error.
pub const NEGATIVITY_CLIP: f64 = 1e-10;

/// Negativity window for states ingested from files, which may carry more
/// rounding damage than freshly constructed ones.
pub const NEGATIVITY_CLIP_FILE: f64 = 1e-6;

/// Largest tolerated deviation of the trace from one before rejection
/// (within the window the matrix is renormalized).
pub const TRACE_TOL: f64 = 1e-6;

/// Seed for deterministic state sampling; the same seed always reproduces the
/// same state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomSeed(pub u64);

impl RandomSeed {
    /// A ChaCha stream seeded by this value; `stream` separates independent
    /// substreams (e.g. optimizer trials) derived from one user-facing seed.
    pub(crate) fn rng(self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(stream);
        rng
    }
}

/// Schmidt coefficients of a bipartite pure state: strictly positive,
/// descending, with unit square-sum.
///
/// The constructor sorts, drops exact zeros, and normalizes, so any
/// nonnegative, not-all-zero input is accepted.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtVector {
    coeffs: Vec<f64>,
}

impl SchmidtVector {
    /// Builds a Schmidt vector from raw nonnegative coefficients.
    pub fn new(mut coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument(
                "Schmidt vector must have at least one coefficient".into(),
            ));
        }
        if coeffs.iter().any(|&x| !x.is_finite() || x < 0.0) {
            return Err(Error::InvalidArgument(
                "Schmidt coefficients must be finite and nonnegative".into(),
            ));
        }
        coeffs.sort_by(|a, b| b.partial_cmp(a).expect("finite by validation"));
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        let norm_sq: f64 = coeffs.iter().map(|x| x * x).sum();
        if norm_sq <= 0.0 {
            return Err(Error::InvalidArgument(
                "Schmidt vector must have a nonzero coefficient".into(),
            ));
        }
        let norm = norm_sq.sqrt();
        for x in &mut coeffs {
            *x /= norm;
        }
        Ok(Self { coeffs })
    }

    /// The coefficients, descending, unit square-sum.
    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Number of nonzero coefficients.
    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }
}

/// A positive semidefinite, unit-trace operator over a tensor product of
/// subsystems, with its spectral decomposition cached.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
    spectrum: SpectralDecomposition,
}

impl DensityMatrix {
    /// Validates a candidate density matrix: Hermitian within 1e-8
    /// (symmetrized), trace within [`TRACE_TOL`] of one (renormalized),
    /// eigenvalues within the [`NEGATIVITY_CLIP`] window (clipped).
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        Self::validated(matrix, dims, NEGATIVITY_CLIP)
    }

    /// As [`DensityMatrix::new`] with an explicit negativity window; file
    /// ingestion uses the wider [`NEGATIVITY_CLIP_FILE`].
    pub(crate) fn validated(
        matrix: ComplexMatrix,
        dims: Vec<usize>,
        negativity_window: f64,
    ) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidArgument(
                "subsystem dimensions must be a nonempty list of positive integers".into(),
            ));
        }
        let total: usize = dims.iter().product();
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        if matrix.rows() != total {
            return Err(Error::DimensionMismatch(format!(
                "subsystem dimensions {:?} multiply to {}, but the matrix is {}x{}",
                dims,
                total,
                matrix.rows(),
                matrix.cols()
            )));
        }

        // Hermiticity (with symmetrization inside the tolerance).
        let hermitian = HermitianOperator::new(matrix)?;

        // Trace normalization. Rescaling is skipped when the trace already
        // agrees with one to near machine precision, so that validating an
        // already-validated matrix leaves its entries bit-for-bit unchanged
        // (files round-trip byte-stably).
        let trace = hermitian.matrix().trace().re;
        let deviation = (trace - 1.0).abs();
        if deviation > TRACE_TOL {
            return Err(Error::InvalidTrace {
                deviation,
                tolerance: TRACE_TOL,
            });
        }
        let normalized = if deviation > 1e-12 {
            HermitianOperator::new(hermitian.matrix().scale(1.0 / trace)).expect("still Hermitian")
        } else {
            hermitian
        };

        // Positivity with clipping window. Clipping sanitizes the cached
        // spectrum (which all spectral computations consume); the stored
        // matrix is kept as received so that re-validation is idempotent.
        let mut spectrum = spectral_decompose(&normalized)?;
        let min_eig = spectrum.eigenvalues[0];
        if min_eig < -negativity_window {
            return Err(Error::NotPositive {
                eigenvalue: min_eig,
                tolerance: negativity_window,
            });
        }
        if min_eig < 0.0 {
            for lam in &mut spectrum.eigenvalues {
                if *lam < 0.0 {
                    *lam = 0.0;
                }
            }
            let sum: f64 = spectrum.eigenvalues.iter().sum();
            for lam in &mut spectrum.eigenvalues {
                *lam /= sum;
            }
        }

        Ok(Self {
            matrix: normalized.matrix().clone(),
            dims,
            spectrum,
        })
    }

    /// The underlying matrix.
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Per-subsystem dimensions, leftmost most significant in the composite
    /// index.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Total Hilbert-space dimension.
    pub fn total_dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Eigenvalues in ascending order (clipped and renormalized at
    /// construction).
    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum.eigenvalues
    }

    /// Cached spectral decomposition.
    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    /// `Tr(ρ²)`, computed from the cached spectrum.
    pub fn purity(&self) -> f64 {
        self.spectrum.eigenvalues.iter().map(|l| l * l).sum()
    }

    /// The two party dimensions of a bipartite state.
    pub fn bipartite_dims(&self) -> Result<(usize, usize)> {
        match self.dims.as_slice() {
            [a, b] => Ok((*a, *b)),
            other => Err(Error::DimensionMismatch(format!(
                "expected a bipartite state, found {} subsystems {:?}",
                other.len(),
                other
            ))),
        }
    }

    /// Reduced state of the listed subsystems (strictly increasing indices).
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let m = partial_trace(&self.matrix, &self.dims, keep)?;
        let dims = keep.iter().map(|&k| self.dims[k]).collect();
        DensityMatrix::new(m, dims)
    }
}

/// Builds a pure state from amplitudes (normalized internally).
pub fn pure_state(amplitudes: &[Complex64], dims: &[usize]) -> Result<DensityMatrix> {
    let total: usize = dims.iter().product();
    if amplitudes.len() != total {
        return Err(Error::DimensionMismatch(format!(
            "{} amplitudes for total dimension {}",
            amplitudes.len(),
            total
        )));
    }
    let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    if norm_sq <= 0.0 || !norm_sq.is_finite() {
        return Err(Error::InvalidArgument(
            "state vector must be normalizable".into(),
        ));
    }
    let n = amplitudes.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, amplitudes[i] * amplitudes[j].conj() / norm_sq);
        }
    }
    DensityMatrix::new(m, dims.to_vec())
}

/// The d×d maximally entangled state `(1/√d) Σ |kk⟩` as a density matrix.
pub fn maximally_entangled(d: usize) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "maximally entangled state needs local dimension ≥ 2, got {d}"
        )));
    }
    let mut psi = vec![Complex64::new(0.0, 0.0); d * d];
    let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    for k in 0..d {
        psi[k * d + k] = amp;
    }
    pure_state(&psi, &[d, d])
}

/// Maximally entangled state mixed with white noise:
/// `(1-p)|Φ⟩⟨Φ| + p·1/d²` where `p` is the noise weight.
pub fn noisy_max_entangled(d: usize, p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "noise weight must be in [0, 1], got {p}"
        )));
    }
    let me = maximally_entangled(d)?;
    let n = d * d;
    let mut m = me.matrix().scale(1.0 - p);
    let diag = p / n as f64;
    for i in 0..n {
        m.set(i, i, m.at(i, i) + diag);
    }
    DensityMatrix::new(m, vec![d, d])
}

/// Isotropic state with entanglement fraction `F = Tr(ρ|Φ⟩⟨Φ|)`:
/// the unique `U⊗U*`-invariant state with that fraction,
/// `q|Φ⟩⟨Φ| + (1-q)·1/d²` with projector weight `q = (F·d²−1)/(d²−1)`.
pub fn isotropic_state(d: usize, fraction: f64) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "isotropic state needs local dimension ≥ 2, got {d}"
        )));
    }
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidArgument(format!(
            "entanglement fraction must be in [0, 1], got {fraction}"
        )));
    }
    let dd = (d * d) as f64;
    let q = (fraction * dd - 1.0) / (dd - 1.0);
    let me = maximally_entangled(d)?;
    let n = d * d;
    let mut m = me.matrix().scale(q);
    let diag = (1.0 - q) / dd;
    for i in 0..n {
        m.set(i, i, m.at(i, i) + diag);
    }
    DensityMatrix::new(m, vec![d, d])
}

/// Isotropic state parametrized by the projector weight `q` (the complement
/// of the white-noise weight): `q|Φ⟩⟨Φ| + (1-q)·1/d²`.
pub fn isotropic_state_from_weight(d: usize, q: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidArgument(format!(
            "projector weight must be in [0, 1], got {q}"
        )));
    }
    noisy_max_entangled(d, 1.0 - q)
}

/// Werner state `(1 + φV) / (d² + φd)` with `V` the flip (swap) operator.
pub fn werner_state(d: usize, phi: f64) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "Werner state needs local dimension ≥ 2, got {d}"
        )));
    }
    if !(-1.0..=1.0).contains(&phi) {
        return Err(Error::InvalidArgument(format!(
            "flip weight must be in [-1, 1], got {phi}"
        )));
    }
    let n = d * d;
    let denom = (n as f64) + phi * d as f64;
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        m.set(i, i, Complex64::new(1.0 / denom, 0.0));
    }
    for i in 0..d {
        for j in 0..d {
            let row = i * d + j;
            let col = j * d + i;
            m.set(row, col, m.at(row, col) + Complex64::new(phi / denom, 0.0));
        }
    }
    DensityMatrix::new(m, vec![d, d])
}

/// The two-qubit singlet `(|01⟩ - |10⟩)/√2` as a density matrix.
pub fn singlet() -> DensityMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = [
        Complex64::new(0.0, 0.0),
        Complex64::new(s, 0.0),
        Complex64::new(-s, 0.0),
        Complex64::new(0.0, 0.0),
    ];
    pure_state(&psi, &[2, 2]).expect("singlet amplitudes are valid")
}

/// Singlet mixed with white noise: `(1-p)|Ψ⁻⟩⟨Ψ⁻| + p·1/4`.
pub fn noisy_singlet(p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "noise weight must be in [0, 1], got {p}"
        )));
    }
    let mut m = singlet().matrix().scale(1.0 - p);
    for i in 0..4 {
        m.set(i, i, m.at(i, i) + p / 4.0);
    }
    DensityMatrix::new(m, vec![2, 2])
}

/// Singlet mixed with *non-white* noise: `(|Ψ⁻⟩⟨Ψ⁻| + |00⟩⟨00|)/2`.
///
/// On its own this state is exactly at the separable limit (gain 1), but it
/// becomes strictly useful given an ancilla or a second copy.
pub fn nonwhite_noise_singlet() -> DensityMatrix {
    let mut m = singlet().matrix().scale(0.5);
    m.set(0, 0, m.at(0, 0) + Complex64::new(0.5, 0.0));
    DensityMatrix::new(m, vec![2, 2]).expect("rank-2 mixture is valid")
}

/// Bipartite pure state with the given Schmidt coefficients on the
/// computational diagonal: `Σ σ_k |kk⟩`.
pub fn pure_from_schmidt(
    schmidt: &SchmidtVector,
    dim_a: usize,
    dim_b: usize,
) -> Result<DensityMatrix> {
    if schmidt.rank() > dim_a.min(dim_b) {
        return Err(Error::InvalidArgument(format!(
            "Schmidt rank {} exceeds min({dim_a}, {dim_b})",
            schmidt.rank()
        )));
    }
    let mut psi = vec![Complex64::new(0.0, 0.0); dim_a * dim_b];
    for (k, &s) in schmidt.coefficients().iter().enumerate() {
        psi[k * dim_b + k] = Complex64::new(s, 0.0);
    }
    pure_state(&psi, &[dim_a, dim_b])
}

/// N-party generalized GHZ state `(1/√m) Σ_{v<m} |v⟩^⊗N` with local
/// dimension `d`; `m` must be even (the optimal phase Hamiltonian pairs
/// levels) and at most `d`.
pub fn ghz_state(parties: usize, d: usize, m: usize) -> Result<DensityMatrix> {
    if parties < 2 {
        return Err(Error::InvalidArgument(format!(
            "GHZ state needs at least 2 parties, got {parties}"
        )));
    }
    if m < 2 || m > d {
        return Err(Error::InvalidArgument(format!(
            "superposition size must satisfy 2 ≤ m ≤ d, got m={m}, d={d}"
        )));
    }
    if m % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "superposition size must be even, got {m}"
        )));
    }
    let total = d.checked_pow(parties as u32).ok_or_else(|| {
        Error::InvalidArgument(format!("d^N overflows for d={d}, N={parties}"))
    })?;
    let mut psi = vec![Complex64::new(0.0, 0.0); total];
    let amp = Complex64::new(1.0 / (m as f64).sqrt(), 0.0);
    for v in 0..m {
        let mut idx = 0usize;
        for _ in 0..parties {
            idx = idx * d + v;
        }
        psi[idx] = amp;
    }
    pure_state(&psi, &vec![d; parties])
}

/// The four-qubit ring cluster state: controlled-Z on the ring edges
/// (1,2), (2,3), (3,4), (4,1) applied to `|++++⟩`. Stabilized by
/// `X_a Z_{a-1} Z_{a+1}` for each site `a`.
pub fn ring_cluster_4() -> DensityMatrix {
    let mut psi = vec![Complex64::new(0.25, 0.0); 16];
    for (j, k) in [(0usize, 1usize), (1, 2), (2, 3), (3, 0)] {
        for (idx, amp) in psi.iter_mut().enumerate() {
            if (idx >> (3 - j)) & 1 == 1 && (idx >> (3 - k)) & 1 == 1 {
                *amp = -*amp;
            }
        }
    }
    pure_state(&psi, &[2, 2, 2, 2]).expect("cluster amplitudes are valid")
}

/// Haar-random pure state over the given subsystem dimensions: a normalized
/// vector of independent complex Gaussians.
pub fn random_pure(dims: &[usize], seed: RandomSeed) -> Result<DensityMatrix> {
    if dims.is_empty() || dims.iter().any(|&d| d == 0) {
        return Err(Error::InvalidArgument(
            "subsystem dimensions must be a nonempty list of positive integers".into(),
        ));
    }
    let total: usize = dims.iter().product();
    let mut rng = seed.rng(0);
    let psi: Vec<Complex64> = (0..total).map(|_| random_complex_normal(&mut rng)).collect();
    pure_state(&psi, dims)
}

/// Random mixed state under the Hilbert-Schmidt measure: `GG†/Tr(GG†)` with
/// `G` a square matrix of independent complex Gaussians.
pub fn random_mixed(dims: &[usize], seed: RandomSeed) -> Result<DensityMatrix> {
    if dims.is_empty() || dims.iter().any(|&d| d == 0) {
        return Err(Error::InvalidArgument(
            "subsystem dimensions must be a nonempty list of positive integers".into(),
        ));
    }
    let total: usize = dims.iter().product();
    let mut rng = seed.rng(0);
    let g = ComplexMatrix::from_fn(total, total, |_, _| random_complex_normal(&mut rng));
    let gg = g.matmul(&g.adjoint());
    let trace = gg.trace().re;
    DensityMatrix::new(gg.scale(1.0 / trace), dims.to_vec())
}

/// Overlap with the maximally entangled state, `Tr(ρ |Φ⟩⟨Φ|)`; defined for
/// bipartite states with equal local dimensions.
pub fn entanglement_fraction(rho: &DensityMatrix) -> Result<f64> {
    let (da, db) = rho.bipartite_dims()?;
    if da != db {
        return Err(Error::DimensionMismatch(format!(
            "entanglement fraction needs equal local dimensions, got {da} and {db}"
        )));
    }
    let d = da;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..d {
        for l in 0..d {
            acc += rho.matrix().at(k * d + k, l * d + l);
        }
    }
    Ok(acc.re / d as f64)
}

fn random_complex_normal(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}
