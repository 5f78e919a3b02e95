//! Dense complex linear algebra primitives.
//!
//! Everything in this crate works with explicit dense matrices over
//! `Complex<f64>`. This module provides the matrix container, Hermitian
//! operators with validated symmetry, spectral decompositions (via
//! `nalgebra`'s symmetric eigensolver, with a residual check and a Jacobi
//! fallback for the degenerate cases it mishandles), and the tensor-network
//! bookkeeping needed for multipartite states: tensor products, partial
//! traces, local embeddings, and subsystem permutations.
//!
//! Composite indices are row-major: for subsystem dimensions `[d1, d2, ...]`
//! the flat index of `(i1, i2, ...)` is `i1*d2*... + i2*... + ...`, i.e. the
//! leftmost subsystem is the most significant digit.

pub use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on the largest entrywise deviation `|M - M†|` accepted when
/// interpreting a matrix as Hermitian. Within the tolerance the matrix is
/// symmetrized; beyond it construction fails.
pub const HERMITICITY_TOL: f64 = 1e-8;

/// Maximum iterations granted to the symmetric eigensolver before failing.
const EIGEN_MAX_ITER: usize = 4096;

/// Largest acceptable entrywise residual `|U Λ U† - A|`, relative to the
/// matrix scale, before an eigendecomposition is rejected as inaccurate.
/// The QR-based solver can return an orthonormal basis that fails to
/// diagonalize matrices with heavily clustered eigenvalues; decompositions
/// beyond this residual are recomputed with the Jacobi fallback.
const EIGEN_RESIDUAL_TOL: f64 = 1e-10;

/// Maximum number of cyclic sweeps granted to the Jacobi eigensolver.
const JACOBI_MAX_SWEEPS: usize = 64;

/// A dense row-major matrix over `Complex<f64>`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// An all-zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    /// The `n`-dimensional identity.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from a row-major coefficient vector.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds an `n x n` matrix whose `(i, j)` entry is `f(i, j)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    /// A square diagonal matrix with the given real diagonal.
    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &x) in diag.iter().enumerate() {
            m.data[i * n + i] = Complex64::new(x, 0.0);
        }
        m
    }

    /// Number of rows.
    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// True when the matrix is square.
    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major coefficient slice.
    #[inline]
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Entry at row `i`, column `j`.
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    /// Overwrites the entry at row `i`, column `j`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.data[i * self.cols + j] = value;
    }

    /// Entrywise sum. Panics if the shapes differ; shape agreement is the
    /// caller's invariant for internal arithmetic.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "matrix addition requires equal shapes"
        );
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// Entrywise difference. Panics if the shapes differ.
    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "matrix subtraction requires equal shapes"
        );
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// The matrix scaled by a real factor.
    pub fn scale(&self, factor: f64) -> Self {
        let data = self.data.iter().map(|a| a * factor).collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// The matrix scaled by a complex factor.
    pub fn scale_complex(&self, factor: Complex64) -> Self {
        let data = self.data.iter().map(|a| a * factor).collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// Matrix product `self * other`. Panics if the inner dimensions differ.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matrix product requires inner dimensions to agree"
        );
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut out = Self::zeros(n, m);
        for i in 0..n {
            let row_out = &mut out.data[i * m..(i + 1) * m];
            for p in 0..k {
                let a = self.data[i * k + p];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row_b = &other.data[p * m..(p + 1) * m];
                for (o, b) in row_out.iter_mut().zip(row_b) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Entrywise complex conjugate (no transpose). For a Hermitian matrix this
    /// equals the transpose.
    pub fn conj(&self) -> Self {
        let data = self.data.iter().map(|c| c.conj()).collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j].conj();
            }
        }
        out
    }

    /// Sum of diagonal entries. Panics if the matrix is not square.
    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace requires a square matrix");
        (0..self.rows).map(|i| self.data[i * self.cols + i]).sum()
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise magnitude.
    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise magnitude of `self - other`. Panics if the shapes
    /// differ.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "difference requires equal shapes"
        );
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise magnitude of `M - M†`; zero exactly when the matrix
    /// is Hermitian. Panics if the matrix is not square.
    pub fn hermiticity_deviation(&self) -> f64 {
        assert!(
            self.is_square(),
            "Hermiticity is only defined for square matrices"
        );
        let n = self.rows;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let d = (self.data[i * n + j] - self.data[j * n + i].conj()).norm();
                dev = dev.max(d);
            }
        }
        dev
    }

    /// The Hermitian part `(M + M†) / 2`. Panics if the matrix is not square.
    pub fn hermitized(&self) -> Self {
        let n = self.rows;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] =
                    (self.data[i * n + j] + self.data[j * n + i].conj()) * 0.5;
            }
        }
        out
    }
}

/// A validated Hermitian operator.
///
/// Construction checks the entrywise deviation from the adjoint against
/// [`HERMITICITY_TOL`] and stores the exactly symmetrized matrix
/// `(M + M†) / 2`, so downstream code can rely on Hermiticity holding to
/// machine precision.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    /// Validates and symmetrizes a square matrix.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let deviation = matrix.hermiticity_deviation();
        if deviation > HERMITICITY_TOL {
            return Err(Error::NotHermitian {
                deviation,
                tolerance: HERMITICITY_TOL,
            });
        }
        Ok(Self {
            matrix: matrix.hermitized(),
        })
    }

    /// A diagonal operator with the given real diagonal.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self {
            matrix: ComplexMatrix::from_real_diagonal(diag),
        }
    }

    /// The zero operator of dimension `n`.
    pub fn zero(n: usize) -> Self {
        Self {
            matrix: ComplexMatrix::zeros(n, n),
        }
    }

    /// The underlying (exactly Hermitian) matrix.
    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Hilbert-space dimension the operator acts on.
    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// The operator scaled by a real factor (Hermiticity is preserved).
    pub fn scale(&self, factor: f64) -> Self {
        Self {
            matrix: self.matrix.scale(factor),
        }
    }

    /// Sum of two Hermitian operators of equal dimension.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot add operators of dimensions {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(Self {
            matrix: self.matrix.add(&other.matrix),
        })
    }

    /// Expectation value `Tr(rho_like * self)` against any square matrix of
    /// the same dimension; real part is returned since the trace of a product
    /// of Hermitian matrices with a Hermitian weight is real up to rounding.
    pub fn expectation(&self, weight: &ComplexMatrix) -> f64 {
        debug_assert_eq!(weight.rows(), self.dim());
        let n = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                acc += weight.at(i, k) * self.matrix.at(k, i);
            }
        }
        acc.re
    }
}

/// Eigenvalues and eigenvectors of a Hermitian operator.
///
/// Eigenvalues are sorted in ascending order; column `k` of `eigenvectors`
/// is a unit eigenvector for `eigenvalues[k]`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Eigenvalues in ascending order.
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose columns are the corresponding eigenvectors.
    pub eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    /// Rebuilds the operator as `U diag(lambda) U†`; mostly useful for
    /// verifying decomposition quality.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let u = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            let lam = self.eigenvalues[k];
            if lam == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = u.at(i, k) * lam;
                for j in 0..n {
                    let add = vik * u.at(j, k).conj();
                    out.set(i, j, out.at(i, j) + add);
                }
            }
        }
        out
    }

    /// Conjugates a matrix into the eigenbasis: `U† M U`.
    pub fn to_eigenbasis(&self, m: &ComplexMatrix) -> ComplexMatrix {
        self.eigenvectors.adjoint().matmul(&m.matmul(&self.eigenvectors))
    }

    /// Conjugates a matrix out of the eigenbasis: `U M U†`.
    pub fn from_eigenbasis(&self, m: &ComplexMatrix) -> ComplexMatrix {
        self.eigenvectors.matmul(&m.matmul(&self.eigenvectors.adjoint()))
    }
}

/// Full eigendecomposition of a Hermitian operator with eigenvalues sorted in
/// ascending order.
///
/// The fast QR-based solver is tried first and its result is accepted only if
/// `U Λ U†` actually reproduces the input; otherwise the decomposition is
/// recomputed with a cyclic Jacobi sweep, which is slower but remains accurate
/// on matrices with large degenerate eigenspaces.
pub fn spectral_decompose(op: &HermitianOperator) -> Result<SpectralDecomposition> {
    let n = op.dim();
    if n == 0 {
        return Err(Error::InvalidArgument(
            "cannot decompose an empty matrix".into(),
        ));
    }
    let scale = op
        .matrix()
        .data
        .iter()
        .fold(1.0_f64, |acc, z| acc.max(z.norm()));
    if let Ok(dec) = qr_decompose(op) {
        if dec.reconstruct().max_abs_diff(op.matrix()) <= EIGEN_RESIDUAL_TOL * scale {
            return Ok(dec);
        }
    }
    let dec = jacobi_decompose(op)?;
    if dec.reconstruct().max_abs_diff(op.matrix()) <= EIGEN_RESIDUAL_TOL * scale {
        Ok(dec)
    } else {
        Err(Error::EigenFailure { dim: n })
    }
}

/// Eigendecomposition via `nalgebra`'s QR-based symmetric eigensolver,
/// with eigenvalues sorted ascending. Fast, but inaccurate on some heavily
/// degenerate matrices; callers must validate the reconstruction.
fn qr_decompose(op: &HermitianOperator) -> Result<SpectralDecomposition> {
    let n = op.dim();
    let na = nalgebra::DMatrix::<Complex64>::from_fn(n, n, |i, j| op.matrix().at(i, j));
    let eig = na
        .try_symmetric_eigen(f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or(Error::EigenFailure { dim: n })?;
    let eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let eigenvectors =
        ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, j)]);
    Ok(sorted_decomposition(eigenvalues, eigenvectors))
}

/// Eigendecomposition via cyclic Jacobi rotations, with eigenvalues sorted
/// ascending. Each sweep zeroes every off-diagonal pair with a two-sided
/// unitary rotation; convergence is quadratic and the accumulated basis
/// diagonalizes the input to machine precision regardless of degeneracies.
fn jacobi_decompose(op: &HermitianOperator) -> Result<SpectralDecomposition> {
    let n = op.dim();
    let mut a = op.matrix().clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.data.iter().fold(1.0_f64, |acc, z| acc.max(z.norm()));
    let stop = f64::EPSILON * scale;

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut largest_off = 0.0_f64;
        for p in 0..n {
            for q in (p + 1)..n {
                largest_off = largest_off.max(a.at(p, q).norm());
            }
        }
        if largest_off <= stop {
            let eigenvalues: Vec<f64> = (0..n).map(|k| a.at(k, k).re).collect();
            return Ok(sorted_decomposition(eigenvalues, v));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let z = a.at(p, q);
                let zn = z.norm();
                if zn <= stop * 0.1 {
                    continue;
                }
                // Unitary on the (p, q) plane zeroing A[p][q]: with
                // z = |z| e^{iα} and tan 2θ = 2|z| / (A[p][p] - A[q][q]),
                // the columns mix as col_p ← c·col_p + s·e^{-iα}·col_q,
                // col_q ← -s·e^{iα}·col_p + c·col_q.
                let app = a.at(p, p).re;
                let aqq = a.at(q, q).re;
                let phase = z / zn;
                let tau = (app - aqq) / (2.0 * zn);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let sp = phase.scale(s);

                // A ← A·U on columns p, q of every row.
                for i in 0..n {
                    let aip = a.at(i, p);
                    let aiq = a.at(i, q);
                    a.set(i, p, aip.scale(c) + aiq * sp.conj());
                    a.set(i, q, aiq.scale(c) - aip * sp);
                }
                // A ← U†·A on rows p, q of every column.
                for j in 0..n {
                    let apj = a.at(p, j);
                    let aqj = a.at(q, j);
                    a.set(p, j, apj.scale(c) + aqj * sp);
                    a.set(q, j, aqj.scale(c) - apj * sp.conj());
                }
                // Clean the rotated pair exactly and keep the diagonal real.
                a.set(p, q, Complex64::new(0.0, 0.0));
                a.set(q, p, Complex64::new(0.0, 0.0));
                a.set(p, p, Complex64::new(a.at(p, p).re, 0.0));
                a.set(q, q, Complex64::new(a.at(q, q).re, 0.0));

                // V ← V·U accumulates the eigenbasis.
                for i in 0..n {
                    let vip = v.at(i, p);
                    let viq = v.at(i, q);
                    v.set(i, p, vip.scale(c) + viq * sp.conj());
                    v.set(i, q, viq.scale(c) - vip * sp);
                }
            }
        }
    }
    Err(Error::EigenFailure { dim: n })
}

/// Sorts an unordered eigensystem into ascending-eigenvalue order.
fn sorted_decomposition(
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
) -> SpectralDecomposition {
    let n = eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eigenvalues[a]
            .partial_cmp(&eigenvalues[b])
            .expect("eigenvalues of a Hermitian matrix are finite")
    });
    let sorted_values: Vec<f64> = order.iter().map(|&k| eigenvalues[k]).collect();
    let mut sorted_vectors = ComplexMatrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            sorted_vectors.set(row, new_col, eigenvectors.at(row, old_col));
        }
    }
    SpectralDecomposition {
        eigenvalues: sorted_values,
        eigenvectors: sorted_vectors,
    }
}

/// Kronecker product `a ⊗ b` in the row-major composite-index convention.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = (a.rows(), a.cols());
    let (rb, cb) = (b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(ra * rb, ca * cb);
    for ia in 0..ra {
        for ja in 0..ca {
            let f = a.at(ia, ja);
            if f.re == 0.0 && f.im == 0.0 {
                continue;
            }
            for ib in 0..rb {
                for jb in 0..cb {
                    out.set(ia * rb + ib, ja * cb + jb, f * b.at(ib, jb));
                }
            }
        }
    }
    out
}

/// Validates that `dims` is a plausible subsystem split for a square matrix.
fn check_dims(m: &ComplexMatrix, dims: &[usize]) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if dims.is_empty() || dims.iter().any(|&d| d == 0) {
        return Err(Error::InvalidArgument(
            "subsystem dimensions must be a nonempty list of positive integers".into(),
        ));
    }
    let total: usize = dims.iter().product();
    if total != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "subsystem dimensions {:?} multiply to {}, but the matrix is {}x{}",
            dims,
            total,
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// Partial trace over every subsystem *not* listed in `keep`.
///
/// `dims` lists the subsystem dimensions in tensor order and `keep` must be a
/// strictly increasing list of subsystem indices; the result keeps exactly
/// those subsystems, in their original relative order.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    check_dims(m, dims)?;
    if keep.is_empty() {
        return Err(Error::InvalidArgument(
            "partial trace must keep at least one subsystem".into(),
        ));
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) || *keep.last().unwrap() >= dims.len() {
        return Err(Error::InvalidArgument(format!(
            "kept subsystems {:?} must be strictly increasing indices below {}",
            keep,
            dims.len()
        )));
    }

    let k = dims.len();
    let kept: Vec<bool> = {
        let mut v = vec![false; k];
        for &s in keep {
            v[s] = true;
        }
        v
    };
    let dim_keep: usize = keep.iter().map(|&s| dims[s]).product();
    let dim_rest: usize = dims
        .iter()
        .enumerate()
        .filter(|&(s, _)| !kept[s])
        .map(|(_, &d)| d)
        .product();

    // Strides of each subsystem in the flat composite index.
    let mut strides = vec![1usize; k];
    for s in (0..k - 1).rev() {
        strides[s] = strides[s + 1] * dims[s + 1];
    }
    // Flat offsets contributed by the kept digits of an index into the kept
    // space, and by the traced digits of an index into the traced space.
    let keep_offset = |mut idx: usize| -> usize {
        let mut off = 0;
        for &s in keep.iter().rev() {
            off += (idx % dims[s]) * strides[s];
            idx /= dims[s];
        }
        off
    };
    let rest_sites: Vec<usize> = (0..k).filter(|&s| !kept[s]).collect();
    let rest_offset = |mut idx: usize| -> usize {
        let mut off = 0;
        for &s in rest_sites.iter().rev() {
            off += (idx % dims[s]) * strides[s];
            idx /= dims[s];
        }
        off
    };

    let mut out = ComplexMatrix::zeros(dim_keep, dim_keep);
    for ik in 0..dim_keep {
        let ik_off = keep_offset(ik);
        for jk in 0..dim_keep {
            let jk_off = keep_offset(jk);
            let mut acc = Complex64::new(0.0, 0.0);
            for r in 0..dim_rest {
                let r_off = rest_offset(r);
                acc += m.at(ik_off + r_off, jk_off + r_off);
            }
            out.set(ik, jk, acc);
        }
    }
    Ok(out)
}

/// Embeds a single-subsystem operator into the full space:
/// `1 ⊗ ... ⊗ op ⊗ ... ⊗ 1` with `op` at position `site`.
pub fn embed_local(op: &ComplexMatrix, dims: &[usize], site: usize) -> Result<ComplexMatrix> {
    if dims.is_empty() || dims.iter().any(|&d| d == 0) {
        return Err(Error::InvalidArgument(
            "subsystem dimensions must be a nonempty list of positive integers".into(),
        ));
    }
    if site >= dims.len() {
        return Err(Error::InvalidArgument(format!(
            "site {} is out of range for {} subsystems",
            site,
            dims.len()
        )));
    }
    if !op.is_square() || op.rows() != dims[site] {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, but subsystem {} has dimension {}",
            op.rows(),
            op.cols(),
            site,
            dims[site]
        )));
    }
    let dim_left: usize = dims[..site].iter().product();
    let dim_right: usize = dims[site + 1..].iter().product();
    let left = tensor_product(&ComplexMatrix::identity(dim_left), op);
    Ok(tensor_product(&left, &ComplexMatrix::identity(dim_right)))
}

/// Reorders subsystems of a square matrix.
///
/// `perm[k]` names the old position of the subsystem that ends up at new
/// position `k`, so `perm = [1, 0]` swaps a bipartite pair. Returns the
/// permuted matrix, whose composite basis is ordered by
/// `[dims[perm[0]], dims[perm[1]], ...]`.
pub fn permute_subsystems(
    m: &ComplexMatrix,
    dims: &[usize],
    perm: &[usize],
) -> Result<ComplexMatrix> {
    check_dims(m, dims)?;
    let k = dims.len();
    {
        let mut seen = vec![false; k];
        if perm.len() != k || perm.iter().any(|&p| p >= k || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::InvalidArgument(format!(
                "{:?} is not a permutation of 0..{}",
                perm, k
            )));
        }
    }

    let total: usize = dims.iter().product();
    let mut old_strides = vec![1usize; k];
    for s in (0..k - 1).rev() {
        old_strides[s] = old_strides[s + 1] * dims[s + 1];
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let mut new_strides = vec![1usize; k];
    for s in (0..k - 1).rev() {
        new_strides[s] = new_strides[s + 1] * new_dims[s + 1];
    }

    // map[i] = flat index of i's digits after reordering.
    let mut map = vec![0usize; total];
    for (i, slot) in map.iter_mut().enumerate() {
        let mut flat = 0;
        for (new_site, &old_site) in perm.iter().enumerate() {
            let digit = (i / old_strides[old_site]) % dims[old_site];
            flat += digit * new_strides[new_site];
        }
        *slot = flat;
    }

    let mut out = ComplexMatrix::zeros(total, total);
    for i in 0..total {
        for j in 0..total {
            out.set(map[i], map[j], m.at(i, j));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_close(actual: f64, expected: f64, tol: f64, what: &str) {
        assert!(
            (actual - expected).abs() <= tol,
            "{what}: {actual} vs {expected} (tol {tol})"
        );
    }

    /// Deterministic pseudo-random Hermitian matrix for tests.
    fn sample_hermitian(n: usize, seed: u64) -> HermitianOperator {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let raw = ComplexMatrix::from_fn(n, n, |_, _| {
            c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        HermitianOperator::new(raw.hermitized()).unwrap()
    }

    #[test]
    fn identity_and_indexing() {
        let id = ComplexMatrix::identity(3);
        assert_eq!(id.at(0, 0), c(1.0, 0.0));
        assert_eq!(id.at(0, 1), c(0.0, 0.0));
        assert_eq!(id.trace(), c(3.0, 0.0));
    }

    #[test]
    fn matmul_matches_hand_computation() {
        let a = ComplexMatrix::from_vec(2, 2, vec![c(1.0, 0.0), c(0.0, 1.0), c(2.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        let b = ComplexMatrix::from_vec(2, 2, vec![c(0.0, 1.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, -1.0)])
            .unwrap();
        let p = a.matmul(&b);
        // Row 0: [1, i] * [[i, 1], [1, -i]] = [i + i, 1 + 1] = [2i, 2].
        assert_eq!(p.at(0, 0), c(0.0, 2.0));
        assert_eq!(p.at(0, 1), c(2.0, 0.0));
        // Row 1: [2, 0] * ... = [2i, 2].
        assert_eq!(p.at(1, 0), c(0.0, 2.0));
        assert_eq!(p.at(1, 1), c(2.0, 0.0));
    }

    #[test]
    fn adjoint_conjugates_and_transposes() {
        let a = ComplexMatrix::from_vec(1, 2, vec![c(1.0, 2.0), c(3.0, -4.0)]).unwrap();
        let ad = a.adjoint();
        assert_eq!(ad.rows(), 2);
        assert_eq!(ad.at(0, 0), c(1.0, -2.0));
        assert_eq!(ad.at(1, 0), c(3.0, 4.0));
    }

    #[test]
    fn hermitian_rejects_asymmetric_matrix() {
        let bad = ComplexMatrix::from_vec(2, 2, vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        match HermitianOperator::new(bad) {
            Err(Error::NotHermitian { deviation, .. }) => {
                assert_close(deviation, 1.0, 1e-12, "deviation")
            }
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn hermitian_symmetrizes_small_noise() {
        let nearly = ComplexMatrix::from_vec(
            2,
            2,
            vec![c(1.0, 1e-10), c(0.5, 0.5), c(0.5, -0.5 + 1e-10), c(-1.0, 0.0)],
        )
        .unwrap();
        let h = HermitianOperator::new(nearly).unwrap();
        assert_eq!(h.matrix().hermiticity_deviation(), 0.0);
    }

    #[test]
    fn spectral_decompose_sorts_and_reconstructs() {
        for n in [2usize, 3, 5, 8] {
            let h = sample_hermitian(n, 100 + n as u64);
            let d = spectral_decompose(&h).unwrap();
            for w in d.eigenvalues.windows(2) {
                assert!(w[0] <= w[1], "eigenvalues must ascend");
            }
            let err = d.reconstruct().max_abs_diff(h.matrix());
            assert!(
                err <= 1e-9 * n as f64,
                "reconstruction error {err} too large for n={n}"
            );
            // Columns are orthonormal.
            let u = &d.eigenvectors;
            let gram = u.adjoint().matmul(u);
            assert!(gram.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-12);
        }
    }

    #[test]
    fn spectral_decompose_known_spectrum() {
        // sigma_x has eigenvalues -1, +1.
        let sx = HermitianOperator::new(
            ComplexMatrix::from_vec(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
                .unwrap(),
        )
        .unwrap();
        let d = spectral_decompose(&sx).unwrap();
        assert_close(d.eigenvalues[0], -1.0, 1e-14, "lowest");
        assert_close(d.eigenvalues[1], 1.0, 1e-14, "highest");
    }

    #[test]
    fn eigenbasis_roundtrip() {
        let h = sample_hermitian(4, 7);
        let d = spectral_decompose(&h).unwrap();
        let m = sample_hermitian(4, 8).matrix().clone();
        let back = d.from_eigenbasis(&d.to_eigenbasis(&m));
        assert!(back.max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn tensor_product_block_structure() {
        let a = ComplexMatrix::from_vec(2, 2, vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)])
            .unwrap();
        let b = ComplexMatrix::identity(2);
        let t = tensor_product(&a, &b);
        assert_eq!(t.rows(), 4);
        assert_eq!(t.at(0, 0), c(1.0, 0.0));
        assert_eq!(t.at(1, 1), c(1.0, 0.0));
        assert_eq!(t.at(0, 2), c(2.0, 0.0));
        assert_eq!(t.at(2, 0), c(3.0, 0.0));
        assert_eq!(t.at(2, 2), c(4.0, 0.0));
        assert_eq!(t.at(0, 1), c(0.0, 0.0));
    }

    #[test]
    fn tensor_trace_is_product_of_traces() {
        let a = sample_hermitian(3, 1).matrix().clone();
        let b = sample_hermitian(2, 2).matrix().clone();
        let t = tensor_product(&a, &b);
        let lhs = t.trace();
        let rhs = a.trace() * b.trace();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_of_product_factorizes() {
        let a = sample_hermitian(3, 11).matrix().clone();
        let b = sample_hermitian(4, 12).matrix().clone();
        let t = tensor_product(&a, &b);
        let ta = partial_trace(&t, &[3, 4], &[0]).unwrap();
        let tb = partial_trace(&t, &[3, 4], &[1]).unwrap();
        assert!(ta.max_abs_diff(&a.scale(b.trace().re)) < 1e-12);
        assert!(tb.max_abs_diff(&b.scale(a.trace().re)) < 1e-12);
    }

    #[test]
    fn partial_trace_three_parties_keep_outer_pair() {
        let a = sample_hermitian(2, 21).matrix().clone();
        let b = sample_hermitian(3, 22).matrix().clone();
        let c_ = sample_hermitian(2, 23).matrix().clone();
        let t = tensor_product(&tensor_product(&a, &b), &c_);
        let kept = partial_trace(&t, &[2, 3, 2], &[0, 2]).unwrap();
        let expect = tensor_product(&a, &c_).scale(b.trace().re);
        assert!(kept.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn partial_trace_rejects_bad_requests() {
        let m = ComplexMatrix::identity(6);
        assert!(matches!(
            partial_trace(&m, &[2, 2], &[0]),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            partial_trace(&m, &[2, 3], &[1, 0]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            partial_trace(&m, &[2, 3], &[2]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            partial_trace(&m, &[2, 3], &[]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn embed_local_places_operator_at_site() {
        let op = sample_hermitian(3, 31).matrix().clone();
        let dims = [2usize, 3, 2];
        let e = embed_local(&op, &dims, 1).unwrap();
        let direct = tensor_product(
            &tensor_product(&ComplexMatrix::identity(2), &op),
            &ComplexMatrix::identity(2),
        );
        assert!(e.max_abs_diff(&direct) < 1e-15);
        // Embeddings at different sites commute.
        let f = embed_local(&sample_hermitian(2, 32).matrix().clone(), &dims, 2).unwrap();
        assert!(e.matmul(&f).max_abs_diff(&f.matmul(&e)) < 1e-12);
    }

    #[test]
    fn embed_local_rejects_wrong_dimension() {
        let op = ComplexMatrix::identity(2);
        assert!(matches!(
            embed_local(&op, &[3, 3], 0),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            embed_local(&op, &[2, 2], 5),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn permute_swap_matches_tensor_factors() {
        let a = sample_hermitian(2, 41).matrix().clone();
        let b = sample_hermitian(3, 42).matrix().clone();
        let ab = tensor_product(&a, &b);
        let ba = permute_subsystems(&ab, &[2, 3], &[1, 0]).unwrap();
        assert!(ba.max_abs_diff(&tensor_product(&b, &a)) < 1e-15);
    }

    #[test]
    fn permute_roundtrip_is_identity() {
        let m = sample_hermitian(12, 43).matrix().clone();
        let dims = [2usize, 3, 2];
        let perm = [2usize, 0, 1];
        let fwd = permute_subsystems(&m, &dims, &perm).unwrap();
        // Inverse permutation: new position of old subsystem s.
        let mut inv = [0usize; 3];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
        let back = permute_subsystems(&fwd, &new_dims, &inv).unwrap();
        assert!(back.max_abs_diff(&m) < 1e-15);
    }

    #[test]
    fn permute_rejects_non_permutation() {
        let m = ComplexMatrix::identity(4);
        assert!(matches!(
            permute_subsystems(&m, &[2, 2], &[0, 0]),
            Err(Error::InvalidArgument(_))
        ));
    }
}
