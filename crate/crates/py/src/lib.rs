//! Python bindings for the metrological-gain library.
//!
//! Exposes the density-matrix type, the gain optimizer, the closed-form
//! twirled-family results, and the activation helpers (ancillas, copies,
//! many-copy bounds) as the `metrogain_py` module. Matrices cross the
//! boundary as nested lists of Python complex numbers.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use metrogain::activation::{
    add_ancilla, add_ancilla_default, ncopy_bound as core_ncopy_bound, regroup,
    schmidt_pairing_qfi as core_schmidt_pairing_qfi, tensor_states, Bipartition, Side,
};
use metrogain::analytic;
use metrogain::linalg::{Complex64, ComplexMatrix, HermitianOperator};
use metrogain::metrology::{
    gain_for_hamiltonian as core_gain_for_hamiltonian, qfi as core_qfi, sld as core_sld,
    GainResult, LocalHamiltonian,
};
use metrogain::optimizer::see_saw;
use metrogain::states::{
    self, entanglement_fraction as core_entanglement_fraction, DensityMatrix, RandomSeed,
    SchmidtVector,
};
use metrogain::{C2Policy, SeeSawConfig};

fn to_py_err(e: metrogain::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn matrix_from_rows(rows: Vec<Vec<Complex64>>) -> PyResult<ComplexMatrix> {
    let n = rows.len();
    if n == 0 {
        return Err(PyValueError::new_err("matrix must not be empty"));
    }
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        return Err(PyValueError::new_err("matrix rows must all have one length"));
    }
    let mut out = ComplexMatrix::zeros(n, cols);
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            out.set(i, j, v);
        }
    }
    Ok(out)
}

fn matrix_to_rows(m: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.at(i, j)).collect())
        .collect()
}

fn hermitian_from_rows(rows: Vec<Vec<Complex64>>) -> PyResult<HermitianOperator> {
    HermitianOperator::new(matrix_from_rows(rows)?).map_err(to_py_err)
}

fn side_from_str(side: &str) -> PyResult<Side> {
    match side {
        "A" | "a" => Ok(Side::A),
        "B" | "b" => Ok(Side::B),
        other => Err(PyValueError::new_err(format!(
            "side must be \"A\" or \"B\", got {other:?}"
        ))),
    }
}

/// A validated bipartite (or multipartite) quantum state.
#[pyclass(name = "DensityMatrix", frozen)]
struct PyDensityMatrix {
    inner: DensityMatrix,
}

#[pymethods]
impl PyDensityMatrix {
    /// Builds a state from a dense matrix and the list of local dimensions.
    #[new]
    fn new(matrix: Vec<Vec<Complex64>>, dims: Vec<usize>) -> PyResult<Self> {
        let inner = DensityMatrix::new(matrix_from_rows(matrix)?, dims).map_err(to_py_err)?;
        Ok(PyDensityMatrix { inner })
    }

    /// (1-p)·|max entangled> + p·white noise on two d-level parties.
    #[staticmethod]
    fn noisy_max_entangled(d: usize, p: f64) -> PyResult<Self> {
        Ok(PyDensityMatrix {
            inner: states::noisy_max_entangled(d, p).map_err(to_py_err)?,
        })
    }

    /// p·|max entangled> + (1-p)·white noise on two d-level parties.
    #[staticmethod]
    fn isotropic(d: usize, p: f64) -> PyResult<Self> {
        Ok(PyDensityMatrix {
            inner: states::isotropic_state_from_weight(d, p).map_err(to_py_err)?,
        })
    }

    /// Flip-symmetric state with flip weight phi in [-1, 0].
    #[staticmethod]
    fn werner(d: usize, phi: f64) -> PyResult<Self> {
        Ok(PyDensityMatrix {
            inner: states::werner_state(d, phi).map_err(to_py_err)?,
        })
    }

    /// The two-qubit singlet.
    #[staticmethod]
    fn singlet() -> Self {
        PyDensityMatrix {
            inner: states::singlet(),
        }
    }

    /// (1-p)·singlet + p·white noise.
    #[staticmethod]
    fn noisy_singlet(p: f64) -> PyResult<Self> {
        Ok(PyDensityMatrix {
            inner: states::noisy_singlet(p).map_err(to_py_err)?,
        })
    }

    /// The singlet mixed with structured (non-white) noise.
    #[staticmethod]
    fn nonwhite_singlet() -> Self {
        PyDensityMatrix {
            inner: states::nonwhite_noise_singlet(),
        }
    }

    /// GHZ-type state: `parties` parties of dimension d, amplitude on the
    /// first m levels (m even).
    #[staticmethod]
    fn ghz(parties: usize, d: usize, m: usize) -> PyResult<Self> {
        Ok(PyDensityMatrix {
            inner: states::ghz_state(parties, d, m).map_err(to_py_err)?,
        })
    }

    /// Bipartite pure state with the given Schmidt coefficients.
    #[staticmethod]
    fn from_schmidt(coeffs: Vec<f64>, dim_a: usize, dim_b: usize) -> PyResult<Self> {
        let sv = SchmidtVector::new(coeffs).map_err(to_py_err)?;
        Ok(PyDensityMatrix {
            inner: states::pure_from_schmidt(&sv, dim_a, dim_b).map_err(to_py_err)?,
        })
    }

    /// Haar-random pure state on the given local dimensions.
    #[staticmethod]
    fn random_pure(dims: Vec<usize>, seed: u64) -> PyResult<Self> {
        Ok(PyDensityMatrix {
            inner: states::random_pure(&dims, RandomSeed(seed)).map_err(to_py_err)?,
        })
    }

    /// Full-rank random mixed state on the given local dimensions.
    #[staticmethod]
    fn random_mixed(dims: Vec<usize>, seed: u64) -> PyResult<Self> {
        Ok(PyDensityMatrix {
            inner: states::random_mixed(&dims, RandomSeed(seed)).map_err(to_py_err)?,
        })
    }

    /// Parses a state from its JSON representation.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let (inner, _label) = metrogain::io::from_json_str(text).map_err(to_py_err)?;
        Ok(PyDensityMatrix { inner })
    }

    /// Loads a state from a JSON file.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let (inner, _label) = metrogain::io::load_state(path).map_err(to_py_err)?;
        Ok(PyDensityMatrix { inner })
    }

    /// Local dimensions of the parties.
    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.inner.dims().to_vec()
    }

    /// Tr(rho^2).
    fn purity(&self) -> f64 {
        self.inner.purity()
    }

    /// Eigenvalues in ascending order.
    fn eigenvalues(&self) -> Vec<f64> {
        self.inner.eigenvalues().to_vec()
    }

    /// Dense matrix as nested lists of complex numbers.
    fn matrix(&self) -> Vec<Vec<Complex64>> {
        matrix_to_rows(self.inner.matrix())
    }

    /// Reduced state on the listed parties (0-based, ascending).
    fn reduced(&self, keep: Vec<usize>) -> PyResult<Self> {
        Ok(PyDensityMatrix {
            inner: self.inner.reduced(&keep).map_err(to_py_err)?,
        })
    }

    /// Attaches an ancilla to side "A" or "B". The default ancilla is a
    /// qubit in its ground state; pass `amplitudes` for a custom pure one.
    #[pyo3(signature = (side, amplitudes = None))]
    fn with_ancilla(&self, side: &str, amplitudes: Option<Vec<Complex64>>) -> PyResult<Self> {
        let side = side_from_str(side)?;
        let inner = match amplitudes {
            Some(amp) => add_ancilla(&self.inner, side, &amp).map_err(to_py_err)?,
            None => add_ancilla_default(&self.inner, side).map_err(to_py_err)?,
        };
        Ok(PyDensityMatrix { inner })
    }

    /// Tensors a second copy next to this state, regrouped so each party
    /// holds its halves of both copies.
    fn tensor_with(&self, other: &PyDensityMatrix) -> PyResult<Self> {
        Ok(PyDensityMatrix {
            inner: tensor_states(&self.inner, &other.inner).map_err(to_py_err)?,
        })
    }

    /// Regroups a multipartite state into a bipartition of its parties.
    fn regrouped(&self, party_a: Vec<usize>, party_b: Vec<usize>) -> PyResult<Self> {
        let split = Bipartition { party_a, party_b };
        Ok(PyDensityMatrix {
            inner: regroup(&self.inner, &split).map_err(to_py_err)?,
        })
    }

    /// Overlap with the maximally entangled state (square parties only).
    fn entanglement_fraction(&self) -> PyResult<f64> {
        core_entanglement_fraction(&self.inner).map_err(to_py_err)
    }

    /// JSON representation, suitable for `from_json` and the CLI.
    #[pyo3(signature = (label = None))]
    fn to_json(&self, label: Option<&str>) -> String {
        metrogain::io::to_json_string(&self.inner, label)
    }

    /// Saves the JSON representation to a file.
    #[pyo3(signature = (path, label = None))]
    fn save(&self, path: &str, label: Option<&str>) -> PyResult<()> {
        metrogain::io::save_state(&self.inner, path, label).map_err(to_py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "DensityMatrix(dims={:?}, purity={:.6})",
            self.inner.dims(),
            self.inner.purity()
        )
    }
}

/// Outcome of a gain evaluation or optimization.
#[pyclass(name = "GainResult", frozen)]
struct PyGainResult {
    inner: GainResult,
}

#[pymethods]
impl PyGainResult {
    /// Fisher information over the best separable value; above one is useful.
    #[getter]
    fn gain(&self) -> f64 {
        self.inner.gain
    }

    /// Quantum Fisher information with the reported Hamiltonian.
    #[getter]
    fn qfi(&self) -> f64 {
        self.inner.qfi
    }

    /// Largest Fisher information separable states reach with the same
    /// Hamiltonian.
    #[getter]
    fn separable_bound(&self) -> f64 {
        self.inner.sep_bound
    }

    /// Spectral bound of the first local term.
    #[getter]
    fn c1(&self) -> f64 {
        self.inner.hamiltonian.c1()
    }

    /// Spectral bound of the second local term.
    #[getter]
    fn c2(&self) -> f64 {
        self.inner.hamiltonian.c2()
    }

    /// Iterations used by the winning restart.
    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations
    }

    /// Non-decreasing per-iteration record of the objective.
    #[getter]
    fn trace(&self) -> Vec<f64> {
        self.inner.trace.clone()
    }

    /// First local Hamiltonian term.
    fn h1(&self) -> Vec<Vec<Complex64>> {
        matrix_to_rows(self.inner.hamiltonian.h1().matrix())
    }

    /// Second local Hamiltonian term.
    fn h2(&self) -> Vec<Vec<Complex64>> {
        matrix_to_rows(self.inner.hamiltonian.h2().matrix())
    }

    /// Observable saturating the precision bound.
    fn measurement(&self) -> Vec<Vec<Complex64>> {
        matrix_to_rows(self.inner.measurement.matrix())
    }

    fn __repr__(&self) -> String {
        format!(
            "GainResult(gain={:.6}, qfi={:.6}, c2={:.6}, iterations={})",
            self.inner.gain,
            self.inner.qfi,
            self.inner.hamiltonian.c2(),
            self.inner.iterations
        )
    }
}

/// Quantum Fisher information of the state under a total Hamiltonian.
#[pyfunction]
fn qfi(state: &PyDensityMatrix, hamiltonian: Vec<Vec<Complex64>>) -> PyResult<f64> {
    core_qfi(&state.inner, &hermitian_from_rows(hamiltonian)?).map_err(to_py_err)
}

/// Observable saturating the precision bound for the state and Hamiltonian.
#[pyfunction]
fn sld(state: &PyDensityMatrix, hamiltonian: Vec<Vec<Complex64>>) -> PyResult<Vec<Vec<Complex64>>> {
    let m = core_sld(&state.inner, &hermitian_from_rows(hamiltonian)?).map_err(to_py_err)?;
    Ok(matrix_to_rows(m.matrix()))
}

/// Gain of the state under the fixed local Hamiltonian c1·h1 + c2·h2 (each
/// term is rescaled so its spectrum lies within its bound).
#[pyfunction]
#[pyo3(signature = (state, h1, h2, c1 = 1.0, c2 = 1.0))]
fn gain_for_hamiltonian(
    state: &PyDensityMatrix,
    h1: Vec<Vec<Complex64>>,
    h2: Vec<Vec<Complex64>>,
    c1: f64,
    c2: f64,
) -> PyResult<PyGainResult> {
    let h = LocalHamiltonian::bipartite(
        hermitian_from_rows(h1)?,
        hermitian_from_rows(h2)?,
        c1,
        c2,
    )
    .map_err(to_py_err)?;
    Ok(PyGainResult {
        inner: core_gain_for_hamiltonian(&state.inner, &h).map_err(to_py_err)?,
    })
}

/// Maximizes the gain over local Hamiltonians by alternating optimization.
/// `c2=None` rebalances the second bound; a number pins it.
#[pyfunction]
#[pyo3(signature = (state, trials = 10, steps = 100, tol = 1e-10, seed = 1, c2 = None))]
fn optimize_gain(
    state: &PyDensityMatrix,
    trials: usize,
    steps: usize,
    tol: f64,
    seed: u64,
    c2: Option<f64>,
) -> PyResult<PyGainResult> {
    let cfg = SeeSawConfig {
        trials,
        steps,
        tol,
        c2: match c2 {
            None => C2Policy::Analytic,
            Some(v) => C2Policy::Fixed(v),
        },
        damping: 0.3,
        seed: RandomSeed(seed),
    };
    Ok(PyGainResult {
        inner: see_saw(&state.inner, &cfg).map_err(to_py_err)?,
    })
}

/// Best-Hamiltonian gain of the isotropic state with entangled weight p.
#[pyfunction]
fn isotropic_gain_best(d: usize, p: f64) -> PyResult<f64> {
    analytic::isotropic_gain_best(d, p).map_err(to_py_err)
}

/// Weight below which the isotropic family stops being useful.
#[pyfunction]
fn isotropic_threshold(d: usize) -> PyResult<f64> {
    analytic::isotropic_threshold(d).map_err(to_py_err)
}

/// Best-Hamiltonian gain of the flip-symmetric state with weight phi.
#[pyfunction]
fn werner_gain_best(d: usize, phi: f64) -> PyResult<f64> {
    analytic::werner_gain_best(d, phi).map_err(to_py_err)
}

/// Flip weight above which the flip-symmetric family stops being useful.
#[pyfunction]
fn werner_threshold(d: usize) -> PyResult<f64> {
    analytic::werner_threshold(d).map_err(to_py_err)
}

/// Gain guaranteed for any state with the given max-entangled overlap.
#[pyfunction]
fn twirl_lower_bound_isotropic(fraction: f64, d: usize) -> PyResult<f64> {
    analytic::twirl_lower_bound_isotropic(fraction, d).map_err(to_py_err)
}

/// Gain guaranteed for any state with the given flip expectation.
#[pyfunction]
fn twirl_lower_bound_werner(flip_expectation: f64, d: usize) -> PyResult<f64> {
    analytic::twirl_lower_bound_werner(flip_expectation, d).map_err(to_py_err)
}

/// Fisher-information lower bound for n copies of a pure state with the
/// given Schmidt coefficients.
#[pyfunction]
fn ncopy_bound(sigma: Vec<f64>, copies: usize) -> PyResult<f64> {
    let sv = SchmidtVector::new(sigma).map_err(to_py_err)?;
    core_ncopy_bound(&sv, copies).map_err(to_py_err)
}

/// Fisher information of the pair-swap Hamiltonian on a pure state with the
/// given Schmidt coefficients.
#[pyfunction]
fn schmidt_pairing_qfi(sigma: Vec<f64>) -> PyResult<f64> {
    let sv = SchmidtVector::new(sigma).map_err(to_py_err)?;
    Ok(core_schmidt_pairing_qfi(&sv))
}

/// Python module definition.
#[pymodule]
fn metrogain_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDensityMatrix>()?;
    m.add_class::<PyGainResult>()?;
    m.add_function(wrap_pyfunction!(qfi, m)?)?;
    m.add_function(wrap_pyfunction!(sld, m)?)?;
    m.add_function(wrap_pyfunction!(gain_for_hamiltonian, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_gain, m)?)?;
    m.add_function(wrap_pyfunction!(isotropic_gain_best, m)?)?;
    m.add_function(wrap_pyfunction!(isotropic_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(werner_gain_best, m)?)?;
    m.add_function(wrap_pyfunction!(werner_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(twirl_lower_bound_isotropic, m)?)?;
    m.add_function(wrap_pyfunction!(twirl_lower_bound_werner, m)?)?;
    m.add_function(wrap_pyfunction!(ncopy_bound, m)?)?;
    m.add_function(wrap_pyfunction!(schmidt_pairing_qfi, m)?)?;
    Ok(())
}
