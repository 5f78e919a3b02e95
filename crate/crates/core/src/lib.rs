//! Metrological gain of bipartite quantum states.
//!
//! This crate computes how useful a quantum state is for phase estimation
//! compared with the best separable strategy. The figure of merit is the
//! *metrological gain*: the quantum Fisher information of a state with
//! respect to a local Hamiltonian `H = c1 H1 ⊗ 1 + c2 1 ⊗ H2`, divided by
//! the largest value any separable state can reach for the same Hamiltonian
//! constraints.
//!
//! The main entry points are:
//!
//! * [`metrology::qfi`] — quantum Fisher information of a state and operator;
//! * [`metrology::gain_for_hamiltonian`] — gain for a fixed local Hamiltonian;
//! * [`optimizer::optimize_gain`] — see-saw search over local Hamiltonians
//!   and measurements, maximizing the gain itself;
//! * [`optimizer::robustness_threshold`] — bisection for the noise level at
//!   which a state family stops outperforming separable states;
//! * [`activation`] — embeddings (ancillas, extra copies, regrouped
//!   multipartite states) that can activate the usefulness of a state;
//! * [`analytic`] — closed-form gains and thresholds for isotropic and
//!   Werner states.

pub mod activation;
pub mod analytic;
pub mod error;
pub mod io;
pub mod linalg;
pub mod metrology;
pub mod optimizer;
pub mod states;

pub use activation::{Bipartition, HamiltonianId, Side};
pub use analytic::AnalyticGain;
pub use error::{Error, Result};
pub use linalg::{Complex64, ComplexMatrix, HermitianOperator, SpectralDecomposition};
pub use metrology::{ErrorPropagation, GainResult, LocalHamiltonian};
pub use optimizer::{BisectionConfig, C2Policy, SeeSawConfig};
pub use states::{DensityMatrix, RandomSeed, SchmidtVector};
