//! State extensions that can activate metrological usefulness, and the fixed
//! local Hamiltonians that witness it.
//!
//! A state whose gain is at most one can still become useful when embedded in
//! a larger system: attaching a pure ancilla to one party, tensoring two
//! copies (each party holding its halves), or regrouping the parties of a
//! multipartite state into two larger ones. The metrological gain can only
//! grow under these embeddings — this module provides the embeddings
//! ([`add_ancilla`], [`tensor_states`], [`regroup`]) and a catalog of
//! explicit Hamiltonians ([`named_hamiltonian`]) known to certify the
//! activated usefulness of specific states.
//!
//! It also provides [`ncopy_bound`]: the Fisher information reached on `n`
//! copies of a pure state by pairing the sorted Schmidt coefficients of the
//! power state, which approaches the separable-bound multiple
//! `16·(Σᵢσᵢ... )` behavior studied for many copies, and its single-copy
//! specialization [`schmidt_pairing_qfi`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{permute_subsystems, tensor_product, ComplexMatrix, HermitianOperator};
use crate::metrology::LocalHamiltonian;
use crate::states::{DensityMatrix, SchmidtVector};

/// Which party of a bipartite state receives an extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// The first (most significant) party.
    A,
    /// The second party.
    B,
}

/// A split of a multipartite system's subsystems into two parties.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    /// Subsystem indices of the first party, in the order they should appear
    /// (most significant first).
    pub party_a: Vec<usize>,
    /// Subsystem indices of the second party, in the order they should
    /// appear.
    pub party_b: Vec<usize>,
}

/// Attaches a pure ancilla to one party of a bipartite state. The result is
/// bipartite again with the ancilla merged into the chosen party's group:
/// on side A the ancilla becomes the most significant factor of the first
/// group, on side B the least significant factor of the second group; either
/// way no subsystem permutation is needed.
pub fn add_ancilla(
    rho: &DensityMatrix,
    side: Side,
    anc_state: &[Complex64],
) -> Result<DensityMatrix> {
    if rho.dims().len() != 2 {
        return Err(Error::InvalidArgument(format!(
            "ancillas extend bipartite states; got {} subsystems",
            rho.dims().len()
        )));
    }
    if anc_state.len() < 2 {
        return Err(Error::InvalidArgument(
            "ancilla state needs dimension at least 2".into(),
        ));
    }
    if anc_state.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
        return Err(Error::InvalidArgument(
            "ancilla amplitudes must be finite".into(),
        ));
    }
    let norm_sq: f64 = anc_state.iter().map(|a| a.norm_sqr()).sum();
    if (norm_sq - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "ancilla state must be normalized: |ψ|² = {norm_sq}"
        )));
    }
    let danc = anc_state.len();
    let anc = ComplexMatrix::from_fn(danc, danc, |i, j| anc_state[i] * anc_state[j].conj());
    let (da, db) = (rho.dims()[0], rho.dims()[1]);
    let (matrix, dims) = match side {
        Side::A => (
            tensor_product(&anc, rho.matrix()),
            vec![danc * da, db],
        ),
        Side::B => (
            tensor_product(rho.matrix(), &anc),
            vec![da, db * danc],
        ),
    };
    DensityMatrix::new(matrix, dims)
}

/// [`add_ancilla`] with the default ancilla: a qubit in `|0⟩`.
pub fn add_ancilla_default(rho: &DensityMatrix, side: Side) -> Result<DensityMatrix> {
    add_ancilla(
        rho,
        side,
        &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
    )
}

/// Tensors two bipartite states so each party holds its halves of both:
/// `ρ_AB ⊗ σ_A′B′` regrouped as `(AA′ | BB′)`. The raw product orders the
/// subsystems `A, B, A′, B′`; they are permuted to `A, A′, B, B′` and the
/// groups flattened.
pub fn tensor_states(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dims().len() != 2 || sigma.dims().len() != 2 {
        return Err(Error::InvalidArgument(
            "both factors must be bipartite".into(),
        ));
    }
    let (da, db) = (rho.dims()[0], rho.dims()[1]);
    let (da2, db2) = (sigma.dims()[0], sigma.dims()[1]);
    let product = tensor_product(rho.matrix(), sigma.matrix());
    let dims4 = [da, db, da2, db2];
    // New position k holds old subsystem perm[k]: (A, A′, B, B′).
    let permuted = permute_subsystems(&product, &dims4, &[0, 2, 1, 3])?;
    DensityMatrix::new(permuted, vec![da * da2, db * db2])
}

/// Regroups a multipartite state into a bipartite one: permutes the
/// subsystems so the first party's are contiguous and most significant (in
/// the listed order), then flattens each party to a single qudit.
pub fn regroup(rho: &DensityMatrix, partition: &Bipartition) -> Result<DensityMatrix> {
    let n = rho.dims().len();
    let mut seen = vec![false; n];
    for &idx in partition.party_a.iter().chain(&partition.party_b) {
        if idx >= n {
            return Err(Error::InvalidArgument(format!(
                "partition references subsystem {idx}, but the state has {n}"
            )));
        }
        if seen[idx] {
            return Err(Error::InvalidArgument(format!(
                "partition lists subsystem {idx} twice"
            )));
        }
        seen[idx] = true;
    }
    if partition.party_a.is_empty() || partition.party_b.is_empty() {
        return Err(Error::InvalidArgument(
            "both parties must be nonempty".into(),
        ));
    }
    if !seen.iter().all(|&s| s) {
        return Err(Error::InvalidArgument(
            "partition must cover every subsystem".into(),
        ));
    }
    let perm: Vec<usize> = partition
        .party_a
        .iter()
        .chain(&partition.party_b)
        .copied()
        .collect();
    let permuted = permute_subsystems(rho.matrix(), rho.dims(), &perm)?;
    let da: usize = partition.party_a.iter().map(|&i| rho.dims()[i]).product();
    let db: usize = partition.party_b.iter().map(|&i| rho.dims()[i]).product();
    DensityMatrix::new(permuted, vec![da, db])
}

/// Identifier of a fixed local Hamiltonian known to witness the usefulness
/// of a specific state construction.
#[derive(Debug, Clone)]
pub enum HamiltonianId {
    /// Alternating diagonal `diag(+1, −1, …)` on both parties of a `d×d`
    /// state; the best choice for noisy maximally entangled states.
    MaxEntangledDiag {
        /// Local dimension of each party.
        d: usize,
    },
    /// The qubit-ancilla construction for the noisy 3×3 maximally entangled
    /// state grouped as `(ancilla+A | B)`: an operator coupling the ancilla
    /// to party A, with the alternating diagonal on party B.
    AncillaActivation,
    /// The two-copy construction for the noisy 3×3 maximally entangled
    /// state grouped as `(AA′ | BB′)`: products of alternating diagonals on
    /// each party's pair.
    TwoCopyActivation,
    /// `Z` on party A and `−Z` on party B: optimal for the two-qubit
    /// singlet.
    SingletOptimal,
    /// `Z⊗Z` on each party's pair: optimal for two copies of the noisy
    /// singlet grouped as `(AA′ | BB′)`.
    TwoSingletOptimal,
    /// `Z⊗Y` on the first group and `Y⊗Z` on the second: makes the 4-qubit
    /// ring cluster state useful after grouping neighbors `(12 | 34)`.
    RingClusterGrouped,
    /// One alternating diagonal per party (`m` nonzero entries, then zeros)
    /// for the `N`-party GHZ-type state of local dimension `d` built on `m`
    /// levels; reaches the largest gain `N`.
    GhzOptimal {
        /// Number of parties.
        parties: usize,
        /// Local dimension.
        d: usize,
        /// Number of levels carrying amplitude (even, `2 ≤ m ≤ d`).
        m: usize,
    },
    /// Pair-swap operators built from a state's Schmidt rank: `X` blocks on
    /// the computational pairs `(0,1), (2,3), …` within the largest even
    /// rank, on both parties. Witnesses every pure entangled state's
    /// usefulness.
    SchmidtPairing {
        /// Schmidt coefficients of the target pure state.
        schmidt: SchmidtVector,
        /// First party's dimension.
        dim_a: usize,
        /// Second party's dimension.
        dim_b: usize,
    },
}

fn alternating_diag(d: usize, nonzero: usize) -> HermitianOperator {
    let diag: Vec<f64> = (0..d)
        .map(|k| {
            if k < nonzero {
                if k % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            } else {
                0.0
            }
        })
        .collect();
    HermitianOperator::from_diagonal(&diag)
}

fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_vec(
        2,
        2,
        vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ],
    )
    .expect("2x2")
}

fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::from_vec(
        2,
        2,
        vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
        ],
    )
    .expect("2x2")
}

fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_real_diagonal(&[1.0, -1.0])
}

/// Builds the fixed local Hamiltonian for an id; see [`HamiltonianId`] for
/// what each one certifies.
pub fn named_hamiltonian(id: &HamiltonianId) -> Result<LocalHamiltonian> {
    match id {
        HamiltonianId::MaxEntangledDiag { d } => {
            if *d < 2 {
                return Err(Error::InvalidArgument(format!(
                    "local dimension must be at least 2, got {d}"
                )));
            }
            let diag = alternating_diag(*d, *d);
            LocalHamiltonian::bipartite(diag.clone(), diag, 1.0, 1.0)
        }
        HamiltonianId::AncillaActivation => {
            // First group (ancilla ⊗ qutrit): couple the ancilla to the
            // |0⟩⟨0| level of A and shift the remaining levels; overall
            // scale 1.2 with the coupling weighted by 0.45.
            let coupling = {
                // 2X + Z on the ancilla qubit.
                let xz = sigma_x().scale(2.0).add(&sigma_z());
                let p0 = ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 0.0]);
                tensor_product(&xz, &p0).scale(0.45)
            };
            let shift = tensor_product(
                &ComplexMatrix::identity(2),
                &ComplexMatrix::from_real_diagonal(&[0.0, -1.0, 1.0]),
            );
            let h1 = HermitianOperator::new(coupling.add(&shift).scale(1.2))?;
            // Largest |eigenvalue|: the coupled block has radius
            // 1.2·0.45·√5 = 0.54√5.
            let c1 = 0.54 * 5.0f64.sqrt();
            let h2 = alternating_diag(3, 3);
            LocalHamiltonian::bipartite(h1, h2, c1, 1.0)
        }
        HamiltonianId::TwoCopyActivation => {
            let d3 = alternating_diag(3, 3);
            let prod = HermitianOperator::new(tensor_product(d3.matrix(), d3.matrix()))?;
            LocalHamiltonian::bipartite(prod.clone(), prod, 1.0, 1.0)
        }
        HamiltonianId::SingletOptimal => {
            let z = HermitianOperator::new(sigma_z())?;
            LocalHamiltonian::bipartite(z.clone(), z.scale(-1.0), 1.0, 1.0)
        }
        HamiltonianId::TwoSingletOptimal => {
            let zz = HermitianOperator::new(tensor_product(&sigma_z(), &sigma_z()))?;
            LocalHamiltonian::bipartite(zz.clone(), zz, 1.0, 1.0)
        }
        HamiltonianId::RingClusterGrouped => {
            let zy = HermitianOperator::new(tensor_product(&sigma_z(), &sigma_y()))?;
            let yz = HermitianOperator::new(tensor_product(&sigma_y(), &sigma_z()))?;
            LocalHamiltonian::bipartite(zy, yz, 1.0, 1.0)
        }
        HamiltonianId::GhzOptimal { parties, d, m } => {
            if *parties < 2 {
                return Err(Error::InvalidArgument(format!(
                    "need at least two parties, got {parties}"
                )));
            }
            if *m < 2 || *m > *d || *m % 2 != 0 {
                return Err(Error::InvalidArgument(format!(
                    "level count must be even with 2 ≤ m ≤ d, got m={m}, d={d}"
                )));
            }
            let part = alternating_diag(*d, *m);
            LocalHamiltonian::from_parts(vec![(part, 1.0); *parties])
        }
        HamiltonianId::SchmidtPairing {
            schmidt,
            dim_a,
            dim_b,
        } => {
            let paired = schmidt.rank() - schmidt.rank() % 2;
            if paired < 2 {
                return Err(Error::InvalidArgument(
                    "pair-swap construction needs Schmidt rank at least 2".into(),
                ));
            }
            if *dim_a < paired || *dim_b < paired {
                return Err(Error::InvalidArgument(format!(
                    "party dimensions ({dim_a}, {dim_b}) cannot hold {paired} paired levels"
                )));
            }
            let part = |dim: usize| {
                let mut m = ComplexMatrix::zeros(dim, dim);
                for j in 0..paired / 2 {
                    m.set(2 * j, 2 * j + 1, Complex64::new(1.0, 0.0));
                    m.set(2 * j + 1, 2 * j, Complex64::new(1.0, 0.0));
                }
                HermitianOperator::new(m)
            };
            LocalHamiltonian::bipartite(part(*dim_a)?, part(*dim_b)?, 1.0, 1.0)
        }
    }
}

/// Fisher information reached on one copy of a pure state with the given
/// Schmidt coefficients by the pair-swap construction:
/// `8 Σ_j (σ_{2j} + σ_{2j+1})²` over the pairs within the largest even rank.
/// Exceeds the separable bound 8 for every entangled state (rank ≥ 2).
pub fn schmidt_pairing_qfi(schmidt: &SchmidtVector) -> f64 {
    let coeffs = schmidt.coefficients();
    let paired = coeffs.len() - coeffs.len() % 2;
    let mut total = 0.0;
    for j in 0..paired / 2 {
        let s = coeffs[2 * j] + coeffs[2 * j + 1];
        total += 8.0 * s * s;
    }
    total
}

/// Exact multinomial coefficient `n! / ∏ kᵢ!` while it fits in `u128`;
/// `None` on overflow.
fn multinomial_exact(n: usize, ks: &[usize]) -> Option<u128> {
    let mut remaining = n as u128;
    let mut result: u128 = 1;
    for &k in ks {
        // result *= C(remaining, k)
        let mut binom: u128 = 1;
        for i in 0..k as u128 {
            binom = binom.checked_mul(remaining - i)?;
            binom /= i + 1;
        }
        result = result.checked_mul(binom)?;
        remaining -= k as u128;
    }
    Some(result)
}

/// Floating-point multinomial for counts too large to stay exact.
fn multinomial_float(n: usize, ks: &[usize]) -> f64 {
    let ln_fact = |m: usize| (2..=m).map(|i| (i as f64).ln()).sum::<f64>();
    let ln = ln_fact(n) - ks.iter().map(|&k| ln_fact(k)).sum::<f64>();
    ln.exp()
}

/// Fisher information reached on `n` copies of a pure state (each party
/// holding its halves) by pairing the sorted Schmidt coefficients of the
/// `n`-copy state: coefficients are all products `∏σᵢ^{kᵢ}` with
/// multinomial multiplicities, sorted descending, paired in order, and
/// summed as `8(ν_{2j}+ν_{2j+1})²`. The result is non-decreasing in `n` and
/// the `n = 1` case is [`schmidt_pairing_qfi`].
pub fn ncopy_bound(schmidt: &SchmidtVector, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "copy count must be at least 1".into(),
        ));
    }
    let coeffs = schmidt.coefficients();
    let rank = coeffs.len();

    // Enumerate compositions of n into `rank` nonnegative parts; each gives
    // one distinct coefficient value with a multinomial multiplicity.
    let mut classes: Vec<(f64, f64, Option<u128>)> = Vec::new();
    let mut ks = vec![0usize; rank];
    fn walk(
        coeffs: &[f64],
        ks: &mut Vec<usize>,
        idx: usize,
        left: usize,
        n: usize,
        classes: &mut Vec<(f64, f64, Option<u128>)>,
    ) {
        if idx == ks.len() - 1 {
            ks[idx] = left;
            let value: f64 = coeffs
                .iter()
                .zip(ks.iter())
                .map(|(&s, &k)| s.powi(k as i32))
                .product();
            let exact = multinomial_exact(n, ks);
            let mult = exact
                .map(|e| e as f64)
                .unwrap_or_else(|| multinomial_float(n, ks));
            classes.push((value, mult, exact));
            return;
        }
        for k in 0..=left {
            ks[idx] = k;
            walk(coeffs, ks, idx + 1, left - k, n, classes);
        }
    }
    walk(coeffs, &mut ks, 0, n, n, &mut classes);

    // Sort by coefficient value, largest first, and pair in order. Equal
    // values in adjacent classes pair across the boundary via the carry.
    classes.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite coefficients"));

    let mut total = 0.0;
    let mut carry: Option<f64> = None;
    for (value, mult_f, exact) in classes {
        let mut count = exact;
        let mut count_f = mult_f;
        if let Some(prev) = carry.take() {
            let s = prev + value;
            total += 8.0 * s * s;
            match &mut count {
                Some(c) => *c -= 1,
                None => count_f -= 1.0,
            }
            if let Some(c) = count {
                count_f = c as f64;
            }
        }
        let (pairs, odd) = match count {
            Some(c) => ((c / 2) as f64, c % 2 == 1),
            // Beyond exact range parity is unknowable; huge multiplicities
            // make the single-coefficient correction negligible.
            None => ((count_f / 2.0).floor(), (count_f as u64) % 2 == 1),
        };
        total += 32.0 * value * value * pairs;
        if odd {
            carry = Some(value);
        }
    }
    // A final unpaired coefficient contributes nothing.
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{partial_trace, spectral_decompose};
    use crate::metrology::{
        error_propagation, gain_for_hamiltonian, qfi, qfi_local, separable_bound, sld,
    };
    use crate::optimizer::{see_saw, SeeSawConfig};
    use crate::states::{self, RandomSeed};

    fn assert_close(actual: f64, expected: f64, tol: f64, what: &str) {
        assert!(
            (actual - expected).abs() <= tol,
            "{what}: got {actual}, expected {expected} (tol {tol})"
        );
    }

    #[test]
    fn ancilla_layouts_recover_the_original_state() {
        let rho = states::random_mixed(&[2, 3], RandomSeed(21)).unwrap();
        // Side A: subsystem order (ancilla, A, B).
        let ext_a = add_ancilla_default(&rho, Side::A).unwrap();
        assert_eq!(ext_a.dims(), &[4, 3]);
        let back = partial_trace(ext_a.matrix(), &[2, 2, 3], &[1, 2]).unwrap();
        assert!(back.max_abs_diff(rho.matrix()) < 1e-12);
        // Side B: subsystem order (A, B, ancilla).
        let ext_b = add_ancilla_default(&rho, Side::B).unwrap();
        assert_eq!(ext_b.dims(), &[2, 6]);
        let back = partial_trace(ext_b.matrix(), &[2, 3, 2], &[0, 1]).unwrap();
        assert!(back.max_abs_diff(rho.matrix()) < 1e-12);
        // The ancilla itself must come back pure in |0⟩.
        let anc = partial_trace(ext_b.matrix(), &[2, 3, 2], &[2]).unwrap();
        assert_close(anc.at(0, 0).re, 1.0, 1e-12, "ancilla population");
    }

    #[test]
    fn custom_ancilla_state_and_rejections() {
        let rho = states::noisy_singlet(0.1).unwrap();
        let inv_sqrt2 = 1.0 / 2.0f64.sqrt();
        let plus = [
            Complex64::new(inv_sqrt2, 0.0),
            Complex64::new(inv_sqrt2, 0.0),
        ];
        let ext = add_ancilla(&rho, Side::A, &plus).unwrap();
        let anc = partial_trace(ext.matrix(), &[2, 2, 2], &[0]).unwrap();
        assert_close(anc.at(0, 1).re, 0.5, 1e-12, "ancilla coherence");

        let unnormalized = [Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0)];
        assert!(add_ancilla(&rho, Side::A, &unnormalized).is_err());
        let too_small = [Complex64::new(1.0, 0.0)];
        assert!(add_ancilla(&rho, Side::A, &too_small).is_err());
        let tripartite = states::random_mixed(&[2, 2, 2], RandomSeed(3)).unwrap();
        assert!(add_ancilla_default(&tripartite, Side::A).is_err());
    }

    #[test]
    fn tensor_states_interleaves_parties() {
        let rho = states::random_mixed(&[2, 3], RandomSeed(31)).unwrap();
        let sigma = states::random_mixed(&[2, 2], RandomSeed(32)).unwrap();
        let joint = tensor_states(&rho, &sigma).unwrap();
        assert_eq!(joint.dims(), &[4, 6]);
        // Tracing out σ's subsystems (positions 1 and 3 in (A,A′,B,B′))
        // recovers ρ.
        let back = partial_trace(joint.matrix(), &[2, 2, 3, 2], &[0, 2]).unwrap();
        assert!(back.max_abs_diff(rho.matrix()) < 1e-12);
        let back_sigma = partial_trace(joint.matrix(), &[2, 2, 3, 2], &[1, 3]).unwrap();
        assert!(back_sigma.max_abs_diff(sigma.matrix()) < 1e-12);
    }

    #[test]
    fn regroup_roundtrip_and_validation() {
        let rho = states::random_mixed(&[2, 2, 2, 2], RandomSeed(41)).unwrap();
        let grouped = regroup(
            &rho,
            &Bipartition {
                party_a: vec![0, 1],
                party_b: vec![2, 3],
            },
        )
        .unwrap();
        assert_eq!(grouped.dims(), &[4, 4]);
        // The (01|23) grouping does not permute anything.
        assert!(grouped.matrix().max_abs_diff(rho.matrix()) < 1e-12);

        // A nontrivial grouping, undone by regrouping with the inverse.
        let shuffled = regroup(
            &rho,
            &Bipartition {
                party_a: vec![3, 0],
                party_b: vec![2, 1],
            },
        )
        .unwrap();
        let undone = regroup(
            &DensityMatrix::new(shuffled.matrix().clone(), vec![2, 2, 2, 2]).unwrap(),
            &Bipartition {
                party_a: vec![1, 3],
                party_b: vec![2, 0],
            },
        )
        .unwrap();
        assert!(undone.matrix().max_abs_diff(rho.matrix()) < 1e-12);

        for bad in [
            Bipartition {
                party_a: vec![0, 1],
                party_b: vec![1, 2, 3],
            },
            Bipartition {
                party_a: vec![0, 1, 2, 3],
                party_b: vec![],
            },
            Bipartition {
                party_a: vec![0, 4],
                party_b: vec![1, 2, 3],
            },
            Bipartition {
                party_a: vec![0],
                party_b: vec![2, 3],
            },
        ] {
            assert!(regroup(&rho, &bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn ancilla_hamiltonian_shape() {
        let h = named_hamiltonian(&HamiltonianId::AncillaActivation).unwrap();
        assert_eq!(h.dims(), vec![6, 3]);
        assert_close(
            h.c1(),
            0.54 * 5.0f64.sqrt(),
            1e-15,
            "first bound constant",
        );
        assert_close(separable_bound(&h), 9.832, 1e-12, "separable bound");
        // Spectrum of the coupled part: ±0.54√5 once, ±1.2 twice each.
        let eigs = spectral_decompose(h.h1()).unwrap().eigenvalues;
        let c = 0.54 * 5.0f64.sqrt();
        for (got, want) in eigs
            .iter()
            .zip([-c, -1.2, -1.2, 1.2, 1.2, c])
        {
            assert_close(*got, want, 1e-12, "coupled-part eigenvalue");
        }
    }

    #[test]
    fn ghz_states_reach_gain_equal_to_party_count() {
        for (parties, d, m) in [(2, 2, 2), (3, 2, 2), (4, 2, 2), (3, 4, 4), (2, 4, 2)] {
            let rho = states::ghz_state(parties, d, m).unwrap();
            let h = named_hamiltonian(&HamiltonianId::GhzOptimal { parties, d, m }).unwrap();
            assert_close(
                separable_bound(&h),
                4.0 * parties as f64,
                1e-12,
                "separable bound",
            );
            let result = gain_for_hamiltonian(&rho, &h).unwrap();
            assert_close(
                result.gain,
                parties as f64,
                1e-9,
                &format!("GHZ gain ({parties}, {d}, {m})"),
            );
        }
    }

    #[test]
    fn grouped_ring_cluster_is_useful() {
        let cluster = states::ring_cluster_4();
        let grouped = regroup(
            &cluster,
            &Bipartition {
                party_a: vec![0, 1],
                party_b: vec![2, 3],
            },
        )
        .unwrap();
        let h = named_hamiltonian(&HamiltonianId::RingClusterGrouped).unwrap();
        let result = gain_for_hamiltonian(&grouped, &h).unwrap();
        assert_close(result.qfi, 16.0, 1e-9, "grouped cluster Fisher information");
        assert_close(result.gain, 2.0, 1e-10, "grouped cluster gain");

        // Reading the phase out with the stabilizer-style observable
        // Z⊗X⊗X⊗Z reaches variance 1/16 (saturating the Fisher bound).
        let x = sigma_x();
        let z = sigma_z();
        let m = HermitianOperator::new(tensor_product(
            &tensor_product(&z, &x),
            &tensor_product(&x, &z),
        ))
        .unwrap();
        let total = h.total_operator();
        let ep = error_propagation(&grouped, &total, &m).unwrap();
        assert_close(
            ep.variance().expect("finite"),
            1.0 / 16.0,
            1e-10,
            "stabilizer readout variance",
        );
    }

    #[test]
    fn two_singlet_hamiltonian_beats_the_bound_at_the_single_copy_limit() {
        let p = (7.0 - 17.0f64.sqrt()) / 8.0;
        let one = states::noisy_singlet(p).unwrap();
        let two = tensor_states(&one, &one).unwrap();
        let h = named_hamiltonian(&HamiltonianId::TwoSingletOptimal).unwrap();
        let result = gain_for_hamiltonian(&two, &h).unwrap();
        // At the single-copy threshold the pair still beats the separable
        // bound: Fisher information 8.1530 > 8.
        assert_close(result.qfi, 8.15296, 1e-4, "two-singlet Fisher information");
        assert!(result.gain > 1.0);
    }

    #[test]
    fn schmidt_pairing_matches_fisher_information() {
        for (coeffs, dims) in [
            (vec![0.9, 0.436], (2usize, 2usize)),
            (vec![0.8, 0.5, 0.33166247903554], (4, 4)),
            (vec![0.5, 0.5, 0.5, 0.5], (4, 5)),
            (vec![0.7, 0.5, 0.4, 0.2, 0.26457513110645905], (6, 5)),
        ] {
            let sv = SchmidtVector::new(coeffs.clone()).unwrap();
            let rho = states::pure_from_schmidt(&sv, dims.0, dims.1).unwrap();
            let h = named_hamiltonian(&HamiltonianId::SchmidtPairing {
                schmidt: sv.clone(),
                dim_a: dims.0,
                dim_b: dims.1,
            })
            .unwrap();
            assert_close(separable_bound(&h), 8.0, 1e-12, "pair-swap separable bound");
            let total = h.total_operator();
            // The pair-swap Hamiltonian has zero diagonal, so the state has
            // zero mean energy.
            assert_close(
                total.expectation(rho.matrix()),
                0.0,
                1e-10,
                "mean energy",
            );
            let f = qfi(&rho, &total).unwrap();
            assert_close(
                f,
                schmidt_pairing_qfi(&sv),
                1e-8,
                "pair-swap Fisher information",
            );
        }
    }

    #[test]
    fn every_entangled_pure_state_is_useful_via_pairing() {
        // Any Schmidt rank ≥ 2 gives 8(σ₀+σ₁)² + … > 8.
        for seed in 0..10u64 {
            let coeffs: Vec<f64> = {
                use rand::{Rng, SeedableRng};
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(800 + seed);
                (0..3).map(|_| rng.gen::<f64>() + 0.05).collect()
            };
            let sv = SchmidtVector::new(coeffs.clone()).unwrap();
            assert!(
                schmidt_pairing_qfi(&sv) > 8.0,
                "rank-3 state must beat the separable bound"
            );
        }
    }

    #[test]
    fn copy_bound_frozen_values() {
        let sv = SchmidtVector::new(vec![0.9, 0.436]).unwrap();
        let s1 = ncopy_bound(&sv, 1).unwrap();
        assert_close(s1, 14.277797, 1e-5, "single-copy value");
        assert_close(s1, schmidt_pairing_qfi(&sv), 1e-12, "single-copy identity");
        let s2 = ncopy_bound(&sv, 2).unwrap();
        assert_close(s2, s1, 1e-9, "two copies add nothing here");
        let s15 = ncopy_bound(&sv, 15).unwrap();
        assert_close(s15, 15.904743, 1e-5, "fifteen-copy value");
        assert!(s15 > 15.9);
    }

    #[test]
    fn copy_bound_monotone_and_saturating() {
        let sv = SchmidtVector::new(vec![0.85, 0.4, 0.3, 0.15]).unwrap();
        let mut prev = 0.0;
        for n in 1..=7 {
            let s = ncopy_bound(&sv, n).unwrap();
            assert!(
                s >= prev - 1e-9,
                "bound must be non-decreasing: S({n}) = {s} < {prev}"
            );
            assert!(s <= 16.0 + 1e-9, "bound can never exceed 16");
            prev = s;
        }
        // Balanced coefficients reach the ceiling at every copy count.
        let balanced = SchmidtVector::new(vec![0.5f64.sqrt(), 0.5f64.sqrt()]).unwrap();
        for n in 1..=10 {
            assert_close(
                ncopy_bound(&balanced, n).unwrap(),
                16.0,
                1e-9,
                "balanced coefficients saturate",
            );
        }
        assert!(ncopy_bound(&sv, 0).is_err());
    }

    #[test]
    fn named_hamiltonian_validation() {
        assert!(named_hamiltonian(&HamiltonianId::MaxEntangledDiag { d: 1 }).is_err());
        assert!(named_hamiltonian(&HamiltonianId::GhzOptimal {
            parties: 1,
            d: 2,
            m: 2
        })
        .is_err());
        assert!(named_hamiltonian(&HamiltonianId::GhzOptimal {
            parties: 3,
            d: 4,
            m: 3
        })
        .is_err());
        let rank1 = SchmidtVector::new(vec![1.0]).unwrap();
        assert!(named_hamiltonian(&HamiltonianId::SchmidtPairing {
            schmidt: rank1,
            dim_a: 2,
            dim_b: 2
        })
        .is_err());
        let rank2 = SchmidtVector::new(vec![0.8, 0.6]).unwrap();
        assert!(named_hamiltonian(&HamiltonianId::SchmidtPairing {
            schmidt: rank2,
            dim_a: 1,
            dim_b: 2
        })
        .is_err());
    }

    #[test]
    fn ancilla_extension_cannot_reduce_the_optimal_gain() {
        let rho = states::noisy_singlet(0.25).unwrap();
        let cfg = SeeSawConfig {
            trials: 6,
            seed: RandomSeed(9),
            ..SeeSawConfig::default()
        };
        let base = see_saw(&rho, &cfg).unwrap().gain;
        let ext = add_ancilla_default(&rho, Side::B).unwrap();
        let extended = see_saw(&ext, &cfg).unwrap().gain;
        assert!(
            extended >= base - 2e-3,
            "extension lowered the gain: {extended} < {base}"
        );
    }

    #[test]
    fn fixed_hamiltonians_match_their_optimized_gains() {
        // Spot check: the dedicated singlet Hamiltonian is what the
        // optimizer finds.
        let rho = states::noisy_singlet(0.2).unwrap();
        let h = named_hamiltonian(&HamiltonianId::SingletOptimal).unwrap();
        let fixed = gain_for_hamiltonian(&rho, &h).unwrap().gain;
        let optimized = see_saw(
            &rho,
            &SeeSawConfig {
                trials: 6,
                seed: RandomSeed(10),
                ..SeeSawConfig::default()
            },
        )
        .unwrap()
        .gain;
        assert!(optimized >= fixed - 1e-6);
        assert_close(optimized, fixed, 1e-5, "optimizer matches fixed form");
        // And the optimal observable saturates it.
        let total = h.total_operator();
        let m = sld(&rho, &total).unwrap();
        let ep = error_propagation(&rho, &total, &m).unwrap();
        assert_close(
            ep.inverse(),
            qfi_local(&rho, &h).unwrap(),
            1e-7 * 16.0,
            "saturation",
        );
    }
}
