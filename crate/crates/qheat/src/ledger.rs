//! Entropy functionals and the heat-transfer ledger.
//!
//! For an isolated joint system evolving unitarily from a
//! local-equilibrium state, the entropy flux `(β_B − β_A)·Q` decomposes
//! exactly into
//!
//! ```text
//! (β_B − β_A) Q = Σ_k S(ρ'_{A_k}‖ρ_{A_k}) + S(ρ'_B‖ρ_B)
//!                 + ΔI_AB + Δ𝔗_A + Δ𝔍_A
//! ```
//!
//! with `Q = Δ⟨H_B⟩` the heat received by `B`, `β_A = min_k β_{A_k}`,
//! `ΔI_AB` the change of multipartite mutual information among all the
//! subsystems (splitting further into an intra-`A` part `ΔI_A` and a
//! cross part `ΔI_{A:B}`), `Δ𝔗_A = Σ_k (β_A − β_{A_k}) Δ⟨H_{A_k}⟩` the
//! temperature-inhomogeneity flux and `Δ𝔍_A = β_A Δ⟨H_{AI}⟩` the
//! interaction flux. A negative left-hand side is anomalous heat
//! transfer, and the most negative right-hand term names the mechanism.
//!
//! Entropies are in nats. Mutual informations use each state's own
//! instantaneous marginals, which is what makes the identity exact at all
//! times; at `t = 0` they coincide with the Gibbs-referenced values.

use std::fmt;

use crate::linalg::{self, CMatrix};
use crate::pauli::{self, PauliSum, SystemSpec};
use crate::states::{self, DensityMatrix};
use crate::{Error, Result};

/// Eigenvalues below this floor are treated as zero under `ln`.
pub const EIG_FLOOR: f64 = 1e-14;
/// A state putting more weight than this on the reference's kernel is a
/// support violation.
pub const SUPPORT_WEIGHT_TOL: f64 = 1e-12;
/// Frobenius tolerance for the local-equilibrium precondition.
pub const LOCAL_EQ_TOL: f64 = 1e-9;

/// `S(ρ) = −tr(ρ ln ρ)` in nats, with `0·ln 0 ≡ 0`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of(rho.matrix())
}

pub(crate) fn entropy_of(m: &CMatrix) -> f64 {
    let eig = linalg::herm_eig(m).expect("states and their marginals are Hermitian");
    eig.eigenvalues
        .iter()
        .filter(|&&p| p > EIG_FLOOR)
        .map(|&p| -p * p.ln())
        .sum()
}

/// Quantum relative entropy `S(ρ‖σ) = −tr(ρ ln σ) − S(ρ)`.
///
/// Returns `+∞` when `ρ` has weight on the kernel of `σ`; use
/// [`relative_entropy_checked`] for the diagnostic.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    relative_entropy_checked(rho, sigma).unwrap_or(f64::INFINITY)
}

/// As [`relative_entropy`], but a support violation is an error carrying
/// the offending weight.
pub fn relative_entropy_checked(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    relative_entropy_m(rho.matrix(), sigma.matrix())
}

pub(crate) fn relative_entropy_m(rho: &CMatrix, sigma: &CMatrix) -> Result<f64> {
    if rho.nrows() != sigma.nrows() {
        return Err(Error::DimensionMismatch {
            expected: rho.nrows(),
            got: sigma.nrows(),
        });
    }
    let eig = linalg::herm_eig(sigma)?;
    let mut cross = 0.0;
    for (j, &s) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvectors.column(j);
        // ⟨v_j|ρ|v_j⟩
        let mut w = 0.0;
        for r in 0..rho.nrows() {
            let mut rv = num_complex::Complex64::new(0.0, 0.0);
            for c in 0..rho.ncols() {
                rv += rho[(r, c)] * v[c];
            }
            w += (v[r].conj() * rv).re;
        }
        if s <= EIG_FLOOR {
            if w > SUPPORT_WEIGHT_TOL {
                return Err(Error::SupportViolation { weight: w });
            }
            continue;
        }
        cross += -w * s.ln();
    }
    Ok(cross - entropy_of(rho))
}

/// Multipartite mutual information `Σ_parts S(ρ_part) − S(ρ)` for a
/// disjoint partition covering all subsystems.
pub fn mutual_information(rho: &DensityMatrix, partition: &[Vec<usize>]) -> Result<f64> {
    let n = rho.dims().len();
    let mut seen = vec![false; n];
    for part in partition {
        for &idx in part {
            if idx >= n || seen[idx] {
                return Err(Error::InvalidParameter(format!(
                    "partition must cover all {n} subsystems disjointly"
                )));
            }
            seen[idx] = true;
        }
    }
    if !seen.iter().all(|&s| s) {
        return Err(Error::InvalidParameter(format!(
            "partition must cover all {n} subsystems disjointly"
        )));
    }
    let mut acc = 0.0;
    for part in partition {
        acc += entropy_of(&rho.reduce(part)?);
    }
    Ok(acc - von_neumann_entropy(rho))
}

/// The six ledger terms plus the intra/cross split of `ΔI_AB`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatLedger {
    /// Heat received by `B`: `Q = Δ⟨H_B⟩`.
    pub q: f64,
    /// `(β_B − β_A)·Q`; negative in the AHT regime.
    pub lhs: f64,
    /// `S(ρ'_{A_k}‖ρ_{A_k})` per cold subsystem.
    pub rel_entropy_a: Vec<f64>,
    /// `S(ρ'_B‖ρ_B)`.
    pub rel_entropy_b: f64,
    /// `ΔI_AB`, mutual information among all subsystems.
    pub delta_mutual_ab: f64,
    /// `Δ𝔗_A`, temperature-inhomogeneity flux.
    pub delta_temp_inhom: f64,
    /// `Δ𝔍_A`, interaction-energy flux.
    pub delta_interaction: f64,
    /// `ΔI_A`, mutual information within `A`.
    pub delta_mutual_intra: f64,
    /// `ΔI_{A:B}`, bipartite mutual information between `A` and `B`.
    pub delta_mutual_cross: f64,
    /// `Δ⟨H_A⟩ + Δ⟨H_B⟩`; vanishes under the heat transfer condition.
    pub conservation_residual: f64,
}

impl HeatLedger {
    /// Right-hand side of the ledger identity.
    pub fn rhs(&self) -> f64 {
        self.rel_entropy_a.iter().sum::<f64>()
            + self.rel_entropy_b
            + self.delta_mutual_ab
            + self.delta_temp_inhom
            + self.delta_interaction
    }

    /// `|LHS − RHS| / max(|LHS|, 1e-6)`.
    pub fn identity_residual(&self) -> f64 {
        (self.lhs - self.rhs()).abs() / self.lhs.abs().max(1e-6)
    }

    /// Entropy production `ΔI_{A:B} + S(ρ'_B‖ρ_B)`, exposed as a derived
    /// quantity only.
    pub fn entropy_production(&self) -> f64 {
        self.delta_mutual_cross + self.rel_entropy_b
    }

    fn zero(n_a: usize) -> Self {
        HeatLedger {
            q: 0.0,
            lhs: 0.0,
            rel_entropy_a: vec![0.0; n_a],
            rel_entropy_b: 0.0,
            delta_mutual_ab: 0.0,
            delta_temp_inhom: 0.0,
            delta_interaction: 0.0,
            delta_mutual_intra: 0.0,
            delta_mutual_cross: 0.0,
            conservation_residual: 0.0,
        }
    }
}

/// AHT mechanism labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mechanism {
    None,
    CorrelationIntra,
    CorrelationCross,
    TemperatureInhomogeneity,
    Interaction,
    Mixed,
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Mechanism::None => "none",
            Mechanism::CorrelationIntra => "correlation-intra",
            Mechanism::CorrelationCross => "correlation-cross",
            Mechanism::TemperatureInhomogeneity => "temperature-inhomogeneity",
            Mechanism::Interaction => "interaction",
            Mechanism::Mixed => "mixed",
        };
        write!(f, "{s}")
    }
}

/// The Hamiltonian pieces the ledger needs: per-subsystem free terms
/// `H_{A_k}`, the intra-`A` interaction `H_{AI}`, and `H_B`.
#[derive(Debug, Clone)]
pub struct HamiltonianParts {
    pub h_a_subsystems: Vec<PauliSum>,
    pub h_ai: PauliSum,
    pub h_b: PauliSum,
}

impl HamiltonianParts {
    /// Free subsystem Hamiltonians from the spec plus a given `H_{AI}`.
    pub fn from_spec(spec: &SystemSpec, h_ai: PauliSum) -> Result<Self> {
        let mut h_a_subsystems = Vec::new();
        for a in spec.a_subsystems() {
            h_a_subsystems.push(spec.free_hamiltonian_of(&a.label)?);
        }
        Ok(HamiltonianParts {
            h_a_subsystems,
            h_ai,
            h_b: spec.free_b(),
        })
    }

    /// `H_A = Σ_k H_{A_k} + H_{AI}`.
    pub fn h_a_total(&self) -> PauliSum {
        let mut sum = self.h_ai.clone();
        for h in &self.h_a_subsystems {
            sum = sum + h;
        }
        sum
    }
}

/// Evaluate the full ledger between an initial local-equilibrium state and
/// an evolved state.
///
/// The initial state must have Gibbs marginals on every `A_k` and on `B`
/// as a whole (within `1e-9` Frobenius); anything else is rejected — the
/// identity is not defined for other initial states. `Q` is `Δ⟨H_B⟩`; the
/// `conservation_residual` field records `Δ⟨H_A⟩ + Δ⟨H_B⟩` so callers can
/// cross-check `Q = −Δ⟨H_A⟩` whenever the heat transfer condition holds.
pub fn compute_ledger(
    rho_initial: &DensityMatrix,
    rho_final: &DensityMatrix,
    spec: &SystemSpec,
    parts: &HamiltonianParts,
) -> Result<HeatLedger> {
    let n = spec.n_qubits();
    if rho_initial.dims() != spec.dims().as_slice() || rho_final.dims() != spec.dims().as_slice() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: rho_initial.dim(),
        });
    }
    if parts.h_a_subsystems.len() != spec.n_a() {
        return Err(Error::InvalidParameter(format!(
            "expected {} per-subsystem Hamiltonians, got {}",
            spec.n_a(),
            parts.h_a_subsystems.len()
        )));
    }

    let beta_a = spec.beta_a();
    let beta_b = spec.beta_b();
    let b_indices = spec.b_indices();
    let a_indices = spec.a_indices();

    // Gibbs references, extracted from the operator factors so interacting
    // H_B variants would also work.
    let mut gibbs_a: Vec<CMatrix> = Vec::new();
    for (k, a) in spec.a_subsystems().iter().enumerate() {
        let h_k = pauli::to_matrix(&parts.h_a_subsystems[k], spec)?;
        let factor = extract_factor(&h_k, &[k], n)?;
        gibbs_a.push(
            states::gibbs_state(&factor, a.beta, vec![2])?
                .matrix()
                .clone(),
        );
    }
    let h_b_m = pauli::to_matrix(&parts.h_b, spec)?;
    let h_b_factor = extract_factor(&h_b_m, &b_indices, n)?;
    let gibbs_b = states::gibbs_state(&h_b_factor, beta_b, vec![2; spec.n_b()])?
        .matrix()
        .clone();

    // Local-equilibrium precondition on the initial state.
    for (k, a) in spec.a_subsystems().iter().enumerate() {
        let marginal = rho_initial.reduce(&[k])?;
        let dev = linalg::frob_norm(&(marginal - &gibbs_a[k]));
        if dev > LOCAL_EQ_TOL {
            return Err(Error::NotLocalEquilibrium {
                label: a.label.clone(),
                deviation: dev,
            });
        }
    }
    let b_marginal = rho_initial.reduce(&b_indices)?;
    let dev = linalg::frob_norm(&(b_marginal - &gibbs_b));
    if dev > LOCAL_EQ_TOL {
        return Err(Error::NotLocalEquilibrium {
            label: "B".into(),
            deviation: dev,
        });
    }

    let diff = rho_final.matrix() - rho_initial.matrix();
    if linalg::frob_norm(&diff) == 0.0 {
        return Ok(HeatLedger::zero(spec.n_a()));
    }

    let q = linalg::expectation(&h_b_m, &diff).re;
    let h_a_m = pauli::to_matrix(&parts.h_a_total(), spec)?;
    let conservation_residual = linalg::expectation(&h_a_m, &diff).re + q;

    let mut rel_entropy_a = Vec::new();
    let mut delta_temp_inhom = 0.0;
    for (k, a) in spec.a_subsystems().iter().enumerate() {
        let marginal_final = rho_final.reduce(&[k])?;
        rel_entropy_a.push(relative_entropy_m(&marginal_final, &gibbs_a[k])?);
        let h_k = pauli::to_matrix(&parts.h_a_subsystems[k], spec)?;
        delta_temp_inhom += (beta_a - a.beta) * linalg::expectation(&h_k, &diff).re;
    }
    let rel_entropy_b = relative_entropy_m(&rho_final.reduce(&b_indices)?, &gibbs_b)?;
    let h_ai_m = pauli::to_matrix(&parts.h_ai, spec)?;
    let delta_interaction = beta_a * linalg::expectation(&h_ai_m, &diff).re;

    // Mutual informations with each state's own marginals.
    let mi = |rho: &DensityMatrix| -> Result<(f64, f64)> {
        let joint = von_neumann_entropy(rho);
        let s_a = entropy_of(&rho.reduce(&a_indices)?);
        let s_b = entropy_of(&rho.reduce(&b_indices)?);
        let mut singles = 0.0;
        for k in 0..spec.n_a() {
            singles += entropy_of(&rho.reduce(&[k])?);
        }
        let intra = singles - s_a;
        let cross = s_a + s_b - joint;
        Ok((intra, cross))
    };
    let (intra0, cross0) = mi(rho_initial)?;
    let (intra1, cross1) = mi(rho_final)?;
    let delta_mutual_intra = intra1 - intra0;
    let delta_mutual_cross = cross1 - cross0;

    Ok(HeatLedger {
        q,
        lhs: (beta_b - beta_a) * q,
        rel_entropy_a,
        rel_entropy_b,
        delta_mutual_ab: delta_mutual_intra + delta_mutual_cross,
        delta_temp_inhom,
        delta_interaction,
        delta_mutual_intra,
        delta_mutual_cross,
        conservation_residual,
    })
}

/// For an operator of the form `I ⊗ h ⊗ I` supported on `support`,
/// recover the factor `h` by partial trace and normalization.
fn extract_factor(m: &CMatrix, support: &[usize], n_qubits: usize) -> Result<CMatrix> {
    let dims = vec![2usize; n_qubits];
    let reduced = linalg::partial_trace(m, support, &dims)?;
    let complement_dim = 1usize << (n_qubits - support.len());
    Ok(reduced / num_complex::Complex64::new(complement_dim as f64, 0.0))
}

/// Name the dominant AHT mechanism of a ledger.
///
/// `none` unless `lhs < 0`; otherwise the most negative term among
/// `{ΔI_A, ΔI_{A:B}, Δ𝔗_A, Δ𝔍_A}`, or `mixed` when the two most negative
/// terms lie within `threshold` of each other.
pub fn classify_aht(ledger: &HeatLedger, threshold: f64) -> Mechanism {
    if ledger.lhs >= 0.0 {
        return Mechanism::None;
    }
    let mut candidates = [
        (Mechanism::CorrelationIntra, ledger.delta_mutual_intra),
        (Mechanism::CorrelationCross, ledger.delta_mutual_cross),
        (Mechanism::TemperatureInhomogeneity, ledger.delta_temp_inhom),
        (Mechanism::Interaction, ledger.delta_interaction),
    ];
    candidates.sort_by(|a, b| a.1.total_cmp(&b.1));
    if candidates[1].1 - candidates[0].1 <= threshold {
        return Mechanism::Mixed;
    }
    candidates[0].0
}
