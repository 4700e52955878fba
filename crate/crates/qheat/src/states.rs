//! Density matrices and initial-state preparation.
//!
//! Initial states are local-equilibrium states: every `A_k` marginal is a
//! Gibbs state at its own temperature and the whole-`B` marginal is a
//! Gibbs state at `β_B`. On top of the product of Gibbs factors, strictly
//! off-diagonal coherence can be injected, subject to positivity.

use num_complex::Complex64;

use crate::linalg::{self, CMatrix};
use crate::pauli::{self, PauliSum, SystemSpec};
use crate::{Error, Result};

/// Hermiticity / trace tolerance for state validation.
pub const STATE_TOL: f64 = 1e-12;
/// Minimum-eigenvalue tolerance: states below `−1e-10` are rejected.
pub const PSD_TOL: f64 = -1e-10;
/// Cap on `βω` products; keeps `e^{βω}` finite. `β = ∞` is not supported.
pub const MAX_BETA_OMEGA: f64 = 700.0;

/// Exact SI Planck constant (J·s).
pub const PLANCK_H: f64 = 6.626_070_15e-34;
/// Exact SI Boltzmann constant (J/K).
pub const BOLTZMANN_KB: f64 = 1.380_649e-23;

/// Dimensionless `βω = h·f / (k_B·T)` from a temperature in kelvin and a
/// linear frequency `f = ω/2π` in GHz.
///
/// Example: `T = 1 K`, `f = 4 GHz` gives `βω ≈ 0.19197`.
pub fn beta_omega_si(temperature_kelvin: f64, frequency_ghz: f64) -> f64 {
    PLANCK_H * frequency_ghz * 1e9 / (BOLTZMANN_KB * temperature_kelvin)
}

/// A validated density matrix on a multi-qubit Hilbert space.
///
/// Hermitian within `1e-12`, unit trace within `1e-12`, minimum
/// eigenvalue ≥ `−1e-10`. Failing states are rejected, never clipped.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix, dims: Vec<usize>) -> Result<Self> {
        let total: usize = dims.iter().product();
        if matrix.nrows() != total || matrix.ncols() != total {
            return Err(Error::DimensionMismatch {
                expected: total,
                got: matrix.nrows(),
            });
        }
        if linalg::frob_norm(&(&matrix - linalg::dagger(&matrix))) > STATE_TOL {
            return Err(Error::NotHermitian {
                residual: linalg::hermiticity_residual(&matrix),
            });
        }
        let tr = linalg::trace(&matrix);
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidTrace { trace: tr.re });
        }
        let min_eig = min_eigenvalue(&matrix)?;
        if min_eig < PSD_TOL {
            return Err(Error::NotPositive {
                min_eigenvalue: min_eig,
            });
        }
        Ok(DensityMatrix { matrix, dims })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Reduced density matrix on the given subsystems (raw matrix).
    pub fn reduce(&self, keep: &[usize]) -> Result<CMatrix> {
        linalg::partial_trace(&self.matrix, keep, &self.dims)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.matrix).expect("validated state is Hermitian")
    }

    /// Bypass validation for matrices produced by operations that preserve
    /// state validity exactly (unitary conjugation).
    pub(crate) fn from_parts_unchecked(matrix: CMatrix, dims: Vec<usize>) -> Self {
        DensityMatrix { matrix, dims }
    }
}

fn min_eigenvalue(m: &CMatrix) -> Result<f64> {
    let eig = linalg::herm_eig(m)?;
    Ok(eig.eigenvalues[0])
}

/// Single-qubit Gibbs state of `H = −(ω/2)σᶻ` at inverse temperature `β`,
/// parameterized by the product `βω ≥ 0`.
///
/// Populations are `p₀ = 1/(1+e^{−βω})`, `p₁ = 1 − p₀`, giving
/// `⟨σᶻ⟩ = tanh(βω/2)`.
pub fn gibbs_qubit(beta_omega: f64) -> Result<DensityMatrix> {
    if !beta_omega.is_finite() || beta_omega < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "βω must be finite and ≥ 0, got {beta_omega}"
        )));
    }
    let bw = beta_omega.min(MAX_BETA_OMEGA);
    let p0 = 1.0 / (1.0 + (-bw).exp());
    let mut m = CMatrix::zeros(2, 2);
    m[(0, 0)] = Complex64::new(p0, 0.0);
    m[(1, 1)] = Complex64::new(1.0 - p0, 0.0);
    DensityMatrix::new(m, vec![2])
}

/// Gibbs state `e^{−βH}/Z` of an arbitrary Hermitian `H`.
pub fn gibbs_state(h: &CMatrix, beta: f64, dims: Vec<usize>) -> Result<DensityMatrix> {
    let eig = linalg::herm_eig(h)?;
    // subtract the ground energy before exponentiating
    let e0 = eig.eigenvalues[0];
    let weights: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&e| (-(beta * (e - e0)).min(MAX_BETA_OMEGA)).exp())
        .collect();
    let z: f64 = weights.iter().sum();
    let m = eig.apply(|e| (-(beta * (e - e0)).min(MAX_BETA_OMEGA)).exp() / z);
    DensityMatrix::new(m, dims)
}

/// Product of Gibbs factors `⊗_k ρ_{A_k} ⊗ ρ_B` for the given spec.
///
/// Every marginal of the result is the Gibbs state of its subsystem.
pub fn product_state(spec: &SystemSpec) -> Result<DensityMatrix> {
    let mut factors: Vec<CMatrix> = Vec::new();
    for a in spec.a_subsystems() {
        factors.push(gibbs_qubit(a.beta * a.omega)?.matrix().clone());
    }
    for b in spec.b_qubits() {
        factors.push(gibbs_qubit(spec.beta_b() * b.omega)?.matrix().clone());
    }
    let joint = linalg::kron_all(factors.iter());
    DensityMatrix::new(joint, spec.dims())
}

/// Add a strictly off-diagonal coherence term `χ` to a state: `ρ + χ`.
///
/// `χ` must be Hermitian with zero diagonal (hence traceless), so no
/// population changes. The result is re-validated; a positivity failure
/// reports the most negative eigenvalue rather than clipping.
pub fn add_coherence(
    rho: &DensityMatrix,
    chi: &PauliSum,
    spec: &SystemSpec,
) -> Result<DensityMatrix> {
    let chi_m = pauli::to_matrix(chi, spec)?;
    if linalg::hermiticity_residual(&chi_m) > 1e-12 {
        return Err(Error::NotHermitian {
            residual: linalg::hermiticity_residual(&chi_m),
        });
    }
    let max_diag = (0..chi_m.nrows())
        .map(|i| chi_m[(i, i)].norm())
        .fold(0.0f64, f64::max);
    if max_diag > 1e-12 {
        return Err(Error::DiagonalCoherence {
            magnitude: max_diag,
        });
    }
    DensityMatrix::new(rho.matrix() + chi_m, rho.dims().to_vec())
}

/// Is the reduced state on the named subsystems diagonal in the energy
/// product basis? True when the off-diagonal Frobenius mass is below `tol`.
pub fn is_diagonal(rho: &DensityMatrix, subsystems: &[usize], tol: f64) -> Result<bool> {
    let reduced = rho.reduce(subsystems)?;
    Ok(off_diagonal_mass(&reduced) < tol)
}

/// Frobenius norm of the off-diagonal part.
pub fn off_diagonal_mass(m: &CMatrix) -> f64 {
    let mut acc = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i != j {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{PauliOp, PauliTerm};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn si_conversion_matches_caption_values() {
        // T = 1 K, ω/2π = 8 GHz gives βω ≈ 0.38394; 4 GHz gives half.
        assert_relative_eq!(beta_omega_si(1.0, 8.0), 0.38394, epsilon = 1e-5);
        assert_relative_eq!(beta_omega_si(1.0, 4.0), 0.19197, epsilon = 1e-5);
        assert_relative_eq!(beta_omega_si(1.2, 4.0), 0.15997, epsilon = 1e-5);
    }

    #[test]
    fn gibbs_qubit_examples() {
        let infinite_temp = gibbs_qubit(0.0).unwrap();
        assert_relative_eq!(infinite_temp.matrix()[(0, 0)].re, 0.5, epsilon = 1e-15);
        assert_relative_eq!(infinite_temp.matrix()[(1, 1)].re, 0.5, epsilon = 1e-15);

        // scalar oracle: p₀ = 1/(1+e^{−βω}), ⟨σᶻ⟩ = tanh(βω/2)
        let bw = 0.38394;
        let p0 = 1.0 / (1.0 + (-bw as f64).exp());
        let g = gibbs_qubit(bw).unwrap();
        assert_relative_eq!(g.matrix()[(0, 0)].re, p0, epsilon = 1e-15);
        assert_relative_eq!(p0, 0.594_823_030_456_816_6, epsilon = 1e-12);
        let sz = g.matrix()[(0, 0)].re - g.matrix()[(1, 1)].re;
        assert_relative_eq!(sz, (bw / 2.0).tanh(), epsilon = 1e-14);
        assert_relative_eq!(sz, 0.189_646_060_913_633_26, epsilon = 1e-12);

        // ground state at βω → ∞ (capped internally)
        let cold = gibbs_qubit(1e9).unwrap();
        assert_relative_eq!(cold.matrix()[(0, 0)].re, 1.0, epsilon = 1e-15);
        assert_relative_eq!(cold.matrix()[(1, 1)].re, 0.0, epsilon = 1e-15);

        assert!(gibbs_qubit(-0.1).is_err());
        assert!(gibbs_qubit(f64::NAN).is_err());
    }

    #[test]
    fn gibbs_state_matches_gibbs_qubit() {
        let spec = SystemSpec::three_qubit(1.0, 0.3, 1.0, 0.3, 1.0, 0.2).unwrap();
        let h_b = pauli::to_matrix(&spec.free_b(), &spec).unwrap();
        // free_b acts on the full 8-dim space; reduce to the B factor instead
        let h_b1 = PauliOp::Z.matrix().scale(-0.5);
        let g = gibbs_state(&h_b1, 0.2, vec![2]).unwrap();
        let reference = gibbs_qubit(0.2).unwrap();
        assert!(linalg::frob_norm(&(g.matrix() - reference.matrix())) < 1e-14);
        drop(h_b);
    }

    fn fig1b_spec() -> SystemSpec {
        let b1 = beta_omega_si(1.0, 4.0);
        let b2 = beta_omega_si(0.5, 4.0);
        let bb = beta_omega_si(1.2, 4.0);
        SystemSpec::three_qubit(2.0, b1, 1.0, b2, 1.0, bb).unwrap()
    }

    #[test]
    fn product_state_is_diagonal_with_product_populations() {
        let spec = fig1b_spec();
        let rho = product_state(&spec).unwrap();
        // diagonal entries are products of single-qubit populations
        let pops: Vec<[f64; 2]> = vec![
            {
                let g = gibbs_qubit(2.0 * beta_omega_si(1.0, 4.0)).unwrap();
                [g.matrix()[(0, 0)].re, g.matrix()[(1, 1)].re]
            },
            {
                let g = gibbs_qubit(beta_omega_si(0.5, 4.0)).unwrap();
                [g.matrix()[(0, 0)].re, g.matrix()[(1, 1)].re]
            },
            {
                let g = gibbs_qubit(beta_omega_si(1.2, 4.0)).unwrap();
                [g.matrix()[(0, 0)].re, g.matrix()[(1, 1)].re]
            },
        ];
        for idx in 0..8 {
            let bits = [(idx >> 2) & 1, (idx >> 1) & 1, idx & 1];
            let want = pops[0][bits[0]] * pops[1][bits[1]] * pops[2][bits[2]];
            assert_relative_eq!(rho.matrix()[(idx, idx)].re, want, epsilon = 1e-14);
        }
        assert!(off_diagonal_mass(rho.matrix()) < 1e-15);
    }

    #[test]
    fn product_state_marginals_are_gibbs() {
        let spec = fig1b_spec();
        let rho = product_state(&spec).unwrap();
        for (idx, bw) in [
            (0usize, 2.0 * beta_omega_si(1.0, 4.0)),
            (1, beta_omega_si(0.5, 4.0)),
            (2, beta_omega_si(1.2, 4.0)),
        ] {
            let marginal = rho.reduce(&[idx]).unwrap();
            let gibbs = gibbs_qubit(bw).unwrap();
            assert!(linalg::frob_norm(&(marginal - gibbs.matrix())) < 1e-12);
        }
        // subset marginals stay products of the Gibbs factors
        let m01 = rho.reduce(&[0, 1]).unwrap();
        let want = linalg::kron(
            gibbs_qubit(2.0 * beta_omega_si(1.0, 4.0)).unwrap().matrix(),
            gibbs_qubit(beta_omega_si(0.5, 4.0)).unwrap().matrix(),
        );
        assert!(linalg::frob_norm(&(m01 - want)) < 1e-12);
    }

    fn fig1d_chi() -> PauliSum {
        PauliSum::from_terms(vec![PauliTerm::new(
            c(0.24, 0.0),
            vec![("A1".into(), PauliOp::Plus), ("A2".into(), PauliOp::Minus)],
        )
        .unwrap()])
        .plus_hc()
    }

    fn fig1d_spec() -> SystemSpec {
        let ba = beta_omega_si(1.0, 4.0);
        let bb = beta_omega_si(1.2, 4.0);
        SystemSpec::three_qubit(1.0, ba, 1.0, ba, 1.0, bb).unwrap()
    }

    #[test]
    fn add_coherence_zero_is_identity() {
        let spec = fig1d_spec();
        let rho = product_state(&spec).unwrap();
        let out = add_coherence(&rho, &PauliSum::zero(), &spec).unwrap();
        assert!(linalg::frob_norm(&(out.matrix() - rho.matrix())) < 1e-15);
    }

    #[test]
    fn coherence_injected_state_is_valid_and_diagonal_preserving() {
        // The eigenvalue oracle decides validity of the 0.24 amplitude at
        // T_A = 1 K, T_B = 1.2 K, ω/2π = 4 GHz: the A-block populations
        // give p·q ≈ 0.2477 > 0.24, so the state is strictly positive.
        let spec = fig1d_spec();
        let rho = product_state(&spec).unwrap();
        let out = add_coherence(&rho, &fig1d_chi(), &spec).unwrap();
        assert!(out.min_eigenvalue() > 0.0);
        for i in 0..8 {
            assert_relative_eq!(
                out.matrix()[(i, i)].re,
                rho.matrix()[(i, i)].re,
                epsilon = 1e-14
            );
        }
        // the A1A2 reduction equals ρ_{A1} ⊗ ρ_{A2} + χ_A
        let reduced = out.reduce(&[0, 1]).unwrap();
        let ba = beta_omega_si(1.0, 4.0);
        let product = linalg::kron(
            gibbs_qubit(ba).unwrap().matrix(),
            gibbs_qubit(ba).unwrap().matrix(),
        );
        let mut chi_expected = CMatrix::zeros(4, 4);
        chi_expected[(1, 2)] = c(0.24, 0.0);
        chi_expected[(2, 1)] = c(0.24, 0.0);
        assert!(linalg::frob_norm(&(reduced - (product + chi_expected))) < 1e-12);
    }

    #[test]
    fn add_coherence_rejects_diagonal_component() {
        let spec = fig1d_spec();
        let rho = product_state(&spec).unwrap();
        let chi = PauliSum::from_terms(vec![
            PauliTerm::real(0.01, vec![("A1", PauliOp::Z)]).unwrap()
        ]);
        assert!(matches!(
            add_coherence(&rho, &chi, &spec),
            Err(Error::DiagonalCoherence { .. })
        ));
    }

    #[test]
    fn add_coherence_rejects_psd_violation() {
        // cranking the amplitude past p·q must fail with the most negative
        // eigenvalue in the error
        let spec = fig1d_spec();
        let rho = product_state(&spec).unwrap();
        let chi = PauliSum::from_terms(vec![PauliTerm::new(
            c(0.4, 0.0),
            vec![("A1".into(), PauliOp::Plus), ("A2".into(), PauliOp::Minus)],
        )
        .unwrap()])
        .plus_hc();
        match add_coherence(&rho, &chi, &spec) {
            Err(Error::NotPositive { min_eigenvalue }) => assert!(min_eigenvalue < -0.1),
            other => panic!("expected positivity failure, got {other:?}"),
        }
    }

    #[test]
    fn is_diagonal_detects_intra_a_coherence() {
        let spec = fig1d_spec();
        let rho = product_state(&spec).unwrap();
        assert!(is_diagonal(&rho, &[0, 1], 1e-10).unwrap());
        assert!(is_diagonal(&rho, &[0, 1, 2], 1e-10).unwrap());

        let coherent = add_coherence(&rho, &fig1d_chi(), &spec).unwrap();
        assert!(!is_diagonal(&coherent, &[0, 1], 1e-10).unwrap());
        // χ_A traces out to zero over A2, so (A1, B) stays diagonal
        assert!(is_diagonal(&coherent, &[0, 2], 1e-10).unwrap());
        assert!(is_diagonal(&coherent, &[1, 2], 1e-10).unwrap());
    }
}
