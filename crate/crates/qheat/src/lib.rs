//! Heat transfer in small nonequilibrium quantum systems.
//!
//! This crate builds multi-qubit Hamiltonians obeying the heat transfer
//! condition `[H_I, H_A + H_B] = 0`, prepares local-equilibrium initial
//! states, evolves them exactly by eigendecomposition, and decomposes the
//! entropy flux `(β_B − β_A)·Q` into per-subsystem relative entropies,
//! mutual-information changes, a temperature-inhomogeneity flux and an
//! interaction-energy flux. Anomalous heat transfer (AHT) — heat flowing
//! spontaneously from the cold system into the hot one — shows up as a
//! negative entropy flux, and the ledger names the mechanism paying for it.
//!
//! The main entry points:
//!
//! - [`pauli`]: symbolic Pauli strings, [`pauli::SystemSpec`], interaction
//!   constructors and the heat-transfer-condition validator.
//! - [`states`]: Gibbs qubits, product states, coherence injection.
//! - [`ledger`]: entropies and [`ledger::HeatLedger`].
//! - [`dynamics`]: exact evolution, heat series, nested-commutator
//!   derivatives and the convexity decomposition.
//! - [`analysis`]: closed-form convexity, phase boundary and grid scans.
//! - [`scenarios`]: bundled three-qubit configurations.
//!
//! Units are `ħ = k_B = 1` with energies in a reference `ω₀`; see
//! [`states::beta_omega_si`] for converting kelvin/GHz inputs.
//!
//! Runnable walkthroughs live in `examples/`; the thin `qheat` binary
//! drives the same library functions from JSON configs.

pub mod analysis;
pub mod cli;
pub mod config;
pub mod dynamics;
pub mod ledger;
pub mod linalg;
pub mod pauli;
pub mod scenarios;
pub mod states;

pub use analysis::{phase_boundary, phase_scan, PhasePoint, ScanConfig, ScanResult};
pub use dynamics::{evolve, heat_series, q_derivative, DerivativeReport, TimeSeries};
pub use ledger::{classify_aht, compute_ledger, HeatLedger, Mechanism};
pub use linalg::CMatrix;
pub use pauli::{PauliOp, PauliSum, PauliTerm, SystemSpec};
pub use scenarios::{scenario, Scenario};
pub use states::DensityMatrix;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (relative residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("unknown qubit label `{0}`")]
    UnknownQubit(String),

    #[error("duplicate qubit label `{0}`")]
    DuplicateQubit(String),

    #[error("trace is {trace:.6e}, expected 1")]
    InvalidTrace { trace: f64 },

    #[error("matrix is not positive semi-definite (minimum eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("coherence term has diagonal components (largest {magnitude:.3e})")]
    DiagonalCoherence { magnitude: f64 },

    #[error("state is not in local equilibrium: subsystem {label} deviates from its Gibbs state by {deviation:.3e}")]
    NotLocalEquilibrium { label: String, deviation: f64 },

    #[error("reference state lacks support where the state has weight {weight:.3e}")]
    SupportViolation { weight: f64 },

    #[error("imaginary residue {residue:.3e} in a quantity that must be real")]
    ImaginaryResidue { residue: f64 },

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
