//! Symbolic Pauli-string Hamiltonians, qubit system specifications, and the
//! heat transfer condition.
//!
//! Hamiltonians are sums of weighted Pauli strings over labelled qubits.
//! The system is split into `N` cold subsystems `A_k` (each with its own
//! inverse temperature `β_{A_k}`) and a hot system `B` of one or more
//! qubits sharing `β_B`. Free qubit Hamiltonians are `−(ω/2)σᶻ`, so `|0⟩`
//! is the ground state and the Gibbs weight of `|0⟩` is `1/(1+e^{−βω})`.
//!
//! An interaction `H_I` transfers heat unambiguously only under the heat
//! transfer condition `[H_I, H_A + H_B] = 0`. For a string written with
//! raising, lowering and z factors the condition against the free part
//! reduces to frequency matching: the summed frequencies of the raising
//! factors must equal those of the lowering factors, z factors free.

use std::collections::HashSet;
use std::fmt;

use num_complex::Complex64;

use crate::linalg::{self, CMatrix};
use crate::{Error, Result};

/// Single-qubit operator appearing in a Pauli string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliOp {
    X,
    Y,
    Z,
    Plus,
    Minus,
}

impl PauliOp {
    /// The 2×2 matrix in the `|0⟩, |1⟩` basis with `σᶻ|0⟩ = +|0⟩` and
    /// `σ± = (σˣ ± iσʸ)/2`, so `σ⁺|1⟩ = |0⟩`.
    pub fn matrix(&self) -> CMatrix {
        let c = Complex64::new;
        let entries = match self {
            PauliOp::X => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
            PauliOp::Y => [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]],
            PauliOp::Z => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]],
            PauliOp::Plus => [[c(0.0, 0.0), c(1.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]],
            PauliOp::Minus => [[c(0.0, 0.0), c(0.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
        };
        CMatrix::from_fn(2, 2, |i, j| entries[i][j])
    }

    /// Adjoint operator: swaps `σ⁺` and `σ⁻`, fixes `σˣ`, `σʸ`, `σᶻ`.
    pub fn dagger(&self) -> PauliOp {
        match self {
            PauliOp::Plus => PauliOp::Minus,
            PauliOp::Minus => PauliOp::Plus,
            other => *other,
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            PauliOp::X => "x",
            PauliOp::Y => "y",
            PauliOp::Z => "z",
            PauliOp::Plus => "+",
            PauliOp::Minus => "-",
        }
    }

    pub fn from_symbol(s: &str) -> Result<PauliOp> {
        match s {
            "x" | "X" => Ok(PauliOp::X),
            "y" | "Y" => Ok(PauliOp::Y),
            "z" | "Z" => Ok(PauliOp::Z),
            "+" => Ok(PauliOp::Plus),
            "-" => Ok(PauliOp::Minus),
            other => Err(Error::InvalidParameter(format!(
                "unknown Pauli operator `{other}`"
            ))),
        }
    }
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// One weighted Pauli string: `coeff · Π σ^{op}_{label}`.
///
/// Qubit labels within a term are distinct; identity factors are implicit.
/// Hermiticity is a property of a [`PauliSum`], never of a single term —
/// conjugate partners are always added explicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coeff: Complex64,
    pub factors: Vec<(String, PauliOp)>,
}

impl PauliTerm {
    pub fn new(coeff: Complex64, factors: Vec<(String, PauliOp)>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (label, _) in &factors {
            if !seen.insert(label.clone()) {
                return Err(Error::DuplicateQubit(label.clone()));
            }
        }
        Ok(PauliTerm { coeff, factors })
    }

    /// Convenience constructor with a real coefficient.
    pub fn real(coeff: f64, factors: Vec<(&str, PauliOp)>) -> Result<Self> {
        PauliTerm::new(
            Complex64::new(coeff, 0.0),
            factors.into_iter().map(|(l, o)| (l.to_string(), o)).collect(),
        )
    }

    /// Hermitian conjugate of the term.
    pub fn dagger(&self) -> PauliTerm {
        PauliTerm {
            coeff: self.coeff.conj(),
            factors: self
                .factors
                .iter()
                .map(|(l, o)| (l.clone(), o.dagger()))
                .collect(),
        }
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:+.6}{:+.6}i)", self.coeff.re, self.coeff.im)?;
        for (label, op) in &self.factors {
            write!(f, " σ{}_{}", op, label)?;
        }
        Ok(())
    }
}

/// A sum of Pauli strings.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PauliSum {
    pub terms: Vec<PauliTerm>,
}

impl PauliSum {
    pub fn zero() -> Self {
        PauliSum { terms: Vec::new() }
    }

    pub fn from_terms(terms: Vec<PauliTerm>) -> Self {
        PauliSum { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() || self.terms.iter().all(|t| t.coeff.norm() == 0.0)
    }

    pub fn push(&mut self, term: PauliTerm) {
        self.terms.push(term);
    }

    /// The sum plus its Hermitian conjugate. Conjugate closure is always
    /// explicit; nothing in this crate adds `h.c.` silently.
    pub fn plus_hc(&self) -> PauliSum {
        let mut terms = self.terms.clone();
        terms.extend(self.terms.iter().map(PauliTerm::dagger));
        PauliSum { terms }
    }

    pub fn scaled(&self, factor: Complex64) -> PauliSum {
        PauliSum {
            terms: self
                .terms
                .iter()
                .map(|t| PauliTerm {
                    coeff: t.coeff * factor,
                    factors: t.factors.clone(),
                })
                .collect(),
        }
    }

    /// Labels referenced by the sum.
    pub fn labels(&self) -> HashSet<&str> {
        self.terms
            .iter()
            .flat_map(|t| t.factors.iter().map(|(l, _)| l.as_str()))
            .collect()
    }
}

impl std::ops::Add for PauliSum {
    type Output = PauliSum;
    fn add(self, rhs: PauliSum) -> PauliSum {
        let mut terms = self.terms;
        terms.extend(rhs.terms);
        PauliSum { terms }
    }
}

impl std::ops::Add<&PauliSum> for PauliSum {
    type Output = PauliSum;
    fn add(self, rhs: &PauliSum) -> PauliSum {
        let mut terms = self.terms;
        terms.extend(rhs.terms.iter().cloned());
        PauliSum { terms }
    }
}

/// One cold subsystem: a qubit with its own frequency and temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct ASubsystem {
    pub label: String,
    pub omega: f64,
    pub beta: f64,
}

/// One hot-side qubit; the inverse temperature `β_B` is shared across `B`.
#[derive(Debug, Clone, PartialEq)]
pub struct BQubit {
    pub label: String,
    pub omega: f64,
}

/// Qubit partition, frequencies and inverse temperatures.
///
/// Canonical qubit order is `A_1 … A_N, B_1 … B_M` with the leftmost
/// factor varying slowest in the joint basis. Energies are in units of a
/// reference `ω₀` and inverse temperatures in `1/ω₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    a_subsystems: Vec<ASubsystem>,
    b_qubits: Vec<BQubit>,
    beta_b: f64,
}

impl SystemSpec {
    pub fn new(a_subsystems: Vec<ASubsystem>, b_qubits: Vec<BQubit>, beta_b: f64) -> Result<Self> {
        if a_subsystems.is_empty() || b_qubits.is_empty() {
            return Err(Error::InvalidParameter(
                "need at least one A subsystem and one B qubit".into(),
            ));
        }
        let mut seen = HashSet::new();
        for label in a_subsystems
            .iter()
            .map(|a| &a.label)
            .chain(b_qubits.iter().map(|b| &b.label))
        {
            if !seen.insert(label.clone()) {
                return Err(Error::DuplicateQubit(label.clone()));
            }
        }
        for (omega, beta) in a_subsystems
            .iter()
            .map(|a| (a.omega, a.beta))
            .chain(b_qubits.iter().map(|b| (b.omega, beta_b)))
        {
            if !(omega >= 0.0) || !omega.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "frequency must be finite and ≥ 0, got {omega}"
                )));
            }
            if !(beta > 0.0) || !beta.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "inverse temperature must be finite and > 0, got {beta}"
                )));
            }
        }
        Ok(SystemSpec {
            a_subsystems,
            b_qubits,
            beta_b,
        })
    }

    /// Three-qubit layout `A1, A2, B` used by all bundled models.
    pub fn three_qubit(
        omega_a1: f64,
        beta_a1: f64,
        omega_a2: f64,
        beta_a2: f64,
        omega_b: f64,
        beta_b: f64,
    ) -> Result<Self> {
        SystemSpec::new(
            vec![
                ASubsystem {
                    label: "A1".into(),
                    omega: omega_a1,
                    beta: beta_a1,
                },
                ASubsystem {
                    label: "A2".into(),
                    omega: omega_a2,
                    beta: beta_a2,
                },
            ],
            vec![BQubit {
                label: "B".into(),
                omega: omega_b,
            }],
            beta_b,
        )
    }

    pub fn a_subsystems(&self) -> &[ASubsystem] {
        &self.a_subsystems
    }

    pub fn b_qubits(&self) -> &[BQubit] {
        &self.b_qubits
    }

    pub fn n_a(&self) -> usize {
        self.a_subsystems.len()
    }

    pub fn n_b(&self) -> usize {
        self.b_qubits.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_a() + self.n_b()
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits()
    }

    /// Per-subsystem dimensions, one qubit each.
    pub fn dims(&self) -> Vec<usize> {
        vec![2; self.n_qubits()]
    }

    /// Labels in canonical basis order.
    pub fn labels(&self) -> Vec<&str> {
        self.a_subsystems
            .iter()
            .map(|a| a.label.as_str())
            .chain(self.b_qubits.iter().map(|b| b.label.as_str()))
            .collect()
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels()
            .iter()
            .position(|&l| l == label)
            .ok_or_else(|| Error::UnknownQubit(label.to_string()))
    }

    pub fn a_indices(&self) -> Vec<usize> {
        (0..self.n_a()).collect()
    }

    pub fn b_indices(&self) -> Vec<usize> {
        (self.n_a()..self.n_qubits()).collect()
    }

    pub fn is_a_label(&self, label: &str) -> bool {
        self.a_subsystems.iter().any(|a| a.label == label)
    }

    pub fn omega(&self, label: &str) -> Result<f64> {
        self.a_subsystems
            .iter()
            .find(|a| a.label == label)
            .map(|a| a.omega)
            .or_else(|| {
                self.b_qubits
                    .iter()
                    .find(|b| b.label == label)
                    .map(|b| b.omega)
            })
            .ok_or_else(|| Error::UnknownQubit(label.to_string()))
    }

    pub fn beta(&self, label: &str) -> Result<f64> {
        if let Some(a) = self.a_subsystems.iter().find(|a| a.label == label) {
            Ok(a.beta)
        } else if self.b_qubits.iter().any(|b| b.label == label) {
            Ok(self.beta_b)
        } else {
            Err(Error::UnknownQubit(label.to_string()))
        }
    }

    pub fn beta_b(&self) -> f64 {
        self.beta_b
    }

    /// Reference cold inverse temperature `β_A ≡ min_k β_{A_k}`.
    pub fn beta_a(&self) -> f64 {
        self.a_subsystems
            .iter()
            .map(|a| a.beta)
            .fold(f64::INFINITY, f64::min)
    }

    /// Errors unless `A` is the cold side, `β_A > β_B`.
    pub fn assert_cold_a(&self) -> Result<()> {
        if self.beta_a() > self.beta_b {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "A must be the cold system: β_A = {} ≤ β_B = {}",
                self.beta_a(),
                self.beta_b
            )))
        }
    }

    /// Free Hamiltonian `Σ −(ω/2)σᶻ` over every qubit.
    pub fn free_hamiltonian(&self) -> PauliSum {
        let mut sum = PauliSum::zero();
        for label in self.labels() {
            sum.push(self.free_term(label));
        }
        sum
    }

    /// Free Hamiltonian of one qubit, `−(ω/2)σᶻ`.
    pub fn free_hamiltonian_of(&self, label: &str) -> Result<PauliSum> {
        self.index_of(label)?;
        Ok(PauliSum::from_terms(vec![self.free_term(label)]))
    }

    fn free_term(&self, label: &str) -> PauliTerm {
        let omega = self.omega(label).expect("label comes from the spec");
        PauliTerm {
            coeff: Complex64::new(-0.5 * omega, 0.0),
            factors: vec![(label.to_string(), PauliOp::Z)],
        }
    }

    /// Free Hamiltonian of the `A` side.
    pub fn free_a(&self) -> PauliSum {
        let mut sum = PauliSum::zero();
        for a in &self.a_subsystems {
            sum.push(self.free_term(&a.label));
        }
        sum
    }

    /// Free Hamiltonian of the `B` side.
    pub fn free_b(&self) -> PauliSum {
        let mut sum = PauliSum::zero();
        for b in &self.b_qubits {
            sum.push(self.free_term(&b.label));
        }
        sum
    }
}

/// Dense operator of a Pauli sum under the spec's canonical basis order.
pub fn to_matrix(h: &PauliSum, spec: &SystemSpec) -> Result<CMatrix> {
    let n = spec.n_qubits();
    let dim = spec.dim();
    let mut out = CMatrix::zeros(dim, dim);
    let id = linalg::identity(2);
    for term in &h.terms {
        let mut slots: Vec<Option<CMatrix>> = vec![None; n];
        for (label, op) in &term.factors {
            let idx = spec.index_of(label)?;
            slots[idx] = Some(op.matrix());
        }
        let factors: Vec<&CMatrix> = slots
            .iter()
            .map(|s| s.as_ref().unwrap_or(&id))
            .collect();
        let mut m = linalg::kron_all(factors);
        m *= term.coeff;
        out += m;
    }
    Ok(out)
}

/// Default tolerance for the frequency-matching rule, in relative
/// frequency units.
pub const FREQ_MATCH_TOL: f64 = 1e-9;

/// Relative-residual threshold below which the heat transfer condition is
/// considered satisfied.
pub const HTC_TOL: f64 = 1e-10;

/// Does the term survive `[H_{A0} + H_{B0}, H_I] = 0`?
///
/// For a string of raising/lowering/z factors the condition is that the
/// summed frequencies over raising factors equal those over lowering
/// factors, z factors unconstrained. `x` and `y` factors are expanded
/// into `σ±` components first: the term commutes with the free
/// Hamiltonian iff every component does.
pub fn frequency_match_check(term: &PauliTerm, spec: &SystemSpec, tol: f64) -> Result<bool> {
    // Per factor: list of (plus_weight, minus_weight) alternatives.
    let mut alternatives: Vec<Vec<(f64, f64)>> = Vec::new();
    for (label, op) in &term.factors {
        let omega = spec.omega(label)?;
        let alts = match op {
            PauliOp::Plus => vec![(omega, 0.0)],
            PauliOp::Minus => vec![(0.0, omega)],
            PauliOp::Z => vec![(0.0, 0.0)],
            PauliOp::X | PauliOp::Y => vec![(omega, 0.0), (0.0, omega)],
        };
        alternatives.push(alts);
    }
    let scale = term
        .factors
        .iter()
        .map(|(l, _)| spec.omega(l).unwrap_or(0.0))
        .fold(0.0f64, f64::max)
        .max(1.0);
    let mut mismatch = false;
    let mut stack = vec![(0usize, 0.0f64, 0.0f64)];
    while let Some((depth, plus, minus)) = stack.pop() {
        if depth == alternatives.len() {
            if (plus - minus).abs() > tol * scale {
                mismatch = true;
                break;
            }
            continue;
        }
        for &(p, m) in &alternatives[depth] {
            stack.push((depth + 1, plus + p, minus + m));
        }
    }
    Ok(!mismatch)
}

/// Numerical check of the heat transfer condition `[H_I, H_A + H_B] = 0`.
///
/// Returns `(ok, residual)` with
/// `residual = ‖[H_I, H_A+H_B]‖_F / max(‖H_I‖_F · ‖H_A+H_B‖_F, ε)` and
/// `ok = residual < 1e-10`.
pub fn verify_heat_transfer_condition(
    h_i: &PauliSum,
    h_a: &PauliSum,
    h_b: &PauliSum,
    spec: &SystemSpec,
) -> Result<(bool, f64)> {
    let mi = to_matrix(h_i, spec)?;
    let mab = to_matrix(h_a, spec)? + to_matrix(h_b, spec)?;
    let comm = linalg::commutator(&mi, &mab)?;
    let denom = (linalg::frob_norm(&mi) * linalg::frob_norm(&mab)).max(1e-300);
    let residual = linalg::frob_norm(&comm) / denom;
    Ok((residual < HTC_TOL, residual))
}

/// Flip-flop exchange `c σ⁻_a σ⁺_b + h.c.` between two qubits.
pub fn flip_flop(label_a: &str, label_b: &str, coeff: Complex64) -> Result<PauliSum> {
    let term = PauliTerm::new(
        coeff,
        vec![
            (label_a.to_string(), PauliOp::Minus),
            (label_b.to_string(), PauliOp::Plus),
        ],
    )?;
    Ok(PauliSum::from_terms(vec![term]).plus_hc())
}

/// Two-body cross-system interaction `Σ c_{kl} σ⁻_{A_k} σ⁺_{B_l} + h.c.`.
///
/// Every requested pair must couple one `A` qubit to one `B` qubit of
/// equal frequency; anything else is rejected. `σᶻσᶻ` cross terms also
/// commute with the free Hamiltonian but are deliberately not built here:
/// they produce no instantaneous heat transfer. The validator still
/// accepts them.
pub fn two_body_family(
    spec: &SystemSpec,
    couplings: &[(String, String, Complex64)],
) -> Result<PauliSum> {
    let mut sum = PauliSum::zero();
    for (a, b, c) in couplings {
        if !spec.is_a_label(a) {
            return Err(Error::InvalidParameter(format!(
                "`{a}` is not an A-side qubit"
            )));
        }
        if spec.is_a_label(b) || spec.index_of(b).is_err() {
            return Err(Error::InvalidParameter(format!(
                "`{b}` is not a B-side qubit"
            )));
        }
        let wa = spec.omega(a)?;
        let wb = spec.omega(b)?;
        let scale = wa.max(wb).max(1.0);
        if (wa - wb).abs() > FREQ_MATCH_TOL * scale {
            return Err(Error::InvalidParameter(format!(
                "flip-flop {a}–{b} requires equal frequencies (ω = {wa} vs {wb})"
            )));
        }
        sum = sum + flip_flop(a, b, *c)?;
    }
    Ok(sum)
}

/// Three-body string `c σ⁺_u σ⁻_v σ⁻_w + h.c.`.
///
/// Survives the heat transfer condition when `ω_u = ω_v + ω_w`.
pub fn three_body_term(u: &str, v: &str, w: &str, coeff: Complex64) -> Result<PauliSum> {
    let term = PauliTerm::new(
        coeff,
        vec![
            (u.to_string(), PauliOp::Plus),
            (v.to_string(), PauliOp::Minus),
            (w.to_string(), PauliOp::Minus),
        ],
    )?;
    Ok(PauliSum::from_terms(vec![term]).plus_hc())
}

/// Uniform Heisenberg perturbation `J Σ_{u<v} Σ_{a∈{x,y,z}} σᵃ_u σᵃ_v`
/// over every unordered qubit pair. Violates the heat transfer condition.
pub fn heisenberg_perturbation(spec: &SystemSpec, j: f64) -> Result<PauliSum> {
    let labels = spec.labels();
    let mut sum = PauliSum::zero();
    for i in 0..labels.len() {
        for k in (i + 1)..labels.len() {
            for op in [PauliOp::X, PauliOp::Y, PauliOp::Z] {
                sum.push(PauliTerm::new(
                    Complex64::new(j, 0.0),
                    vec![(labels[i].to_string(), op), (labels[k].to_string(), op)],
                )?);
            }
        }
    }
    Ok(sum)
}

/// Mixed two/three-body interaction family on the `A1, A2, B` layout with
/// `ω_{A1} = r₁ω`, `ω_{A2} = ω_B = ω`.
///
/// Returns `(H_I, H_{AI})` where
/// `H_{AI} = ω (r₂ σ⁺_{A1} σ⁻_{A2} + h.c.)`, `r₂ = sign·½√(r₁(2−r₁))`,
/// and `H_I` combines the three-body strings with compensating two-body
/// `σᶻ_A σ^{x,y}_B` terms so that the pair satisfies
/// `[H_I, H_A + H_B] = 0` even though the individual terms do not
/// frequency-match. At `r₁ = 1`, `c_xyx = 0` this is the interaction of
/// the interaction-dominated example scenario.
pub fn build_s19_interaction(
    r1: f64,
    sign: i32,
    c_xyy: f64,
    c_xyx: f64,
    spec: &SystemSpec,
) -> Result<(PauliSum, PauliSum)> {
    if !(r1 > 0.0 && r1 <= 2.0) {
        return Err(Error::InvalidParameter(format!(
            "r1 must lie in (0, 2], got {r1}"
        )));
    }
    if sign != 1 && sign != -1 {
        return Err(Error::InvalidParameter(format!(
            "sign must be ±1, got {sign}"
        )));
    }
    if spec.n_a() != 2 || spec.n_b() != 1 {
        return Err(Error::InvalidParameter(
            "the mixed family needs exactly two A qubits and one B qubit".into(),
        ));
    }
    let a1 = spec.a_subsystems()[0].label.clone();
    let a2 = spec.a_subsystems()[1].label.clone();
    let b = spec.b_qubits()[0].label.clone();
    let omega = spec.omega(&b)?;
    let check = |want: f64, got: f64, what: &str| -> Result<()> {
        if (want - got).abs() > 1e-9 * want.abs().max(got.abs()).max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "{what}: expected {want}, spec has {got}"
            )));
        }
        Ok(())
    };
    check(r1 * omega, spec.omega(&a1)?, "ω_{A1} = r₁·ω")?;
    check(omega, spec.omega(&a2)?, "ω_{A2} = ω_B")?;

    let r2 = 0.5 * f64::from(sign) * (r1 * (2.0 - r1)).sqrt();
    let cy = c_xyy;
    let cx = c_xyx;
    let g = 1.0 - r1;

    // Three-body coefficients c^{abc} on (A1, A2, B).
    let three_body: [(PauliOp, PauliOp, PauliOp, f64); 8] = [
        (PauliOp::X, PauliOp::Y, PauliOp::Y, cy),
        (PauliOp::X, PauliOp::Y, PauliOp::X, cx),
        (PauliOp::X, PauliOp::X, PauliOp::X, g * cy),
        (PauliOp::Y, PauliOp::Y, PauliOp::X, g * cy),
        (PauliOp::X, PauliOp::X, PauliOp::Y, -g * cx),
        (PauliOp::Y, PauliOp::Y, PauliOp::Y, -g * cx),
        (PauliOp::Y, PauliOp::X, PauliOp::X, -cx),
        (PauliOp::Y, PauliOp::X, PauliOp::Y, -cy),
    ];
    let mut h_i = PauliSum::zero();
    for (oa, ob, oc, coeff) in three_body {
        if coeff != 0.0 {
            h_i.push(PauliTerm::new(
                Complex64::new(coeff, 0.0),
                vec![(a1.clone(), oa), (a2.clone(), ob), (b.clone(), oc)],
            )?);
        }
    }
    // Compensating two-body σᶻ_{A_i} σ^{x,y}_B terms.
    let two_body: [(&str, PauliOp, f64); 4] = [
        (&a1, PauliOp::X, -2.0 * r2 * cy),
        (&a1, PauliOp::Y, 2.0 * r2 * cx),
        (&a2, PauliOp::X, 2.0 * r2 * cy),
        (&a2, PauliOp::Y, -2.0 * r2 * cx),
    ];
    for (label, op_b, coeff) in two_body {
        if coeff != 0.0 {
            h_i.push(PauliTerm::new(
                Complex64::new(coeff, 0.0),
                vec![(label.to_string(), PauliOp::Z), (b.clone(), op_b)],
            )?);
        }
    }

    let h_ai = if r2 != 0.0 {
        PauliSum::from_terms(vec![PauliTerm::new(
            Complex64::new(omega * r2, 0.0),
            vec![(a1.clone(), PauliOp::Plus), (a2.clone(), PauliOp::Minus)],
        )?])
        .plus_hc()
    } else {
        PauliSum::zero()
    };
    Ok((h_i, h_ai))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frob_norm, identity, kron};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn spec_fig1b() -> SystemSpec {
        SystemSpec::three_qubit(2.0, 0.2, 1.0, 0.4, 1.0, 0.16).unwrap()
    }

    fn spec_equal() -> SystemSpec {
        SystemSpec::three_qubit(1.0, 0.2, 1.0, 0.2, 1.0, 0.16).unwrap()
    }

    #[test]
    fn to_matrix_free_qubit() {
        let spec = SystemSpec::new(
            vec![ASubsystem {
                label: "A1".into(),
                omega: 1.0,
                beta: 0.2,
            }],
            vec![BQubit {
                label: "B".into(),
                omega: 1.0,
            }],
            0.1,
        )
        .unwrap();
        let h = spec.free_hamiltonian_of("A1").unwrap();
        let m = to_matrix(&h, &spec).unwrap();
        // −(ω/2)σᶻ ⊗ I: diagonal (−1/2, −1/2, +1/2, +1/2)
        for (i, want) in [-0.5, -0.5, 0.5, 0.5].iter().enumerate() {
            assert_relative_eq!(m[(i, i)].re, want, epsilon = 1e-15);
        }
    }

    #[test]
    fn to_matrix_flip_flop_entry() {
        // σ⁻_A σ⁺_B on two qubits: single entry 1 at (row |10⟩, col |01⟩).
        let spec = SystemSpec::new(
            vec![ASubsystem {
                label: "A".into(),
                omega: 1.0,
                beta: 0.2,
            }],
            vec![BQubit {
                label: "B".into(),
                omega: 1.0,
            }],
            0.1,
        )
        .unwrap();
        let h = PauliSum::from_terms(vec![PauliTerm::real(
            1.0,
            vec![("A", PauliOp::Minus), ("B", PauliOp::Plus)],
        )
        .unwrap()]);
        let m = to_matrix(&h, &spec).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if (i, j) == (2, 1) { 1.0 } else { 0.0 };
                assert_relative_eq!(m[(i, j)].re, want, epsilon = 1e-15);
                assert_relative_eq!(m[(i, j)].im, 0.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn to_matrix_three_body_conjugate_pair() {
        // σ⁺_{A1}σ⁻_{A2}σ⁻_B + h.c. with c = 1: entries at (|011⟩, |100⟩)
        // and its conjugate. σ⁺ raises A1 while σ⁻ lowers A2 and B.
        let spec = spec_fig1b();
        let h = three_body_term("A1", "A2", "B", c(1.0, 0.0)).unwrap();
        let m = to_matrix(&h, &spec).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                let want = if (i, j) == (3, 4) || (i, j) == (4, 3) {
                    1.0
                } else {
                    0.0
                };
                assert_relative_eq!(m[(i, j)].re, want, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn to_matrix_unknown_label() {
        let spec = spec_fig1b();
        let h = PauliSum::from_terms(vec![PauliTerm::real(1.0, vec![("C7", PauliOp::X)]).unwrap()]);
        assert!(matches!(to_matrix(&h, &spec), Err(Error::UnknownQubit(_))));
    }

    #[test]
    fn to_matrix_linearity() {
        let spec = spec_fig1b();
        let h1 = three_body_term("A1", "A2", "B", c(0.3, 0.1)).unwrap();
        let h2 = flip_flop("A2", "B", c(0.2, -0.4)).unwrap();
        let alpha = c(1.7, -0.3);
        let lhs = to_matrix(&(h1.scaled(alpha) + &h2), &spec).unwrap();
        let rhs = to_matrix(&h1, &spec).unwrap() * alpha + to_matrix(&h2, &spec).unwrap();
        assert!(frob_norm(&(lhs - rhs)) < 1e-13);
    }

    #[test]
    fn pauli_term_rejects_duplicate_labels() {
        let r = PauliTerm::real(1.0, vec![("A1", PauliOp::X), ("A1", PauliOp::Z)]);
        assert!(matches!(r, Err(Error::DuplicateQubit(_))));
    }

    #[test]
    fn frequency_match_examples() {
        let spec = spec_equal();
        // flip-flop between equal frequencies
        let t = PauliTerm::real(1.0, vec![("A1", PauliOp::Minus), ("B", PauliOp::Plus)]).unwrap();
        assert!(frequency_match_check(&t, &spec, FREQ_MATCH_TOL).unwrap());

        // three-body rule ω_{A1} = ω_{A2} + ω_B
        let spec3 = spec_fig1b();
        let t = PauliTerm::real(
            1.0,
            vec![
                ("A1", PauliOp::Plus),
                ("A2", PauliOp::Minus),
                ("B", PauliOp::Minus),
            ],
        )
        .unwrap();
        assert!(frequency_match_check(&t, &spec3, FREQ_MATCH_TOL).unwrap());

        // zzz is unconstrained
        let t = PauliTerm::real(
            1.0,
            vec![
                ("A1", PauliOp::Z),
                ("A2", PauliOp::Z),
                ("B", PauliOp::Z),
            ],
        )
        .unwrap();
        assert!(frequency_match_check(&t, &spec3, FREQ_MATCH_TOL).unwrap());

        // mismatched flip-flop fails
        let t = PauliTerm::real(1.0, vec![("A1", PauliOp::Minus), ("B", PauliOp::Plus)]).unwrap();
        assert!(!frequency_match_check(&t, &spec3, FREQ_MATCH_TOL).unwrap());

        // x expands into both σ± components, so a lone σˣσˣ fails
        let t = PauliTerm::real(1.0, vec![("A2", PauliOp::X), ("B", PauliOp::X)]).unwrap();
        assert!(!frequency_match_check(&t, &spec3, FREQ_MATCH_TOL).unwrap());
    }

    #[test]
    fn htc_flip_flop_matched_vs_mismatched() {
        let spec = spec_equal();
        let h_i = flip_flop("A1", "B", c(0.05, 0.0)).unwrap();
        let (ok, res) = verify_heat_transfer_condition(&h_i, &spec.free_a(), &spec.free_b(), &spec)
            .unwrap();
        assert!(ok, "residual {res}");

        let spec3 = spec_fig1b();
        let h_i = flip_flop("A1", "B", c(0.05, 0.0)).unwrap();
        let (ok, res) =
            verify_heat_transfer_condition(&h_i, &spec3.free_a(), &spec3.free_b(), &spec3)
                .unwrap();
        assert!(!ok);
        assert!(res > 1e-3);
    }

    #[test]
    fn htc_three_body_matched() {
        let spec = spec_fig1b();
        let h_i = three_body_term("A1", "A2", "B", c(0.005, 0.0)).unwrap();
        let (ok, res) = verify_heat_transfer_condition(&h_i, &spec.free_a(), &spec.free_b(), &spec)
            .unwrap();
        assert!(ok, "residual {res}");
    }

    #[test]
    fn s19_family_passes_htc() {
        for (r1, sign) in [(1.0, 1), (0.7, 1), (1.4, -1), (2.0, 1), (0.3, -1)] {
            let spec = SystemSpec::three_qubit(r1, 0.2, 1.0, 0.2, 1.0, 0.16).unwrap();
            let (h_i, h_ai) = build_s19_interaction(r1, sign, 0.005, 0.003, &spec).unwrap();
            let h_a = spec.free_a() + &h_ai;
            let (ok, res) =
                verify_heat_transfer_condition(&h_i, &h_a, &spec.free_b(), &spec).unwrap();
            assert!(ok, "r1={r1} sign={sign} residual={res:e}");
        }
    }

    #[test]
    fn s19_r1_two_kills_intra_interaction() {
        let spec = SystemSpec::three_qubit(2.0, 0.2, 1.0, 0.2, 1.0, 0.16).unwrap();
        let (_, h_ai) = build_s19_interaction(2.0, 1, 0.005, 0.0, &spec).unwrap();
        assert!(h_ai.is_zero());
    }

    #[test]
    fn s19_rejects_bad_r1() {
        let spec = spec_equal();
        assert!(build_s19_interaction(0.0, 1, 0.005, 0.0, &spec).is_err());
        assert!(build_s19_interaction(2.5, 1, 0.005, 0.0, &spec).is_err());
    }

    #[test]
    fn two_body_family_rejects_mismatch() {
        let spec = spec_fig1b();
        let r = two_body_family(&spec, &[("A1".into(), "B".into(), c(0.01, 0.0))]);
        assert!(r.is_err());
        let ok = two_body_family(&spec, &[("A2".into(), "B".into(), c(0.01, 0.0))]);
        assert!(ok.is_ok());
    }

    #[test]
    fn surviving_two_body_terms_are_flip_flops() {
        // Generate all 9 xyz pair products between one A and one B qubit of
        // equal frequency and filter by the numerical commutator: exactly
        // the xx+yy combinations (flip-flop) plus zz survive.
        let spec = SystemSpec::new(
            vec![ASubsystem {
                label: "A".into(),
                omega: 1.0,
                beta: 0.3,
            }],
            vec![BQubit {
                label: "B".into(),
                omega: 1.0,
            }],
            0.1,
        )
        .unwrap();
        let h0 = to_matrix(&(spec.free_a() + &spec.free_b()), &spec).unwrap();
        let ops = [PauliOp::X, PauliOp::Y, PauliOp::Z];
        let mut survivors = Vec::new();
        for oa in ops {
            for ob in ops {
                let ma = kron(&oa.matrix(), &identity(2));
                let mb = kron(&identity(2), &ob.matrix());
                let m = ma * mb;
                let comm = linalg::commutator(&m, &h0).unwrap();
                if frob_norm(&comm) < 1e-12 {
                    survivors.push((oa, ob));
                }
            }
        }
        // zz alone commutes; xx, yy, xy, yx only in the flip-flop combination
        assert_eq!(survivors, vec![(PauliOp::Z, PauliOp::Z)]);
        let ff = to_matrix(&flip_flop("A", "B", c(1.0, 0.0)).unwrap(), &spec).unwrap();
        let comm = linalg::commutator(&ff, &h0).unwrap();
        assert!(frob_norm(&comm) < 1e-12);
    }

    #[test]
    fn heisenberg_perturbation_violates_htc() {
        let spec = spec_fig1b();
        let h_p = heisenberg_perturbation(&spec, 0.001).unwrap();
        assert_eq!(h_p.terms.len(), 9);
        let (ok, res) = verify_heat_transfer_condition(&h_p, &spec.free_a(), &spec.free_b(), &spec)
            .unwrap();
        assert!(!ok);
        assert!(res > 1e-6);
    }

    #[test]
    fn plus_hc_makes_hermitian_matrices() {
        let spec = spec_fig1b();
        let h = PauliSum::from_terms(vec![PauliTerm::new(
            c(0.2, 0.7),
            vec![("A1".into(), PauliOp::Plus), ("B".into(), PauliOp::Minus)],
        )
        .unwrap()])
        .plus_hc();
        let m = to_matrix(&h, &spec).unwrap();
        assert!(linalg::hermiticity_residual(&m) < 1e-12);
    }
}
