//! Dense complex linear algebra for few-qubit operators.
//!
//! Every joint system in this crate lives in dimension ≤ 2⁵, so dense
//! storage and full Hermitian eigendecomposition are the right tools.
//! The basis convention is fixed once and used everywhere: the qubit
//! basis is `|0⟩, |1⟩` with `σᶻ|0⟩ = +|0⟩`, and joint indices order the
//! factors left to right with the leftmost varying slowest (standard
//! Kronecker ordering).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

/// Dense complex matrix; all operators and states use this representation.
pub type CMatrix = DMatrix<Complex64>;

/// Identity matrix of the given dimension.
pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Kronecker product `a ⊗ b`, leftmost factor varying slowest.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Kronecker product of a sequence of factors, left to right.
pub fn kron_all<'a, I>(factors: I) -> CMatrix
where
    I: IntoIterator<Item = &'a CMatrix>,
{
    let mut iter = factors.into_iter();
    let first = iter.next().expect("kron_all needs at least one factor");
    iter.fold(first.clone(), |acc, m| acc.kronecker(m))
}

/// Conjugate transpose.
pub fn dagger(a: &CMatrix) -> CMatrix {
    a.adjoint()
}

/// Matrix trace.
pub fn trace(a: &CMatrix) -> Complex64 {
    a.diagonal().iter().sum()
}

/// `tr(op · rho)`.
pub fn expectation(op: &CMatrix, rho: &CMatrix) -> Complex64 {
    debug_assert_eq!(op.ncols(), rho.nrows());
    // tr(AB) = Σ_{ij} A_ij B_ji without forming the product
    let n = op.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += op[(i, j)] * rho[(j, i)];
        }
    }
    acc
}

/// Frobenius norm.
pub fn frob_norm(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Commutator `ab − ba`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: b.nrows(),
        });
    }
    Ok(a * b - b * a)
}

/// `‖h − h†‖_F / ‖h‖_F`, with 0 for the zero matrix.
pub fn hermiticity_residual(h: &CMatrix) -> f64 {
    let norm = frob_norm(h);
    if norm == 0.0 {
        return 0.0;
    }
    frob_norm(&(h - dagger(h))) / norm
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are real and sorted ascending; `eigenvectors` holds the
/// corresponding column eigenvectors, so `V Λ V†` reconstructs the input.
#[derive(Debug, Clone)]
pub struct HermitianEigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl HermitianEigenSystem {
    /// `V f(Λ) V†`.
    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> CMatrix {
        let dim = self.eigenvalues.len();
        let mut scaled = self.eigenvectors.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let flambda = Complex64::new(f(lambda), 0.0);
            for i in 0..dim {
                scaled[(i, j)] *= flambda;
            }
        }
        scaled * self.eigenvectors.adjoint()
    }

    /// `V diag(phases) V†` for complex phase factors, used by the propagator.
    pub fn apply_complex<F: Fn(f64) -> Complex64>(&self, f: F) -> CMatrix {
        let dim = self.eigenvalues.len();
        let mut scaled = self.eigenvectors.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let flambda = f(lambda);
            for i in 0..dim {
                scaled[(i, j)] *= flambda;
            }
        }
        scaled * self.eigenvectors.adjoint()
    }
}

/// Hermiticity tolerance accepted by [`herm_eig`].
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Rejects inputs with `‖h − h†‖_F / ‖h‖_F ≥ 1e-10`.
pub fn herm_eig(h: &CMatrix) -> Result<HermitianEigenSystem> {
    if h.nrows() != h.ncols() {
        return Err(Error::NotSquare {
            rows: h.nrows(),
            cols: h.ncols(),
        });
    }
    let residual = hermiticity_residual(h);
    if residual >= HERMITICITY_TOL {
        return Err(Error::NotHermitian { residual });
    }
    // Symmetrize so roundoff below the tolerance cannot leak into the solver.
    let sym = (h + dagger(h)).scale(0.5);
    let eig = sym.symmetric_eigen();
    let dim = h.nrows();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut eigenvectors = CMatrix::zeros(dim, dim);
    for (col, &src) in order.iter().enumerate() {
        eigenvectors.set_column(col, &eig.eigenvectors.column(src));
    }
    Ok(HermitianEigenSystem {
        eigenvalues,
        eigenvectors,
    })
}

/// Matrix function `f(h) = V f(Λ) V†` of a Hermitian matrix.
pub fn matrix_func<F: Fn(f64) -> f64>(h: &CMatrix, f: F) -> Result<CMatrix> {
    Ok(herm_eig(h)?.apply(f))
}

/// Partial trace onto the subsystems listed in `keep`.
///
/// `dims` gives the per-subsystem dimensions in basis order; their product
/// must equal the matrix dimension. The kept subsystems retain their
/// original relative order.
pub fn partial_trace(rho: &CMatrix, keep: &[usize], dims: &[usize]) -> Result<CMatrix> {
    let total: usize = dims.iter().product();
    if rho.nrows() != total || rho.ncols() != total {
        return Err(Error::DimensionMismatch {
            expected: total,
            got: rho.nrows(),
        });
    }
    let n = dims.len();
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.is_empty() || kept.iter().any(|&k| k >= n) {
        return Err(Error::InvalidParameter(format!(
            "keep set {keep:?} invalid for {n} subsystems"
        )));
    }
    let dropped: Vec<usize> = (0..n).filter(|i| !kept.contains(i)).collect();

    // Row-major strides: the leftmost subsystem varies slowest.
    let mut stride = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        stride[i] = stride[i + 1] * dims[i + 1];
    }

    let kept_dim: usize = kept.iter().map(|&k| dims[k]).product();
    let drop_dim: usize = dropped.iter().map(|&k| dims[k]).product();

    // Flat offsets of every kept (resp. dropped) multi-index.
    let offsets = |subs: &[usize], count: usize| -> Vec<usize> {
        let mut out = vec![0usize; count];
        for (flat, slot) in out.iter_mut().enumerate() {
            let mut rem = flat;
            let mut offset = 0;
            for &s in subs.iter().rev() {
                offset += (rem % dims[s]) * stride[s];
                rem /= dims[s];
            }
            *slot = offset;
        }
        out
    };
    let kept_offsets = offsets(&kept, kept_dim);
    let drop_offsets = offsets(&dropped, drop_dim);

    let mut out = CMatrix::zeros(kept_dim, kept_dim);
    for (r, &ro) in kept_offsets.iter().enumerate() {
        for (c, &co) in kept_offsets.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for &eo in &drop_offsets {
                acc += rho[(ro + eo, co + eo)];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(out)
}
