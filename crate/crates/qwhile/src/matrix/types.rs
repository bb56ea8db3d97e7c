//! Domain newtypes: validated states and predicates, plus shared tolerances.

use serde::{Deserialize, Serialize};

use super::linalg::{eigh, positive_part};
use super::{ComplexMatrix, MatrixError};

/// Numerical tolerances threaded through semantics and checking.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Tolerances {
    /// Max allowed hermiticity violation before input is rejected.
    pub herm: f64,
    /// Eigenvalue slack when testing positive semidefiniteness.
    pub psd: f64,
    /// Max-abs stopping threshold for fixed-point iteration.
    pub fix: f64,
    /// Iteration cap for fixed-point computation.
    pub max_iter: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: 1e-10,
            psd: 1e-9,
            fix: 1e-10,
            max_iter: 100_000,
        }
    }
}

/// Partial density operator: Hermitian, positive semidefinite, trace at most 1.
///
/// Trace strictly below 1 is deliberate; it is how divergence probability is
/// represented, so `new` only rejects traces above 1.
///
/// No `Deserialize` on purpose: parse a [`ComplexMatrix`] and validate via
/// [`DensityOperator::new`] so malformed input cannot sneak past the checks.
#[derive(Debug, Clone)]
pub struct DensityOperator(ComplexMatrix);

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self, MatrixError> {
        matrix.require_hermitian(tol.herm)?;
        let min_eig = eigh(&matrix, f64::INFINITY)?.min_eigenvalue();
        if min_eig < -tol.psd {
            return Err(MatrixError::NotPositive { min_eig });
        }
        let trace = matrix.trace();
        if trace.im.abs() > tol.herm {
            return Err(MatrixError::ComplexTrace { imag: trace.im });
        }
        if trace.re > 1.0 + tol.psd {
            return Err(MatrixError::TraceTooLarge { trace: trace.re });
        }
        Ok(Self(matrix.hermitize()))
    }

    /// Computational basis state `|i><i|`.
    pub fn pure_basis(dim: usize, i: usize) -> Self {
        Self(ComplexMatrix::basis_projector(dim, i))
    }

    /// Wrap without validation. For evaluator outputs, which stay valid up
    /// to roundoff because the semantics maps states to states.
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self(matrix)
    }

    /// Maximally mixed state `I / dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Real trace (the imaginary part was validated away at construction).
    pub fn trace_re(&self) -> f64 {
        self.0.trace().re
    }
}

/// Quantum predicate: Hermitian with spectrum inside `[0, 1]`, i.e.
/// `0 <= M <= I` in the Löwner order.
#[derive(Debug, Clone)]
pub struct Predicate(ComplexMatrix);

impl Predicate {
    pub fn new(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self, MatrixError> {
        matrix.require_hermitian(tol.herm)?;
        let decomp = eigh(&matrix, f64::INFINITY)?;
        let min_eig = decomp.min_eigenvalue();
        if min_eig < -tol.psd {
            return Err(MatrixError::NotPositive { min_eig });
        }
        let max_eig = decomp.max_eigenvalue();
        if max_eig > 1.0 + tol.psd {
            return Err(MatrixError::AboveIdentity { max_eig });
        }
        Ok(Self(matrix.hermitize()))
    }

    pub fn identity(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim))
    }

    pub fn zero(dim: usize) -> Self {
        Self(ComplexMatrix::zeros(dim))
    }

    /// Wrap without validation. For transformer outputs, which stay in
    /// `[0, I]` up to roundoff whenever the input does.
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self(matrix)
    }

    /// Projector predicate `|i><i|`.
    pub fn basis_projector(dim: usize, i: usize) -> Self {
        Self(ComplexMatrix::basis_projector(dim, i))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Complement `I - M`, again a predicate.
    pub fn complement(&self) -> Self {
        let id = ComplexMatrix::identity(self.dim());
        Self(id.sub(&self.0).expect("same dim"))
    }
}

/// Predicate conjunction `M & N = (M + N - I)^+`.
///
/// The clamp keeps the result positive; it also stays below both arguments,
/// and below the identity, so the result is a predicate whenever the inputs
/// are.
pub fn amp_and(
    m: &ComplexMatrix,
    n: &ComplexMatrix,
    herm_tol: f64,
) -> Result<ComplexMatrix, MatrixError> {
    let id = ComplexMatrix::identity(m.dim());
    let sum = m.add(n)?.sub(&id)?;
    positive_part(&sum, herm_tol)
}
