//! Superoperator (transfer-matrix) form of program semantics, the Choi
//! matrix, and the complete-positivity / trace-non-increase checks.
//!
//! Vectorization is column-stacking: `vec` concatenates columns, so the
//! transfer matrix of `rho -> A rho B^dag` is `conj(B) (x) A`, and
//! `vec(E_ij) = e_{j*d+i}` for the matrix unit `E_ij` of a `d`-dim register.

use serde::Serialize;

use crate::matrix::linalg::min_eigenvalue;
use crate::matrix::{ComplexMatrix, MatrixError, Tolerances};

/// A linear map on density matrices in transfer-matrix form:
/// `vec(E(rho)) = L vec(rho)` with `L` of dimension `4^n`.
#[derive(Debug, Clone)]
pub struct SuperOperator {
    nqubits: usize,
    transfer: ComplexMatrix,
}

/// Outcome of the complete-positivity and trace-non-increase diagnostics.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CpReport {
    /// Choi matrix PSD within the tolerance.
    pub completely_positive: bool,
    pub min_choi_eigenvalue: f64,
    /// Partial trace of the Choi matrix below the identity.
    pub trace_non_increasing: bool,
    /// Min eigenvalue of `I - Tr_out(Choi)`; negative means trace increase.
    pub trace_margin: f64,
}

impl CpReport {
    pub fn passes(&self) -> bool {
        self.completely_positive && self.trace_non_increasing
    }
}

impl SuperOperator {
    pub fn new(nqubits: usize, transfer: ComplexMatrix) -> Result<Self, MatrixError> {
        let expected = 1usize << (2 * nqubits);
        if transfer.dim() != expected {
            return Err(MatrixError::DimMismatch {
                left: expected,
                right: transfer.dim(),
            });
        }
        Ok(Self { nqubits, transfer })
    }

    /// Identity channel on `n` qubits.
    pub fn identity(nqubits: usize) -> Self {
        Self {
            nqubits,
            transfer: ComplexMatrix::identity(1 << (2 * nqubits)),
        }
    }

    /// The zero map (semantics of `abort`).
    pub fn zero(nqubits: usize) -> Self {
        Self {
            nqubits,
            transfer: ComplexMatrix::zeros(1 << (2 * nqubits)),
        }
    }

    pub fn nqubits(&self) -> usize {
        self.nqubits
    }

    /// Register dimension `2^n` (the matrices the map acts on).
    pub fn dim(&self) -> usize {
        1 << self.nqubits
    }

    pub fn transfer(&self) -> &ComplexMatrix {
        &self.transfer
    }

    /// Apply the map: `unvec(L vec(rho))`.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix, MatrixError> {
        if rho.dim() != self.dim() {
            return Err(MatrixError::DimMismatch {
                left: self.dim(),
                right: rho.dim(),
            });
        }
        let out = self.transfer.mul_vec(&rho.vec_col())?;
        ComplexMatrix::from_vec_col(self.dim(), &out)
    }

    /// Choi matrix `J = sum_ij E(E_ij) (x) E_ij`, assembled from transfer
    /// columns: `J[a*d+i, b*d+j] = E(E_ij)[a, b]`.
    pub fn choi(&self) -> ComplexMatrix {
        let d = self.dim();
        let mut j = ComplexMatrix::zeros(d * d);
        for jj in 0..d {
            for i in 0..d {
                // vec(E_ij) is the basis vector e_{j*d+i}, so E(E_ij) is
                // column j*d+i of the transfer matrix, un-vectorized.
                let col = jj * d + i;
                for b in 0..d {
                    for a in 0..d {
                        let entry = self.transfer.get(b * d + a, col);
                        if entry.norm_sqr() != 0.0 {
                            j.set(a * d + i, b * d + jj, entry);
                        }
                    }
                }
            }
        }
        j
    }

    /// Partial trace of the Choi matrix over the output factor:
    /// `M[i, j] = sum_a J[a*d+i, a*d+j] = Tr(E(E_ij))`.
    pub fn choi_partial_trace(&self) -> ComplexMatrix {
        let d = self.dim();
        let choi = self.choi();
        ComplexMatrix::from_fn(d, |i, j| {
            (0..d).map(|a| choi.get(a * d + i, a * d + j)).sum()
        })
    }

    /// Complete positivity (Choi PSD) and trace-non-increase
    /// (`Tr_out(Choi) <= I`) at tolerance `tol.psd`.
    pub fn cp_check(&self, tol: &Tolerances) -> Result<CpReport, MatrixError> {
        let min_choi_eigenvalue = min_eigenvalue(&self.choi().hermitize(), f64::INFINITY)?;
        let d = self.dim();
        let slack = ComplexMatrix::identity(d)
            .sub(&self.choi_partial_trace())?
            .hermitize();
        let trace_margin = min_eigenvalue(&slack, f64::INFINITY)?;
        Ok(CpReport {
            completely_positive: min_choi_eigenvalue >= -tol.psd,
            min_choi_eigenvalue,
            trace_non_increasing: trace_margin >= -tol.psd,
            trace_margin,
        })
    }
}

/// Transfer matrix of the conjugation `rho -> A rho B^dag`, i.e.
/// `conj(B) (x) A`.
pub fn conjugation_transfer(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    b.conj().tensor(a)
}
