//! Dense complex matrices and the operator-order machinery built on them.
//!
//! Everything in the crate (states, predicates, unitaries, transfer matrices)
//! is a [`ComplexMatrix`]: a square, row-major matrix of `f64` complex pairs.
//! Submodules add Hermitian eigendecomposition ([`linalg`]), embedding of
//! local operators into a register ([`embed`]), and the domain newtypes
//! [`DensityOperator`] / [`Predicate`] ([`types`]).
//!
//! Qubit ordering convention: **qubit 0 is the most significant bit** of the
//! basis-state index. `tensor(A, B)` therefore puts `A` on the earlier
//! (higher-order) qubits.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub mod embed;
pub mod linalg;
pub mod types;

pub use embed::embed;
pub use linalg::{eigh, loewner_leq, positive_part, EigenDecomposition, OrderCheck, SpectralProjector};
pub use types::{DensityOperator, Predicate, Tolerances};

/// Errors raised by matrix construction and arithmetic.
#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("matrix is not Hermitian: entry ({row},{col}) deviates from its mirror by {deviation:.3e}")]
    NotHermitian {
        row: usize,
        col: usize,
        deviation: f64,
    },
    #[error("matrix is not positive semidefinite: min eigenvalue {min_eig:.3e}")]
    NotPositive { min_eig: f64 },
    #[error("matrix exceeds the identity: max eigenvalue {max_eig}")]
    AboveIdentity { max_eig: f64 },
    #[error("trace {trace} exceeds 1")]
    TraceTooLarge { trace: f64 },
    #[error("trace has non-negligible imaginary part {imag:.3e}")]
    ComplexTrace { imag: f64 },
    #[error("dimension {dim} is not a power of two")]
    NotPowerOfTwo { dim: usize },
    #[error("register of {nqubits} qubits exceeds the supported maximum of {max}")]
    RegisterTooLarge { nqubits: usize, max: usize },
    #[error("repeated target qubit {qubit}")]
    RepeatedTarget { qubit: usize },
    #[error("target qubit {qubit} out of range for a {nqubits}-qubit register")]
    TargetOutOfRange { qubit: usize, nqubits: usize },
    #[error("local operator has dim {found}, expected {expected} for {targets} target qubit(s)")]
    LocalDimMismatch {
        found: usize,
        expected: usize,
        targets: usize,
    },
    #[error("matrix is not unitary: max |U\u{2020}U - I| entry is {deviation:.3e}")]
    NotUnitary { deviation: f64 },
}

/// Largest register size the dense representation is meant for.
pub const MAX_QUBITS: usize = 10;

/// Dense square complex matrix, row-major in its JSON form.
///
/// The JSON wire format is `{"dim": d, "entries": [[[re, im], ...], ...]}`
/// with `d` rows of `d` `[re, im]` pairs. Round-tripping through JSON
/// reproduces every entry bit-exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<Complex64>,
}

impl ComplexMatrix {
    /// Zero matrix of the given dimension (`dim >= 1`).
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        Self {
            inner: DMatrix::zeros(dim, dim),
        }
    }

    /// Identity matrix of the given dimension (`dim >= 1`).
    pub fn identity(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        Self {
            inner: DMatrix::identity(dim, dim),
        }
    }

    /// Build from a row-major slice of entries; `entries.len()` must be `dim * dim`.
    pub fn from_row_major(dim: usize, entries: &[Complex64]) -> Result<Self, MatrixError> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(MatrixError::DimMismatch {
                left: dim * dim,
                right: entries.len(),
            });
        }
        Ok(Self {
            inner: DMatrix::from_row_slice(dim, dim, entries),
        })
    }

    /// Build entry-by-entry from a closure over `(row, col)`.
    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        Self {
            inner: DMatrix::from_fn(dim, dim, f),
        }
    }

    /// Matrix unit `E_ij` (1 at row `i`, column `j`, zero elsewhere).
    pub fn matrix_unit(dim: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(dim);
        m.inner[(i, j)] = Complex64::new(1.0, 0.0);
        m
    }

    /// Projector `|i><i|` onto the `i`-th computational basis state.
    pub fn basis_projector(dim: usize, i: usize) -> Self {
        Self::matrix_unit(dim, i, i)
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.inner[(row, col)]
    }

    pub(crate) fn inner(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    pub(crate) fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.inner[(row, col)] = value;
    }

    pub(crate) fn from_inner(inner: DMatrix<Complex64>) -> Self {
        debug_assert_eq!(inner.nrows(), inner.ncols());
        Self { inner }
    }

    fn check_same_dim(&self, other: &Self) -> Result<(), MatrixError> {
        if self.dim() != other.dim() {
            return Err(MatrixError::DimMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, MatrixError> {
        self.check_same_dim(other)?;
        Ok(Self::from_inner(&self.inner + &other.inner))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, MatrixError> {
        self.check_same_dim(other)?;
        Ok(Self::from_inner(&self.inner - &other.inner))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, MatrixError> {
        self.check_same_dim(other)?;
        Ok(Self::from_inner(&self.inner * &other.inner))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::from_inner(self.inner.map(|z| z * factor))
    }

    pub fn scale_re(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// Kronecker product; the left factor occupies the most significant
    /// part of the index (earlier qubits).
    pub fn tensor(&self, other: &Self) -> Self {
        Self::from_inner(self.inner.kronecker(&other.inner))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_inner(self.inner.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self::from_inner(self.inner.transpose())
    }

    pub fn conj(&self) -> Self {
        Self::from_inner(self.inner.map(|z| z.conj()))
    }

    pub fn trace(&self) -> Complex64 {
        self.inner.trace()
    }

    /// Largest entry modulus (max-abs norm).
    pub fn max_abs(&self) -> f64 {
        self.inner.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max-abs norm of the entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64, MatrixError> {
        self.check_same_dim(other)?;
        Ok((&self.inner - &other.inner)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max))
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        match self.max_abs_diff(other) {
            Ok(d) => d <= tol,
            Err(_) => false,
        }
    }

    /// `(A + A^dag) / 2`, the Hermitian part.
    pub fn hermitize(&self) -> Self {
        Self::from_inner((&self.inner + self.inner.adjoint()).map(|z| z * 0.5))
    }

    /// Worst deviation from Hermitian symmetry, as `(row, col, |A[r][c] - conj(A[c][r])|)`.
    pub fn hermiticity_violation(&self) -> (usize, usize, f64) {
        let mut worst = (0, 0, 0.0_f64);
        let d = self.dim();
        for i in 0..d {
            for j in i..d {
                let dev = (self.inner[(i, j)] - self.inner[(j, i)].conj()).norm();
                if dev > worst.2 {
                    worst = (i, j, dev);
                }
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_violation().2 <= tol
    }

    /// Reject non-Hermitian input, pointing at the worst entry.
    pub fn require_hermitian(&self, tol: f64) -> Result<(), MatrixError> {
        let (row, col, deviation) = self.hermiticity_violation();
        if deviation > tol {
            return Err(MatrixError::NotHermitian {
                row,
                col,
                deviation,
            });
        }
        Ok(())
    }

    /// Matrix-vector product `A v`; `v.len()` must equal the dimension.
    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>, MatrixError> {
        if v.len() != self.dim() {
            return Err(MatrixError::DimMismatch {
                left: self.dim(),
                right: v.len(),
            });
        }
        let vec = nalgebra::DVector::from_column_slice(v);
        Ok((&self.inner * vec).as_slice().to_vec())
    }

    /// Column-stacked vectorization: column 0 first, then column 1, ...
    pub fn vec_col(&self) -> Vec<Complex64> {
        self.inner.as_slice().to_vec()
    }

    /// Inverse of [`ComplexMatrix::vec_col`]; `v.len()` must be `dim * dim`.
    pub fn from_vec_col(dim: usize, v: &[Complex64]) -> Result<Self, MatrixError> {
        if v.len() != dim * dim {
            return Err(MatrixError::DimMismatch {
                left: dim * dim,
                right: v.len(),
            });
        }
        Ok(Self {
            inner: DMatrix::from_column_slice(dim, dim, v),
        })
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    dim: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let d = self.dim();
        let entries = (0..d)
            .map(|i| (0..d).map(|j| [self.inner[(i, j)].re, self.inner[(i, j)].im]).collect())
            .collect();
        MatrixJson { dim: d, entries }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(deserializer)?;
        if raw.dim == 0 {
            return Err(D::Error::custom("matrix dim must be at least 1"));
        }
        if raw.entries.len() != raw.dim {
            return Err(D::Error::custom(format!(
                "expected {} rows, found {}",
                raw.dim,
                raw.entries.len()
            )));
        }
        let mut flat = Vec::with_capacity(raw.dim * raw.dim);
        for (i, row) in raw.entries.iter().enumerate() {
            if row.len() != raw.dim {
                return Err(D::Error::custom(format!(
                    "row {} has {} entries, expected {}",
                    i,
                    row.len(),
                    raw.dim
                )));
            }
            flat.extend(row.iter().map(|&[re, im]| Complex64::new(re, im)));
        }
        Ok(Self {
            inner: DMatrix::from_row_slice(raw.dim, raw.dim, &flat),
        })
    }
}

/// Shorthand complex constructor used pervasively in tests and gate tables.
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Number of qubits for a register dimension, or an error if `dim` is not a
/// power of two.
pub fn qubits_for_dim(dim: usize) -> Result<usize, MatrixError> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(MatrixError::NotPowerOfTwo { dim });
    }
    Ok(dim.trailing_zeros() as usize)
}
