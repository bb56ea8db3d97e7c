//! Built-in gate library and unitary resolution.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use crate::matrix::{c, ComplexMatrix};

use super::{ResolveError, UnitarySpec};

/// Why a gate-name lookup failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateNameError {
    /// Name is known but the parameter was missing or superfluous.
    BadParam,
    /// No gate by that name.
    Unknown,
}

/// Built-in gates. Rotation angles are in radians; `Rz(0) = I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    I,
    X,
    Y,
    Z,
    H,
    S,
    T,
    Rx(f64),
    Ry(f64),
    Rz(f64),
    Cnot,
    Cz,
    Swap,
}

impl Gate {
    /// Number of qubits the gate acts on.
    pub fn arity(&self) -> usize {
        match self {
            Gate::Cnot | Gate::Cz | Gate::Swap => 2,
            _ => 1,
        }
    }

    /// Gate name as it appears in the concrete syntax (without parameter).
    pub fn name(&self) -> &'static str {
        match self {
            Gate::I => "I",
            Gate::X => "X",
            Gate::Y => "Y",
            Gate::Z => "Z",
            Gate::H => "H",
            Gate::S => "S",
            Gate::T => "T",
            Gate::Rx(_) => "Rx",
            Gate::Ry(_) => "Ry",
            Gate::Rz(_) => "Rz",
            Gate::Cnot => "CNOT",
            Gate::Cz => "CZ",
            Gate::Swap => "SWAP",
        }
    }

    /// Rotation parameter, if the gate has one.
    pub fn param(&self) -> Option<f64> {
        match self {
            Gate::Rx(t) | Gate::Ry(t) | Gate::Rz(t) => Some(*t),
            _ => None,
        }
    }

    /// Look up a gate by syntax name and optional parameter.
    pub fn from_name(name: &str, param: Option<f64>) -> Result<Gate, GateNameError> {
        use GateNameError::BadParam;
        let fixed = |g: Gate| if param.is_none() { Ok(g) } else { Err(BadParam) };
        match name {
            "I" => fixed(Gate::I),
            "X" => fixed(Gate::X),
            "Y" => fixed(Gate::Y),
            "Z" => fixed(Gate::Z),
            "H" => fixed(Gate::H),
            "S" => fixed(Gate::S),
            "T" => fixed(Gate::T),
            "CNOT" => fixed(Gate::Cnot),
            "CZ" => fixed(Gate::Cz),
            "SWAP" => fixed(Gate::Swap),
            "Rx" => param.map(Gate::Rx).ok_or(BadParam),
            "Ry" => param.map(Gate::Ry).ok_or(BadParam),
            "Rz" => param.map(Gate::Rz).ok_or(BadParam),
            _ => Err(GateNameError::Unknown),
        }
    }

    /// The gate's unitary matrix. Two-qubit gates treat the first listed
    /// qubit as most significant; for `CNOT` that qubit is the control.
    pub fn matrix(&self) -> ComplexMatrix {
        let h = FRAC_1_SQRT_2;
        match self {
            Gate::I => ComplexMatrix::identity(2),
            Gate::X => ComplexMatrix::from_row_major(
                2,
                &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            )
            .unwrap(),
            Gate::Y => ComplexMatrix::from_row_major(
                2,
                &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)],
            )
            .unwrap(),
            Gate::Z => ComplexMatrix::from_row_major(
                2,
                &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)],
            )
            .unwrap(),
            Gate::H => ComplexMatrix::from_row_major(
                2,
                &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)],
            )
            .unwrap(),
            Gate::S => ComplexMatrix::from_row_major(
                2,
                &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)],
            )
            .unwrap(),
            Gate::T => ComplexMatrix::from_row_major(
                2,
                &[
                    c(1.0, 0.0),
                    c(0.0, 0.0),
                    c(0.0, 0.0),
                    c(FRAC_PI_4.cos(), FRAC_PI_4.sin()),
                ],
            )
            .unwrap(),
            Gate::Rx(t) => {
                let (cos, sin) = ((t / 2.0).cos(), (t / 2.0).sin());
                ComplexMatrix::from_row_major(
                    2,
                    &[c(cos, 0.0), c(0.0, -sin), c(0.0, -sin), c(cos, 0.0)],
                )
                .unwrap()
            }
            Gate::Ry(t) => {
                let (cos, sin) = ((t / 2.0).cos(), (t / 2.0).sin());
                ComplexMatrix::from_row_major(
                    2,
                    &[c(cos, 0.0), c(-sin, 0.0), c(sin, 0.0), c(cos, 0.0)],
                )
                .unwrap()
            }
            Gate::Rz(t) => {
                let half = t / 2.0;
                ComplexMatrix::from_row_major(
                    2,
                    &[
                        c(half.cos(), -half.sin()),
                        c(0.0, 0.0),
                        c(0.0, 0.0),
                        c(half.cos(), half.sin()),
                    ],
                )
                .unwrap()
            }
            Gate::Cnot => {
                let mut m = ComplexMatrix::zeros(4);
                for (col, row) in [(0usize, 0usize), (1, 1), (2, 3), (3, 2)] {
                    m.set(row, col, c(1.0, 0.0));
                }
                m
            }
            Gate::Cz => {
                let mut m = ComplexMatrix::identity(4);
                m.set(3, 3, c(-1.0, 0.0));
                m
            }
            Gate::Swap => {
                let mut m = ComplexMatrix::zeros(4);
                for (col, row) in [(0usize, 0usize), (1, 2), (2, 1), (3, 3)] {
                    m.set(row, col, c(1.0, 0.0));
                }
                m
            }
        }
    }
}

/// Max-abs deviation of `U` from unitarity, `max |U^dag U - I|`.
pub fn unitarity_deviation(u: &ComplexMatrix) -> f64 {
    let id = ComplexMatrix::identity(u.dim());
    u.adjoint()
        .matmul(u)
        .and_then(|p| p.max_abs_diff(&id))
        .expect("square matrices of equal dim")
}

/// Resolve a unitary spec to a concrete matrix for an application on
/// `arity` qubits, verifying dimension and unitarity (within `unitary_tol`).
pub fn resolve_unitary(
    spec: &UnitarySpec,
    arity: usize,
    unitary_tol: f64,
) -> Result<ComplexMatrix, ResolveError> {
    match spec {
        UnitarySpec::Gate(g) => {
            if g.arity() != arity {
                return Err(ResolveError::Arity {
                    gate: g.name().to_string(),
                    expected: g.arity(),
                    found: arity,
                });
            }
            Ok(g.matrix())
        }
        UnitarySpec::External { path, matrix } => {
            let m = matrix.as_ref().ok_or_else(|| ResolveError::ExternalUnresolved {
                path: path.clone(),
            })?;
            let expected = 1usize << arity;
            if m.dim() != expected {
                return Err(ResolveError::Dim {
                    qubits: arity,
                    expected,
                    found: m.dim(),
                });
            }
            let deviation = unitarity_deviation(m);
            if deviation > unitary_tol {
                return Err(ResolveError::NotUnitary { deviation });
            }
            Ok(m.clone())
        }
    }
}
