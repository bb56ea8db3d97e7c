//! Concrete syntax, AST, parser, and static validation for the quantum
//! while-language.
//!
//! Grammar (whitespace and `//` line comments are ignored):
//!
//! ```text
//! program := "qubits" ident ("," ident)* ";" stmt
//! stmt    := atom (";" stmt)?
//! atom    := "abort"
//!          | "skip"
//!          | ident ":=" "0"
//!          | ident ("," ident)* "*=" unitary
//!          | "measure" ident "then" "{" stmt "}" "else" "{" stmt "}"
//!          | "while" ident "do" "{" stmt "}"
//! unitary := gate-name ("(" number ")")? | "matrix" "(" string ")"
//! ```
//!
//! The parser resolves qubit names to indices in declaration order, so the
//! AST refers to qubits by position. Measurement is in the computational
//! basis of the measured qubit: outcome 0 selects the `then` branch, outcome
//! 1 the `else` branch, and a `while` loop terminates on outcome 1 and runs
//! its body on outcome 0.

use std::path::Path;

use thiserror::Error;

use crate::matrix::ComplexMatrix;

pub mod gates;
mod lexer;
mod parser;
mod printer;
mod validate;

pub use gates::{resolve_unitary, Gate, GateNameError};
pub use parser::parse;
pub use printer::pretty_print;
pub use validate::{validate, Violation};

/// Errors from parsing; every variant carries a 1-based line and column.
#[derive(Debug, Error)]
pub enum ParseError {
    #[error("lexical error at line {line}, column {col}: {message}")]
    Lex {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("syntax error at line {line}, column {col}: expected {expected}, found {found}")]
    Syntax {
        line: usize,
        col: usize,
        expected: String,
        found: String,
    },
    #[error("undeclared qubit '{name}' at line {line}, column {col}")]
    UndeclaredQubit {
        name: String,
        line: usize,
        col: usize,
    },
    #[error("duplicate qubit in unitary application: '{name}' at line {line}, column {col}")]
    DuplicateQubit {
        name: String,
        line: usize,
        col: usize,
    },
    #[error("duplicate qubit declaration '{name}' at line {line}, column {col}")]
    DuplicateDeclaration {
        name: String,
        line: usize,
        col: usize,
    },
    #[error("unknown gate '{name}' at line {line}, column {col}")]
    UnknownGate {
        name: String,
        line: usize,
        col: usize,
    },
}

/// Errors from resolving unitaries against the gate library or external files.
#[derive(Debug, Error)]
pub enum ResolveError {
    #[error("failed to read unitary file '{path}': {source}")]
    ExternalIo {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to parse unitary file '{path}': {source}")]
    ExternalJson {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("external unitary '{path}' not loaded; call Program::resolve_externals first")]
    ExternalUnresolved { path: String },
    #[error("gate {gate} expects {expected} qubit(s), got {found}")]
    Arity {
        gate: String,
        expected: usize,
        found: usize,
    },
    #[error("unitary on {qubits} qubit(s) must have dim {expected}, found {found}")]
    Dim {
        qubits: usize,
        expected: usize,
        found: usize,
    },
    #[error("matrix is not unitary: max |U\u{2020}U - I| entry deviates by {deviation:.3e}")]
    NotUnitary { deviation: f64 },
}

/// How a unitary application names its operator: a built-in gate or a matrix
/// loaded from a JSON file.
#[derive(Debug, Clone)]
pub enum UnitarySpec {
    Gate(Gate),
    External {
        path: String,
        /// Filled in by [`Program::resolve_externals`]; `None` right after
        /// parsing.
        matrix: Option<ComplexMatrix>,
    },
}

impl PartialEq for UnitarySpec {
    /// Externals compare by path only, so a printed-and-reparsed program
    /// (whose matrices are not yet loaded) still equals the original.
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (UnitarySpec::Gate(a), UnitarySpec::Gate(b)) => a == b,
            (
                UnitarySpec::External { path: a, .. },
                UnitarySpec::External { path: b, .. },
            ) => a == b,
            _ => false,
        }
    }
}

/// Statement forms of the language. Qubits are indices into the enclosing
/// [`Program`]'s declaration list.
#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    /// Diverge: no branch ever terminates.
    Abort,
    /// Do nothing.
    Skip,
    /// Reset one qubit to `|0>`.
    Init(usize),
    /// Apply a unitary to a list of distinct qubits (first listed qubit is
    /// the operator's most significant).
    UnitaryApp {
        qubits: Vec<usize>,
        unitary: UnitarySpec,
    },
    /// Run the first statement, then the second.
    Seq(Box<Stmt>, Box<Stmt>),
    /// Measure one qubit in the computational basis; outcome 0 runs `then_branch`,
    /// outcome 1 runs `else_branch`.
    Measure {
        qubit: usize,
        then_branch: Box<Stmt>,
        else_branch: Box<Stmt>,
    },
    /// Measure `qubit`; on outcome 1 terminate, on outcome 0 run `body` and
    /// repeat.
    While { qubit: usize, body: Box<Stmt> },
}

impl Stmt {
    /// Sequence two statements, re-associating so the result is right-nested.
    /// That is the shape the parser produces, so trees built with this helper
    /// survive a print/parse round trip unchanged.
    pub fn seq(first: Stmt, second: Stmt) -> Stmt {
        match first {
            Stmt::Seq(head, tail) => Stmt::Seq(head, Box::new(Stmt::seq(*tail, second))),
            other => Stmt::Seq(Box::new(other), Box::new(second)),
        }
    }
}

/// A parsed program: declared qubit names plus the statement body.
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    /// Declared names, in order; index in this list is the qubit index used
    /// throughout the AST. Qubit 0 is the most significant bit of basis
    /// state indices.
    pub qubits: Vec<String>,
    pub body: Stmt,
}

impl Program {
    pub fn nqubits(&self) -> usize {
        self.qubits.len()
    }

    /// Register dimension `2^n`.
    pub fn dim(&self) -> usize {
        1 << self.nqubits()
    }

    /// Load every `matrix("path")` unitary in the body, resolving relative
    /// paths against `base_dir`.
    pub fn resolve_externals(&mut self, base_dir: &Path) -> Result<(), ResolveError> {
        fn walk(stmt: &mut Stmt, base_dir: &Path) -> Result<(), ResolveError> {
            match stmt {
                Stmt::Abort | Stmt::Skip | Stmt::Init(_) => Ok(()),
                Stmt::UnitaryApp { unitary, .. } => {
                    if let UnitarySpec::External { path, matrix } = unitary {
                        if matrix.is_none() {
                            let full = base_dir.join(path.as_str());
                            let text = std::fs::read_to_string(&full).map_err(|source| {
                                ResolveError::ExternalIo {
                                    path: full.display().to_string(),
                                    source,
                                }
                            })?;
                            let m: ComplexMatrix =
                                serde_json::from_str(&text).map_err(|source| {
                                    ResolveError::ExternalJson {
                                        path: full.display().to_string(),
                                        source,
                                    }
                                })?;
                            *matrix = Some(m);
                        }
                    }
                    Ok(())
                }
                Stmt::Seq(a, b) => {
                    walk(a, base_dir)?;
                    walk(b, base_dir)
                }
                Stmt::Measure {
                    then_branch,
                    else_branch,
                    ..
                } => {
                    walk(then_branch, base_dir)?;
                    walk(else_branch, base_dir)
                }
                Stmt::While { body, .. } => walk(body, base_dir),
            }
        }
        walk(&mut self.body, base_dir)
    }
}
