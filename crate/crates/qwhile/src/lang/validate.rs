//! Static validation over (possibly hand-built) ASTs.
//!
//! The parser already rejects undeclared and duplicated qubits, so validation
//! mainly guards programs assembled in code: index ranges, distinctness,
//! gate arity, and unitarity of loaded external matrices. All violations are
//! collected, each tagged with a path into the statement tree.

use super::gates::unitarity_deviation;
use super::{Gate, Program, Stmt, UnitarySpec};

/// One validation failure, located by a dotted path such as
/// `body.1.loop.then`. Sequence elements are numbered left to right;
/// `then` / `else` / `loop` descend into branches and loop bodies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

const KEYWORDS: [&str; 9] = [
    "qubits", "abort", "skip", "measure", "then", "else", "while", "do", "matrix",
];

fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    (first.is_ascii_alphabetic() || first == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !KEYWORDS.contains(&name)
}

/// Check a program; `Err` carries every violation found.
///
/// `unitary_tol` bounds the allowed `max |U^dag U - I|` for external
/// matrices (built-in gates are unitary by construction).
pub fn validate(p: &Program, unitary_tol: f64) -> Result<(), Vec<Violation>> {
    let mut violations = Vec::new();

    for (i, name) in p.qubits.iter().enumerate() {
        if !is_valid_name(name) {
            violations.push(Violation {
                path: "qubits".into(),
                message: format!("invalid qubit name '{name}'"),
            });
        }
        if p.qubits[..i].contains(name) {
            violations.push(Violation {
                path: "qubits".into(),
                message: format!("duplicate qubit declaration '{name}'"),
            });
        }
    }

    walk(&p.body, p.nqubits(), unitary_tol, "body", &mut violations);

    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

fn check_index(q: usize, nqubits: usize, path: &str, violations: &mut Vec<Violation>) {
    if q >= nqubits {
        violations.push(Violation {
            path: path.to_string(),
            message: format!("qubit index {q} out of range (program declares {nqubits})"),
        });
    }
}

fn walk(
    stmt: &Stmt,
    nqubits: usize,
    unitary_tol: f64,
    path: &str,
    violations: &mut Vec<Violation>,
) {
    match stmt {
        Stmt::Abort | Stmt::Skip => {}
        Stmt::Init(q) => check_index(*q, nqubits, path, violations),
        Stmt::UnitaryApp { qubits, unitary } => {
            if qubits.is_empty() {
                violations.push(Violation {
                    path: path.to_string(),
                    message: "unitary application with empty qubit list".into(),
                });
                return;
            }
            for (i, &q) in qubits.iter().enumerate() {
                check_index(q, nqubits, path, violations);
                if qubits[..i].contains(&q) {
                    violations.push(Violation {
                        path: path.to_string(),
                        message: format!("duplicate qubit in unitary application (index {q})"),
                    });
                }
            }
            check_unitary(unitary, qubits.len(), unitary_tol, path, violations);
        }
        Stmt::Seq(_, _) => {
            // Flatten the chain so siblings get stable indices.
            let mut chain = Vec::new();
            collect_seq(stmt, &mut chain);
            for (i, child) in chain.iter().enumerate() {
                let child_path = format!("{path}.{i}");
                walk(child, nqubits, unitary_tol, &child_path, violations);
            }
        }
        Stmt::Measure {
            qubit,
            then_branch,
            else_branch,
        } => {
            check_index(*qubit, nqubits, path, violations);
            walk(
                then_branch,
                nqubits,
                unitary_tol,
                &format!("{path}.then"),
                violations,
            );
            walk(
                else_branch,
                nqubits,
                unitary_tol,
                &format!("{path}.else"),
                violations,
            );
        }
        Stmt::While { qubit, body } => {
            check_index(*qubit, nqubits, path, violations);
            walk(
                body,
                nqubits,
                unitary_tol,
                &format!("{path}.loop"),
                violations,
            );
        }
    }
}

fn collect_seq<'a>(stmt: &'a Stmt, chain: &mut Vec<&'a Stmt>) {
    match stmt {
        Stmt::Seq(first, rest) => {
            collect_seq(first, chain);
            collect_seq(rest, chain);
        }
        other => chain.push(other),
    }
}

fn check_unitary(
    unitary: &UnitarySpec,
    arity: usize,
    unitary_tol: f64,
    path: &str,
    violations: &mut Vec<Violation>,
) {
    match unitary {
        UnitarySpec::Gate(g) => {
            if g.arity() != arity {
                violations.push(Violation {
                    path: path.to_string(),
                    message: format!(
                        "gate {} expects {} qubit(s), applied to {}",
                        g.name(),
                        g.arity(),
                        arity
                    ),
                });
            }
            if let Gate::Rx(t) | Gate::Ry(t) | Gate::Rz(t) = g {
                if !t.is_finite() {
                    violations.push(Violation {
                        path: path.to_string(),
                        message: format!("rotation parameter {t} is not finite"),
                    });
                }
            }
        }
        UnitarySpec::External { path: file, matrix } => match matrix {
            None => violations.push(Violation {
                path: path.to_string(),
                message: format!("external unitary '{file}' not loaded"),
            }),
            Some(m) => {
                let expected = 1usize << arity;
                if m.dim() != expected {
                    violations.push(Violation {
                        path: path.to_string(),
                        message: format!(
                            "external unitary '{file}' has dim {}, expected {expected} for {arity} qubit(s)",
                            m.dim()
                        ),
                    });
                } else {
                    let deviation = unitarity_deviation(m);
                    if deviation > unitary_tol {
                        violations.push(Violation {
                            path: path.to_string(),
                            message: format!(
                                "external unitary '{file}' deviates from unitarity by {deviation:.3e}"
                            ),
                        });
                    }
                }
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;
    use crate::matrix::{c, ComplexMatrix};

    const TOL: f64 = 1e-10;

    #[test]
    fn parsed_hadamard_loop_is_valid() {
        let p = parse("qubits q; while q do { q *= H }").unwrap();
        assert!(validate(&p, TOL).is_ok());
    }

    #[test]
    fn hand_built_duplicate_targets_are_caught() {
        let p = Program {
            qubits: vec!["a".into(), "b".into()],
            body: Stmt::UnitaryApp {
                qubits: vec![0, 0],
                unitary: UnitarySpec::Gate(Gate::Swap),
            },
        };
        let violations = validate(&p, TOL).unwrap_err();
        assert_eq!(violations.len(), 1);
        assert!(violations[0].message.contains("duplicate qubit"));
        assert_eq!(violations[0].path, "body");
    }

    #[test]
    fn arity_mismatch_is_caught() {
        let p = Program {
            qubits: vec!["a".into(), "b".into()],
            body: Stmt::UnitaryApp {
                qubits: vec![0, 1],
                unitary: UnitarySpec::Gate(Gate::H),
            },
        };
        let violations = validate(&p, TOL).unwrap_err();
        assert!(violations[0].message.contains("expects 1 qubit"));
    }

    #[test]
    fn all_violations_are_collected_with_paths() {
        let p = Program {
            qubits: vec!["a".into()],
            body: Stmt::seq(
                Stmt::Init(3),
                Stmt::While {
                    qubit: 0,
                    body: Box::new(Stmt::UnitaryApp {
                        qubits: vec![0],
                        unitary: UnitarySpec::Gate(Gate::Cnot),
                    }),
                },
            ),
        };
        let violations = validate(&p, TOL).unwrap_err();
        assert_eq!(violations.len(), 2);
        assert_eq!(violations[0].path, "body.0");
        assert!(violations[0].message.contains("out of range"));
        assert_eq!(violations[1].path, "body.1.loop");
        assert!(violations[1].message.contains("expects 2 qubit(s)"));
    }

    #[test]
    fn non_unitary_external_is_caught() {
        let p = Program {
            qubits: vec!["q".into()],
            body: Stmt::UnitaryApp {
                qubits: vec![0],
                unitary: UnitarySpec::External {
                    path: "u.json".into(),
                    matrix: Some(
                        ComplexMatrix::from_row_major(
                            2,
                            &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)],
                        )
                        .unwrap(),
                    ),
                },
            },
        };
        let violations = validate(&p, TOL).unwrap_err();
        assert!(violations[0].message.contains("deviates from unitarity"));
    }

    #[test]
    fn unresolved_external_is_flagged() {
        let p = parse(r#"qubits q; q *= matrix("u.json")"#).unwrap();
        let violations = validate(&p, TOL).unwrap_err();
        assert!(violations[0].message.contains("not loaded"));
    }

    #[test]
    fn keyword_qubit_name_is_flagged() {
        let p = Program {
            qubits: vec!["while".into()],
            body: Stmt::Skip,
        };
        assert!(validate(&p, TOL).is_err());
    }
}
