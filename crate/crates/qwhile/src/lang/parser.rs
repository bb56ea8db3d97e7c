//! Recursive-descent parser. Resolves qubit names to declaration indices and
//! rejects undeclared or duplicated qubits at the use site.

use super::lexer::{lex, Tok, Token};
use super::{gates, Gate, ParseError, Program, Stmt, UnitarySpec};

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    qubits: Vec<String>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax_error(&self, expected: &str) -> ParseError {
        let t = self.peek();
        ParseError::Syntax {
            line: t.line,
            col: t.col,
            expected: expected.to_string(),
            found: t.tok.describe(),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<Token, ParseError> {
        if self.peek().tok == tok {
            Ok(self.advance())
        } else {
            Err(self.syntax_error(expected))
        }
    }

    fn expect_ident(&mut self, expected: &str) -> Result<(String, usize, usize), ParseError> {
        match self.peek().tok.clone() {
            Tok::Ident(name) => {
                let t = self.advance();
                Ok((name, t.line, t.col))
            }
            _ => Err(self.syntax_error(expected)),
        }
    }

    /// Resolve a qubit name against the declaration list.
    fn qubit_index(&self, name: &str, line: usize, col: usize) -> Result<usize, ParseError> {
        self.qubits
            .iter()
            .position(|q| q == name)
            .ok_or(ParseError::UndeclaredQubit {
                name: name.to_string(),
                line,
                col,
            })
    }

    fn parse_program(&mut self) -> Result<Program, ParseError> {
        self.expect(Tok::KwQubits, "'qubits' declaration")?;
        loop {
            let (name, line, col) = self.expect_ident("qubit name")?;
            if self.qubits.contains(&name) {
                return Err(ParseError::DuplicateDeclaration { name, line, col });
            }
            self.qubits.push(name);
            if self.peek().tok == Tok::Comma {
                self.advance();
            } else {
                break;
            }
        }
        self.expect(Tok::Semi, "';' after qubit declaration")?;
        let body = self.parse_stmt()?;
        self.expect(Tok::Eof, "end of input")?;
        Ok(Program {
            qubits: std::mem::take(&mut self.qubits),
            body,
        })
    }

    /// `stmt := atom (";" stmt)?` — right-associated sequencing.
    fn parse_stmt(&mut self) -> Result<Stmt, ParseError> {
        let first = self.parse_atom()?;
        if self.peek().tok == Tok::Semi {
            self.advance();
            let rest = self.parse_stmt()?;
            Ok(Stmt::seq(first, rest))
        } else {
            Ok(first)
        }
    }

    fn parse_block(&mut self) -> Result<Stmt, ParseError> {
        self.expect(Tok::LBrace, "'{'")?;
        let body = self.parse_stmt()?;
        self.expect(Tok::RBrace, "'}'")?;
        Ok(body)
    }

    fn parse_atom(&mut self) -> Result<Stmt, ParseError> {
        match self.peek().tok.clone() {
            Tok::KwAbort => {
                self.advance();
                Ok(Stmt::Abort)
            }
            Tok::KwSkip => {
                self.advance();
                Ok(Stmt::Skip)
            }
            Tok::KwMeasure => {
                self.advance();
                let (name, line, col) = self.expect_ident("qubit name after 'measure'")?;
                let qubit = self.qubit_index(&name, line, col)?;
                self.expect(Tok::KwThen, "'then'")?;
                let then_branch = self.parse_block()?;
                self.expect(Tok::KwElse, "'else'")?;
                let else_branch = self.parse_block()?;
                Ok(Stmt::Measure {
                    qubit,
                    then_branch: Box::new(then_branch),
                    else_branch: Box::new(else_branch),
                })
            }
            Tok::KwWhile => {
                self.advance();
                let (name, line, col) = self.expect_ident("qubit name after 'while'")?;
                let qubit = self.qubit_index(&name, line, col)?;
                self.expect(Tok::KwDo, "'do'")?;
                let body = self.parse_block()?;
                Ok(Stmt::While {
                    qubit,
                    body: Box::new(body),
                })
            }
            Tok::Ident(_) => self.parse_ident_stmt(),
            _ => Err(self.syntax_error("a statement")),
        }
    }

    /// Statements starting with an identifier: `q := 0` or `q, r, ... *= U`.
    fn parse_ident_stmt(&mut self) -> Result<Stmt, ParseError> {
        let (first_name, first_line, first_col) = self.expect_ident("qubit name")?;
        let mut names = vec![(first_name, first_line, first_col)];
        while self.peek().tok == Tok::Comma {
            self.advance();
            names.push(self.expect_ident("qubit name")?);
        }

        match self.peek().tok {
            Tok::Assign if names.len() == 1 => {
                self.advance();
                match self.peek().tok {
                    Tok::Number(x) if x == 0.0 => {
                        self.advance();
                        let (name, line, col) = &names[0];
                        let qubit = self.qubit_index(name, *line, *col)?;
                        Ok(Stmt::Init(qubit))
                    }
                    _ => Err(self.syntax_error("'0' (initialization assigns zero)")),
                }
            }
            Tok::ApplyEq => {
                self.advance();
                let unitary = self.parse_unitary()?;
                let mut qubits = Vec::with_capacity(names.len());
                for (name, line, col) in &names {
                    let idx = self.qubit_index(name, *line, *col)?;
                    if qubits.contains(&idx) {
                        return Err(ParseError::DuplicateQubit {
                            name: name.clone(),
                            line: *line,
                            col: *col,
                        });
                    }
                    qubits.push(idx);
                }
                Ok(Stmt::UnitaryApp { qubits, unitary })
            }
            _ => Err(self.syntax_error(if names.len() == 1 {
                "':=' or '*='"
            } else {
                "'*=' after qubit list"
            })),
        }
    }

    fn parse_unitary(&mut self) -> Result<UnitarySpec, ParseError> {
        match self.peek().tok.clone() {
            Tok::KwMatrix => {
                self.advance();
                self.expect(Tok::LParen, "'(' after 'matrix'")?;
                let path = match self.peek().tok.clone() {
                    Tok::Str(s) => {
                        self.advance();
                        s
                    }
                    _ => return Err(self.syntax_error("a quoted file path")),
                };
                self.expect(Tok::RParen, "')'")?;
                Ok(UnitarySpec::External { path, matrix: None })
            }
            Tok::Ident(name) => {
                let t = self.advance();
                let param = if self.peek().tok == Tok::LParen {
                    self.advance();
                    let value = match self.peek().tok {
                        Tok::Number(x) => {
                            self.advance();
                            x
                        }
                        _ => return Err(self.syntax_error("a numeric gate parameter")),
                    };
                    self.expect(Tok::RParen, "')'")?;
                    Some(value)
                } else {
                    None
                };
                match Gate::from_name(&name, param) {
                    Ok(gate) => Ok(UnitarySpec::Gate(gate)),
                    Err(gates::GateNameError::BadParam) => Err(ParseError::Syntax {
                        line: t.line,
                        col: t.col,
                        expected: if param.is_some() {
                            format!("gate '{name}' takes no parameter")
                        } else {
                            format!("gate '{name}' requires a parameter, e.g. {name}(0.5)")
                        },
                        found: t.tok.describe(),
                    }),
                    Err(gates::GateNameError::Unknown) => Err(ParseError::UnknownGate {
                        name,
                        line: t.line,
                        col: t.col,
                    }),
                }
            }
            _ => Err(self.syntax_error("a gate name or matrix(\"path\")")),
        }
    }
}

/// Parse a complete program.
pub fn parse(text: &str) -> Result<Program, ParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        qubits: Vec::new(),
    };
    parser.parse_program()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_program() {
        let p = parse("qubits q; skip").unwrap();
        assert_eq!(p.qubits, vec!["q"]);
        assert_eq!(p.body, Stmt::Skip);
    }

    #[test]
    fn hadamard_loop() {
        let p = parse("qubits q; while q do { q *= H }").unwrap();
        assert_eq!(
            p.body,
            Stmt::While {
                qubit: 0,
                body: Box::new(Stmt::UnitaryApp {
                    qubits: vec![0],
                    unitary: UnitarySpec::Gate(Gate::H),
                }),
            }
        );
    }

    #[test]
    fn sequences_are_right_associated() {
        let p = parse("qubits q; skip; q := 0; abort").unwrap();
        assert_eq!(
            p.body,
            Stmt::seq(Stmt::Skip, Stmt::seq(Stmt::Init(0), Stmt::Abort))
        );
    }

    #[test]
    fn measure_maps_outcome_zero_to_then() {
        let p = parse("qubits a, b; measure a then { b *= X } else { skip }").unwrap();
        match p.body {
            Stmt::Measure {
                qubit,
                then_branch,
                else_branch,
            } => {
                assert_eq!(qubit, 0);
                assert!(matches!(*then_branch, Stmt::UnitaryApp { .. }));
                assert_eq!(*else_branch, Stmt::Skip);
            }
            other => panic!("expected measure, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_qubit_in_application_is_rejected() {
        let err = parse("qubits a, b; a, a *= CNOT").unwrap_err();
        assert!(matches!(err, ParseError::DuplicateQubit { .. }));
        assert!(err
            .to_string()
            .contains("duplicate qubit in unitary application"));
    }

    #[test]
    fn undeclared_qubit_is_rejected_with_position() {
        let err = parse("qubits a; b := 0").unwrap_err();
        match err {
            ParseError::UndeclaredQubit { name, line, col } => {
                assert_eq!(name, "b");
                assert_eq!((line, col), (1, 11));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn init_must_assign_zero() {
        assert!(matches!(
            parse("qubits q; q := 1"),
            Err(ParseError::Syntax { .. })
        ));
    }

    #[test]
    fn external_matrix_reference() {
        let p = parse(r#"qubits q; q *= matrix("u.json")"#).unwrap();
        assert_eq!(
            p.body,
            Stmt::UnitaryApp {
                qubits: vec![0],
                unitary: UnitarySpec::External {
                    path: "u.json".into(),
                    matrix: None,
                },
            }
        );
    }

    #[test]
    fn rotation_gates_take_parameters() {
        let p = parse("qubits q; q *= Rz(1.25)").unwrap();
        assert_eq!(
            p.body,
            Stmt::UnitaryApp {
                qubits: vec![0],
                unitary: UnitarySpec::Gate(Gate::Rz(1.25)),
            }
        );
        assert!(parse("qubits q; q *= Rz").is_err());
        assert!(parse("qubits q; q *= H(0.5)").is_err());
    }

    #[test]
    fn unknown_gate_is_reported() {
        assert!(matches!(
            parse("qubits q; q *= FOO"),
            Err(ParseError::UnknownGate { .. })
        ));
    }

    #[test]
    fn trailing_semicolon_is_a_syntax_error() {
        assert!(matches!(
            parse("qubits q; skip;"),
            Err(ParseError::Syntax { .. })
        ));
    }

    #[test]
    fn duplicate_declaration_is_rejected() {
        assert!(matches!(
            parse("qubits q, q; skip"),
            Err(ParseError::DuplicateDeclaration { .. })
        ));
    }

    #[test]
    fn keywords_cannot_name_qubits() {
        assert!(parse("qubits do; skip").is_err());
    }
}
