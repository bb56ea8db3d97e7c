//! Tokenizer for the concrete syntax. Tracks 1-based line/column positions.

use super::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Number(f64),
    Str(String),
    KwQubits,
    KwAbort,
    KwSkip,
    KwMeasure,
    KwThen,
    KwElse,
    KwWhile,
    KwDo,
    KwMatrix,
    Comma,
    Semi,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Assign,
    ApplyEq,
    Eof,
}

impl Tok {
    /// Human-readable token description for error messages.
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(name) => format!("identifier '{name}'"),
            Tok::Number(x) => format!("number {x}"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::KwQubits => "'qubits'".into(),
            Tok::KwAbort => "'abort'".into(),
            Tok::KwSkip => "'skip'".into(),
            Tok::KwMeasure => "'measure'".into(),
            Tok::KwThen => "'then'".into(),
            Tok::KwElse => "'else'".into(),
            Tok::KwWhile => "'while'".into(),
            Tok::KwDo => "'do'".into(),
            Tok::KwMatrix => "'matrix'".into(),
            Tok::Comma => "','".into(),
            Tok::Semi => "';'".into(),
            Tok::LBrace => "'{'".into(),
            Tok::RBrace => "'}'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Assign => "':='".into(),
            Tok::ApplyEq => "'*='".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

struct Cursor<'a> {
    rest: std::str::Chars<'a>,
    line: usize,
    col: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            rest: text.chars(),
            line: 1,
            col: 1,
        }
    }

    fn peek(&self) -> Option<char> {
        self.rest.clone().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.rest.clone();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let ch = self.rest.next()?;
        if ch == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(ch)
    }
}

fn is_ident_start(ch: char) -> bool {
    ch.is_ascii_alphabetic() || ch == '_'
}

fn is_ident_continue(ch: char) -> bool {
    ch.is_ascii_alphanumeric() || ch == '_'
}

/// Tokenize the full input; the result always ends with an `Eof` token.
pub fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut cur = Cursor::new(text);
    let mut out = Vec::new();

    loop {
        // Skip whitespace and `//` comments.
        loop {
            match cur.peek() {
                Some(ch) if ch.is_whitespace() => {
                    cur.bump();
                }
                Some('/') if cur.peek2() == Some('/') => {
                    while let Some(ch) = cur.peek() {
                        if ch == '\n' {
                            break;
                        }
                        cur.bump();
                    }
                }
                _ => break,
            }
        }

        let (line, col) = (cur.line, cur.col);
        let Some(ch) = cur.peek() else {
            out.push(Token {
                tok: Tok::Eof,
                line,
                col,
            });
            return Ok(out);
        };

        let tok = match ch {
            ',' => {
                cur.bump();
                Tok::Comma
            }
            ';' => {
                cur.bump();
                Tok::Semi
            }
            '{' => {
                cur.bump();
                Tok::LBrace
            }
            '}' => {
                cur.bump();
                Tok::RBrace
            }
            '(' => {
                cur.bump();
                Tok::LParen
            }
            ')' => {
                cur.bump();
                Tok::RParen
            }
            ':' => {
                cur.bump();
                if cur.peek() == Some('=') {
                    cur.bump();
                    Tok::Assign
                } else {
                    return Err(ParseError::Lex {
                        line,
                        col,
                        message: "expected '=' after ':'".into(),
                    });
                }
            }
            '*' => {
                cur.bump();
                if cur.peek() == Some('=') {
                    cur.bump();
                    Tok::ApplyEq
                } else {
                    return Err(ParseError::Lex {
                        line,
                        col,
                        message: "expected '=' after '*'".into(),
                    });
                }
            }
            '"' => {
                cur.bump();
                let mut s = String::new();
                loop {
                    match cur.bump() {
                        Some('"') => break,
                        Some('\\') => match cur.bump() {
                            Some(esc @ ('"' | '\\')) => s.push(esc),
                            Some(other) => {
                                return Err(ParseError::Lex {
                                    line,
                                    col,
                                    message: format!("unsupported escape '\\{other}' in string"),
                                })
                            }
                            None => {
                                return Err(ParseError::Lex {
                                    line,
                                    col,
                                    message: "unterminated string".into(),
                                })
                            }
                        },
                        Some('\n') | None => {
                            return Err(ParseError::Lex {
                                line,
                                col,
                                message: "unterminated string".into(),
                            })
                        }
                        Some(other) => s.push(other),
                    }
                }
                Tok::Str(s)
            }
            '-' => {
                if cur.peek2().is_some_and(|c2| c2.is_ascii_digit()) {
                    cur.bump();
                    lex_number(&mut cur, line, col, true)?
                } else {
                    return Err(ParseError::Lex {
                        line,
                        col,
                        message: "'-' must be followed by a digit".into(),
                    });
                }
            }
            d if d.is_ascii_digit() => lex_number(&mut cur, line, col, false)?,
            c if is_ident_start(c) => {
                let mut name = String::new();
                while let Some(c2) = cur.peek() {
                    if is_ident_continue(c2) {
                        name.push(c2);
                        cur.bump();
                    } else {
                        break;
                    }
                }
                match name.as_str() {
                    "qubits" => Tok::KwQubits,
                    "abort" => Tok::KwAbort,
                    "skip" => Tok::KwSkip,
                    "measure" => Tok::KwMeasure,
                    "then" => Tok::KwThen,
                    "else" => Tok::KwElse,
                    "while" => Tok::KwWhile,
                    "do" => Tok::KwDo,
                    "matrix" => Tok::KwMatrix,
                    _ => Tok::Ident(name),
                }
            }
            other => {
                return Err(ParseError::Lex {
                    line,
                    col,
                    message: format!("unexpected character '{other}'"),
                })
            }
        };
        out.push(Token { tok, line, col });
    }
}

fn lex_number(
    cur: &mut Cursor,
    line: usize,
    col: usize,
    negative: bool,
) -> Result<Tok, ParseError> {
    let mut text = String::new();
    if negative {
        text.push('-');
    }
    while let Some(c) = cur.peek() {
        if c.is_ascii_digit() {
            text.push(c);
            cur.bump();
        } else {
            break;
        }
    }
    if cur.peek() == Some('.') {
        text.push('.');
        cur.bump();
        let mut any = false;
        while let Some(c) = cur.peek() {
            if c.is_ascii_digit() {
                text.push(c);
                cur.bump();
                any = true;
            } else {
                break;
            }
        }
        if !any {
            return Err(ParseError::Lex {
                line,
                col,
                message: "digit expected after decimal point".into(),
            });
        }
    }
    if let Some(e @ ('e' | 'E')) = cur.peek() {
        text.push(e);
        cur.bump();
        if let Some(sign @ ('+' | '-')) = cur.peek() {
            text.push(sign);
            cur.bump();
        }
        let mut any = false;
        while let Some(c) = cur.peek() {
            if c.is_ascii_digit() {
                text.push(c);
                cur.bump();
                any = true;
            } else {
                break;
            }
        }
        if !any {
            return Err(ParseError::Lex {
                line,
                col,
                message: "digit expected in exponent".into(),
            });
        }
    }
    let value: f64 = text.parse().map_err(|_| ParseError::Lex {
        line,
        col,
        message: format!("invalid number literal '{text}'"),
    })?;
    Ok(Tok::Number(value))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<Tok> {
        lex(text).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn lexes_declaration_and_statement() {
        assert_eq!(
            kinds("qubits q; skip"),
            vec![
                Tok::KwQubits,
                Tok::Ident("q".into()),
                Tok::Semi,
                Tok::KwSkip,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn comments_and_positions() {
        let toks = lex("// header\n  abort").unwrap();
        assert_eq!(toks[0].tok, Tok::KwAbort);
        assert_eq!((toks[0].line, toks[0].col), (2, 3));
    }

    #[test]
    fn compound_operators() {
        assert_eq!(
            kinds("q := 0"),
            vec![Tok::Ident("q".into()), Tok::Assign, Tok::Number(0.0), Tok::Eof]
        );
        assert_eq!(
            kinds("q *= H"),
            vec![
                Tok::Ident("q".into()),
                Tok::ApplyEq,
                Tok::Ident("H".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn numbers_with_exponent_and_sign() {
        assert_eq!(kinds("1.5"), vec![Tok::Number(1.5), Tok::Eof]);
        assert_eq!(kinds("-2.5e-1"), vec![Tok::Number(-0.25), Tok::Eof]);
    }

    #[test]
    fn string_with_escape() {
        assert_eq!(
            kinds(r#""a\"b""#),
            vec![Tok::Str("a\"b".into()), Tok::Eof]
        );
    }

    #[test]
    fn bad_characters_are_lex_errors() {
        assert!(matches!(lex("q := 0 $"), Err(ParseError::Lex { .. })));
        assert!(matches!(lex("q : 0"), Err(ParseError::Lex { .. })));
        assert!(matches!(lex("\"open"), Err(ParseError::Lex { .. })));
    }
}
