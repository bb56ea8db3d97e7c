//! Pretty printer. Output re-parses to a structurally identical AST.

use super::{Program, Stmt, UnitarySpec};

/// Render a program in the concrete syntax, indented two spaces per block.
pub fn pretty_print(p: &Program) -> String {
    let mut out = String::new();
    out.push_str("qubits ");
    out.push_str(&p.qubits.join(", "));
    out.push_str(";\n");
    write_stmt(&mut out, &p.body, &p.qubits, 0);
    out.push('\n');
    out
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn write_stmt(out: &mut String, stmt: &Stmt, names: &[String], level: usize) {
    match stmt {
        Stmt::Seq(first, rest) => {
            write_stmt(out, first, names, level);
            out.push_str(";\n");
            write_stmt(out, rest, names, level);
        }
        Stmt::Abort => {
            indent(out, level);
            out.push_str("abort");
        }
        Stmt::Skip => {
            indent(out, level);
            out.push_str("skip");
        }
        Stmt::Init(q) => {
            indent(out, level);
            out.push_str(&names[*q]);
            out.push_str(" := 0");
        }
        Stmt::UnitaryApp { qubits, unitary } => {
            indent(out, level);
            let list: Vec<&str> = qubits.iter().map(|&q| names[q].as_str()).collect();
            out.push_str(&list.join(", "));
            out.push_str(" *= ");
            write_unitary(out, unitary);
        }
        Stmt::Measure {
            qubit,
            then_branch,
            else_branch,
        } => {
            indent(out, level);
            out.push_str("measure ");
            out.push_str(&names[*qubit]);
            out.push_str(" then {\n");
            write_stmt(out, then_branch, names, level + 1);
            out.push('\n');
            indent(out, level);
            out.push_str("} else {\n");
            write_stmt(out, else_branch, names, level + 1);
            out.push('\n');
            indent(out, level);
            out.push('}');
        }
        Stmt::While { qubit, body } => {
            indent(out, level);
            out.push_str("while ");
            out.push_str(&names[*qubit]);
            out.push_str(" do {\n");
            write_stmt(out, body, names, level + 1);
            out.push('\n');
            indent(out, level);
            out.push('}');
        }
    }
}

fn write_unitary(out: &mut String, unitary: &UnitarySpec) {
    match unitary {
        UnitarySpec::Gate(g) => {
            out.push_str(g.name());
            if let Some(t) = g.param() {
                out.push('(');
                out.push_str(&t.to_string());
                out.push(')');
            }
        }
        UnitarySpec::External { path, .. } => {
            out.push_str("matrix(\"");
            for ch in path.chars() {
                match ch {
                    '"' => out.push_str("\\\""),
                    '\\' => out.push_str("\\\\"),
                    other => out.push(other),
                }
            }
            out.push_str("\")");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    fn round_trip(text: &str) {
        let p = parse(text).unwrap();
        let printed = pretty_print(&p);
        let again = parse(&printed).unwrap_or_else(|e| {
            panic!("printed program failed to parse: {e}\n{printed}")
        });
        assert_eq!(p, again, "round trip changed the AST:\n{printed}");
    }

    #[test]
    fn skip_prints_with_declaration() {
        let p = parse("qubits a, b; skip").unwrap();
        assert_eq!(pretty_print(&p), "qubits a, b;\nskip\n");
    }

    #[test]
    fn nested_loop_round_trips() {
        round_trip(
            "qubits a,b,c; a := 0; while a do { b *= Ry(0.25); measure b then { a,c *= CNOT } else { skip } }; abort",
        );
    }

    #[test]
    fn external_path_with_quotes_round_trips() {
        let p = parse(r#"qubits q; q *= matrix("dir\\u\"1\".json")"#).unwrap();
        let printed = pretty_print(&p);
        assert_eq!(parse(&printed).unwrap(), p);
    }

    #[test]
    fn sequence_chain_keeps_right_association() {
        round_trip("qubits q; skip; q := 0; q *= H; abort");
    }

    #[test]
    fn negative_rotation_parameter_round_trips() {
        round_trip("qubits q; q *= Rz(-1.75)");
    }
}
