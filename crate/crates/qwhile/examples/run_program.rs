//! Parse a program, validate it, and apply it to an input state.
//!
//! ```sh
//! cargo run --example run_program
//! ```

use qwhile::{parse, pretty_print, DensityOperator, Evaluator, Tolerances};

fn main() {
    let source = "
        // Flip a fair coin until it lands on 1.
        qubits q;
        while q do {
          q *= H
        }
    ";
    let program = parse(source).expect("program parses");
    println!("parsed program:\n{}", pretty_print(&program));

    let tol = Tolerances::default();
    let eval = Evaluator::new(&program, tol).expect("program validates");

    // Start from |0><0|: the loop measures 0 first with probability 1, then
    // mixes with the Hadamard gate, escaping with probability 1/2 per round.
    let input = DensityOperator::pure_basis(eval.dim(), 0);
    let (output, meta) = eval.denote(&input).expect("evaluation succeeds");

    println!(
        "termination weight (output trace): {:.12}",
        output.trace_re()
    );
    println!(
        "fixed point: {} iterations, converged = {}, residual = {:.3e}",
        meta.iterations, meta.converged, meta.residual
    );
    println!("output state (row major):");
    let d = eval.dim();
    for row in 0..d {
        let entries: Vec<String> = (0..d)
            .map(|col| {
                let z = output.matrix().get(row, col);
                format!("{:+.6}{:+.6}i", z.re, z.im)
            })
            .collect();
        println!("  [{}]", entries.join(", "));
    }
}
