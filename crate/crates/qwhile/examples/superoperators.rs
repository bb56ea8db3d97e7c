//! Every program denotes a quantum channel: a completely positive,
//! trace-non-increasing linear map. This example extracts the transfer
//! matrix and Choi matrix of a program and runs the positivity diagnostics,
//! then shows them rejecting the transpose map, the classic positive but
//! not completely positive operation.
//!
//! ```sh
//! cargo run --example superoperators
//! ```

use qwhile::matrix::{c, ComplexMatrix};
use qwhile::semantics::SuperOperator;
use qwhile::{parse, Evaluator, Tolerances};

fn main() {
    let tol = Tolerances::default();
    let program = parse("qubits q; q := 0").expect("program parses");
    let eval = Evaluator::new(&program, tol).expect("validates");

    let (superop, _) = eval.superop().expect("transfer matrix");
    println!("transfer matrix of `q := 0` (4 x 4, acting on vectorized states):");
    print_matrix(superop.transfer());

    let choi = superop.choi();
    println!("\nChoi matrix:");
    print_matrix(&choi);

    let report = superop.cp_check(&tol).expect("diagnostics");
    println!(
        "\ncompletely positive: {} (min Choi eigenvalue {:+.3e})",
        report.completely_positive, report.min_choi_eigenvalue
    );
    println!(
        "trace non-increasing: {} (margin {:+.3e})",
        report.trace_non_increasing, report.trace_margin
    );

    // The transpose map on one qubit: its transfer matrix is the swap of
    // vectorization indices. It preserves positivity of states, but is not
    // completely positive, and the Choi spectrum shows it immediately.
    let transpose = SuperOperator::new(
        1,
        ComplexMatrix::from_row_major(
            4,
            &[
                c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0),
                c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0),
                c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0),
                c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0),
            ],
        )
        .expect("square"),
    )
    .expect("well-formed transfer");
    let verdict = transpose.cp_check(&tol).expect("diagnostics");
    println!(
        "\ntranspose map: completely positive = {}, min Choi eigenvalue = {:+.3}",
        verdict.completely_positive, verdict.min_choi_eigenvalue
    );
}

fn print_matrix(m: &ComplexMatrix) {
    for row in 0..m.dim() {
        let cells: Vec<String> = (0..m.dim())
            .map(|col| {
                let z = m.get(row, col);
                if z.im.abs() < 1e-12 {
                    format!("{:+.3}", z.re)
                } else {
                    format!("{:+.3}{:+.3}i", z.re, z.im)
                }
            })
            .collect();
        println!("  [{}]", cells.join("  "));
    }
}
