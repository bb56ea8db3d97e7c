//! Syntactic loop unrollings: the i-th unrolling runs at most i rounds and
//! aborts afterwards, so its semantics increase monotonically toward the
//! loop's semantics as i grows.
//!
//! ```sh
//! cargo run --example unrollings
//! ```

use qwhile::semantics::unroll_program;
use qwhile::{parse, pretty_print, DensityOperator, Evaluator, Tolerances};

fn main() {
    let tol = Tolerances::default();
    let program = parse("qubits q; while q do { q *= H }").expect("program parses");
    let input = DensityOperator::pure_basis(2, 0);

    let full_eval = Evaluator::new(&program, tol).expect("validates");
    let (limit, _) = full_eval.denote(&input).expect("loop evaluates");
    println!(
        "full loop termination weight: {:.12}\n",
        limit.trace_re()
    );

    println!("unrolling 2 looks like:\n{}", {
        let two = unroll_program(&program, 2).expect("unrolls");
        pretty_print(&two)
    });

    println!("trace of the i-th unrolling applied to |0><0|:");
    for i in 0..=8 {
        let approx = unroll_program(&program, i).expect("unrolls");
        let eval = Evaluator::new(&approx, tol).expect("validates");
        let (out, _) = eval.denote(&input).expect("loop-free evaluation");
        let trace = out.trace_re();
        // Each extra round halves the remaining mass: 1 - 2^(1-i).
        println!(
            "  i = {i}: trace = {trace:.9}   (gap to limit {:.3e})",
            limit.trace_re() - trace
        );
    }
}
