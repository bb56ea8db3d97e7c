//! The termination predicate T = wp.loop.I: its expectation Tr(T rho) is
//! the probability that the loop terminates from initial state rho.
//!
//! ```sh
//! cargo run --example termination
//! ```

use qwhile::{parse, DensityOperator, Evaluator, Tolerances};

fn main() {
    let tol = Tolerances::default();
    let loops = [
        ("fair coin", "qubits q; while q do { q *= H }"),
        ("stationary", "qubits q; while q do { skip }"),
        ("slow drift", "qubits q; while q do { q *= Ry(0.4) }"),
        ("body aborts", "qubits q; while q do { abort }"),
    ];

    for (name, source) in loops {
        let program = parse(source).expect("program parses");
        let eval = Evaluator::new(&program, tol).expect("program validates");
        let (t, meta) = eval.termination_predicate().expect("fixed point");

        let from_zero = expectation(&t, &DensityOperator::pure_basis(2, 0));
        let from_one = expectation(&t, &DensityOperator::pure_basis(2, 1));
        let from_mixed = expectation(&t, &DensityOperator::maximally_mixed(2));

        println!("{name}: {source}");
        println!(
            "  T = [[{:.6}, {:.6}], [{:.6}, {:.6}]]  ({} iterations)",
            t.matrix().get(0, 0).re,
            t.matrix().get(0, 1).re,
            t.matrix().get(1, 0).re,
            t.matrix().get(1, 1).re,
            meta.iterations,
        );
        println!(
            "  termination probability from |0>: {from_zero:.9}, from |1>: {from_one:.9}, from I/2: {from_mixed:.9}"
        );
    }

    // A loop everyone should distrust: the body undoes its own mixing, so
    // the loop never leaves the run-again subspace and the iteration hits
    // its budget. The result carries converged = false instead of lying.
    let slow = parse("qubits q; while q do { q *= Ry(0.001) }").expect("parses");
    let mut small_budget = tol;
    small_budget.max_iter = 50;
    let eval = Evaluator::new(&slow, small_budget).expect("validates");
    let (t, meta) = eval.termination_predicate().expect("evaluates");
    println!(
        "tiny rotation with max_iter = 50: converged = {}, partial Tr(T |0><0|) = {:.6}",
        meta.converged,
        expectation(&t, &DensityOperator::pure_basis(2, 0)),
    );
}

fn expectation(t: &qwhile::Predicate, rho: &DensityOperator) -> f64 {
    t.matrix()
        .matmul(rho.matrix())
        .expect("same dim")
        .trace()
        .re
}
