//! Compute weakest preconditions (total correctness) and weakest liberal
//! preconditions (partial correctness), and verify the expectation duality
//! that connects them to running the program forward.
//!
//! ```sh
//! cargo run --example weakest_preconditions
//! ```

use qwhile::{parse, DensityOperator, Evaluator, Predicate, Tolerances};

fn main() {
    let tol = Tolerances::default();
    let program = parse(
        "qubits a, b;
         a *= H;
         measure a then { a, b *= CNOT } else { b := 0 }",
    )
    .expect("program parses");
    let eval = Evaluator::new(&program, tol).expect("program validates");
    let dim = eval.dim();

    // Postcondition: qubit b ends in |0>.
    let post = Predicate::new(
        qwhile::matrix::embed::basis_projector_on(0, 1, 2).expect("projector embeds"),
        &tol,
    )
    .expect("projector is a predicate");

    let (wp, _) = eval.wp(&post).expect("wp");
    let (wlp, _) = eval.wlp(&post).expect("wlp");

    println!("wp  diagonal:  {:?}", diagonal(wp.matrix()));
    println!("wlp diagonal:  {:?}", diagonal(wlp.matrix()));

    // Duality: Tr(wp.S.M rho) equals Tr(M [[S]]rho) for every state. The
    // liberal version adds the probability of divergence, Tr rho - Tr [[S]]rho.
    let rho = DensityOperator::maximally_mixed(dim);
    let (out, _) = eval.denote(&rho).expect("denote");
    let forward = trace_product(post.matrix(), out.matrix());
    let backward = trace_product(wp.matrix(), rho.matrix());
    println!("Tr(M [[S]]rho)   = {forward:.12}");
    println!("Tr(wp.S.M rho)   = {backward:.12}");
    println!("duality deviation = {:.3e}", (forward - backward).abs());

    let liberal = trace_product(wlp.matrix(), rho.matrix());
    let divergence = rho.trace_re() - out.matrix().trace().re;
    println!(
        "Tr(wlp.S.M rho)  = {liberal:.12} (forward + divergence = {:.12})",
        forward + divergence
    );
}

fn diagonal(m: &qwhile::ComplexMatrix) -> Vec<f64> {
    (0..m.dim()).map(|i| m.get(i, i).re).collect()
}

fn trace_product(a: &qwhile::ComplexMatrix, b: &qwhile::ComplexMatrix) -> f64 {
    a.matmul(b).expect("same dim").trace().re
}
