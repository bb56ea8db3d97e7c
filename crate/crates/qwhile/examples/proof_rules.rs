//! Mechanically check loop proof rules and print their reports.
//!
//! Every report lists the rule's premises with numeric margins; the
//! conclusion is asserted only when all premises hold, so a report can
//! never claim more than the evidence supports.
//!
//! ```sh
//! cargo run --example proof_rules
//! ```

use qwhile::prooflab::{check_total_rule, check_zero_one_law, diag_part};
use qwhile::{parse, Predicate, Tolerances};

fn main() {
    let tol = Tolerances::default();

    // diag_part restricts a predicate to the measurement-compatible shape
    // every loop rule uses: P0 M P0 + P1 M P1.
    let plus = Predicate::new(
        qwhile::matrix::ComplexMatrix::from_row_major(
            2,
            &[
                qwhile::matrix::c(0.5, 0.0),
                qwhile::matrix::c(0.5, 0.0),
                qwhile::matrix::c(0.5, 0.0),
                qwhile::matrix::c(0.5, 0.0),
            ],
        )
        .expect("square"),
        &tol,
    )
    .expect("projector is a predicate");
    let di = diag_part(&plus, 0).expect("block-diagonal part");
    println!(
        "diag(|+><+|) w.r.t. qubit 0 = [[{:.2}, {:.2}], [{:.2}, {:.2}]]\n",
        di.diag.matrix().get(0, 0).re,
        di.diag.matrix().get(0, 1).re,
        di.diag.matrix().get(1, 0).re,
        di.diag.matrix().get(1, 1).re,
    );

    // Total-correctness rule on a loop that terminates almost surely:
    // every premise holds and the conclusion is asserted.
    let coin = parse("qubits q; while q do { q *= H }").expect("parses");
    let report = check_total_rule(&coin, &Predicate::identity(2), tol).expect("check runs");
    println!(
        "total rule on the fair-coin loop:\n{}\n",
        serde_json::to_string_pretty(&report).expect("serializes")
    );

    // The same rule on the stationary loop: the premise `diag M <= T`
    // fails with margin -1, and the conclusion is therefore not asserted.
    let stay = parse("qubits q; while q do { skip }").expect("parses");
    let report = check_total_rule(&stay, &Predicate::identity(2), tol).expect("check runs");
    println!(
        "total rule on the stationary loop (one premise fails):\n{}\n",
        serde_json::to_string_pretty(&report).expect("serializes")
    );

    // The 0-1 law: when the termination predicate is positive definite,
    // invariance alone upgrades to total correctness.
    let report = check_zero_one_law(&coin, &Predicate::identity(2), tol).expect("check runs");
    let pd = &report.premises[0];
    println!(
        "0-1 law on the fair-coin loop: '{}' holds with margin {:.6}; conclusion asserted = {}",
        pd.text, pd.margin, report.conclusion.asserted
    );
}
