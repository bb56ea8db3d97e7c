//! Randomized testing of the transformer laws over generated programs.
//!
//! Samples random programs, states, and predicates from a seeded stream,
//! then checks every expectation identity and ordering law, reporting the
//! worst deviation or margin seen per law.
//!
//! ```sh
//! cargo run --example randomized_laws
//! ```

use qwhile::fuzz::{run_fuzz, FuzzConfig};
use qwhile::Tolerances;

fn main() {
    let config = FuzzConfig {
        seed: 7,
        count: 40,
        n_max: 2,
        depth_max: 4,
        tol: Tolerances::default(),
        check_choi: true,
    };
    let summary = run_fuzz(&config).expect("fuzz run completes");

    println!(
        "checked {count} samples (seed {seed}, up to {n} qubits, depth {d}); {nc} non-convergent\n",
        count = summary.samples_checked,
        seed = summary.seed,
        n = summary.n_max,
        d = summary.depth_max,
        nc = summary.non_convergent,
    );

    println!("{:<58} {:>19} {:>13}  {}", "law", "metric", "worst", "holds");
    for stat in &summary.identities {
        println!(
            "{:<58} {:>19} {:>13.3e}  {}",
            stat.name, stat.metric, stat.worst, stat.holds
        );
    }

    if let Some(choi) = &summary.choi {
        println!(
            "\ncomplete positivity: {} programs, min Choi eigenvalue {:.3e}, trace margin {:.3e}, all pass = {}",
            choi.programs_checked, choi.min_choi_eigenvalue, choi.trace_margin, choi.all_pass
        );
    }

    println!("\nall laws hold: {}", summary.all_hold);
}
