//! Mutation testing of the expectation-duality oracle.
//!
//! A deliberately broken precondition transformer is written here from
//! scratch, identical to the real one except for a single seeded bug: the
//! `abort` clause returns the postcondition unchanged instead of the zero
//! matrix. The duality check `Tr(wp.S.M rho) = Tr(M [[S]]rho)` must expose
//! the mutant with a deviation far above tolerance on any corpus containing
//! `abort`, and must agree with it on abort-free programs (confirming the
//! deviation is attributable to the seeded clause alone).

use qwhile::lang::{parse, Stmt, UnitarySpec};
use qwhile::matrix::embed::{basis_projector_on, embed};
use qwhile::matrix::{ComplexMatrix, DensityOperator, Predicate, Tolerances};
use qwhile::sampling::Sampler;
use qwhile::semantics::Evaluator;

/// Structural precondition transformer with the seeded `abort` bug.
fn mutant_wp(stmt: &Stmt, post: &ComplexMatrix, nqubits: usize) -> ComplexMatrix {
    match stmt {
        // Seeded bug: the correct clause maps every postcondition to zero.
        Stmt::Abort => post.clone(),
        Stmt::Skip => post.clone(),
        Stmt::Init(q) => {
            let k0 = embed(&ComplexMatrix::matrix_unit(2, 0, 0), &[*q], nqubits).unwrap();
            let k1 = embed(&ComplexMatrix::matrix_unit(2, 0, 1), &[*q], nqubits).unwrap();
            conj_adjoint(&k0, post).add(&conj_adjoint(&k1, post)).unwrap()
        }
        Stmt::UnitaryApp { qubits, unitary } => {
            let UnitarySpec::Gate(gate) = unitary else {
                panic!("mutation corpus uses builtin gates only");
            };
            let u = embed(&gate.matrix(), qubits, nqubits).unwrap();
            conj_adjoint(&u, post)
        }
        Stmt::Seq(first, second) => {
            let rest = mutant_wp(second, post, nqubits);
            mutant_wp(first, &rest, nqubits)
        }
        Stmt::Measure {
            qubit,
            then_branch,
            else_branch,
        } => {
            let p0 = basis_projector_on(0, *qubit, nqubits).unwrap();
            let p1 = basis_projector_on(1, *qubit, nqubits).unwrap();
            let on_zero = mutant_wp(then_branch, post, nqubits);
            let on_one = mutant_wp(else_branch, post, nqubits);
            sandwich(&p0, &on_zero).add(&sandwich(&p1, &on_one)).unwrap()
        }
        Stmt::While { qubit, body } => {
            let p0 = basis_projector_on(0, *qubit, nqubits).unwrap();
            let p1 = basis_projector_on(1, *qubit, nqubits).unwrap();
            let fixed_term = sandwich(&p1, post);
            let mut x = ComplexMatrix::zeros(post.dim());
            for _ in 0..100_000 {
                let inner = mutant_wp(body, &x, nqubits);
                let next = sandwich(&p0, &inner).add(&fixed_term).unwrap().hermitize();
                let delta = next.max_abs_diff(&x).unwrap();
                x = next;
                if delta <= 1e-12 {
                    break;
                }
            }
            x
        }
    }
}

fn conj_adjoint(k: &ComplexMatrix, x: &ComplexMatrix) -> ComplexMatrix {
    k.adjoint().matmul(x).unwrap().matmul(k).unwrap()
}

fn sandwich(p: &ComplexMatrix, x: &ComplexMatrix) -> ComplexMatrix {
    p.matmul(x).unwrap().matmul(p).unwrap()
}

fn duality_deviation(text: &str, m: &Predicate, rho: &DensityOperator) -> f64 {
    let program = parse(text).unwrap();
    let eval = Evaluator::new(&program, Tolerances::default()).unwrap();
    let (out, meta) = eval.denote(rho).unwrap();
    assert!(meta.converged);
    let wp_mut = mutant_wp(&program.body, m.matrix(), program.nqubits());
    let lhs = wp_mut.matmul(rho.matrix()).unwrap().trace().re;
    let rhs = m.matrix().matmul(out.matrix()).unwrap().trace().re;
    (lhs - rhs).abs()
}

const ABORTING: &[&str] = &[
    "qubits q; abort",
    "qubits q; q *= H; abort",
    "qubits a, b; measure a then { abort } else { skip }",
    "qubits q; while q do { q *= H; abort }",
];

const ABORT_FREE: &[&str] = &[
    "qubits q; q *= H",
    "qubits a, b; a, b *= CNOT; measure b then { a := 0 } else { skip }",
    "qubits q; while q do { q *= H }",
];

#[test]
fn duality_oracle_detects_the_abort_mutant() {
    let tol = Tolerances::default();
    let mut sampler = Sampler::from_seed(31337, tol);
    let mut worst = 0.0f64;
    for text in ABORTING {
        let program = parse(text).unwrap();
        let dim = program.dim();
        for _ in 0..5 {
            let m = sampler.predicate(dim);
            let rho = sampler.density(dim);
            worst = worst.max(duality_deviation(text, &m, &rho));
        }
        // Deterministic endpoint: M = I on the fully mixed state.
        let m = Predicate::identity(dim);
        let rho = DensityOperator::maximally_mixed(dim);
        worst = worst.max(duality_deviation(text, &m, &rho));
    }
    assert!(
        worst > 1e-3,
        "mutant slipped past the duality oracle (worst deviation {worst:.3e})"
    );
}

#[test]
fn mutant_agrees_with_real_transformer_on_abort_free_programs() {
    let tol = Tolerances::default();
    let mut sampler = Sampler::from_seed(404, tol);
    for text in ABORT_FREE {
        let program = parse(text).unwrap();
        let dim = program.dim();
        let eval = Evaluator::new(&program, tol).unwrap();
        for _ in 0..5 {
            let m = sampler.predicate(dim);
            let (real, meta) = eval.wp(&m).unwrap();
            assert!(meta.converged);
            let fake = mutant_wp(&program.body, m.matrix(), program.nqubits());
            let gap = fake.max_abs_diff(real.matrix()).unwrap();
            assert!(
                gap <= 1e-8,
                "abort-free program diverged from reference ({gap:.3e}): {text}"
            );
        }
    }
}
