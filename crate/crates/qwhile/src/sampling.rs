//! Seeded random generation of programs, states, and predicates.
//!
//! Everything here is driven by a ChaCha8 stream cipher RNG, so a fixed seed
//! reproduces the exact same corpus on every platform. Sampling choices:
//!
//! - Predicates: Gaussian Hermitian matrices with eigenvalues affinely
//!   rescaled into `[0, 1]`, giving full-support members of the predicate
//!   cone without rejection sampling.
//! - States: `A A* / (tr(A A*) * u)` with `u` uniform in `[1, 2]`, so
//!   sub-normalized states (trace below one) are exercised routinely.
//! - Programs: grammar-directed with bounded depth; at most one loop per
//!   program, and every loop body ends with a mixing gate (`H` or a `Ry`
//!   rotation well away from `0` and `pi`) on the loop qubit so that loops
//!   leave the run-again subspace with substantial probability per round
//!   and fixed points converge quickly.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::lang::{Gate, Program, Stmt, UnitarySpec};
use crate::matrix::{ComplexMatrix, DensityOperator, Predicate, Tolerances};

/// Deterministic sampler over programs, density operators, and predicates.
pub struct Sampler {
    rng: ChaCha8Rng,
    tol: Tolerances,
}

impl Sampler {
    pub fn from_seed(seed: u64, tol: Tolerances) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            tol,
        }
    }

    fn gaussian(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    fn complex_gaussian(&mut self) -> Complex64 {
        Complex64::new(self.gaussian(), self.gaussian())
    }

    /// Random Hermitian matrix `(A + A*) / 2` with Gaussian entries.
    pub fn hermitian(&mut self, dim: usize) -> ComplexMatrix {
        let raw = ComplexMatrix::from_fn(dim, |_, _| self.complex_gaussian());
        raw.hermitize()
    }

    /// Random predicate: Hermitian sample with spectrum rescaled onto `[0, 1]`.
    pub fn predicate(&mut self, dim: usize) -> Predicate {
        let h = self.hermitian(dim);
        let eig = crate::matrix::eigh(&h, self.tol.herm).expect("hermitized sample");
        let lo = eig.min_eigenvalue();
        let hi = eig.max_eigenvalue();
        let span = hi - lo;
        let scaled = if span < 1e-12 {
            ComplexMatrix::identity(dim).scale_re(0.5)
        } else {
            let shifted = h.add(&ComplexMatrix::identity(dim).scale_re(-lo)).expect("same dim");
            shifted.scale_re(1.0 / span)
        };
        Predicate::new(scaled, &self.tol).expect("rescaled spectrum lies in [0, 1]")
    }

    /// Random (possibly sub-normalized) density operator with trace in
    /// `(1/2, 1]`.
    pub fn density(&mut self, dim: usize) -> DensityOperator {
        let a = ComplexMatrix::from_fn(dim, |_, _| self.complex_gaussian());
        let rho = a.matmul(&a.adjoint()).expect("square");
        let trace = rho.trace().re;
        let u: f64 = self.rng.random_range(1.0..2.0);
        let normalized = rho.scale_re(1.0 / (trace * u));
        DensityOperator::new(normalized, &self.tol).expect("normalized Wishart sample")
    }

    /// Random program over at most `n_max` qubits with statement nesting at
    /// most `depth_max`.
    pub fn program(&mut self, n_max: usize, depth_max: usize) -> Program {
        let n = self.rng.random_range(1..=n_max.max(1));
        let qubits = (0..n).map(|i| format!("q{i}")).collect();
        let mut loop_budget = 1usize;
        let body = self.stmt(n, depth_max, &mut loop_budget);
        Program { qubits, body }
    }

    /// Random program whose body is a single loop; used by the rule suites,
    /// which require a loop at the top level.
    pub fn loop_program(&mut self, n_max: usize, depth_max: usize) -> Program {
        let n = self.rng.random_range(1..=n_max.max(1));
        let qubits = (0..n).map(|i| format!("q{i}")).collect();
        let body = self.qloop(n, depth_max);
        Program { qubits, body }
    }

    fn stmt(&mut self, n: usize, depth: usize, loop_budget: &mut usize) -> Stmt {
        if depth == 0 {
            return self.leaf(n);
        }
        let roll: f64 = self.rng.random();
        if roll < 0.40 {
            Stmt::seq(
                self.stmt(n, depth - 1, loop_budget),
                self.stmt(n, depth - 1, loop_budget),
            )
        } else if roll < 0.60 {
            Stmt::Measure {
                qubit: self.rng.random_range(0..n),
                then_branch: Box::new(self.stmt(n, depth - 1, loop_budget)),
                else_branch: Box::new(self.stmt(n, depth - 1, loop_budget)),
            }
        } else if roll < 0.75 && *loop_budget > 0 {
            *loop_budget -= 1;
            self.qloop(n, depth - 1)
        } else {
            self.leaf(n)
        }
    }

    /// A loop whose body is measurement- and loop-free, ending with a mixing
    /// gate on the loop qubit.
    fn qloop(&mut self, n: usize, depth: usize) -> Stmt {
        let qubit = self.rng.random_range(0..n);
        let straight = self.straight_line(n, depth.min(2));
        let mixer = Stmt::UnitaryApp {
            qubits: vec![qubit],
            unitary: UnitarySpec::Gate(self.mixing_gate()),
        };
        Stmt::While {
            qubit,
            body: Box::new(Stmt::seq(straight, mixer)),
        }
    }

    fn mixing_gate(&mut self) -> Gate {
        if self.rng.random::<f64>() < 0.5 {
            Gate::H
        } else {
            Gate::Ry(self.rng.random_range(0.5..2.5))
        }
    }

    /// Measurement- and loop-free statement (sequencing of simple atoms).
    fn straight_line(&mut self, n: usize, depth: usize) -> Stmt {
        if depth > 0 && self.rng.random::<f64>() < 0.5 {
            Stmt::seq(
                self.straight_line(n, depth - 1),
                self.straight_line(n, depth - 1),
            )
        } else {
            self.leaf(n)
        }
    }

    fn leaf(&mut self, n: usize) -> Stmt {
        let roll: f64 = self.rng.random();
        if roll < 0.08 {
            Stmt::Abort
        } else if roll < 0.28 {
            Stmt::Skip
        } else if roll < 0.52 {
            Stmt::Init(self.rng.random_range(0..n))
        } else {
            self.unitary_app(n)
        }
    }

    fn unitary_app(&mut self, n: usize) -> Stmt {
        let two_qubit = n >= 2 && self.rng.random::<f64>() < 0.3;
        if two_qubit {
            let a = self.rng.random_range(0..n);
            let mut b = self.rng.random_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            let gate = match self.rng.random_range(0..3u32) {
                0 => Gate::Cnot,
                1 => Gate::Cz,
                _ => Gate::Swap,
            };
            Stmt::UnitaryApp {
                qubits: vec![a, b],
                unitary: UnitarySpec::Gate(gate),
            }
        } else {
            let qubit = self.rng.random_range(0..n);
            let angle_mag: f64 = self.rng.random_range(0.5..2.5);
            let angle = if self.rng.random::<bool>() {
                angle_mag
            } else {
                -angle_mag
            };
            let gate = match self.rng.random_range(0..9u32) {
                0 => Gate::H,
                1 => Gate::X,
                2 => Gate::Y,
                3 => Gate::Z,
                4 => Gate::S,
                5 => Gate::T,
                6 => Gate::Rx(angle),
                7 => Gate::Ry(angle),
                _ => Gate::Rz(angle),
            };
            Stmt::UnitaryApp {
                qubits: vec![qubit],
                unitary: UnitarySpec::Gate(gate),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse, pretty_print, validate};
    use crate::semantics::Evaluator;

    fn count_loops(stmt: &Stmt) -> usize {
        match stmt {
            Stmt::While { body, .. } => 1 + count_loops(body),
            Stmt::Seq(a, b) => count_loops(a) + count_loops(b),
            Stmt::Measure {
                then_branch,
                else_branch,
                ..
            } => count_loops(then_branch) + count_loops(else_branch),
            _ => 0,
        }
    }

    fn loop_body_is_straight(stmt: &Stmt) -> bool {
        match stmt {
            Stmt::While { body, .. } => {
                fn straight(s: &Stmt) -> bool {
                    match s {
                        Stmt::Seq(a, b) => straight(a) && straight(b),
                        Stmt::Measure { .. } | Stmt::While { .. } => false,
                        _ => true,
                    }
                }
                straight(body)
            }
            Stmt::Seq(a, b) => loop_body_is_straight(a) && loop_body_is_straight(b),
            Stmt::Measure {
                then_branch,
                else_branch,
                ..
            } => loop_body_is_straight(then_branch) && loop_body_is_straight(else_branch),
            _ => true,
        }
    }

    #[test]
    fn sampled_predicates_and_states_are_well_formed() {
        let tol = Tolerances::default();
        let mut s = Sampler::from_seed(7, tol);
        for dim in [2usize, 4, 8] {
            for _ in 0..20 {
                let m = s.predicate(dim);
                assert_eq!(m.dim(), dim);
                let rho = s.density(dim);
                let trace = rho.trace_re();
                assert!(trace > 0.5 - 1e-9 && trace <= 1.0 + 1e-9, "trace {trace}");
            }
        }
    }

    #[test]
    fn predicate_spectrum_spans_unit_interval() {
        let tol = Tolerances::default();
        let mut s = Sampler::from_seed(11, tol);
        let m = s.predicate(4);
        let eig = crate::matrix::eigh(m.matrix(), tol.herm).unwrap();
        assert!(eig.min_eigenvalue().abs() < 1e-10);
        assert!((eig.max_eigenvalue() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn generated_programs_obey_structural_restrictions() {
        let tol = Tolerances::default();
        let mut s = Sampler::from_seed(1234, tol);
        let mut saw_loop = false;
        let mut saw_abort_leaf = false;
        for _ in 0..200 {
            let p = s.program(3, 5);
            assert!(validate(&p, 1e-9).is_ok());
            assert!(count_loops(&p.body) <= 1);
            assert!(loop_body_is_straight(&p.body));
            saw_loop |= count_loops(&p.body) == 1;
            saw_abort_leaf |= pretty_print(&p).contains("abort");
        }
        assert!(saw_loop, "loop production never fired");
        assert!(saw_abort_leaf, "abort production never fired");
    }

    #[test]
    fn generated_programs_round_trip_through_the_parser() {
        let tol = Tolerances::default();
        let mut s = Sampler::from_seed(99, tol);
        for _ in 0..100 {
            let p = s.program(2, 4);
            let text = pretty_print(&p);
            let back = parse(&text).unwrap();
            assert_eq!(p, back, "program text:\n{text}");
        }
    }

    #[test]
    fn same_seed_reproduces_the_corpus() {
        let tol = Tolerances::default();
        let mut a = Sampler::from_seed(42, tol);
        let mut b = Sampler::from_seed(42, tol);
        for _ in 0..30 {
            assert_eq!(a.program(2, 4), b.program(2, 4));
            assert!(a
                .predicate(4)
                .matrix()
                .approx_eq(b.predicate(4).matrix(), 0.0));
        }
    }

    #[test]
    fn generated_loops_converge_under_evaluation() {
        let tol = Tolerances::default();
        let mut s = Sampler::from_seed(5, tol);
        for _ in 0..40 {
            let p = s.program(2, 4);
            let eval = Evaluator::new(&p, tol).unwrap();
            let rho = s.density(eval.dim());
            let (_, meta) = eval.denote(&rho).unwrap();
            assert!(meta.converged, "non-convergent sample: {}", pretty_print(&p));
        }
    }
}
