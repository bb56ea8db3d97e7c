//! Semantics workbench for a purely quantum while-language.
//!
//! Programs are built from `abort`, `skip`, initialization `q := 0`, unitary
//! application, sequencing, a binary measurement conditional, and a
//! measurement-guarded loop. The crate provides:
//!
//! - forward semantics on density operators, including loop fixed points,
//! - weakest preconditions (`wp`) and weakest liberal preconditions (`wlp`),
//! - superoperator form with Choi-matrix diagnostics,
//! - mechanical checking of loop proof rules (invariants, total-correctness
//!   rules, a 0-1 law) with margins and verdicts,
//! - randomized law checking across sampled programs, predicates, and states.
//!
//! Start with [`lang::parse`] to get a [`lang::Program`], then feed it to an
//! [`semantics::Evaluator`]. The `examples/` directory walks through each
//! capability.

pub mod cli;
pub mod fuzz;
pub mod lang;
pub mod matrix;
pub mod prooflab;
pub mod sampling;
pub mod semantics;

pub use lang::{parse, pretty_print, validate, Program, Stmt};
pub use matrix::{ComplexMatrix, DensityOperator, MatrixError, Predicate, Tolerances};
pub use prooflab::{
    check_duality_laws, check_scaled_lemma, check_total_rule, check_wlp_invariant,
    check_wp_invariant, check_zero_one_law, diag_part, Conclusion, DiagonalInvariant, Finding,
    ProoflabError, RuleReport, Verdict,
};
pub use semantics::{Evaluator, FixpointMeta, Method, SemanticsError, SuperOperator};
