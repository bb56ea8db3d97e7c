//! The three semantics of the language: forward evaluation on density
//! matrices, weakest preconditions (`wp`), and weakest liberal preconditions
//! (`wlp`), plus loop unrolling and the superoperator form.
//!
//! Statement clauses (with `P_i` the projector onto outcome `i` of the
//! measured qubit, embedded into the register):
//!
//! | statement        | forward `[[S]]rho`                          | `wp.S.M`                                   |
//! |------------------|---------------------------------------------|--------------------------------------------|
//! | `abort`          | `0`                                         | `0` (`wlp`: `I`)                           |
//! | `skip`           | `rho`                                       | `M`                                        |
//! | `q := 0`         | `K0 rho K0^dag + K1 rho K1^dag`             | `K0^dag M K0 + K1^dag M K1`                |
//! | `qs *= U`        | `U rho U^dag`                               | `U^dag M U`                                |
//! | `S1; S2`         | `[[S2]]([[S1]] rho)`                        | `wp.S1.(wp.S2.M)`                          |
//! | `measure`        | `[[S0]](P0 rho P0) + [[S1]](P1 rho P1)`     | `sum_i P_i (wp.S_i.M) P_i`                 |
//! | `while q do S`   | limit of partial sums over unrollings       | least fixed point of `X -> P0(wp.S.X)P0 + P1 M P1` |
//!
//! with `K0 = |0><0|`, `K1 = |0><1|` on the initialized qubit. `wlp` differs
//! from `wp` only at `abort` (identity instead of zero) and at loops, where
//! the greatest fixed point is taken (iteration from `I` downward).
//!
//! Loop fixed points stop when the max-abs step change drops to `tol.fix`;
//! running past `tol.max_iter` yields a result flagged `converged: false`,
//! which is still a valid one-sided bound (from below for forward/`wp`, from
//! above for `wlp`).

use nalgebra::DVector;
use num_complex::Complex64;
use thiserror::Error;

use crate::lang::{resolve_unitary, validate, Program, ResolveError, Stmt, Violation};
use crate::matrix::embed::basis_projector_on;
use crate::matrix::{embed, ComplexMatrix, DensityOperator, MatrixError, Predicate, Tolerances};

pub mod fixpoint;
pub mod superop;

pub use fixpoint::{CancelToken, FixpointMeta, Method};
pub use superop::{conjugation_transfer, CpReport, SuperOperator};

/// Errors from semantic evaluation.
#[derive(Debug, Error)]
pub enum SemanticsError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Resolve(#[from] ResolveError),
    #[error("program failed validation: {}", format_violations(.0))]
    Validation(Vec<Violation>),
    #[error("operator has dim {found}, register needs {expected}")]
    DimMismatch { expected: usize, found: usize },
    #[error("program body is not a single loop")]
    NotALoop,
    #[error("evaluation cancelled")]
    Cancelled,
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// `i`-th syntactic approximant of `while qubit do body`:
/// the 0-th is `abort`, and each further step wraps one measurement around
/// the previous one (`measure q then { body; previous } else { skip }`).
pub fn unroll(qubit: usize, body: &Stmt, i: usize) -> Stmt {
    let mut acc = Stmt::Abort;
    for _ in 0..i {
        acc = Stmt::Measure {
            qubit,
            then_branch: Box::new(Stmt::seq(body.clone(), acc)),
            else_branch: Box::new(Stmt::Skip),
        };
    }
    acc
}

/// Unroll a program whose body is a single loop, keeping the declarations.
pub fn unroll_program(program: &Program, i: usize) -> Result<Program, SemanticsError> {
    match &program.body {
        Stmt::While { qubit, body } => Ok(Program {
            qubits: program.qubits.clone(),
            body: unroll(*qubit, body, i),
        }),
        _ => Err(SemanticsError::NotALoop),
    }
}

/// Statement tree with all register-level matrices precomputed.
enum CNode {
    Abort,
    Skip,
    Init {
        k0: ComplexMatrix,
        k1: ComplexMatrix,
        k0d: ComplexMatrix,
        k1d: ComplexMatrix,
    },
    Unitary {
        u: ComplexMatrix,
        ud: ComplexMatrix,
    },
    Seq(Box<CNode>, Box<CNode>),
    Measure {
        p0: ComplexMatrix,
        p1: ComplexMatrix,
        then_branch: Box<CNode>,
        else_branch: Box<CNode>,
    },
    While {
        p0: ComplexMatrix,
        p1: ComplexMatrix,
        body: Box<CNode>,
    },
}

fn compile(stmt: &Stmt, nqubits: usize, unitary_tol: f64) -> Result<CNode, SemanticsError> {
    Ok(match stmt {
        Stmt::Abort => CNode::Abort,
        Stmt::Skip => CNode::Skip,
        Stmt::Init(q) => {
            let k0 = embed(&ComplexMatrix::basis_projector(2, 0), &[*q], nqubits)?;
            let k1 = embed(&ComplexMatrix::matrix_unit(2, 0, 1), &[*q], nqubits)?;
            let k0d = k0.adjoint();
            let k1d = k1.adjoint();
            CNode::Init { k0, k1, k0d, k1d }
        }
        Stmt::UnitaryApp { qubits, unitary } => {
            let local = resolve_unitary(unitary, qubits.len(), unitary_tol)?;
            let u = embed(&local, qubits, nqubits)?;
            let ud = u.adjoint();
            CNode::Unitary { u, ud }
        }
        Stmt::Seq(a, b) => CNode::Seq(
            Box::new(compile(a, nqubits, unitary_tol)?),
            Box::new(compile(b, nqubits, unitary_tol)?),
        ),
        Stmt::Measure {
            qubit,
            then_branch,
            else_branch,
        } => CNode::Measure {
            p0: basis_projector_on(0, *qubit, nqubits)?,
            p1: basis_projector_on(1, *qubit, nqubits)?,
            then_branch: Box::new(compile(then_branch, nqubits, unitary_tol)?),
            else_branch: Box::new(compile(else_branch, nqubits, unitary_tol)?),
        },
        Stmt::While { qubit, body } => CNode::While {
            p0: basis_projector_on(0, *qubit, nqubits)?,
            p1: basis_projector_on(1, *qubit, nqubits)?,
            body: Box::new(compile(body, nqubits, unitary_tol)?),
        },
    })
}

/// Evaluator for one validated program: forward semantics, `wp`, `wlp`,
/// and transfer-matrix extraction, all sharing tolerances and strategy.
pub struct Evaluator {
    nqubits: usize,
    tol: Tolerances,
    method: Method,
    cancel: CancelToken,
    root: CNode,
}

impl Evaluator {
    /// Validate and compile a program. Validation failures (including
    /// non-unitary external matrices) are reported here, not at evaluation.
    pub fn new(program: &Program, tol: Tolerances) -> Result<Self, SemanticsError> {
        validate(program, tol.fix).map_err(SemanticsError::Validation)?;
        let root = compile(&program.body, program.nqubits(), tol.fix)?;
        Ok(Self {
            nqubits: program.nqubits(),
            tol,
            method: Method::default(),
            cancel: CancelToken::new(),
            root,
        })
    }

    /// Select the loop fixed-point strategy (default: iteration).
    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    /// Install a shared cancellation token polled once per loop iteration.
    pub fn with_cancel_token(mut self, cancel: CancelToken) -> Self {
        self.cancel = cancel;
        self
    }

    pub fn nqubits(&self) -> usize {
        self.nqubits
    }

    pub fn dim(&self) -> usize {
        1 << self.nqubits
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    fn check_dim(&self, found: usize) -> Result<(), SemanticsError> {
        if found != self.dim() {
            return Err(SemanticsError::DimMismatch {
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }

    /// Forward semantics: the (sub-normalized) output state together with
    /// fixed-point metadata. The output trace is the probability that the
    /// program terminates from `rho`.
    pub fn denote(
        &self,
        rho: &DensityOperator,
    ) -> Result<(DensityOperator, FixpointMeta), SemanticsError> {
        self.check_dim(rho.dim())?;
        let mut meta = FixpointMeta::exact();
        let out = self.denote_mat(&self.root, rho.matrix(), true, &mut meta)?;
        Ok((DensityOperator::from_matrix_unchecked(out.hermitize()), meta))
    }

    /// Weakest precondition of the program body against `post`.
    pub fn wp(&self, post: &Predicate) -> Result<(Predicate, FixpointMeta), SemanticsError> {
        self.check_dim(post.dim())?;
        let mut meta = FixpointMeta::exact();
        let out = self.wp_mat(&self.root, post.matrix(), true, &mut meta)?;
        Ok((Predicate::from_matrix_unchecked(out.hermitize()), meta))
    }

    /// Weakest liberal precondition of the program body against `post`.
    pub fn wlp(&self, post: &Predicate) -> Result<(Predicate, FixpointMeta), SemanticsError> {
        self.check_dim(post.dim())?;
        let mut meta = FixpointMeta::exact();
        let out = self.wlp_mat(&self.root, post.matrix(), true, &mut meta)?;
        Ok((Predicate::from_matrix_unchecked(out.hermitize()), meta))
    }

    /// Termination predicate `wp.S.I`: its expectation on `rho` is the
    /// probability the program terminates from `rho`.
    pub fn termination_predicate(&self) -> Result<(Predicate, FixpointMeta), SemanticsError> {
        self.wp(&Predicate::identity(self.dim()))
    }

    /// Transfer-matrix form of the forward semantics, built by evaluating
    /// the program on every matrix unit (valid by linearity of all clauses).
    pub fn superop(&self) -> Result<(SuperOperator, FixpointMeta), SemanticsError> {
        let d = self.dim();
        let mut transfer = ComplexMatrix::zeros(d * d);
        let mut meta = FixpointMeta::exact();
        for j in 0..d {
            for i in 0..d {
                let unit = ComplexMatrix::matrix_unit(d, i, j);
                let image = self.denote_mat(&self.root, &unit, false, &mut meta)?;
                let col = image.vec_col();
                for (row, z) in col.iter().enumerate() {
                    if z.norm_sqr() != 0.0 {
                        transfer.set(row, j * d + i, *z);
                    }
                }
            }
        }
        Ok((SuperOperator::new(self.nqubits, transfer)?, meta))
    }

    // ---- forward semantics -------------------------------------------------

    /// Forward clause on a raw matrix. `hermitian` says the input is
    /// Hermitian, enabling re-projection each fixed-point step; it is off
    /// when evaluating matrix units for transfer extraction, where
    /// re-projection would break linearity.
    fn denote_mat(
        &self,
        node: &CNode,
        rho: &ComplexMatrix,
        hermitian: bool,
        meta: &mut FixpointMeta,
    ) -> Result<ComplexMatrix, SemanticsError> {
        match node {
            CNode::Abort => Ok(ComplexMatrix::zeros(rho.dim())),
            CNode::Skip => Ok(rho.clone()),
            CNode::Init { k0, k1, k0d, k1d } => {
                let a = k0.matmul(rho)?.matmul(k0d)?;
                let b = k1.matmul(rho)?.matmul(k1d)?;
                Ok(a.add(&b)?)
            }
            CNode::Unitary { u, ud } => Ok(u.matmul(rho)?.matmul(ud)?),
            CNode::Seq(first, second) => {
                let mid = self.denote_mat(first, rho, hermitian, meta)?;
                self.denote_mat(second, &mid, hermitian, meta)
            }
            CNode::Measure {
                p0,
                p1,
                then_branch,
                else_branch,
            } => {
                let a = self.denote_mat(then_branch, &sandwich(p0, rho)?, hermitian, meta)?;
                let b = self.denote_mat(else_branch, &sandwich(p1, rho)?, hermitian, meta)?;
                Ok(a.add(&b)?)
            }
            CNode::While { p0, p1, body } => self.denote_loop(p0, p1, body, rho, hermitian, meta),
        }
    }

    /// Loop forward value: the limit of partial sums
    /// `sum_k P1 sigma_k P1` with `sigma_0 = rho`,
    /// `sigma_{k+1} = [[body]](P0 sigma_k P0)`, computed incrementally.
    ///
    /// Convergence requires both the last added term and the change of the
    /// running `sigma` to fall below `tol.fix`; the term alone can be zero
    /// early (a state may have no overlap with outcome 1 yet), and at a true
    /// fixed point of `sigma` the term must vanish, so the pair is a sound
    /// stopping signal.
    fn denote_loop(
        &self,
        p0: &ComplexMatrix,
        p1: &ComplexMatrix,
        body: &CNode,
        rho: &ComplexMatrix,
        hermitian: bool,
        meta: &mut FixpointMeta,
    ) -> Result<ComplexMatrix, SemanticsError> {
        if self.method == Method::Solve {
            if let Some(out) = self.solve_denote_loop(p0, p1, body, rho, hermitian, meta)? {
                return Ok(out);
            }
        }

        let mut acc = ComplexMatrix::zeros(rho.dim());
        let mut sigma = rho.clone();
        let mut residual = f64::INFINITY;
        for _ in 0..self.tol.max_iter {
            if self.cancel.is_cancelled() {
                return Err(SemanticsError::Cancelled);
            }
            let term = sandwich(p1, &sigma)?;
            acc = acc.add(&term)?;
            if hermitian {
                acc = acc.hermitize();
            }
            let next = self.denote_mat(body, &sandwich(p0, &sigma)?, hermitian, meta)?;
            residual = term.max_abs().max(next.max_abs_diff(&sigma)?);
            sigma = if hermitian { next.hermitize() } else { next };
            meta.iterations += 1;
            if residual <= self.tol.fix {
                meta.residual = meta.residual.max(residual);
                return Ok(acc);
            }
        }
        meta.converged = false;
        meta.residual = meta.residual.max(residual);
        Ok(acc)
    }

    /// Algebraic loop value: the partial sums form a geometric series whose
    /// limit is `P1 Y P1` with `(I - Phi T0) vec(Y) = vec(rho)`, `Phi` the
    /// body transfer and `T0` the outcome-0 conjugation. Only accepted when
    /// the linear solve exists and its residual is within `tol.fix`; the
    /// residual check is what rejects near-singular systems, where the
    /// series diverges and the algebraic solution is meaningless.
    fn solve_denote_loop(
        &self,
        p0: &ComplexMatrix,
        p1: &ComplexMatrix,
        body: &CNode,
        rho: &ComplexMatrix,
        hermitian: bool,
        meta: &mut FixpointMeta,
    ) -> Result<Option<ComplexMatrix>, SemanticsError> {
        let d = rho.dim();
        let mut phi = ComplexMatrix::zeros(d * d);
        for j in 0..d {
            for i in 0..d {
                let unit = ComplexMatrix::matrix_unit(d, i, j);
                let image = self.denote_mat(body, &unit, false, meta)?;
                for (row, z) in image.vec_col().iter().enumerate() {
                    if z.norm_sqr() != 0.0 {
                        phi.set(row, j * d + i, *z);
                    }
                }
            }
        }
        let g = phi.matmul(&conjugation_transfer(p0, p0))?;
        let Some((y, resid)) = solve_verified(&g, &rho.vec_col(), self.tol.fix) else {
            return Ok(None);
        };
        let ym = ComplexMatrix::from_vec_col(d, &y)?;
        let mut out = sandwich(p1, &ym)?;
        if hermitian {
            out = out.hermitize();
        }
        meta.residual = meta.residual.max(resid);
        Ok(Some(out))
    }

    // ---- weakest preconditions ---------------------------------------------

    fn wp_mat(
        &self,
        node: &CNode,
        m: &ComplexMatrix,
        hermitian: bool,
        meta: &mut FixpointMeta,
    ) -> Result<ComplexMatrix, SemanticsError> {
        match node {
            CNode::Abort => Ok(ComplexMatrix::zeros(m.dim())),
            CNode::Skip => Ok(m.clone()),
            CNode::Init { k0, k1, k0d, k1d } => {
                let a = k0d.matmul(m)?.matmul(k0)?;
                let b = k1d.matmul(m)?.matmul(k1)?;
                Ok(a.add(&b)?)
            }
            CNode::Unitary { u, ud } => Ok(ud.matmul(m)?.matmul(u)?),
            CNode::Seq(first, second) => {
                let inner = self.wp_mat(second, m, hermitian, meta)?;
                self.wp_mat(first, &inner, hermitian, meta)
            }
            CNode::Measure {
                p0,
                p1,
                then_branch,
                else_branch,
            } => {
                let a = sandwich(p0, &self.wp_mat(then_branch, m, hermitian, meta)?)?;
                let b = sandwich(p1, &self.wp_mat(else_branch, m, hermitian, meta)?)?;
                Ok(a.add(&b)?)
            }
            CNode::While { p0, p1, body } => {
                let start = ComplexMatrix::zeros(m.dim());
                self.precondition_loop(p0, p1, body, m, start, WpKind::Wp, hermitian, meta)
            }
        }
    }

    fn wlp_mat(
        &self,
        node: &CNode,
        m: &ComplexMatrix,
        hermitian: bool,
        meta: &mut FixpointMeta,
    ) -> Result<ComplexMatrix, SemanticsError> {
        match node {
            CNode::Abort => Ok(ComplexMatrix::identity(m.dim())),
            CNode::Skip => Ok(m.clone()),
            CNode::Init { k0, k1, k0d, k1d } => {
                let a = k0d.matmul(m)?.matmul(k0)?;
                let b = k1d.matmul(m)?.matmul(k1)?;
                Ok(a.add(&b)?)
            }
            CNode::Unitary { u, ud } => Ok(ud.matmul(m)?.matmul(u)?),
            CNode::Seq(first, second) => {
                let inner = self.wlp_mat(second, m, hermitian, meta)?;
                self.wlp_mat(first, &inner, hermitian, meta)
            }
            CNode::Measure {
                p0,
                p1,
                then_branch,
                else_branch,
            } => {
                let a = sandwich(p0, &self.wlp_mat(then_branch, m, hermitian, meta)?)?;
                let b = sandwich(p1, &self.wlp_mat(else_branch, m, hermitian, meta)?)?;
                Ok(a.add(&b)?)
            }
            CNode::While { p0, p1, body } => {
                let start = ComplexMatrix::identity(m.dim());
                self.precondition_loop(p0, p1, body, m, start, WpKind::Wlp, hermitian, meta)
            }
        }
    }

    /// Shared loop iteration for `wp` (least fixed point, from `0`) and
    /// `wlp` (greatest fixed point, from `I`):
    /// `X_{k+1} = P0 (t.body.X_k) P0 + P1 M P1` with `t` the respective
    /// transformer.
    #[allow(clippy::too_many_arguments)]
    fn precondition_loop(
        &self,
        p0: &ComplexMatrix,
        p1: &ComplexMatrix,
        body: &CNode,
        m: &ComplexMatrix,
        start: ComplexMatrix,
        kind: WpKind,
        hermitian: bool,
        meta: &mut FixpointMeta,
    ) -> Result<ComplexMatrix, SemanticsError> {
        if self.method == Method::Solve {
            if let Some(out) = self.solve_precondition_loop(p0, p1, body, m, kind, hermitian, meta)?
            {
                return Ok(out);
            }
        }

        let boundary = sandwich(p1, m)?;
        let mut x = start;
        let mut residual = f64::INFINITY;
        for _ in 0..self.tol.max_iter {
            if self.cancel.is_cancelled() {
                return Err(SemanticsError::Cancelled);
            }
            let inner = match kind {
                WpKind::Wp => self.wp_mat(body, &x, hermitian, meta)?,
                WpKind::Wlp => self.wlp_mat(body, &x, hermitian, meta)?,
            };
            let mut next = sandwich(p0, &inner)?.add(&boundary)?;
            if hermitian {
                next = next.hermitize();
            }
            residual = next.max_abs_diff(&x)?;
            x = next;
            meta.iterations += 1;
            if residual <= self.tol.fix {
                meta.residual = meta.residual.max(residual);
                return Ok(x);
            }
        }
        meta.converged = false;
        meta.residual = meta.residual.max(residual);
        Ok(x)
    }

    /// Algebraic precondition-loop value. Both transformers are affine in
    /// the postcondition with the same linear part (the `wp` transfer `W` of
    /// the body); `wlp` adds the constant `D = I - wp.body.I`. The fixed
    /// point solves `(I - T0 W) x = vec(P0 D P0 + P1 M P1)` (with `D = 0`
    /// for `wp`), and a unique solution is simultaneously the least and
    /// greatest fixed point, so one solve serves both.
    #[allow(clippy::too_many_arguments)]
    fn solve_precondition_loop(
        &self,
        p0: &ComplexMatrix,
        p1: &ComplexMatrix,
        body: &CNode,
        m: &ComplexMatrix,
        kind: WpKind,
        hermitian: bool,
        meta: &mut FixpointMeta,
    ) -> Result<Option<ComplexMatrix>, SemanticsError> {
        let d = m.dim();
        let mut w = ComplexMatrix::zeros(d * d);
        for j in 0..d {
            for i in 0..d {
                let unit = ComplexMatrix::matrix_unit(d, i, j);
                let image = self.wp_mat(body, &unit, false, meta)?;
                for (row, z) in image.vec_col().iter().enumerate() {
                    if z.norm_sqr() != 0.0 {
                        w.set(row, j * d + i, *z);
                    }
                }
            }
        }
        let g = conjugation_transfer(p0, p0).matmul(&w)?;
        let mut c = sandwich(p1, m)?;
        if kind == WpKind::Wlp {
            let id = ComplexMatrix::identity(d);
            let d_const = id.sub(&self.wp_mat(body, &id, true, meta)?)?;
            c = c.add(&sandwich(p0, &d_const)?)?;
        }
        let Some((x, resid)) = solve_verified(&g, &c.vec_col(), self.tol.fix) else {
            return Ok(None);
        };
        let mut out = ComplexMatrix::from_vec_col(d, &x)?;
        if hermitian {
            out = out.hermitize();
        }
        meta.residual = meta.residual.max(resid);
        Ok(Some(out))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum WpKind {
    Wp,
    Wlp,
}

/// Projector conjugation `P X P` (projectors are self-adjoint).
fn sandwich(p: &ComplexMatrix, x: &ComplexMatrix) -> Result<ComplexMatrix, MatrixError> {
    p.matmul(x)?.matmul(p)
}

/// Solve `(I - G) x = c` by LU, returning the solution and the max-abs
/// residual of the verification `(I - G) x - c`, or `None` when the system
/// is singular or the residual exceeds `accept_tol`.
fn solve_verified(
    g: &ComplexMatrix,
    c: &[Complex64],
    accept_tol: f64,
) -> Option<(Vec<Complex64>, f64)> {
    let dim = g.dim();
    let a = ComplexMatrix::identity(dim).sub(g).expect("same dim");
    let lu = a.inner().clone().lu();
    let rhs = DVector::from_column_slice(c);
    let x = lu.solve(&rhs)?;
    let back = a.mul_vec(x.as_slice()).expect("dim checked");
    let resid = back
        .iter()
        .zip(c.iter())
        .map(|(l, r)| (l - r).norm())
        .fold(0.0, f64::max);
    if resid <= accept_tol {
        Some((x.as_slice().to_vec(), resid))
    } else {
        None
    }
}
