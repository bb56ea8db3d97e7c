//! Mechanical checking of loop proof rules and predicate-transformer laws.
//!
//! Every check evaluates explicit premises with numeric margins and emits a
//! [`RuleReport`]. Conclusions are evaluated unconditionally so a failed
//! application still shows what would have been claimed, but they are only
//! *asserted* when every premise holds.
//!
//! The loop rules all revolve around the block-diagonal restriction
//! `diag(M) = P0 M P0 + P1 M P1` of a predicate with respect to the loop
//! qubit, and the termination predicate `T = wp.loop.I`.

use thiserror::Error;

use crate::lang::{Program, Stmt};
use crate::matrix::embed::basis_projector_on;
use crate::matrix::linalg::min_eigenvalue;
use crate::matrix::types::amp_and;
use crate::matrix::{
    qubits_for_dim, ComplexMatrix, MatrixError, Predicate, Tolerances,
};
use crate::semantics::{Evaluator, FixpointMeta, SemanticsError};

mod report;

pub use report::{Conclusion, Finding, RuleReport, Verdict, IDENTITY_TOL};

/// Errors from rule checking.
#[derive(Debug, Error)]
pub enum ProoflabError {
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("program body is not a single loop")]
    NotALoop,
    #[error("probability parameter must lie in (0, 1], got {p}")]
    BadProbability { p: f64 },
    #[error("predicate has dim {found}, register needs {expected}")]
    DimMismatch { expected: usize, found: usize },
}

/// A predicate together with its block-diagonal part w.r.t. one qubit.
#[derive(Debug, Clone)]
pub struct DiagonalInvariant {
    /// The qubit whose measurement the blocks refer to.
    pub qubit: usize,
    /// The original predicate `M`.
    pub original: Predicate,
    /// `P0 M P0 + P1 M P1`: the shape every loop rule uses as invariant.
    pub diag: Predicate,
}

/// Block-diagonal restriction `P0 M P0 + P1 M P1` of `M` w.r.t. `qubit`.
pub fn diag_part(m: &Predicate, qubit: usize) -> Result<DiagonalInvariant, MatrixError> {
    let nqubits = qubits_for_dim(m.dim())?;
    let p0 = basis_projector_on(0, qubit, nqubits)?;
    let p1 = basis_projector_on(1, qubit, nqubits)?;
    let diag = conj(&p0, m.matrix())?
        .add(&conj(&p1, m.matrix())?)?
        .hermitize();
    Ok(DiagonalInvariant {
        qubit,
        original: m.clone(),
        diag: Predicate::from_matrix_unchecked(diag),
    })
}

fn conj(p: &ComplexMatrix, x: &ComplexMatrix) -> Result<ComplexMatrix, MatrixError> {
    p.matmul(x)?.matmul(p)
}

/// Shared state for the loop rules: evaluators for the loop and its body,
/// the loop-qubit projectors, and accumulated fixed-point metadata.
struct LoopCtx {
    p0: ComplexMatrix,
    p1: ComplexMatrix,
    qubit: usize,
    dim: usize,
    tol: Tolerances,
    loop_eval: Evaluator,
    body_eval: Evaluator,
    meta: FixpointMeta,
}

impl LoopCtx {
    fn new(program: &Program, tol: Tolerances) -> Result<Self, ProoflabError> {
        let Stmt::While { qubit, body } = &program.body else {
            return Err(ProoflabError::NotALoop);
        };
        let body_program = Program {
            qubits: program.qubits.clone(),
            body: (**body).clone(),
        };
        let loop_eval = Evaluator::new(program, tol)?;
        let body_eval = Evaluator::new(&body_program, tol)?;
        let nqubits = program.nqubits();
        Ok(Self {
            p0: basis_projector_on(0, *qubit, nqubits)?,
            p1: basis_projector_on(1, *qubit, nqubits)?,
            qubit: *qubit,
            dim: program.dim(),
            tol,
            loop_eval,
            body_eval,
            meta: FixpointMeta::exact(),
        })
    }

    fn check_dim(&self, m: &Predicate) -> Result<(), ProoflabError> {
        if m.dim() != self.dim {
            return Err(ProoflabError::DimMismatch {
                expected: self.dim,
                found: m.dim(),
            });
        }
        Ok(())
    }

    /// `P1 M P1` as a predicate (a corner of a predicate stays in `[0, I]`).
    fn outcome_one_corner(&self, m: &Predicate) -> Result<Predicate, MatrixError> {
        Ok(Predicate::from_matrix_unchecked(
            conj(&self.p1, m.matrix())?.hermitize(),
        ))
    }

    fn wp_loop(&mut self, m: &Predicate) -> Result<(Predicate, bool), ProoflabError> {
        let (value, meta) = self.loop_eval.wp(m)?;
        self.meta.absorb(&meta);
        Ok((value, meta.converged))
    }

    fn wlp_loop(&mut self, m: &Predicate) -> Result<(Predicate, bool), ProoflabError> {
        let (value, meta) = self.loop_eval.wlp(m)?;
        self.meta.absorb(&meta);
        Ok((value, meta.converged))
    }

    fn wp_body(&mut self, m: &Predicate) -> Result<(Predicate, bool), ProoflabError> {
        let (value, meta) = self.body_eval.wp(m)?;
        self.meta.absorb(&meta);
        Ok((value, meta.converged))
    }

    fn wlp_body(&mut self, m: &Predicate) -> Result<(Predicate, bool), ProoflabError> {
        let (value, meta) = self.body_eval.wlp(m)?;
        self.meta.absorb(&meta);
        Ok((value, meta.converged))
    }

    /// Termination predicate `T = wp.loop.I`.
    fn termination(&mut self) -> Result<(Predicate, bool), ProoflabError> {
        let id = Predicate::identity(self.dim);
        self.wp_loop(&id)
    }

    fn report(
        self,
        rule: &str,
        premises: Vec<Finding>,
        conclusion: Conclusion,
        notes: Vec<String>,
    ) -> RuleReport {
        RuleReport {
            rule: rule.to_string(),
            premises,
            conclusion,
            notes,
            tolerances: self.tol,
            fixpoint: self.meta,
        }
        .finalize()
    }
}

/// Partial-correctness invariant rule: if
/// `P0 M P0 <= wlp.S.(diag M)` then `diag M <= wlp.loop.(P1 M P1)`.
pub fn check_wlp_invariant(
    program: &Program,
    m: &Predicate,
    tol: Tolerances,
) -> Result<RuleReport, ProoflabError> {
    let mut ctx = LoopCtx::new(program, tol)?;
    ctx.check_dim(m)?;
    let di = diag_part(m, ctx.qubit)?;
    let p0mp0 = conj(&ctx.p0, m.matrix())?;

    let (wlp_body_diag, c_premise) = ctx.wlp_body(&di.diag)?;
    let premise = Finding::loewner(
        "P0 M P0 <= wlp.S.(diag M)",
        &p0mp0,
        wlp_body_diag.matrix(),
        tol.psd,
        c_premise,
    )?;

    let corner = ctx.outcome_one_corner(m)?;
    let (wlp_loop_corner, c_conc) = ctx.wlp_loop(&corner)?;
    let conclusion = conclusion_loewner(
        "diag M <= wlp.loop.(P1 M P1)",
        di.diag.matrix(),
        wlp_loop_corner.matrix(),
        tol.psd,
        c_conc,
        premise.verdict.holds(),
    )?;

    Ok(ctx.report("wlp-invariant", vec![premise], conclusion, vec![]))
}

/// wp-invariance condition: `P0 M P0 <= wp.S.(diag M)`. The matching
/// total-correctness conclusion is evaluated for information but never
/// asserted here; invariance alone does not give it (that needs the
/// termination premises of the total rule).
pub fn check_wp_invariant(
    program: &Program,
    m: &Predicate,
    tol: Tolerances,
) -> Result<RuleReport, ProoflabError> {
    let mut ctx = LoopCtx::new(program, tol)?;
    ctx.check_dim(m)?;
    let di = diag_part(m, ctx.qubit)?;
    let p0mp0 = conj(&ctx.p0, m.matrix())?;

    let (wp_body_diag, c_premise) = ctx.wp_body(&di.diag)?;
    let premise = Finding::loewner(
        "P0 M P0 <= wp.S.(diag M)",
        &p0mp0,
        wp_body_diag.matrix(),
        tol.psd,
        c_premise,
    )?;

    let corner = ctx.outcome_one_corner(m)?;
    let (wp_loop_corner, c_conc) = ctx.wp_loop(&corner)?;
    let conclusion = conclusion_loewner(
        "diag M <= wp.loop.(P1 M P1)",
        di.diag.matrix(),
        wp_loop_corner.matrix(),
        tol.psd,
        c_conc,
        false,
    )?;

    let notes = vec![
        "wp-invariance does not by itself assert the conclusion; use the total rule, \
         which adds the termination premises"
            .to_string(),
    ];
    Ok(ctx.report("wp-invariant", vec![premise], conclusion, notes))
}

/// Total-correctness rule: wp-invariance plus `wp.S.T <= T` and
/// `diag M <= T` yield `diag M <= wp.loop.(P1 M P1)`.
pub fn check_total_rule(
    program: &Program,
    m: &Predicate,
    tol: Tolerances,
) -> Result<RuleReport, ProoflabError> {
    let mut ctx = LoopCtx::new(program, tol)?;
    ctx.check_dim(m)?;
    let di = diag_part(m, ctx.qubit)?;
    let p0mp0 = conj(&ctx.p0, m.matrix())?;

    let (t, c_t) = ctx.termination()?;
    let (wp_body_diag, c_inv) = ctx.wp_body(&di.diag)?;
    let (wp_body_t, c_wpt) = ctx.wp_body(&t)?;

    let premises = vec![
        Finding::loewner(
            "P0 M P0 <= wp.S.(diag M)",
            &p0mp0,
            wp_body_diag.matrix(),
            tol.psd,
            c_inv,
        )?,
        Finding::loewner(
            "wp.S.T <= T",
            wp_body_t.matrix(),
            t.matrix(),
            tol.psd,
            c_t && c_wpt,
        )?,
        Finding::loewner("diag M <= T", di.diag.matrix(), t.matrix(), tol.psd, c_t)?,
    ];

    let corner = ctx.outcome_one_corner(m)?;
    let (wp_loop_corner, c_conc) = ctx.wp_loop(&corner)?;
    let asserted = premises.iter().all(|p| p.verdict.holds());
    let conclusion = conclusion_loewner(
        "diag M <= wp.loop.(P1 M P1)",
        di.diag.matrix(),
        wp_loop_corner.matrix(),
        tol.psd,
        c_conc,
        asserted,
    )?;

    Ok(ctx.report("total", premises, conclusion, vec![]))
}

/// Scaled-invariant lemma: if `diag M` is wp-invariant, `wp.S.T <= T`, and
/// `p * diag M <= T` for some `0 < p <= 1`, then `diag M <= T`.
pub fn check_scaled_lemma(
    program: &Program,
    m: &Predicate,
    p: f64,
    tol: Tolerances,
) -> Result<RuleReport, ProoflabError> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(ProoflabError::BadProbability { p });
    }
    let mut ctx = LoopCtx::new(program, tol)?;
    ctx.check_dim(m)?;
    let di = diag_part(m, ctx.qubit)?;
    let p0mp0 = conj(&ctx.p0, m.matrix())?;

    let (t, c_t) = ctx.termination()?;
    let (wp_body_diag, c_inv) = ctx.wp_body(&di.diag)?;
    let (wp_body_t, c_wpt) = ctx.wp_body(&t)?;
    let scaled = di.diag.matrix().scale_re(p);

    let premises = vec![
        Finding::loewner(
            "P0 M P0 <= wp.S.(diag M)",
            &p0mp0,
            wp_body_diag.matrix(),
            tol.psd,
            c_inv,
        )?,
        Finding::loewner(
            "wp.S.T <= T",
            wp_body_t.matrix(),
            t.matrix(),
            tol.psd,
            c_t && c_wpt,
        )?,
        Finding::loewner(
            format!("{p} * diag M <= T"),
            &scaled,
            t.matrix(),
            tol.psd,
            c_t,
        )?,
    ];

    let asserted = premises.iter().all(|q| q.verdict.holds());
    let conclusion = conclusion_loewner(
        "diag M <= T",
        di.diag.matrix(),
        t.matrix(),
        tol.psd,
        c_t,
        asserted,
    )?;

    Ok(ctx.report("scaled", premises, conclusion, vec![]))
}

/// 0-1 law: when `T` is positive definite, wp-invariance and `wp.S.T <= T`
/// already give total correctness, `diag M <= wp.loop.(P1 M P1)`.
pub fn check_zero_one_law(
    program: &Program,
    m: &Predicate,
    tol: Tolerances,
) -> Result<RuleReport, ProoflabError> {
    let mut ctx = LoopCtx::new(program, tol)?;
    ctx.check_dim(m)?;
    let di = diag_part(m, ctx.qubit)?;
    let p0mp0 = conj(&ctx.p0, m.matrix())?;

    let (t, c_t) = ctx.termination()?;
    let t_min_eig = min_eigenvalue(t.matrix(), tol.herm)?;
    let (wp_body_t, c_wpt) = ctx.wp_body(&t)?;
    let (wp_body_diag, c_inv) = ctx.wp_body(&di.diag)?;

    let premises = vec![
        // Strictly above the PSD slack: an eigenvalue inside the tolerance
        // band cannot be distinguished from zero.
        Finding::threshold(
            "T is positive definite",
            t_min_eig,
            t_min_eig > tol.psd,
            c_t,
        ),
        Finding::loewner(
            "wp.S.T <= T",
            wp_body_t.matrix(),
            t.matrix(),
            tol.psd,
            c_t && c_wpt,
        )?,
        Finding::loewner(
            "P0 M P0 <= wp.S.(diag M)",
            &p0mp0,
            wp_body_diag.matrix(),
            tol.psd,
            c_inv,
        )?,
    ];

    let corner = ctx.outcome_one_corner(m)?;
    let (wp_loop_corner, c_conc) = ctx.wp_loop(&corner)?;
    let asserted = premises.iter().all(|q| q.verdict.holds());
    let conclusion = conclusion_loewner(
        "diag M <= wp.loop.(P1 M P1)",
        di.diag.matrix(),
        wp_loop_corner.matrix(),
        tol.psd,
        c_conc,
        asserted,
    )?;

    Ok(ctx.report("zero-one", premises, conclusion, vec![]))
}

/// The predicate-transformer laws relating `wp`, `wlp`, and the `&`
/// connective, checked on one program and predicate pair:
///
/// - `wlp.S.M + wp.S.(I - M) = I` (complement duality)
/// - `wp.S.M <= wlp.S.M`
/// - `wp.S.M = wp.S.I & wlp.S.M`
/// - `wlp.S.I = I`
/// - monotonicity of both transformers (when `M <= N`)
/// - `wp.S.(M & N) = wp.S.M & wlp.S.N` and
///   `wlp.S.(M & N) = wlp.S.M & wlp.S.N` (when `M + N >= I`)
/// - `wlp.S.(M + N) = wp.S.M + wlp.S.N` (when `M + N <= I`)
/// - `wlp.S.(M - N) = wlp.S.M - wp.S.N` (when `M >= N`)
///
/// Conditional clauses outside their hypotheses are skipped with a note.
pub fn check_duality_laws(
    program: &Program,
    m: &Predicate,
    n: &Predicate,
    tol: Tolerances,
) -> Result<RuleReport, ProoflabError> {
    let eval = Evaluator::new(program, tol)?;
    let dim = eval.dim();
    for pred in [m, n] {
        if pred.dim() != dim {
            return Err(ProoflabError::DimMismatch {
                expected: dim,
                found: pred.dim(),
            });
        }
    }

    let mut meta = FixpointMeta::exact();
    let mut call = |f: &dyn Fn() -> Result<(Predicate, FixpointMeta), SemanticsError>|
     -> Result<(Predicate, bool), ProoflabError> {
        let (value, call_meta) = f()?;
        meta.absorb(&call_meta);
        Ok((value, call_meta.converged))
    };

    let id = Predicate::identity(dim);
    let identity = ComplexMatrix::identity(dim);

    let (wp_m, c_wp_m) = call(&|| eval.wp(m))?;
    let (wlp_m, c_wlp_m) = call(&|| eval.wlp(m))?;
    let (wp_n, c_wp_n) = call(&|| eval.wp(n))?;
    let (wlp_n, c_wlp_n) = call(&|| eval.wlp(n))?;
    let (wp_i, c_wp_i) = call(&|| eval.wp(&id))?;
    let (wlp_i, c_wlp_i) = call(&|| eval.wlp(&id))?;
    let (wp_compl, c_wp_compl) = call(&|| eval.wp(&m.complement()))?;

    let mut premises = Vec::new();
    let mut notes = Vec::new();

    let lhs_sum = wlp_m.matrix().add(wp_compl.matrix())?;
    premises.push(Finding::equality(
        "wlp.S.M + wp.S.(I - M) = I",
        &lhs_sum,
        &identity,
        c_wlp_m && c_wp_compl,
    )?);

    premises.push(Finding::loewner(
        "wp.S.M <= wlp.S.M",
        wp_m.matrix(),
        wlp_m.matrix(),
        tol.psd,
        c_wp_m && c_wlp_m,
    )?);

    let conj_rhs = amp_and(wp_i.matrix(), wlp_m.matrix(), tol.herm)?;
    premises.push(Finding::equality(
        "wp.S.M = wp.S.I & wlp.S.M",
        wp_m.matrix(),
        &conj_rhs,
        c_wp_m && c_wp_i && c_wlp_m,
    )?);

    premises.push(Finding::equality(
        "wlp.S.I = I",
        wlp_i.matrix(),
        &identity,
        c_wlp_i,
    )?);

    let m_leq_n = crate::matrix::loewner_leq(m.matrix(), n.matrix(), tol.psd)?;
    if m_leq_n.holds {
        premises.push(Finding::loewner(
            "monotonicity: wp.S.M <= wp.S.N (given M <= N)",
            wp_m.matrix(),
            wp_n.matrix(),
            tol.psd,
            c_wp_m && c_wp_n,
        )?);
        premises.push(Finding::loewner(
            "monotonicity: wlp.S.M <= wlp.S.N (given M <= N)",
            wlp_m.matrix(),
            wlp_n.matrix(),
            tol.psd,
            c_wlp_m && c_wlp_n,
        )?);
    } else {
        notes.push(format!(
            "skipped monotonicity clauses: M <= N does not hold (margin {:.3e})",
            m_leq_n.margin
        ));
    }

    let sum_mn = m.matrix().add(n.matrix())?;
    let above_i = crate::matrix::loewner_leq(&identity, &sum_mn, tol.psd)?;
    if above_i.holds {
        let amp_mn = Predicate::from_matrix_unchecked(amp_and(m.matrix(), n.matrix(), tol.herm)?);
        let (wp_amp, c_wp_amp) = call(&|| eval.wp(&amp_mn))?;
        let (wlp_amp, c_wlp_amp) = call(&|| eval.wlp(&amp_mn))?;
        let rhs_wp = amp_and(wp_m.matrix(), wlp_n.matrix(), tol.herm)?;
        premises.push(Finding::equality(
            "wp.S.(M & N) = wp.S.M & wlp.S.N (given M + N >= I)",
            wp_amp.matrix(),
            &rhs_wp,
            c_wp_amp && c_wp_m && c_wlp_n,
        )?);
        let rhs_wlp = amp_and(wlp_m.matrix(), wlp_n.matrix(), tol.herm)?;
        premises.push(Finding::equality(
            "wlp.S.(M & N) = wlp.S.M & wlp.S.N (given M + N >= I)",
            wlp_amp.matrix(),
            &rhs_wlp,
            c_wlp_amp && c_wlp_m && c_wlp_n,
        )?);
    } else {
        notes.push(format!(
            "skipped conjunction clauses: M + N >= I does not hold (margin {:.3e})",
            above_i.margin
        ));
    }

    let below_i = crate::matrix::loewner_leq(&sum_mn, &identity, tol.psd)?;
    if below_i.holds {
        let sum_pred = Predicate::from_matrix_unchecked(sum_mn.hermitize());
        let (wlp_sum, c_wlp_sum) = call(&|| eval.wlp(&sum_pred))?;
        let rhs = wp_m.matrix().add(wlp_n.matrix())?;
        premises.push(Finding::equality(
            "wlp.S.(M + N) = wp.S.M + wlp.S.N (given M + N <= I)",
            wlp_sum.matrix(),
            &rhs,
            c_wlp_sum && c_wp_m && c_wlp_n,
        )?);
    } else {
        notes.push(format!(
            "skipped sum clause: M + N <= I does not hold (margin {:.3e})",
            below_i.margin
        ));
    }

    let n_leq_m = crate::matrix::loewner_leq(n.matrix(), m.matrix(), tol.psd)?;
    if n_leq_m.holds {
        let diff = Predicate::from_matrix_unchecked(m.matrix().sub(n.matrix())?.hermitize());
        let (wlp_diff, c_wlp_diff) = call(&|| eval.wlp(&diff))?;
        let rhs = wlp_m.matrix().sub(wp_n.matrix())?;
        premises.push(Finding::equality(
            "wlp.S.(M - N) = wlp.S.M - wp.S.N (given M >= N)",
            wlp_diff.matrix(),
            &rhs,
            c_wlp_diff && c_wlp_m && c_wp_n,
        )?);
    } else {
        notes.push(format!(
            "skipped difference clause: M >= N does not hold (margin {:.3e})",
            n_leq_m.margin
        ));
    }

    let verdict = premises
        .iter()
        .map(|p| p.verdict)
        .fold(Verdict::Holds, Verdict::and);
    let margin = premises
        .iter()
        .map(|p| p.margin)
        .fold(f64::INFINITY, f64::min);
    let conclusion = Conclusion {
        text: "all applicable transformer laws hold".into(),
        verdict,
        margin,
        asserted: verdict.holds(),
    };

    Ok(RuleReport {
        rule: "duality".into(),
        premises,
        conclusion,
        notes,
        tolerances: tol,
        fixpoint: meta,
    }
    .finalize())
}

/// Build a Löwner conclusion with explicit assertion status.
fn conclusion_loewner(
    text: &str,
    lhs: &ComplexMatrix,
    rhs: &ComplexMatrix,
    psd_tol: f64,
    converged: bool,
    asserted: bool,
) -> Result<Conclusion, MatrixError> {
    let finding = Finding::loewner(text, lhs, rhs, psd_tol, converged)?;
    Ok(Conclusion {
        text: finding.text,
        verdict: finding.verdict,
        margin: finding.margin,
        asserted,
    })
}
