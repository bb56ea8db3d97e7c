//! Randomized checking of the transformer identities over generated corpora.
//!
//! Each sample draws a random program `S`, state `rho`, and predicates
//! `M, N`, then evaluates every identity relating `denote`, `wp`, `wlp`,
//! and the `&` connective. The identities are theorems, so any deviation
//! beyond numerical tolerance indicates an implementation bug; this makes
//! the fuzzer a strong oracle (it catches seeded mutants such as a wrong
//! `abort` clause).
//!
//! Identities whose hypotheses constrain the operands (monotonicity,
//! conjunction, sum, difference laws) are checked on derived pairs that
//! satisfy the hypotheses by construction:
//!
//! - monotonicity on `(M/2, (M+N)/2)`, ordered because `N >= 0`;
//! - conjunction laws on `((M+I)/2, (N+I)/2)`, whose sum dominates `I`;
//! - sum law on `(M/2, N/2)`, whose sum is below `I`;
//! - difference law on `(M, M/2)`, ordered because `M >= 0`.
//!
//! Samples for which any fixed point fails to converge are counted
//! separately and contribute to no identity statistic (partial sums only
//! bound the limit from one side).

use serde::Serialize;

use crate::matrix::types::amp_and;
use crate::matrix::{ComplexMatrix, DensityOperator, Predicate, Tolerances};
use crate::prooflab::IDENTITY_TOL;
use crate::sampling::Sampler;
use crate::semantics::{Evaluator, SemanticsError};

/// Parameters of a fuzzing run. Defaults match the standard regression run:
/// seed 42, 200 samples, at most 2 qubits, depth at most 4.
#[derive(Debug, Clone, Serialize)]
pub struct FuzzConfig {
    pub seed: u64,
    pub count: usize,
    pub n_max: usize,
    pub depth_max: usize,
    pub tol: Tolerances,
    /// Also build each program's transfer matrix and verify complete
    /// positivity and trace non-increase of its Choi matrix. Costs an extra
    /// `dim^2` evaluations per sample.
    pub check_choi: bool,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            count: 200,
            n_max: 2,
            depth_max: 4,
            tol: Tolerances::default(),
            check_choi: true,
        }
    }
}

/// Aggregate result for one identity across a run.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityStat {
    pub name: String,
    /// `"max_abs_deviation"` for equalities, `"min_margin"` for order checks.
    pub metric: &'static str,
    pub checked: usize,
    pub worst: f64,
    pub holds: bool,
}

/// Aggregate Choi-matrix result across a run.
#[derive(Debug, Clone, Serialize)]
pub struct ChoiStat {
    pub programs_checked: usize,
    pub min_choi_eigenvalue: f64,
    pub trace_margin: f64,
    pub all_pass: bool,
}

/// Full summary of a fuzzing run. Field order is fixed; identical inputs
/// produce byte-identical serialized summaries.
#[derive(Debug, Clone, Serialize)]
pub struct FuzzSummary {
    pub seed: u64,
    pub count: usize,
    pub n_max: usize,
    pub depth_max: usize,
    pub samples_checked: usize,
    pub non_convergent: usize,
    pub identities: Vec<IdentityStat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub choi: Option<ChoiStat>,
    pub all_hold: bool,
}

#[derive(Clone, Copy)]
enum Metric {
    Deviation,
    Margin,
}

struct Acc {
    name: &'static str,
    metric: Metric,
    checked: usize,
    worst: f64,
}

impl Acc {
    fn new(name: &'static str, metric: Metric) -> Self {
        let worst = match metric {
            Metric::Deviation => 0.0,
            Metric::Margin => f64::INFINITY,
        };
        Self {
            name,
            metric,
            checked: 0,
            worst,
        }
    }

    fn record(&mut self, value: f64) {
        self.checked += 1;
        self.worst = match self.metric {
            Metric::Deviation => self.worst.max(value),
            Metric::Margin => self.worst.min(value),
        };
    }

    fn finish(&self, psd_tol: f64) -> IdentityStat {
        let (metric, worst, holds) = if self.checked == 0 {
            (self.metric, 0.0, true)
        } else {
            let holds = match self.metric {
                Metric::Deviation => self.worst <= IDENTITY_TOL,
                Metric::Margin => self.worst >= -psd_tol,
            };
            (self.metric, self.worst, holds)
        };
        IdentityStat {
            name: self.name.to_string(),
            metric: match metric {
                Metric::Deviation => "max_abs_deviation",
                Metric::Margin => "min_margin",
            },
            checked: self.checked,
            worst,
            holds,
        }
    }
}

const N_IDENTITIES: usize = 12;

fn make_accs() -> [Acc; N_IDENTITIES] {
    [
        Acc::new("Tr(wp.S.M rho) = Tr(M [[S]]rho)", Metric::Deviation),
        Acc::new(
            "Tr(wlp.S.M rho) = Tr(M [[S]]rho) + Tr(rho) - Tr([[S]]rho)",
            Metric::Deviation,
        ),
        Acc::new("wlp.S.M + wp.S.(I - M) = I", Metric::Deviation),
        Acc::new("wp.S.M <= wlp.S.M", Metric::Margin),
        Acc::new("wp.S.M = wp.S.I & wlp.S.M", Metric::Deviation),
        Acc::new("wlp.S.I = I", Metric::Deviation),
        Acc::new("wp.S.A <= wp.S.B for A <= B", Metric::Margin),
        Acc::new("wlp.S.A <= wlp.S.B for A <= B", Metric::Margin),
        Acc::new("wp.S.(A & B) = wp.S.A & wlp.S.B for A + B >= I", Metric::Deviation),
        Acc::new(
            "wlp.S.(A & B) = wlp.S.A & wlp.S.B for A + B >= I",
            Metric::Deviation,
        ),
        Acc::new("wlp.S.(A + B) = wp.S.A + wlp.S.B for A + B <= I", Metric::Deviation),
        Acc::new("wlp.S.(A - B) = wlp.S.A - wp.S.B for A >= B", Metric::Deviation),
    ]
}

/// Run the randomized identity suite and return its summary.
pub fn run_fuzz(cfg: &FuzzConfig) -> Result<FuzzSummary, SemanticsError> {
    let mut sampler = Sampler::from_seed(cfg.seed, cfg.tol);
    let mut accs = make_accs();
    let mut non_convergent = 0usize;
    let mut choi_checked = 0usize;
    let mut choi_min_eig = f64::INFINITY;
    let mut choi_trace_margin = f64::INFINITY;
    let mut choi_all_pass = true;

    for _ in 0..cfg.count {
        let program = sampler.program(cfg.n_max, cfg.depth_max);
        let eval = Evaluator::new(&program, cfg.tol)?;
        let dim = eval.dim();
        let rho = sampler.density(dim);
        let m = sampler.predicate(dim);
        let n = sampler.predicate(dim);

        match evaluate_sample(&eval, &rho, &m, &n, cfg)? {
            None => non_convergent += 1,
            Some(sample) => {
                for (acc, value) in accs.iter_mut().zip(sample.values) {
                    acc.record(value);
                }
                if let Some((min_eig, trace_margin, pass)) = sample.choi {
                    choi_checked += 1;
                    choi_min_eig = choi_min_eig.min(min_eig);
                    choi_trace_margin = choi_trace_margin.min(trace_margin);
                    choi_all_pass &= pass;
                }
            }
        }
    }

    let identities: Vec<IdentityStat> = accs.iter().map(|a| a.finish(cfg.tol.psd)).collect();
    let choi = cfg.check_choi.then(|| ChoiStat {
        programs_checked: choi_checked,
        min_choi_eigenvalue: if choi_checked == 0 { 0.0 } else { choi_min_eig },
        trace_margin: if choi_checked == 0 { 0.0 } else { choi_trace_margin },
        all_pass: choi_all_pass,
    });
    let all_hold = identities.iter().all(|s| s.holds)
        && choi.as_ref().map_or(true, |c| c.all_pass);

    Ok(FuzzSummary {
        seed: cfg.seed,
        count: cfg.count,
        n_max: cfg.n_max,
        depth_max: cfg.depth_max,
        samples_checked: cfg.count - non_convergent,
        non_convergent,
        identities,
        choi,
        all_hold,
    })
}

struct SampleResult {
    values: [f64; N_IDENTITIES],
    choi: Option<(f64, f64, bool)>,
}

/// Evaluate every identity on one `(S, rho, M, N)` draw. Returns `None`
/// when any required fixed point failed to converge.
fn evaluate_sample(
    eval: &Evaluator,
    rho: &DensityOperator,
    m: &Predicate,
    n: &Predicate,
    cfg: &FuzzConfig,
) -> Result<Option<SampleResult>, SemanticsError> {
    let dim = eval.dim();
    let tol = cfg.tol;
    let identity = ComplexMatrix::identity(dim);
    let id_pred = Predicate::identity(dim);

    let mut all_converged = true;
    let mut track = |converged: bool| {
        all_converged &= converged;
    };

    let (out, meta) = eval.denote(rho)?;
    track(meta.converged);

    let (wp_m, meta) = eval.wp(m)?;
    track(meta.converged);
    let (wlp_m, meta) = eval.wlp(m)?;
    track(meta.converged);
    let (wp_i, meta) = eval.wp(&id_pred)?;
    track(meta.converged);
    let (wlp_i, meta) = eval.wlp(&id_pred)?;
    track(meta.converged);
    let (wp_compl, meta) = eval.wp(&m.complement())?;
    track(meta.converged);

    // Derived ordered pair A = M/2 <= B = (M+N)/2.
    let a_mono = half(m.matrix());
    let b_mono = half(&m.matrix().add(n.matrix())?);
    let (wp_a, meta) = eval.wp(&a_mono)?;
    track(meta.converged);
    let (wp_b, meta) = eval.wp(&b_mono)?;
    track(meta.converged);
    let (wlp_a, meta) = eval.wlp(&a_mono)?;
    track(meta.converged);
    let (wlp_b, meta) = eval.wlp(&b_mono)?;
    track(meta.converged);

    // Derived pair A = (M+I)/2, B = (N+I)/2 with A + B >= I.
    let a_conj = half(&m.matrix().add(&identity)?);
    let b_conj = half(&n.matrix().add(&identity)?);
    let amp_ab = Predicate::from_matrix_unchecked(
        amp_and(a_conj.matrix(), b_conj.matrix(), tol.herm)?,
    );
    let (wp_amp, meta) = eval.wp(&amp_ab)?;
    track(meta.converged);
    let (wlp_amp, meta) = eval.wlp(&amp_ab)?;
    track(meta.converged);
    let (wp_ac, meta) = eval.wp(&a_conj)?;
    track(meta.converged);
    let (wlp_ac, meta) = eval.wlp(&a_conj)?;
    track(meta.converged);
    let (wlp_bc, meta) = eval.wlp(&b_conj)?;
    track(meta.converged);

    // Derived pair A = M/2, B = N/2 with A + B <= I; the sum (M+N)/2 is
    // exactly the monotone pair's upper element, so its wlp is reused.
    let b_sum = half(n.matrix());
    let (wlp_b_sum, meta) = eval.wlp(&b_sum)?;
    track(meta.converged);

    if !all_converged {
        return Ok(None);
    }

    let tr = |x: &ComplexMatrix, y: &ComplexMatrix| -> Result<f64, SemanticsError> {
        Ok(x.matmul(y)?.trace().re)
    };

    let mut values = [0.0f64; N_IDENTITIES];

    // Expectation duality for total correctness.
    let lhs = tr(wp_m.matrix(), rho.matrix())?;
    let rhs = tr(m.matrix(), out.matrix())?;
    values[0] = (lhs - rhs).abs();

    // Expectation duality for partial correctness (sub-normalized aware).
    let lhs = tr(wlp_m.matrix(), rho.matrix())?;
    let rhs = tr(m.matrix(), out.matrix())? + rho.trace_re() - out.matrix().trace().re;
    values[1] = (lhs - rhs).abs();

    // Complement law.
    let sum = wlp_m.matrix().add(wp_compl.matrix())?;
    values[2] = sum.max_abs_diff(&identity)?;

    // wp below wlp.
    values[3] = crate::matrix::loewner_leq(wp_m.matrix(), wlp_m.matrix(), tol.psd)?.margin;

    // wp factors through termination.
    let rhs = amp_and(wp_i.matrix(), wlp_m.matrix(), tol.herm)?;
    values[4] = wp_m.matrix().max_abs_diff(&rhs)?;

    // wlp preserves the top element.
    values[5] = wlp_i.matrix().max_abs_diff(&identity)?;

    // Monotonicity.
    values[6] = crate::matrix::loewner_leq(wp_a.matrix(), wp_b.matrix(), tol.psd)?.margin;
    values[7] = crate::matrix::loewner_leq(wlp_a.matrix(), wlp_b.matrix(), tol.psd)?.margin;

    // Conjunction laws.
    let rhs = amp_and(wp_ac.matrix(), wlp_bc.matrix(), tol.herm)?;
    values[8] = wp_amp.matrix().max_abs_diff(&rhs)?;
    let rhs = amp_and(wlp_ac.matrix(), wlp_bc.matrix(), tol.herm)?;
    values[9] = wlp_amp.matrix().max_abs_diff(&rhs)?;

    // Sum law: wlp.S.((M+N)/2) against wp.S.(M/2) + wlp.S.(N/2).
    let rhs = wp_a.matrix().add(wlp_b_sum.matrix())?;
    values[10] = wlp_b.matrix().max_abs_diff(&rhs)?;

    // Difference law with B = M/2: wlp.S.(M - B) = wlp.S.M - wp.S.B.
    let rhs = wlp_m.matrix().sub(wp_a.matrix())?;
    values[11] = wlp_a.matrix().max_abs_diff(&rhs)?;

    let choi = if cfg.check_choi {
        let (superop, meta) = eval.superop()?;
        if meta.converged {
            let report = superop.cp_check(&tol)?;
            Some((
                report.min_choi_eigenvalue,
                report.trace_margin,
                report.passes(),
            ))
        } else {
            return Ok(None);
        }
    } else {
        None
    };

    Ok(Some(SampleResult { values, choi }))
}

fn half(m: &ComplexMatrix) -> Predicate {
    Predicate::from_matrix_unchecked(m.scale_re(0.5).hermitize())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_run_is_vacuously_passing() {
        let cfg = FuzzConfig {
            count: 0,
            ..FuzzConfig::default()
        };
        let summary = run_fuzz(&cfg).unwrap();
        assert!(summary.all_hold);
        assert_eq!(summary.samples_checked, 0);
        assert_eq!(summary.non_convergent, 0);
        assert!(summary.identities.iter().all(|s| s.checked == 0 && s.holds));
    }

    #[test]
    fn small_seeded_run_passes_and_is_deterministic() {
        let cfg = FuzzConfig {
            count: 25,
            ..FuzzConfig::default()
        };
        let a = run_fuzz(&cfg).unwrap();
        let b = run_fuzz(&cfg).unwrap();
        assert!(a.all_hold, "identities: {:?}", a.identities);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert_eq!(a.samples_checked + a.non_convergent, 25);
        let deviations: Vec<&IdentityStat> = a
            .identities
            .iter()
            .filter(|s| s.metric == "max_abs_deviation")
            .collect();
        assert!(!deviations.is_empty());
        for stat in deviations {
            assert!(stat.worst <= 1e-8, "{}: {}", stat.name, stat.worst);
        }
    }

    #[test]
    fn choi_statistics_cover_generated_programs() {
        let cfg = FuzzConfig {
            count: 15,
            ..FuzzConfig::default()
        };
        let summary = run_fuzz(&cfg).unwrap();
        let choi = summary.choi.expect("choi enabled by default");
        assert_eq!(choi.programs_checked, summary.samples_checked);
        assert!(choi.all_pass);
        assert!(choi.min_choi_eigenvalue >= -1e-9);
        assert!(choi.trace_margin >= -1e-9);
    }

    #[test]
    fn choi_can_be_disabled() {
        let cfg = FuzzConfig {
            count: 5,
            check_choi: false,
            ..FuzzConfig::default()
        };
        let summary = run_fuzz(&cfg).unwrap();
        assert!(summary.choi.is_none());
        let text = serde_json::to_string(&summary).unwrap();
        assert!(!text.contains("\"choi\""));
    }
}
