//! Verdicts, findings, and machine-readable rule reports.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::matrix::linalg::loewner_leq;
use crate::matrix::{ComplexMatrix, MatrixError, Tolerances};
use crate::semantics::FixpointMeta;

/// Max-abs tolerance for the operator identities. Looser than the
/// fixed-point tolerance because identities compare two independently
/// computed fixed points whose errors compound.
pub const IDENTITY_TOL: f64 = 1e-8;

/// Outcome of one checked statement. `Indeterminate` means a fixed point
/// backing the statement did not converge, so only a one-sided bound is
/// known and neither `Holds` nor `Fails` can be concluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    Indeterminate,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    fn from_bool(holds: bool, converged: bool) -> Self {
        if !converged {
            Verdict::Indeterminate
        } else if holds {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }

    /// Conjunction: any failure dominates, else any indeterminacy.
    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fails, _) | (_, Fails) => Fails,
            (Indeterminate, _) | (_, Indeterminate) => Indeterminate,
            (Holds, Holds) => Holds,
        }
    }
}

impl Serialize for Verdict {
    /// `true` / `false` / `"indeterminate"`.
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Verdict::Holds => serializer.serialize_bool(true),
            Verdict::Fails => serializer.serialize_bool(false),
            Verdict::Indeterminate => serializer.serialize_str("indeterminate"),
        }
    }
}

/// One checked premise or identity: a human-readable statement, its verdict,
/// and a numeric margin. For Löwner comparisons the margin is the smallest
/// eigenvalue of the difference (negative means violation); for equalities
/// it is the negated max-abs deviation, so margin >= -tolerance always means
/// "holds".
#[derive(Debug, Clone)]
pub struct Finding {
    pub text: String,
    pub verdict: Verdict,
    pub margin: f64,
}

impl Finding {
    /// Löwner comparison `lhs <= rhs` at `psd_tol`.
    pub fn loewner(
        text: impl Into<String>,
        lhs: &ComplexMatrix,
        rhs: &ComplexMatrix,
        psd_tol: f64,
        converged: bool,
    ) -> Result<Self, MatrixError> {
        let check = loewner_leq(lhs, rhs, psd_tol)?;
        Ok(Self {
            text: text.into(),
            verdict: Verdict::from_bool(check.holds, converged),
            margin: check.margin,
        })
    }

    /// Operator equality `lhs = rhs` within `IDENTITY_TOL` (max-abs).
    pub fn equality(
        text: impl Into<String>,
        lhs: &ComplexMatrix,
        rhs: &ComplexMatrix,
        converged: bool,
    ) -> Result<Self, MatrixError> {
        let deviation = lhs.max_abs_diff(rhs)?;
        Ok(Self {
            text: text.into(),
            verdict: Verdict::from_bool(deviation <= IDENTITY_TOL, converged),
            margin: -deviation,
        })
    }

    /// Direct threshold check with an explicit margin (e.g. positive
    /// definiteness via a minimum eigenvalue).
    pub fn threshold(
        text: impl Into<String>,
        margin: f64,
        holds: bool,
        converged: bool,
    ) -> Self {
        Self {
            text: text.into(),
            verdict: Verdict::from_bool(holds, converged),
            margin,
        }
    }
}

impl Serialize for Finding {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Finding", 3)?;
        s.serialize_field("text", &self.text)?;
        s.serialize_field("holds", &self.verdict)?;
        s.serialize_field("margin", &self.margin)?;
        s.end()
    }
}

/// The rule's conclusion. `asserted` records whether the rule actually
/// claims the conclusion (all premises held); the verdict is evaluated
/// either way so failed applications still show what the conclusion did.
#[derive(Debug, Clone)]
pub struct Conclusion {
    pub text: String,
    pub verdict: Verdict,
    pub margin: f64,
    pub asserted: bool,
}

impl Serialize for Conclusion {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Conclusion", 4)?;
        s.serialize_field("text", &self.text)?;
        s.serialize_field("holds", &self.verdict)?;
        s.serialize_field("margin", &self.margin)?;
        s.serialize_field("asserted", &self.asserted)?;
        s.end()
    }
}

/// Full machine-readable result of one rule application.
#[derive(Debug, Clone, Serialize)]
pub struct RuleReport {
    pub rule: String,
    pub premises: Vec<Finding>,
    pub conclusion: Conclusion,
    /// Free-form remarks: skipped clauses with their reasons, soundness
    /// alarms, non-convergence warnings.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub tolerances: Tolerances,
    pub fixpoint: FixpointMeta,
}

impl RuleReport {
    pub fn all_premises_hold(&self) -> bool {
        self.premises.iter().all(|p| p.verdict.holds())
    }

    /// Everything the report asserts is true: every premise holds, and the
    /// conclusion holds whenever it is asserted.
    pub fn passes(&self) -> bool {
        self.all_premises_hold() && (!self.conclusion.asserted || self.conclusion.verdict.holds())
    }

    /// All premises hold yet an asserted conclusion fails. For the paper's
    /// rules this is impossible; seeing it means an implementation bug.
    pub fn soundness_violated(&self) -> bool {
        self.all_premises_hold() && self.conclusion.asserted && self.conclusion.verdict == Verdict::Fails
    }

    /// Append the standard notes derived from the verdicts themselves.
    pub(crate) fn finalize(mut self) -> Self {
        if self.soundness_violated() {
            self.notes.insert(
                0,
                "SOUNDNESS VIOLATION: every premise holds but the asserted conclusion fails; \
                 this indicates a bug in the checker, not in the program"
                    .to_string(),
            );
        }
        if !self.fixpoint.converged {
            self.notes.push(format!(
                "a fixed point stopped at {} iteration(s) with residual {:.3e} before reaching \
                 the tolerance; affected verdicts are reported as indeterminate",
                self.fixpoint.iterations, self.fixpoint.residual
            ));
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c;

    #[test]
    fn verdict_serialization_shapes() {
        assert_eq!(serde_json::to_string(&Verdict::Holds).unwrap(), "true");
        assert_eq!(serde_json::to_string(&Verdict::Fails).unwrap(), "false");
        assert_eq!(
            serde_json::to_string(&Verdict::Indeterminate).unwrap(),
            "\"indeterminate\""
        );
    }

    #[test]
    fn verdict_conjunction_prefers_failure_over_indeterminacy() {
        use Verdict::*;
        assert_eq!(Fails.and(Indeterminate), Fails);
        assert_eq!(Indeterminate.and(Holds), Indeterminate);
        assert_eq!(Holds.and(Holds), Holds);
    }

    #[test]
    fn loewner_finding_carries_margin() {
        let a = ComplexMatrix::identity(2).scale_re(0.25);
        let id = ComplexMatrix::identity(2);
        let f = Finding::loewner("A <= I", &a, &id, 1e-9, true).unwrap();
        assert!(f.verdict.holds());
        assert!((f.margin - 0.75).abs() < 1e-12);
    }

    #[test]
    fn equality_finding_negates_deviation() {
        let a = ComplexMatrix::identity(2);
        let mut b = ComplexMatrix::identity(2);
        b.set(0, 1, c(3e-9, 0.0));
        let f = Finding::equality("A = B", &a, &b, true).unwrap();
        assert!(f.verdict.holds());
        assert!((f.margin + 3e-9).abs() < 1e-15);
        b.set(0, 1, c(0.5, 0.0));
        let f = Finding::equality("A = B", &a, &b, true).unwrap();
        assert_eq!(f.verdict, Verdict::Fails);
    }

    #[test]
    fn non_convergence_makes_findings_indeterminate() {
        let a = ComplexMatrix::identity(2);
        let f = Finding::equality("A = A", &a, &a, false).unwrap();
        assert_eq!(f.verdict, Verdict::Indeterminate);
    }

    #[test]
    fn report_soundness_flagging() {
        let premise = Finding::threshold("p", 0.5, true, true);
        let conclusion = Conclusion {
            text: "c".into(),
            verdict: Verdict::Fails,
            margin: -1.0,
            asserted: true,
        };
        let report = RuleReport {
            rule: "test".into(),
            premises: vec![premise],
            conclusion,
            notes: vec![],
            tolerances: Tolerances::default(),
            fixpoint: FixpointMeta::exact(),
        }
        .finalize();
        assert!(report.soundness_violated());
        assert!(!report.passes());
        assert!(report.notes[0].contains("SOUNDNESS VIOLATION"));
    }

    #[test]
    fn report_json_matches_documented_schema() {
        let report = RuleReport {
            rule: "wlp-invariant".into(),
            premises: vec![Finding::threshold("P", 0.1, true, true)],
            conclusion: Conclusion {
                text: "C".into(),
                verdict: Verdict::Holds,
                margin: 0.2,
                asserted: true,
            },
            notes: vec![],
            tolerances: Tolerances::default(),
            fixpoint: FixpointMeta::exact(),
        };
        let value: serde_json::Value =
            serde_json::from_str(&serde_json::to_string(&report).unwrap()).unwrap();
        assert_eq!(value["rule"], "wlp-invariant");
        assert_eq!(value["premises"][0]["holds"], true);
        assert_eq!(value["premises"][0]["text"], "P");
        assert!(value["premises"][0]["margin"].is_number());
        assert_eq!(value["conclusion"]["asserted"], true);
        assert!(value["tolerances"]["psd"].is_number());
        assert_eq!(value["fixpoint"]["iterations"], 0);
        assert!(value.get("notes").is_none(), "empty notes are omitted");
    }
}
