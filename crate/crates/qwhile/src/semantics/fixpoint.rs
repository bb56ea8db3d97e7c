//! Fixed-point metadata, evaluation strategy, and cooperative cancellation.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// How loop fixed points are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Monotone iteration until the residual drops below the tolerance.
    /// Always sound: partial iterates are one-sided bounds.
    #[default]
    Iterate,
    /// Solve the vectorized affine fixed-point equation directly, falling
    /// back to iteration when the linear system is singular or the solution
    /// fails verification.
    Solve,
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "iterate" => Ok(Method::Iterate),
            "solve" => Ok(Method::Solve),
            other => Err(format!(
                "unknown method '{other}' (expected 'iterate' or 'solve')"
            )),
        }
    }
}

/// Convergence record for one evaluation. When several fixed points are
/// involved (nested loops, superoperator columns) the records are merged:
/// iterations add up, residuals take the worst case, convergence is joint.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FixpointMeta {
    pub iterations: usize,
    pub converged: bool,
    pub residual: f64,
}

impl FixpointMeta {
    /// Metadata for loop-free evaluation: exact in zero iterations.
    pub fn exact() -> Self {
        Self {
            iterations: 0,
            converged: true,
            residual: 0.0,
        }
    }

    pub fn absorb(&mut self, other: &FixpointMeta) {
        self.iterations += other.iterations;
        self.converged &= other.converged;
        self.residual = self.residual.max(other.residual);
    }
}

/// Cooperative cancellation for long fixed-point runs; cloned handles share
/// one flag, and evaluators poll it each iteration.
#[derive(Debug, Clone, Default)]
pub struct CancelToken {
    flag: Arc<AtomicBool>,
}

impl CancelToken {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cancel(&self) {
        self.flag.store(true, Ordering::Relaxed);
    }

    pub fn is_cancelled(&self) -> bool {
        self.flag.load(Ordering::Relaxed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merged_metadata_is_conservative() {
        let mut a = FixpointMeta {
            iterations: 3,
            converged: true,
            residual: 1e-12,
        };
        let b = FixpointMeta {
            iterations: 5,
            converged: false,
            residual: 0.25,
        };
        a.absorb(&b);
        assert_eq!(a.iterations, 8);
        assert!(!a.converged);
        assert_eq!(a.residual, 0.25);
    }

    #[test]
    fn metadata_serializes_in_documented_shape() {
        let meta = FixpointMeta {
            iterations: 7,
            converged: true,
            residual: 5e-11,
        };
        let json = serde_json::to_string(&meta).unwrap();
        assert_eq!(json, r#"{"iterations":7,"converged":true,"residual":5e-11}"#);
    }

    #[test]
    fn cancellation_is_shared_across_clones() {
        let token = CancelToken::new();
        let other = token.clone();
        assert!(!other.is_cancelled());
        token.cancel();
        assert!(other.is_cancelled());
    }

    #[test]
    fn method_parses_from_flag_values() {
        assert_eq!("iterate".parse::<Method>().unwrap(), Method::Iterate);
        assert_eq!("solve".parse::<Method>().unwrap(), Method::Solve);
        assert!("newton".parse::<Method>().is_err());
    }
}
