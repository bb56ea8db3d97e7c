//! Command-line front end: run programs, compute preconditions, check proof
//! rules, extract Choi matrices, unroll loops, and fuzz the identity suite.
//!
//! Exit codes:
//!
//! - `0`: success; for `check`, every asserted verdict holds; for `fuzz`,
//!   every identity held.
//! - `1`: a `check` assertion or `fuzz` identity failed.
//! - `2`: input problem (file I/O, program parse or validation, malformed
//!   matrix JSON, bad flag combination).
//! - `3`: a fixed point failed to converge within the iteration budget; the
//!   partial result is still printed, flagged in its `fixpoint` metadata.
//!
//! All matrix inputs use the same JSON schema (`{"dim": d, "entries":
//! [[[re, im], ...], ...]}`); outputs are pretty-printed JSON with a trailing
//! newline, written to standard output or to `--out`. Identical invocations
//! (including `--seed`) produce byte-identical output.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use crate::fuzz::{run_fuzz, FuzzConfig, FuzzSummary};
use crate::lang::{parse, pretty_print, ParseError, Program, ResolveError};
use crate::matrix::{ComplexMatrix, DensityOperator, MatrixError, Predicate, Tolerances};
use crate::prooflab::{
    check_duality_laws, check_scaled_lemma, check_total_rule, check_wlp_invariant,
    check_wp_invariant, check_zero_one_law, ProoflabError, RuleReport,
};
use crate::semantics::{unroll_program, CpReport, Evaluator, FixpointMeta, Method, SemanticsError};

const MAX_FUZZ_QUBITS: usize = 4;
const MAX_FUZZ_DEPTH: usize = 6;

/// Parsed command line.
#[derive(Debug, Parser)]
#[command(
    name = "qwhile",
    version,
    about = "Interpreter and verifier for a purely quantum while-language"
)]
pub struct Invocation {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: CommonFlags,
}

/// Flags shared by every subcommand.
#[derive(Debug, Args)]
pub struct CommonFlags {
    /// Fixed-point convergence tolerance (default 1e-10).
    #[arg(long, global = true)]
    pub tol_fix: Option<f64>,
    /// Slack for positive-semidefiniteness and order checks (default 1e-9).
    #[arg(long, global = true)]
    pub tol_psd: Option<f64>,
    /// Iteration cap for fixed-point computations (default 100000).
    #[arg(long, global = true)]
    pub max_iter: Option<usize>,
    /// Loop evaluation strategy: iterate the defining sequence, or solve the
    /// linear fixed-point system (falling back to iteration if singular).
    #[arg(long, global = true, default_value = "iterate")]
    pub method: Method,
    /// Write output to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply a program to a density operator and print the output state.
    Run {
        /// Program text file.
        program: PathBuf,
        /// Input density operator (matrix JSON).
        #[arg(long)]
        state: PathBuf,
    },
    /// Weakest precondition of a predicate under a program.
    Wp {
        program: PathBuf,
        /// Postcondition predicate (matrix JSON).
        #[arg(long)]
        predicate: PathBuf,
    },
    /// Weakest liberal precondition of a predicate under a program.
    Wlp {
        program: PathBuf,
        /// Postcondition predicate (matrix JSON).
        #[arg(long)]
        predicate: PathBuf,
    },
    /// Check a proof rule and print its report.
    Check {
        /// One of: wlp-invariant, wp-invariant, total, scaled, zero-one,
        /// duality.
        rule: String,
        /// Program text file (a single loop for the loop rules).
        program: PathBuf,
        /// Predicate M (matrix JSON).
        #[arg(long)]
        predicate: PathBuf,
        /// Second predicate N (duality laws only).
        #[arg(long)]
        second: Option<PathBuf>,
        /// Scale parameter in (0, 1] for the scaled rule.
        #[arg(long, default_value_t = 1.0)]
        prob: f64,
    },
    /// Evaluate the transformer identities on randomly generated programs.
    Fuzz {
        /// RNG seed; identical seeds reproduce identical summaries.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Number of (program, state, predicates) samples.
        #[arg(long, default_value_t = 200)]
        count: usize,
        /// Largest register size to generate (at most 4).
        #[arg(long, default_value_t = 2)]
        n_max: usize,
        /// Deepest statement nesting to generate (at most 6).
        #[arg(long, default_value_t = 4)]
        depth_max: usize,
        /// Skip the per-program Choi-matrix checks.
        #[arg(long)]
        skip_choi: bool,
    },
    /// Print the i-th syntactic unrolling of a loop program.
    Unroll {
        program: PathBuf,
        /// Number of unrollings (0 yields the aborting approximation).
        #[arg(long, default_value_t = 1)]
        depth: usize,
    },
    /// Choi matrix of the program's channel, with CP and trace verdicts.
    Choi { program: PathBuf },
}

/// What a command produced: text for stdout (or `--out`), text for stderr,
/// and the process exit code.
#[derive(Debug)]
pub struct CliOutcome {
    pub stdout: String,
    pub stderr: String,
    pub exit_code: i32,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("cannot read '{path}': {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("in '{path}': {source}")]
    Parse {
        path: PathBuf,
        source: ParseError,
    },
    #[error("in '{path}': {source}")]
    Resolve {
        path: PathBuf,
        source: ResolveError,
    },
    #[error("'{path}' is not valid matrix JSON: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("'{path}' is not a density operator: {source}")]
    BadState {
        path: PathBuf,
        source: MatrixError,
    },
    #[error("'{path}' is not a predicate: {source}")]
    BadPredicate {
        path: PathBuf,
        source: MatrixError,
    },
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Prooflab(#[from] ProoflabError),
    #[error("unknown rule '{name}' (expected one of: wlp-invariant, wp-invariant, total, scaled, zero-one, duality)")]
    UnknownRule { name: String },
    #[error("rule '{rule}' does not use --second")]
    UnusedSecond { rule: String },
    #[error("rule 'duality' requires --second <predicate>")]
    MissingSecond,
    #[error("--{flag} is limited to {max} (got {got})")]
    Limit {
        flag: &'static str,
        max: usize,
        got: usize,
    },
}

struct Rendered {
    body: String,
    exit_code: i32,
}

/// Execute a parsed invocation. Never panics on user input; all failure
/// modes are folded into the returned outcome.
pub fn execute(invocation: Invocation) -> CliOutcome {
    let tol = resolve_tolerances(&invocation.flags);
    match run_command(&invocation.command, &invocation.flags, tol) {
        Ok(rendered) => deliver(rendered, invocation.flags.out.as_deref()),
        Err(err) => CliOutcome {
            stdout: String::new(),
            stderr: format!("error: {err}\n"),
            exit_code: 2,
        },
    }
}

fn resolve_tolerances(flags: &CommonFlags) -> Tolerances {
    let mut tol = Tolerances::default();
    if let Some(fix) = flags.tol_fix {
        tol.fix = fix;
    }
    if let Some(psd) = flags.tol_psd {
        tol.psd = psd;
    }
    if let Some(max_iter) = flags.max_iter {
        tol.max_iter = max_iter;
    }
    tol
}

fn deliver(rendered: Rendered, out: Option<&Path>) -> CliOutcome {
    match out {
        Some(path) => match fs::write(path, &rendered.body) {
            Ok(()) => CliOutcome {
                stdout: String::new(),
                stderr: String::new(),
                exit_code: rendered.exit_code,
            },
            Err(err) => CliOutcome {
                stdout: String::new(),
                stderr: format!("error: cannot write '{}': {err}\n", path.display()),
                exit_code: 2,
            },
        },
        None => CliOutcome {
            stdout: rendered.body,
            stderr: String::new(),
            exit_code: rendered.exit_code,
        },
    }
}

fn run_command(
    command: &Command,
    flags: &CommonFlags,
    tol: Tolerances,
) -> Result<Rendered, CliError> {
    match command {
        Command::Run { program, state } => {
            let eval = load_evaluator(program, tol, flags.method)?;
            let rho = load_state(state, &tol)?;
            let (output, fixpoint) = eval.denote(&rho)?;

            #[derive(Serialize)]
            struct RunOutput<'a> {
                state: &'a ComplexMatrix,
                trace: f64,
                fixpoint: FixpointMeta,
            }
            let trace = output.trace_re();
            render_json(
                &RunOutput {
                    state: output.matrix(),
                    trace,
                    fixpoint,
                },
                convergence_exit(&fixpoint),
            )
        }
        Command::Wp { program, predicate } | Command::Wlp { program, predicate } => {
            let eval = load_evaluator(program, tol, flags.method)?;
            let post = load_predicate(predicate, &tol)?;
            let (value, fixpoint) = match command {
                Command::Wp { .. } => eval.wp(&post)?,
                _ => eval.wlp(&post)?,
            };

            #[derive(Serialize)]
            struct PredicateOutput<'a> {
                predicate: &'a ComplexMatrix,
                fixpoint: FixpointMeta,
            }
            render_json(
                &PredicateOutput {
                    predicate: value.matrix(),
                    fixpoint,
                },
                convergence_exit(&fixpoint),
            )
        }
        Command::Check {
            rule,
            program,
            predicate,
            second,
            prob,
        } => {
            let program = load_program(program)?;
            let m = load_predicate(predicate, &tol)?;
            let report = run_rule(rule, &program, &m, second.as_deref(), *prob, tol)?;
            let exit_code = if report.passes() { 0 } else { 1 };
            render_json(&report, exit_code)
        }
        Command::Fuzz {
            seed,
            count,
            n_max,
            depth_max,
            skip_choi,
        } => {
            check_limit("n-max", *n_max, MAX_FUZZ_QUBITS)?;
            check_limit("depth-max", *depth_max, MAX_FUZZ_DEPTH)?;
            let cfg = FuzzConfig {
                seed: *seed,
                count: *count,
                n_max: *n_max,
                depth_max: *depth_max,
                tol,
                check_choi: !skip_choi,
            };
            let summary: FuzzSummary = run_fuzz(&cfg)?;
            let exit_code = if summary.all_hold { 0 } else { 1 };
            render_json(&summary, exit_code)
        }
        Command::Unroll { program, depth } => {
            let program = load_program(program)?;
            let unrolled = unroll_program(&program, *depth)?;
            Ok(Rendered {
                body: pretty_print(&unrolled),
                exit_code: 0,
            })
        }
        Command::Choi { program } => {
            let eval = load_evaluator(program, tol, flags.method)?;
            let (superop, fixpoint) = eval.superop()?;
            let cp = superop.cp_check(&tol).map_err(SemanticsError::from)?;

            #[derive(Serialize)]
            struct ChoiOutput {
                choi: ComplexMatrix,
                cp: CpReport,
                fixpoint: FixpointMeta,
            }
            render_json(
                &ChoiOutput {
                    choi: superop.choi(),
                    cp,
                    fixpoint,
                },
                convergence_exit(&fixpoint),
            )
        }
    }
}

fn run_rule(
    rule: &str,
    program: &Program,
    m: &Predicate,
    second: Option<&Path>,
    prob: f64,
    tol: Tolerances,
) -> Result<RuleReport, CliError> {
    if rule != "duality" {
        if second.is_some() {
            return Err(CliError::UnusedSecond {
                rule: rule.to_string(),
            });
        }
    }
    let report = match rule {
        "wlp-invariant" => check_wlp_invariant(program, m, tol)?,
        "wp-invariant" => check_wp_invariant(program, m, tol)?,
        "total" => check_total_rule(program, m, tol)?,
        "scaled" => check_scaled_lemma(program, m, prob, tol)?,
        "zero-one" => check_zero_one_law(program, m, tol)?,
        "duality" => {
            let path = second.ok_or(CliError::MissingSecond)?;
            let n = load_predicate(path, &tol)?;
            check_duality_laws(program, m, &n, tol)?
        }
        other => {
            return Err(CliError::UnknownRule {
                name: other.to_string(),
            });
        }
    };
    Ok(report)
}

fn check_limit(flag: &'static str, got: usize, max: usize) -> Result<(), CliError> {
    if got > max {
        return Err(CliError::Limit { flag, max, got });
    }
    Ok(())
}

fn convergence_exit(meta: &FixpointMeta) -> i32 {
    if meta.converged {
        0
    } else {
        3
    }
}

fn render_json<T: Serialize>(value: &T, exit_code: i32) -> Result<Rendered, CliError> {
    let mut body = serde_json::to_string_pretty(value).expect("output types serialize");
    body.push('\n');
    Ok(Rendered { body, exit_code })
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn load_program(path: &Path) -> Result<Program, CliError> {
    let text = read_file(path)?;
    let mut program = parse(&text).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().filter(|p| !p.as_os_str().is_empty());
    program
        .resolve_externals(base.unwrap_or(Path::new(".")))
        .map_err(|source| CliError::Resolve {
            path: path.to_path_buf(),
            source,
        })?;
    Ok(program)
}

fn load_evaluator(path: &Path, tol: Tolerances, method: Method) -> Result<Evaluator, CliError> {
    let program = load_program(path)?;
    Ok(Evaluator::new(&program, tol)?.with_method(method))
}

fn load_matrix(path: &Path) -> Result<ComplexMatrix, CliError> {
    let text = read_file(path)?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })
}

fn load_state(path: &Path, tol: &Tolerances) -> Result<DensityOperator, CliError> {
    let matrix = load_matrix(path)?;
    DensityOperator::new(matrix, tol).map_err(|source| CliError::BadState {
        path: path.to_path_buf(),
        source,
    })
}

fn load_predicate(path: &Path, tol: &Tolerances) -> Result<Predicate, CliError> {
    let matrix = load_matrix(path)?;
    Predicate::new(matrix, tol).map_err(|source| CliError::BadPredicate {
        path: path.to_path_buf(),
        source,
    })
}
