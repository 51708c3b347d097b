//! Batch interface: parse an instance file, run one operation and emit a JSON
//! report whose status determines the exit code (0 pass or decomposed, 1
//! violation or infeasible, 2 input error).

pub mod instance;
pub mod result;

use std::ffi::OsString;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_traits::Zero;

use crate::cohomology::{partial_sum_bound, solve_bounded_transfer};
use crate::decomp::{decompose_three, decompose_two, DecompOutcome};
use crate::error::Error;
use crate::function::RationalFunction;
use crate::lattice::{
    axis_lines, lattice_decompose, lattice_mixed_delta_at, lattice_mixed_delta_witness, lattice_oracle,
    verify_lattice_parts, z_window_oracle, z_window_partitions,
};
use crate::oracle::{oracle_decompose, OracleOutcome};
use crate::orbits::{default_bound, Partition};
use crate::star::abelian::{check_star_abelian_bounded, replay_cyclic, replay_z_window, Modulus};
use crate::star::{
    check_star, check_star_with, search_counterexample, PremiseConvention, SearchConfig, StarOptions, StarVerdict,
};
use crate::system::{delta, is_invariant, verify_decomposition, Decomposition, Transformation};

pub use instance::{Element, InputError, Instance, InstanceFile};
pub use result::{CommutationWitness, Method, Outcome, Report, EXIT_CERTIFICATE, EXIT_INPUT, EXIT_OK};

#[derive(Debug, Parser)]
#[command(
    name = "invdecomp",
    version,
    about = "Split functions into sums of invariant functions, exactly"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that the transformations are well formed and commute.
    Validate(InstanceArgs),
    /// Decompose f into one invariant part per transformation.
    Decompose {
        #[command(flatten)]
        args: InstanceArgs,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
    },
    /// Check Condition (*) and print a violation certificate if it fails.
    StarCheck {
        #[command(flatten)]
        args: InstanceArgs,
        /// Lower limit of the premise exponents.
        #[arg(long, value_enum, default_value_t = ConventionArg::Natural)]
        convention: ConventionArg,
    },
    /// Solve the linear feasibility problem directly.
    Oracle(InstanceArgs),
    /// Axis-by-axis decomposition of a lattice window.
    LatticeDecompose(InstanceArgs),
    /// Solve Δ_T H = G with H invariant under S (the identity if absent) and ‖H‖ ≤ C.
    BoundedTransfer(InstanceArgs),
    /// Look for star-pass instances that the oracle proves indecomposable.
    Search(SearchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct InstanceArgs {
    /// Instance file; standard input when absent or `-`.
    pub instance: Option<PathBuf>,
    /// Exponent bound override (default 2N).
    #[arg(long)]
    pub bound: Option<usize>,
    /// Re-check this result file against the instance instead of solving.
    #[arg(long, value_name = "CERTFILE")]
    pub verify: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    /// Number of transformations.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// Largest domain size.
    #[arg(long, default_value_t = 6)]
    pub max_size: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Exponent bound override (default 2N per instance).
    #[arg(long)]
    pub bound: Option<usize>,
    /// Re-verify every candidate of this search report.
    #[arg(long, value_name = "CERTFILE")]
    pub verify: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ConventionArg {
    Natural,
    Positive,
}

impl From<ConventionArg> for PremiseConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Natural => PremiseConvention::Natural,
            ConventionArg::Positive => PremiseConvention::Positive,
        }
    }
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate(_) => "validate",
            Command::Decompose { .. } => "decompose",
            Command::StarCheck { .. } => "star-check",
            Command::Oracle(_) => "oracle",
            Command::LatticeDecompose(_) => "lattice-decompose",
            Command::BoundedTransfer(_) => "bounded-transfer",
            Command::Search(_) => "search",
        }
    }
}

/// Parses `argv` (program name first) and runs it. Usage errors become
/// `input-error` reports.
pub fn run_command<I, T>(argv: I) -> Report
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(argv) {
        Ok(cli) => run(&cli.command),
        Err(e) => Report {
            command: String::new(),
            outcome: Outcome::input(e.to_string()),
        },
    }
}

pub fn run(command: &Command) -> Report {
    let outcome = match command {
        Command::Search(args) => run_search(args),
        Command::Validate(args)
        | Command::Decompose { args, .. }
        | Command::StarCheck { args, .. }
        | Command::Oracle(args)
        | Command::LatticeDecompose(args)
        | Command::BoundedTransfer(args) => match load_instance(args.instance.as_deref()) {
            Err(e) => input_outcome(e),
            Ok(instance) => match &args.verify {
                Some(path) => verify_file(command, &instance, path, args.bound),
                None => dispatch(command, &instance, args.bound),
            },
        },
    };
    Report {
        command: command.name().to_string(),
        outcome,
    }
}

fn read_source(path: Option<&Path>) -> Result<String, InputError> {
    match path {
        None => read_stdin(),
        Some(p) if p.as_os_str() == "-" => read_stdin(),
        Some(p) => std::fs::read_to_string(p).map_err(|e| InputError::new(format!("{}: {e}", p.display()))),
    }
}

fn read_stdin() -> Result<String, InputError> {
    let mut text = String::new();
    std::io::stdin()
        .read_to_string(&mut text)
        .map_err(|e| InputError::new(format!("standard input: {e}")))?;
    Ok(text)
}

pub fn load_instance(path: Option<&Path>) -> Result<Instance, InputError> {
    Instance::parse(&read_source(path)?)
}

fn input_outcome(e: InputError) -> Outcome {
    Outcome::InputError {
        message: e.message,
        witness: e.witness,
    }
}

fn error_outcome(e: Error) -> Outcome {
    Outcome::input(e.to_string())
}

fn dispatch(command: &Command, instance: &Instance, bound: Option<usize>) -> Outcome {
    let result = match command {
        Command::Validate(_) => Ok(validate(instance)),
        Command::Decompose { method, .. } => decompose(instance, *method, bound),
        Command::StarCheck { convention, .. } => star_check(instance, bound, (*convention).into()),
        Command::Oracle(_) => oracle(instance),
        Command::LatticeDecompose(_) => match instance {
            Instance::Lattice(w) => window_decompose(w),
            _ => Err(Error::Precondition(
                "lattice-decompose needs a lattice-window instance".into(),
            )),
        },
        Command::BoundedTransfer(_) => bounded_transfer(instance),
        Command::Search(_) => unreachable!("search takes no instance"),
    };
    result.unwrap_or_else(error_outcome)
}

/// Runs the subcommand `name` on the JSON text of an instance file, as the
/// binary would without `--verify`.
pub fn run_on_text(name: &str, text: &str, bound: Option<usize>) -> Report {
    let args = InstanceArgs {
        instance: None,
        bound,
        verify: None,
    };
    let command = match name {
        "validate" => Command::Validate(args),
        "decompose" => Command::Decompose {
            args,
            method: Method::Auto,
        },
        "star-check" => Command::StarCheck {
            args,
            convention: ConventionArg::Natural,
        },
        "oracle" => Command::Oracle(args),
        "lattice-decompose" => Command::LatticeDecompose(args),
        "bounded-transfer" => Command::BoundedTransfer(args),
        other => {
            return Report {
                command: other.to_string(),
                outcome: Outcome::input(format!("unknown command {other:?}")),
            }
        }
    };
    let outcome = match Instance::parse(text) {
        Ok(instance) => dispatch(&command, &instance, bound),
        Err(e) => input_outcome(e),
    };
    Report {
        command: command.name().to_string(),
        outcome,
    }
}

pub fn decompose_instance(instance: &Instance, method: Method, bound: Option<usize>) -> Outcome {
    decompose(instance, method, bound).unwrap_or_else(error_outcome)
}

pub fn star_check_instance(instance: &Instance, bound: Option<usize>, convention: PremiseConvention) -> Outcome {
    star_check(instance, bound, convention).unwrap_or_else(error_outcome)
}

pub fn oracle_instance(instance: &Instance) -> Outcome {
    oracle(instance).unwrap_or_else(error_outcome)
}

fn validate(instance: &Instance) -> Outcome {
    let transforms = match instance {
        Instance::Finite { system, .. } | Instance::Cyclic { system, .. } => system.len(),
        Instance::ZWindow { shifts, .. } => shifts.len(),
        Instance::Lattice(w) => w.rank(),
    };
    Outcome::Valid {
        size: instance.size(),
        transforms,
    }
}

fn bound_or_default(bound: Option<usize>, size: usize) -> usize {
    bound.unwrap_or_else(|| default_bound(size))
}

fn from_decomp(outcome: DecompOutcome, method: Method) -> Outcome {
    match outcome {
        DecompOutcome::Decomposed(d) => Outcome::Decomposed { method, parts: d.parts },
        DecompOutcome::Violation(certificate) => Outcome::Violation { certificate },
    }
}

fn from_oracle(outcome: OracleOutcome) -> Outcome {
    match outcome {
        OracleOutcome::Feasible(d) => Outcome::Decomposed {
            method: Method::LinearOracle,
            parts: d.parts,
        },
        OracleOutcome::Infeasible(certificate) => Outcome::Infeasible { certificate },
    }
}

fn from_verdict(verdict: StarVerdict, bound: usize, convention: PremiseConvention) -> Outcome {
    match verdict {
        StarVerdict::Pass => Outcome::Pass {
            bound: Some(bound),
            convention,
        },
        StarVerdict::Violation(certificate) => Outcome::Violation { certificate },
    }
}

fn resolve_method(instance: &Instance, method: Method) -> Method {
    if method != Method::Auto {
        return method;
    }
    match instance {
        Instance::Lattice(_) => Method::AxisInduction,
        Instance::ZWindow { .. } => Method::LinearOracle,
        Instance::Finite { system, .. } | Instance::Cyclic { system, .. } => match system.len() {
            1 => Method::Single,
            2 => Method::TwoStep,
            3 => Method::ThreeStep,
            // No constructive proof beyond three: Condition (*) first, then the
            // oracle.
            _ => Method::Auto,
        },
    }
}

fn decompose(instance: &Instance, method: Method, bound: Option<usize>) -> Result<Outcome, Error> {
    let method = resolve_method(instance, method);
    if let Instance::Lattice(w) = instance {
        return match method {
            Method::AxisInduction => window_decompose(w),
            Method::LinearOracle => Ok(from_oracle(lattice_oracle(w))),
            _ => Err(Error::Precondition(format!(
                "method {method:?} does not apply to lattice windows"
            ))),
        };
    }
    if let Instance::ZWindow { shifts, f } = instance {
        return match method {
            Method::LinearOracle => Ok(from_oracle(z_window_oracle(shifts, f)?)),
            _ => Err(Error::Precondition(format!(
                "method {method:?} does not apply to Z-windows"
            ))),
        };
    }
    let (system, f) = instance.system().expect("explicit system");
    let b = bound_or_default(bound, f.len());
    let ts = system.transforms();
    let need = |n: usize| {
        if system.len() == n {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "method {method:?} needs {n} transformations, got {}",
                system.len()
            )))
        }
    };
    match method {
        Method::Single => {
            need(1)?;
            if is_invariant(&ts[0], f) {
                return Ok(Outcome::Decomposed {
                    method,
                    parts: vec![f.clone()],
                });
            }
            match check_star(system, f, b) {
                StarVerdict::Violation(certificate) => Ok(Outcome::Violation { certificate }),
                StarVerdict::Pass => Err(Error::InternalContract(
                    "non-invariant f passes Condition (*) for one map".into(),
                )),
            }
        }
        Method::TwoStep => {
            need(2)?;
            Ok(from_decomp(decompose_two(&ts[0], &ts[1], f, b)?, method))
        }
        Method::ThreeStep => {
            need(3)?;
            Ok(from_decomp(decompose_three(&ts[0], &ts[1], &ts[2], f, b)?, method))
        }
        Method::LinearOracle => Ok(from_oracle(oracle_decompose(system, f))),
        Method::Auto => match check_star(system, f, b) {
            StarVerdict::Violation(certificate) => Ok(Outcome::Violation { certificate }),
            StarVerdict::Pass => Ok(from_oracle(oracle_decompose(system, f))),
        },
        Method::AxisInduction => Err(Error::Precondition(
            "axis-induction needs a lattice-window instance".into(),
        )),
    }
}

fn window_decompose(w: &crate::lattice::LatticeWindow) -> Result<Outcome, Error> {
    if let Some(point) = lattice_mixed_delta_witness(w) {
        let value = lattice_mixed_delta_at(w, &point).expect("witness is evaluable");
        return Ok(Outcome::WindowViolation { point, value });
    }
    Ok(Outcome::WindowDecomposed {
        parts: lattice_decompose(w)?,
    })
}

fn star_check(instance: &Instance, bound: Option<usize>, convention: PremiseConvention) -> Result<Outcome, Error> {
    match instance {
        Instance::Finite { system, f, .. } => {
            let b = bound_or_default(bound, f.len());
            let options = StarOptions {
                convention,
                ..StarOptions::new(b)
            };
            Ok(from_verdict(check_star_with(system, f, options), b, convention))
        }
        Instance::Cyclic { modulus, shifts, f, .. } => {
            let b = bound.unwrap_or(f.len());
            Ok(from_verdict(
                check_star_abelian_bounded(Modulus::Finite(*modulus), shifts, f, b)?,
                b,
                PremiseConvention::Natural,
            ))
        }
        Instance::ZWindow { shifts, f } => {
            let b = bound.unwrap_or(f.len());
            Ok(from_verdict(
                check_star_abelian_bounded(Modulus::Infinite, shifts, f, b)?,
                b,
                PremiseConvention::Natural,
            ))
        }
        Instance::Lattice(w) => Ok(match lattice_mixed_delta_witness(w) {
            None => Outcome::Pass {
                bound: None,
                convention: PremiseConvention::Natural,
            },
            Some(point) => {
                let value = lattice_mixed_delta_at(w, &point).expect("witness is evaluable");
                Outcome::WindowViolation { point, value }
            }
        }),
    }
}

fn oracle(instance: &Instance) -> Result<Outcome, Error> {
    Ok(from_oracle(match instance {
        Instance::Finite { system, f, .. } | Instance::Cyclic { system, f, .. } => oracle_decompose(system, f),
        Instance::ZWindow { shifts, f } => z_window_oracle(shifts, f)?,
        Instance::Lattice(w) => lattice_oracle(w),
    }))
}

/// `[T]` or `[T, S]` from the instance, with `S` the identity when absent.
fn transfer_pair(instance: &Instance) -> Result<(Transformation, Transformation, &RationalFunction), Error> {
    let (system, g) = instance
        .system()
        .ok_or_else(|| Error::Precondition("bounded-transfer needs a finite or cyclic-group instance".into()))?;
    let ts = system.transforms();
    match ts.len() {
        1 => Ok((ts[0].clone(), Transformation::identity(g.len()), g)),
        2 => Ok((ts[0].clone(), ts[1].clone(), g)),
        n => Err(Error::Precondition(format!(
            "bounded-transfer takes one or two transformations, got {n}"
        ))),
    }
}

fn bounded_transfer(instance: &Instance) -> Result<Outcome, Error> {
    let (t, s, g) = transfer_pair(instance)?;
    Ok(match solve_bounded_transfer(&t, &s, g)? {
        Ok(b) => Outcome::Solved {
            solution: b.solution,
            bound_c: b.bound_c,
        },
        Err(certificate) => Outcome::Obstructed { certificate },
    })
}

fn run_search(args: &SearchArgs) -> Outcome {
    if let Some(path) = &args.verify {
        return match read_report(path) {
            Err(e) => input_outcome(e),
            Ok(report) => verify_search(&report),
        };
    }
    let config = SearchConfig {
        workers: args.workers,
        bound: args.bound,
        ..SearchConfig::new(args.n, args.max_size, args.trials, args.seed)
    };
    match search_counterexample(&config) {
        Ok(report) => Outcome::Searched { report },
        Err(e) => error_outcome(e),
    }
}

fn read_report(path: &Path) -> Result<Report, InputError> {
    let text = read_source(Some(path))?;
    serde_json::from_str(&text).map_err(|e| InputError::new(format!("certificate file {}: {e}", path.display())))
}

fn verify_search(report: &Report) -> Outcome {
    let Outcome::Searched { report: search } = &report.outcome else {
        return reject(format!(
            "expected a search report, got status {}",
            report.outcome.status()
        ));
    };
    for c in &search.candidates {
        if let Err(e) = c.verify() {
            return reject(format!("candidate from trial {}: {e}", c.trial));
        }
    }
    verified(&report.outcome)
}

fn verified(outcome: &Outcome) -> Outcome {
    Outcome::Verified {
        checked: outcome.status().to_string(),
    }
}

fn reject(reason: impl Into<String>) -> Outcome {
    Outcome::Rejected { reason: reason.into() }
}

fn verify_file(command: &Command, instance: &Instance, path: &Path, bound: Option<usize>) -> Outcome {
    match read_report(path) {
        Err(e) => input_outcome(e),
        Ok(report) if report.command != command.name() => reject(format!(
            "certificate was produced by {:?}, not {:?}",
            report.command,
            command.name()
        )),
        Ok(report) => match verify_outcome(command, instance, &report.outcome, bound) {
            Ok(()) => verified(&report.outcome),
            Err(reason) => reject(reason),
        },
    }
}

/// Re-checks a recorded outcome from scratch. Certificates are replayed
/// directly; verdicts without a certificate (pass, input error) are
/// recomputed and compared.
pub fn verify_outcome(
    command: &Command,
    instance: &Instance,
    outcome: &Outcome,
    bound: Option<usize>,
) -> Result<(), String> {
    match outcome {
        Outcome::Valid { size, transforms } => {
            let fresh = validate(instance);
            (fresh
                == Outcome::Valid {
                    size: *size,
                    transforms: *transforms,
                })
            .then_some(())
            .ok_or_else(|| format!("instance revalidates as {fresh:?}"))
        }
        Outcome::Pass { bound: b, .. } => {
            let convention = match command {
                Command::StarCheck { convention, .. } => (*convention).into(),
                _ => PremiseConvention::Natural,
            };
            match star_check(instance, b.or(bound), convention).map_err(|e| e.to_string())? {
                Outcome::Pass { .. } => Ok(()),
                other => Err(format!("Condition (*) recomputes as {}", other.status())),
            }
        }
        Outcome::Decomposed { parts, .. } => verify_parts(instance, parts),
        Outcome::WindowDecomposed { parts } => match instance {
            Instance::Lattice(w) => verify_lattice_parts(w, parts)
                .then_some(())
                .ok_or_else(|| "window parts do not sum to f or are not axis-invariant".to_string()),
            _ => Err("window parts for a non-lattice instance".into()),
        },
        Outcome::Violation { certificate } => match instance {
            Instance::Finite { system, f, .. } => certificate.replay(system, f),
            Instance::Cyclic { modulus, shifts, f, .. } => replay_cyclic(certificate, *modulus, shifts, f),
            Instance::ZWindow { shifts, f } => replay_z_window(certificate, shifts, f),
            Instance::Lattice(_) => Err(Error::Precondition(
                "star certificates do not apply to lattice windows".into(),
            )),
        }
        .map_err(|e| e.to_string()),
        Outcome::WindowViolation { point, value } => match instance {
            Instance::Lattice(w) => match lattice_mixed_delta_at(w, point) {
                Some(v) if v == *value && !v.is_zero() => Ok(()),
                Some(v) => Err(format!("mixed difference at {point:?} is {v}")),
                None => Err(format!("mixed difference is not evaluable at {point:?}")),
            },
            _ => Err("window violation for a non-lattice instance".into()),
        },
        Outcome::Infeasible { certificate } => {
            let result = match instance {
                Instance::Finite { system, f, .. } | Instance::Cyclic { system, f, .. } => {
                    certificate.verify(system, f)
                }
                Instance::ZWindow { shifts, f } => {
                    certificate.verify_partitions(&z_window_partitions(f.len(), shifts).map_err(|e| e.to_string())?, f)
                }
                Instance::Lattice(w) => certificate.verify_partitions(&lattice_partitions(w), w.values()),
            };
            result.map_err(|d| format!("dual certificate rejected: {d:?}"))
        }
        Outcome::Solved { solution, bound_c } => {
            let (t, s, g) = transfer_pair(instance).map_err(|e| e.to_string())?;
            if solution.len() != g.len() {
                return Err("solution has the wrong length".into());
            }
            if delta(&t, solution) != *g {
                return Err("Δ_T H differs from G".into());
            }
            if !is_invariant(&s, solution) {
                return Err("H is not S-invariant".into());
            }
            let c = partial_sum_bound(&t, g, 2 * g.len());
            if c != *bound_c {
                return Err(format!("partial-sum bound recomputes as {c}"));
            }
            let two_c = &c + &c;
            (solution.sup_norm() <= two_c)
                .then_some(())
                .ok_or_else(|| "‖H‖ exceeds 2C".to_string())
        }
        Outcome::Obstructed { certificate } => {
            let (t, s, g) = transfer_pair(instance).map_err(|e| e.to_string())?;
            certificate
                .replays(&t, &s, g)
                .then_some(())
                .ok_or_else(|| "relation or partial sum does not replay".to_string())
        }
        Outcome::InputError { message, .. } => {
            let fresh = dispatch(command, instance, bound);
            match fresh {
                Outcome::InputError { message: m, .. } if m == *message => Ok(()),
                other => Err(format!("instance now yields {}", other.status())),
            }
        }
        Outcome::Searched { .. } | Outcome::Verified { .. } | Outcome::Rejected { .. } => {
            Err(format!("status {} carries nothing to verify here", outcome.status()))
        }
    }
}

fn lattice_partitions(w: &crate::lattice::LatticeWindow) -> Vec<Partition> {
    (0..w.rank()).map(|axis| axis_lines(w.dims(), axis)).collect()
}

fn verify_parts(instance: &Instance, parts: &[RationalFunction]) -> Result<(), String> {
    let check_on = |partitions: &[Partition], f: &RationalFunction| -> Result<(), String> {
        if parts.len() != partitions.len() || parts.iter().any(|p| p.len() != f.len()) {
            return Err("parts have the wrong shape".into());
        }
        for (j, (p, classes)) in parts.iter().zip(partitions).enumerate() {
            if !classes.is_constant_on_classes(p) {
                return Err(format!("part {} is not invariant", j + 1));
            }
        }
        let total = parts.iter().fold(RationalFunction::zero(f.len()), |acc, p| &acc + p);
        (total == *f)
            .then_some(())
            .ok_or_else(|| "parts do not sum to f".to_string())
    };
    match instance {
        Instance::Finite { system, f, .. } | Instance::Cyclic { system, f, .. } => {
            verify_decomposition(system, f, &Decomposition::new(parts.to_vec())).map_err(|d| format!("{d:?}"))
        }
        Instance::ZWindow { shifts, f } => {
            check_on(&z_window_partitions(f.len(), shifts).map_err(|e| e.to_string())?, f)
        }
        Instance::Lattice(w) => check_on(&lattice_partitions(w), w.values()),
    }
}
