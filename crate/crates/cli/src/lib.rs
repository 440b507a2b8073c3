//! `mincontrol` command-line front end.
//!
//! [`run_with_env`] does all the work and returns the exit status with the
//! captured output, so tests drive the CLI without spawning processes.
//!
//! Exit status: 0 on success, 1 when the input is well formed but no
//! certified answer exists (infeasible, not simple, unverifiable,
//! uncontrollable), 2 on input or usage errors.

pub mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mincontrol::mcp::{solve_mcp, McpInput, McpSolution, Mode, SolveOptions};
use mincontrol::numerics::{left_eigenbasis, left_residual, norm, LeftEigenbasis};
use mincontrol::oracle::{brute_force_mcp, DEFAULT_N_LIMIT};
use mincontrol::problem::{perturb_nonzero_entries, ProblemFile};
use mincontrol::setcover::DEFAULT_EXACT_LIMIT;
use mincontrol::structural::{scc_dag, solve_mscp, solve_mscp_within, state_digraph};
use mincontrol::structure::{matrix_pattern, structural_geq, structural_pattern};
use mincontrol::verify::{kalman_test, pbh_eigenvalue_test, pbh_eigenvector_test, VerificationReport};
use mincontrol::{Complex64, ComplexDenseMatrix, Error, ToleranceOverrides, Tolerances};
use serde::Serialize;
use sha2::{Digest, Sha256};

use report::*;

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNSOLVED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Environment variables read for tolerance defaults.
pub const ENV_TOLERANCES: [&str; 5] = [
    "MINCONTROL_TOL_RESIDUAL",
    "MINCONTROL_TOL_GAP",
    "MINCONTROL_TOL_RANK",
    "MINCONTROL_TOL_ZERO",
    "MINCONTROL_TOL_TAU",
];

#[derive(Parser, Debug)]
#[command(name = "mincontrol", version, about = "Sparsest single-input placement for x' = Ax + bu")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit the machine-readable JSON report.
    #[arg(long, global = true)]
    json: bool,
    /// Leave timings out of the report (makes output reproducible).
    #[arg(long, global = true)]
    no_timings: bool,
    #[command(flatten)]
    tol: TolArgs,
}

/// Tolerance flags; they override the problem file, which overrides
/// `MINCONTROL_TOL_*`, which overrides the built-in defaults.
#[derive(Args, Debug, Default)]
struct TolArgs {
    #[arg(long, global = true, value_name = "X")]
    residual_tol: Option<f64>,
    #[arg(long, global = true, value_name = "X")]
    gap_tol: Option<f64>,
    #[arg(long, global = true, value_name = "X")]
    rank_tol: Option<f64>,
    #[arg(long, global = true, value_name = "X")]
    zero_tol: Option<f64>,
    #[arg(long, global = true, value_name = "X")]
    tau: Option<f64>,
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Problem file: JSON, or a whitespace-separated real matrix.
    problem: PathBuf,
    /// Add uniform noise from [-MAG, MAG] to every nonzero entry of A.
    #[arg(long, value_name = "MAG")]
    perturb: Option<f64>,
    /// Seed for --perturb.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sparsest input making (A, b) controllable.
    SolveMcp {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        /// Largest set-cover universe solved exactly.
        #[arg(long, default_value_t = DEFAULT_EXACT_LIMIT)]
        exact_limit: usize,
    },
    /// Sparsest structurally controlling input (A must have a full diagonal).
    SolveMscp {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Check controllability of a given input.
    Verify {
        #[command(flatten)]
        input: InputArgs,
        /// Comma-separated entries; complex ones as re:im, e.g. "0,1,0.5:-2".
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, value_enum, default_value_t = Method::All)]
        method: Method,
    },
    /// Brute-force minimum support (small n only).
    Oracle {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = DEFAULT_N_LIMIT)]
        n_limit: usize,
    },
    /// MCP against MSCP: support sizes and structural dominance.
    Compare {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
    },
    /// Left eigenbasis and eigenvector patterns.
    Eig {
        #[command(flatten)]
        input: InputArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Greedy,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Greedy => Mode::Greedy,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    All,
    PbhEig,
    PbhVec,
    Kalman,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::All => "all",
            Method::PbhEig => "pbh-eig",
            Method::PbhVec => "pbh-vec",
            Method::Kalman => "kalman",
        }
    }
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::SolveMcp { .. } => "solve-mcp",
            Command::SolveMscp { .. } => "solve-mscp",
            Command::Verify { .. } => "verify",
            Command::Oracle { .. } => "oracle",
            Command::Compare { .. } => "compare",
            Command::Eig { .. } => "eig",
        }
    }

    fn input(&self) -> &InputArgs {
        match self {
            Command::SolveMcp { input, .. }
            | Command::SolveMscp { input }
            | Command::Verify { input, .. }
            | Command::Oracle { input, .. }
            | Command::Compare { input, .. }
            | Command::Eig { input } => input,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with_env(args, |k| std::env::var(k).ok())
}

pub fn run_with_env<I, T>(args: I, env: impl Fn(&str) -> Option<String>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let command = cli.command.name();
    match execute(&cli, &env) {
        Ok(rendered) => rendered,
        Err(e) => {
            let code = exit_code(&e);
            let stdout = if cli.json {
                json_line(&ErrorReport {
                    schema_version: SCHEMA_VERSION,
                    command,
                    status: Status::Error,
                    error: ErrorInfo { kind: error_kind(&e), message: e.to_string() },
                })
            } else {
                String::new()
            };
            Outcome { code, stdout, stderr: format!("error: {e}\n") }
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotSimple { .. }
        | Error::EigensolveFailed(_)
        | Error::ZeroPattern(_)
        | Error::Infeasible(_)
        | Error::RepairFailed(_)
        | Error::VerificationFailed { .. }
        | Error::MissingSelfLoops(_)
        | Error::TooLarge { .. } => EXIT_UNSOLVED,
        _ => EXIT_INPUT,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::DimensionMismatch(_) | Error::Dimension(_) | Error::NotSquare { .. } => "dimension",
        Error::NonFinite { .. } | Error::Parse(_) => "parse",
        Error::NotSimple { .. } => "not_simple",
        Error::EigensolveFailed(_) => "eigensolve_failed",
        Error::EmptySupport => "empty_support",
        Error::IndexOutOfRange { .. } => "index_out_of_range",
        Error::TooLarge { .. } => "too_large",
        Error::InvalidInstance(_) => "invalid_instance",
        Error::ZeroPattern(_) => "zero_pattern",
        Error::Infeasible(_) => "infeasible",
        Error::RepairFailed(_) => "repair_failed",
        Error::VerificationFailed { .. } => "verification_failed",
        Error::InvalidEigenbasis(_) => "invalid_eigenbasis",
        Error::MissingSelfLoops(_) => "missing_self_loops",
        Error::InvalidConfig(_) => "invalid_config",
        Error::Io(_) => "io",
    }
}

fn json_line<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn env_overrides(env: &impl Fn(&str) -> Option<String>) -> mincontrol::Result<ToleranceOverrides> {
    let read = |key: &str| -> mincontrol::Result<Option<f64>> {
        match env(key) {
            None => Ok(None),
            Some(s) if s.trim().is_empty() => Ok(None),
            Some(s) => s
                .trim()
                .parse()
                .map(Some)
                .map_err(|_| Error::InvalidConfig(format!("{key}={s:?} is not a number"))),
        }
    };
    Ok(ToleranceOverrides {
        residual_tol: read(ENV_TOLERANCES[0])?,
        gap_tol: read(ENV_TOLERANCES[1])?,
        rank_tol: read(ENV_TOLERANCES[2])?,
        zero_tol: read(ENV_TOLERANCES[3])?,
        tau: read(ENV_TOLERANCES[4])?,
    })
}

struct Loaded {
    matrix: ComplexDenseMatrix,
    basis: Option<LeftEigenbasis>,
    tolerances: Tolerances,
    input: InputInfo,
    load_ms: f64,
}

fn load(cli: &Cli, env: &impl Fn(&str) -> Option<String>) -> mincontrol::Result<Loaded> {
    let start = Instant::now();
    let args = cli.command.input();
    let bytes = read_file(&args.problem)?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| Error::Parse(format!("{}: not valid UTF-8", args.problem.display())))?;
    let problem = ProblemFile::parse(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", args.problem.display())),
        Error::Dimension(msg) => Error::Dimension(format!("{}: {msg}", args.problem.display())),
        other => other,
    })?;

    let cli_tol = ToleranceOverrides {
        residual_tol: cli.tol.residual_tol,
        gap_tol: cli.tol.gap_tol,
        rank_tol: cli.tol.rank_tol,
        zero_tol: cli.tol.zero_tol,
        tau: cli.tol.tau,
    };
    let tolerances = cli_tol.apply(problem.tolerances.apply(env_overrides(env)?.apply(Tolerances::default())));
    tolerances.validate()?;

    let mut matrix = problem.matrix.clone();
    let mut perturbation = None;
    if let Some(magnitude) = args.perturb {
        if problem.eigenbasis.is_some() {
            return Err(Error::InvalidConfig(
                "--perturb cannot be combined with a supplied eigenbasis".into(),
            ));
        }
        matrix = perturb_nonzero_entries(&matrix, magnitude, args.seed)?;
        perturbation = Some(Perturbation { magnitude, seed: args.seed });
    }
    let basis = problem
        .eigenbasis
        .clone()
        .map(|pairs| LeftEigenbasis::user_supplied(pairs, tolerances.gap_tol))
        .transpose()?;

    Ok(Loaded {
        input: InputInfo {
            sha256: hex::encode(Sha256::digest(&bytes)),
            n: matrix.rows(),
            eigenbasis: if basis.is_some() { "supplied" } else { "computed" },
            perturbation,
        },
        matrix,
        basis,
        tolerances,
        load_ms: ms(start),
    })
}

fn read_file(path: &Path) -> mincontrol::Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Result of one command before rendering.
struct Done<B> {
    status: Status,
    body: B,
    solve_ms: f64,
}

fn execute(cli: &Cli, env: &impl Fn(&str) -> Option<String>) -> mincontrol::Result<Outcome> {
    let start = Instant::now();
    let loaded = load(cli, env)?;
    let out = match &cli.command {
        Command::SolveMcp { mode, exact_limit, .. } => {
            let done = cmd_solve_mcp(&loaded, (*mode).into(), *exact_limit)?;
            finish(cli, &loaded, done, start)
        }
        Command::SolveMscp { .. } => finish(cli, &loaded, cmd_solve_mscp(&loaded)?, start),
        Command::Verify { b, method, .. } => finish(cli, &loaded, cmd_verify(&loaded, b, *method)?, start),
        Command::Oracle { n_limit, .. } => finish(cli, &loaded, cmd_oracle(&loaded, *n_limit)?, start),
        Command::Compare { mode, .. } => finish(cli, &loaded, cmd_compare(&loaded, (*mode).into())?, start),
        Command::Eig { .. } => finish(cli, &loaded, cmd_eig(&loaded)?, start),
    };
    Ok(out)
}

fn finish<B: Serialize + TextBody>(cli: &Cli, loaded: &Loaded, done: Done<B>, start: Instant) -> Outcome {
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: cli.command.name(),
        status: done.status,
        input: loaded.input.clone(),
        tolerances: loaded.tolerances,
        body: done.body,
        timings: (!cli.no_timings).then(|| Timings {
            load_ms: loaded.load_ms,
            solve_ms: done.solve_ms,
            total_ms: ms(start),
        }),
    };
    let code = match done.status {
        Status::Ok => EXIT_OK,
        _ => EXIT_UNSOLVED,
    };
    let stderr = match done.status {
        Status::Unverified => "error: result could not be certified under the reported tolerances\n".to_string(),
        _ => String::new(),
    };
    let stdout = if cli.json { json_line(&report) } else { report.to_text() };
    Outcome { code, stdout, stderr }
}

fn mcp_solution(loaded: &Loaded, mode: Mode, exact_limit: usize) -> mincontrol::Result<(McpSolution, bool)> {
    let options = SolveOptions {
        tolerances: loaded.tolerances,
        exact_limit,
        ..SolveOptions::default()
    };
    let input = match &loaded.basis {
        Some(basis) => McpInput::Basis { basis, matrix: Some(&loaded.matrix) },
        None => McpInput::Matrix(&loaded.matrix),
    };
    match solve_mcp(input, mode, &options) {
        Ok(s) => Ok((s, true)),
        Err(Error::VerificationFailed { solution, .. }) => Ok((*solution, false)),
        Err(e) => Err(e),
    }
}

fn cmd_solve_mcp(loaded: &Loaded, mode: Mode, exact_limit: usize) -> mincontrol::Result<Done<McpBody>> {
    let start = Instant::now();
    let (s, verified) = mcp_solution(loaded, mode, exact_limit)?;
    let solve_ms = ms(start);
    let body = McpBody {
        mode,
        eigenvalues: complex_list(&s.eigenbasis.eigenvalues()),
        patterns: s.patterns.iter().map(ToString::to_string).collect(),
        instance: InstanceJson {
            universe_size: s.instance.universe_size(),
            sets: s.instance.sets().iter().map(|set| one_based(set)).collect(),
        },
        cover: CoverJson {
            indices: one_based(&s.cover.indices),
            size: s.cover.len(),
            exact: s.cover.exact,
        },
        pattern: s.pattern.to_string(),
        b: complex_list(&s.vector),
        realization: TraceJson {
            corrections: s.trace.corrections.clone(),
            repairs: s.trace.repairs.iter().map(|&(k, l)| [k + 1, l]).collect(),
        },
        verification: (&s.certificate).into(),
    };
    Ok(Done {
        status: if verified { Status::Ok } else { Status::Unverified },
        body,
        solve_ms,
    })
}

fn cmd_solve_mscp(loaded: &Loaded) -> mincontrol::Result<Done<MscpBody>> {
    let start = Instant::now();
    let pattern = matrix_pattern(&loaded.matrix, loaded.tolerances.zero_tol);
    let solution = solve_mscp(&pattern)?;
    let dag = scc_dag(&state_digraph(&pattern)?);
    let body = MscpBody {
        matrix_pattern: pattern.row_strings(),
        components: dag
            .components
            .iter()
            .zip(&dag.non_top_linked)
            .map(|(c, &ntl)| ComponentJson { states: one_based(c), top_linked: !ntl })
            .collect(),
        non_top_linked: dag.non_top_linked.iter().filter(|&&f| f).count(),
        pattern: solution.to_string(),
        support: one_based(&solution.support()),
        size: solution.zero_norm(),
    };
    Ok(Done { status: Status::Ok, body, solve_ms: ms(start) })
}

/// Parses "0,1,0.5:-2" into complex entries.
pub fn parse_vector(text: &str) -> mincontrol::Result<Vec<Complex64>> {
    text.split(',')
        .enumerate()
        .map(|(i, item)| {
            let item = item.trim();
            let bad = || Error::Parse(format!("--b entry {}: {item:?} is not a number or re:im pair", i + 1));
            let z = match item.split_once(':') {
                Some((re, im)) => Complex64::new(
                    re.trim().parse().map_err(|_| bad())?,
                    im.trim().parse().map_err(|_| bad())?,
                ),
                None => Complex64::new(item.parse().map_err(|_| bad())?, 0.0),
            };
            if z.re.is_finite() && z.im.is_finite() {
                Ok(z)
            } else {
                Err(bad())
            }
        })
        .collect()
}

fn basis_for(loaded: &Loaded) -> mincontrol::Result<LeftEigenbasis> {
    match &loaded.basis {
        Some(b) => Ok(b.clone()),
        None => left_eigenbasis(&loaded.matrix, loaded.tolerances.residual_tol, loaded.tolerances.gap_tol),
    }
}

fn cmd_verify(loaded: &Loaded, b_text: &str, method: Method) -> mincontrol::Result<Done<VerifyBody>> {
    let start = Instant::now();
    let a = &loaded.matrix;
    let t = &loaded.tolerances;
    let b = parse_vector(b_text)?;
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "--b has {} entries for a {n}x{n} matrix",
            b.len(),
            n = a.rows()
        )));
    }
    let needs_basis = matches!(method, Method::All | Method::PbhEig | Method::PbhVec);
    let basis = needs_basis.then(|| basis_for(loaded)).transpose()?;
    let kalman = matches!(method, Method::All | Method::Kalman)
        .then(|| kalman_test(a, &b, t.rank_tol))
        .transpose()?;
    let pbh_eigenvalue = match (method, &basis) {
        (Method::All | Method::PbhEig, Some(basis)) => Some(pbh_eigenvalue_test(a, &b, &basis.eigenvalues(), t.rank_tol)?),
        _ => None,
    };
    let pbh_eigenvector = match (method, &basis) {
        (Method::All | Method::PbhVec, Some(basis)) => Some(pbh_eigenvector_test(basis, &b, t.tau)?),
        _ => None,
    };
    let verdicts: Vec<bool> = [
        kalman.as_ref().map(|k| k.controllable),
        pbh_eigenvalue.as_ref().map(|p| p.controllable),
        pbh_eigenvector.as_ref().map(|p| p.controllable),
    ]
    .into_iter()
    .flatten()
    .collect();
    let report = VerificationReport {
        consistent: verdicts.windows(2).all(|w| w[0] == w[1]),
        pbh_eigenvalue,
        pbh_eigenvector,
        kalman,
        tolerances: *t,
    };
    let verification: VerificationJson = (&report).into();
    Ok(Done {
        status: if verification.controllable { Status::Ok } else { Status::Uncontrollable },
        body: VerifyBody { method: method.name(), b: complex_list(&b), verification },
        solve_ms: ms(start),
    })
}

fn cmd_oracle(loaded: &Loaded, n_limit: usize) -> mincontrol::Result<Done<OracleBody>> {
    let start = Instant::now();
    let result = brute_force_mcp(&loaded.matrix, n_limit, &loaded.tolerances)?;
    let mut body = OracleBody::from(&result);
    body.n_limit = n_limit;
    Ok(Done {
        status: if body.all_verified { Status::Ok } else { Status::Unverified },
        body,
        solve_ms: ms(start),
    })
}

fn cmd_compare(loaded: &Loaded, mode: Mode) -> mincontrol::Result<Done<CompareBody>> {
    let start = Instant::now();
    let (mcp, verified) = mcp_solution(loaded, mode, DEFAULT_EXACT_LIMIT)?;
    let pattern = matrix_pattern(&loaded.matrix, loaded.tolerances.zero_tol);
    let mscp = solve_mscp_within(&pattern, &mcp.pattern)?;
    let dominance = structural_geq(&mcp.pattern, &mscp)? && mcp.pattern.zero_norm() >= mscp.zero_norm();
    let side = |p: &mincontrol::StructuralVector| CompareSide {
        support: one_based(&p.support()),
        size: p.zero_norm(),
        pattern: p.to_string(),
    };
    let body = CompareBody {
        mode,
        mcp: side(&mcp.pattern),
        mcp_verified: verified,
        mscp: side(&mscp),
        dominance,
        extra_states: mcp.pattern.zero_norm() as isize - mscp.zero_norm() as isize,
    };
    Ok(Done {
        status: if dominance { Status::Ok } else { Status::Unverified },
        body,
        solve_ms: ms(start),
    })
}

fn cmd_eig(loaded: &Loaded) -> mincontrol::Result<Done<EigBody>> {
    let start = Instant::now();
    let basis = basis_for(loaded)?;
    let pairs = basis
        .pairs()
        .iter()
        .map(|p| EigenPairJson {
            value: p.value.into(),
            vector: complex_list(&p.vector),
            pattern: structural_pattern(&p.vector, loaded.tolerances.zero_tol).to_string(),
            residual: left_residual(&loaded.matrix, p) / norm(&p.vector),
        })
        .collect();
    Ok(Done { status: Status::Ok, body: EigBody { pairs }, solve_ms: ms(start) })
}
