//! Argument parsing and subcommand dispatch for the `ncyclic` binary.
//!
//! Every subcommand except `gen` prints a [`RunReport`] as JSON. Exit codes:
//! 0 when every check passes, 1 on a mathematical failure (a violating cycle,
//! a negative transport value, a failed certificate), 2 on usage, I/O or
//! parse errors.

pub mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ncyclic::generate::{child_seed, generate_example, ExampleKind, ExampleParams, STREAM_SEARCH};
use ncyclic::hamiltonian::{
    antisymmetrize, build_maximal_h, build_psi, build_two_var_f, lift_f_to_h, verify_dualrep_with_tol, LiftVariant,
    DEFAULT_FIXED_POINT_TOL, DEFAULT_MAX_ITER, REPORT_TOL,
};
use ncyclic::monotonicity::{check_all_orders, check_joint, check_single, check_step, SearchMethod, Verdict};
use ncyclic::transport::{
    duality_gap, solve_involution_polar, solve_sigma_kantorovich, violating_cycle, InvolutionMethod,
    EXACT_MAX_POINTS,
};
use ncyclic::{io, Error, FieldTuple, GridHamiltonian, NInvolution, VectorField};

pub use report::{Check, InputDigest, RunReport, SEED_SCHEME};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Default tolerance on values that must be nonnegative.
pub const VALUE_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "ncyclic", version, about = "Cyclic and joint monotonicity certificates for sampled vector fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search for cycles violating a monotonicity condition.
    Check(CheckArgs),
    #[command(subcommand)]
    Hamiltonian(HamiltonianCommand),
    #[command(subcommand)]
    Transport(TransportCommand),
    #[command(subcommand)]
    Involution(InvolutionCommand),
    #[command(subcommand)]
    Duality(DualityCommand),
    /// Write a seeded example fields file.
    Gen(GenArgs),
    /// Run every stage on one fields file.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Joint,
    Single,
    Step,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Enum,
    Bellman,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Joint)]
    pub mode: Mode,
    /// Cycle length; defaults to the order of the fields file.
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub step: usize,
    #[arg(long, default_value_t = ncyclic::monotonicity::DEFAULT_TOL)]
    pub tolerance: f64,
    #[arg(long, value_enum, default_value_t = Method::Bellman)]
    pub method: Method,
    /// Field slot (1-based) used by the single-field modes.
    #[arg(long, default_value_t = 1)]
    pub field: usize,
}

#[derive(Debug, Subcommand)]
pub enum HamiltonianCommand {
    /// Build the fixed-point Hamiltonian and certify the representation.
    Build(BuildArgs),
    /// Certify the representation of a fields file by a stored Hamiltonian.
    Verify(VerifyArgs),
    /// Build the two-variable F of a field and lift it to N variables.
    LiftF(LiftArgs),
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_FIXED_POINT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    pub max_iter: usize,
    /// Write the Hamiltonian tensor here.
    #[arg(long)]
    pub emit: Option<PathBuf>,
    /// Write the antisymmetrized tensor here.
    #[arg(long)]
    pub emit_antisymmetric: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub hamiltonian: PathBuf,
    #[arg(long)]
    pub fields: PathBuf,
    #[arg(long, default_value_t = REPORT_TOL)]
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Printed,
    Corrected,
}

#[derive(Debug, Args)]
pub struct LiftArgs {
    /// Fields file; F is built from the slot given by `--field`.
    #[arg(long, conflicts_with = "tensor", required_unless_present = "tensor")]
    pub input: Option<PathBuf>,
    /// Two-variable tensor to lift directly.
    #[arg(long)]
    pub tensor: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub field: usize,
    /// Number of variables; defaults to the order of the fields file.
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long, value_enum, default_value_t = Variant::Corrected)]
    pub variant: Variant,
    #[arg(long, default_value_t = VALUE_TOL)]
    pub tolerance: f64,
    #[arg(long)]
    pub emit: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum TransportCommand {
    /// Solve the sigma-invariant transport program.
    Solve(TransportArgs),
}

#[derive(Debug, Args)]
pub struct TransportArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Write the optimal coupling here.
    #[arg(long)]
    pub emit: Option<PathBuf>,
    #[arg(long, default_value_t = VALUE_TOL)]
    pub tolerance: f64,
}

#[derive(Debug, Subcommand)]
pub enum InvolutionCommand {
    /// Minimize the polar objective over permutations with S^N = I.
    Solve(InvolutionArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolveMethod {
    Exact,
    Local,
}

#[derive(Debug, Args)]
pub struct InvolutionArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = SolveMethod::Exact)]
    pub method: SolveMethod,
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = VALUE_TOL)]
    pub tolerance: f64,
}

#[derive(Debug, Subcommand)]
pub enum DualityCommand {
    /// Build H, antisymmetrize it and evaluate the duality gap at the identity.
    Verify(DualityArgs),
}

#[derive(Debug, Args)]
pub struct DualityArgs {
    #[arg(long)]
    pub fields: PathBuf,
    #[arg(long, default_value_t = DEFAULT_FIXED_POINT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    pub max_iter: usize,
    #[arg(long, default_value_t = VALUE_TOL)]
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Gradient,
    Rotation,
    Triplet4,
    RandomMonotone,
    Random,
}

impl From<Kind> for ExampleKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Gradient => ExampleKind::Gradient,
            Kind::Rotation => ExampleKind::Rotation,
            Kind::Triplet4 => ExampleKind::Triplet4,
            Kind::RandomMonotone => ExampleKind::RandomMonotone,
            Kind::Random => ExampleKind::Random,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long)]
    pub m: usize,
    #[arg(long, visible_alias = "dimension", default_value_t = 2)]
    pub dim: usize,
    #[arg(long)]
    pub order: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Evenly spaced points on [0, 1] (dimension 1 only).
    #[arg(long)]
    pub regular: bool,
    /// Write here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PipelineMethod {
    /// Exact for at most eight points, local search otherwise.
    Auto,
    Exact,
    Local,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Expected order; must match the fields file when given.
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = PipelineMethod::Auto)]
    pub method: PipelineMethod,
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    #[arg(long, default_value_t = DEFAULT_FIXED_POINT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    pub max_iter: usize,
    #[arg(long, default_value_t = VALUE_TOL)]
    pub tolerance: f64,
}

/// Usage, I/O and parse problems; always exit code 2.
#[derive(Debug)]
pub struct CliError(pub String);

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError(e.to_string())
    }
}

pub enum Output {
    Report(RunReport),
    Text(String),
}

impl Output {
    pub fn exit_code(&self) -> i32 {
        match self {
            Output::Report(r) if !r.passed => EXIT_FAILURE,
            _ => EXIT_PASS,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Errors that describe the input mathematically rather than a broken run.
fn is_math_failure(e: &Error) -> bool {
    matches!(e, Error::NotMonotone { .. } | Error::NoConvergence { .. })
}

/// `Err` for usage errors; mathematical failures become a failing check.
fn failed_check(name: &str, op: &'static str, e: Error) -> CliResult<Check> {
    if is_math_failure(&e) {
        Ok(Check::new(name, op, false).details(serde_json::json!({ "error": e.to_string() })))
    } else {
        Err(e.into())
    }
}

fn read_input(path: &Path, report: &mut RunReport) -> CliResult<String> {
    let bytes = std::fs::read(path).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
    report.inputs.push(InputDigest::of(&path.display().to_string(), &bytes));
    String::from_utf8(bytes).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

fn load_fields(path: &Path, report: &mut RunReport) -> CliResult<FieldTuple> {
    let text = read_input(path, report)?;
    let parsed = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        io::parse_fields_csv(&text)
    } else {
        io::parse_fields_json(&text)
    };
    parsed.map_err(|e| CliError(format!("{}: {e}", path.display())))
}

fn load_tensor(path: &Path, report: &mut RunReport) -> CliResult<GridHamiltonian> {
    let text = read_input(path, report)?;
    io::parse_tensor_json(&text).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

fn field_slot(fields: &FieldTuple, slot: usize) -> CliResult<VectorField> {
    if slot == 0 || slot >= fields.order() {
        return Err(CliError(format!(
            "--field must lie in 1..={}",
            fields.order() - 1
        )));
    }
    Ok(fields.component(slot - 1))
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, std::time::Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn verdict_check(name: &str, op: &'static str, v: Verdict) -> Check {
    match v {
        Verdict::Pass => Check::new(name, op, true),
        Verdict::Witness(w) => Check::new(name, op, false).value(w.defect).witness(&w),
    }
}

/// Runs a parsed command line. `argv` is echoed into the report.
pub fn run(cli: &Cli, argv: &[String]) -> CliResult<Output> {
    let start = Instant::now();
    let mut command = vec!["ncyclic".to_string()];
    command.extend(argv.iter().skip(1).cloned());
    let mut report = RunReport::new(command);
    match &cli.command {
        Command::Gen(a) => return gen(a).map(Output::Text),
        Command::Check(a) => check(a, &mut report)?,
        Command::Hamiltonian(HamiltonianCommand::Build(a)) => hamiltonian_build(a, &mut report)?,
        Command::Hamiltonian(HamiltonianCommand::Verify(a)) => hamiltonian_verify(a, &mut report)?,
        Command::Hamiltonian(HamiltonianCommand::LiftF(a)) => lift(a, &mut report)?,
        Command::Transport(TransportCommand::Solve(a)) => transport(a, &mut report)?,
        Command::Involution(InvolutionCommand::Solve(a)) => involution(a, &mut report)?,
        Command::Duality(DualityCommand::Verify(a)) => duality(a, &mut report)?,
        Command::Pipeline(a) => pipeline(a, &mut report)?,
    }
    report.timing.total_seconds = start.elapsed().as_secs_f64();
    Ok(Output::Report(report))
}

fn gen(a: &GenArgs) -> CliResult<String> {
    let params = ExampleParams {
        regular: a.regular,
        ..ExampleParams::new(a.kind.into(), a.m, a.dim, a.order, a.seed)
    };
    let text = io::fields_to_json(&generate_example(&params)?) + "\n";
    match &a.output {
        Some(p) => {
            write_file(p, &text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn check(a: &CheckArgs, report: &mut RunReport) -> CliResult<()> {
    let fields = load_fields(&a.input, report)?;
    let order = a.order.unwrap_or(fields.order());
    let method = match a.method {
        Method::Enum => SearchMethod::Enumerate,
        Method::Bellman => SearchMethod::NegativeCycle,
    };
    let (verdict, op, dt) = match a.mode {
        Mode::Joint => {
            if order != fields.order() {
                return Err(CliError(format!(
                    "--order {order} does not match the {} fields of an order-{} file",
                    fields.order() - 1,
                    fields.order()
                )));
            }
            let (v, dt) = timed(|| check_joint(&fields, a.tolerance));
            (v?, "monotonicity::check_joint", dt)
        }
        Mode::Single => {
            let u = field_slot(&fields, a.field)?;
            let (v, dt) = timed(|| check_single(&u, order, a.tolerance, method));
            (v?, "monotonicity::check_single", dt)
        }
        Mode::Step => {
            let u = field_slot(&fields, a.field)?;
            let (v, dt) = timed(|| check_step(&u, order, a.step, a.tolerance));
            (v?, "monotonicity::check_step", dt)
        }
        Mode::All => {
            let u = field_slot(&fields, a.field)?;
            let (v, dt) = timed(|| check_all_orders(&u, a.tolerance));
            (v?, "monotonicity::check_all_orders", dt)
        }
    };
    let name = match a.mode {
        Mode::Joint => "joint_monotone",
        Mode::Single => "cyclic_monotone",
        Mode::Step => "step_monotone",
        Mode::All => "all_orders_monotone",
    };
    report.push(verdict_check(name, op, verdict), dt);
    Ok(())
}

/// Pushes the build and representation checks; returns `H` when it was built.
fn push_maximal_h(
    fields: &FieldTuple,
    tol: f64,
    max_iter: usize,
    report: &mut RunReport,
) -> CliResult<Option<GridHamiltonian>> {
    let (built, dt) = timed(|| build_maximal_h(fields, tol, max_iter));
    match built {
        Ok((h, rep)) => {
            let it = rep.iteration.clone().expect("iteration summary");
            report.push(
                Check::new("fixed_point_h", "hamiltonian::build_maximal_h", it.fixed_point_residual < tol)
                    .residual(it.fixed_point_residual)
                    .details(&it),
                dt,
            );
            report.push(
                Check::new(
                    "antisymmetrized_h",
                    "hamiltonian::antisymmetrize",
                    rep.antisymmetrized.rotation_residual <= 1e-12,
                )
                .residual(rep.antisymmetrized.rotation_residual)
                .details(&rep.antisymmetrized),
                std::time::Duration::ZERO,
            );
            report.push(
                Check::new("dual_representation", "hamiltonian::verify_dualrep", rep.passed)
                    .residual(rep.max_dualrep_residual())
                    .details(&rep),
                std::time::Duration::ZERO,
            );
            Ok(Some(h))
        }
        Err(e) => {
            report.push(failed_check("fixed_point_h", "hamiltonian::build_maximal_h", e)?, dt);
            Ok(None)
        }
    }
}

fn hamiltonian_build(a: &BuildArgs, report: &mut RunReport) -> CliResult<()> {
    let fields = load_fields(&a.input, report)?;
    if let Some(h) = push_maximal_h(&fields, a.tol, a.max_iter, report)? {
        if let Some(p) = &a.emit {
            write_file(p, &io::tensor_to_json(&h))?;
        }
        if let Some(p) = &a.emit_antisymmetric {
            write_file(p, &io::tensor_to_json(&antisymmetrize(&h)?))?;
        }
    }
    Ok(())
}

fn hamiltonian_verify(a: &VerifyArgs, report: &mut RunReport) -> CliResult<()> {
    let h = load_tensor(&a.hamiltonian, report)?;
    let fields = load_fields(&a.fields, report)?;
    let (rep, dt) = timed(|| verify_dualrep_with_tol(&h, &fields, a.tolerance));
    let rep = rep?;
    report.push(
        Check::new("dual_representation", "hamiltonian::verify_dualrep", rep.passed)
            .residual(rep.max_dualrep_residual())
            .details(&rep),
        dt,
    );
    Ok(())
}

fn lift(a: &LiftArgs, report: &mut RunReport) -> CliResult<()> {
    let (f, order) = match (&a.input, &a.tensor) {
        (Some(path), _) => {
            let fields = load_fields(path, report)?;
            let order = a.order.unwrap_or(fields.order());
            let u = field_slot(&fields, a.field)?;
            let (built, dt) = timed(|| build_two_var_f(&u, order, a.tolerance));
            match built {
                Ok((f, rep)) => {
                    report.push(
                        Check::new("two_variable_f", "hamiltonian::build_two_var_f", rep.passed)
                            .residual(rep.max_cycle_sum.max(0.0))
                            .details(&rep),
                        dt,
                    );
                    (f, order)
                }
                Err(e) => {
                    report.push(failed_check("two_variable_f", "hamiltonian::build_two_var_f", e)?, dt);
                    return Ok(());
                }
            }
        }
        (None, Some(path)) => {
            let f = load_tensor(path, report)?;
            let order = a.order.ok_or_else(|| CliError("--order is required with --tensor".into()))?;
            (f, order)
        }
        (None, None) => return Err(CliError("one of --input or --tensor is required".into())),
    };
    let variant = match a.variant {
        Variant::Printed => LiftVariant::Printed,
        Variant::Corrected => LiftVariant::Corrected,
    };
    let ((h, rep), dt) = {
        let (r, dt) = timed(|| lift_f_to_h(&f, order, variant));
        (r?, dt)
    };
    report.push(
        Check::new("lift_antisymmetric", "hamiltonian::lift_f_to_h", rep.antisymmetric)
            .residual(rep.max_abs_rotation_sum)
            .details(&rep),
        dt,
    );
    if let Some(p) = &a.emit {
        write_file(p, &io::tensor_to_json(&h))?;
    }
    Ok(())
}

fn push_transport(fields: &FieldTuple, tol: f64, emit: Option<&Path>, report: &mut RunReport) -> CliResult<()> {
    let (res, dt) = timed(|| solve_sigma_kantorovich(fields));
    let res = res?;
    let pass = res.value >= -tol;
    let mut c = Check::new("sigma_kantorovich", "transport::solve_sigma_kantorovich", pass)
        .value(res.value)
        .residual(res.diagnostics.lp_residual)
        .details(&res.diagnostics);
    if !pass {
        if let Some(w) = violating_cycle(fields, &res.coupling, tol)? {
            c = c.witness(&w);
        }
    }
    report.push(c, dt);
    if let Some(p) = emit {
        write_file(p, &io::coupling_to_json(&res.coupling))?;
    }
    Ok(())
}

fn transport(a: &TransportArgs, report: &mut RunReport) -> CliResult<()> {
    let fields = load_fields(&a.input, report)?;
    push_transport(&fields, a.tolerance, a.emit.as_deref(), report)
}

fn push_involution(
    fields: &FieldTuple,
    method: InvolutionMethod,
    seed: u64,
    tol: f64,
    report: &mut RunReport,
) -> CliResult<()> {
    let (res, dt) = timed(|| solve_involution_polar(fields, method, child_seed(seed, STREAM_SEARCH)));
    let res = res?;
    let pass = res.value >= -tol;
    let mut c = Check::new("involution_polar", "transport::solve_involution_polar", pass)
        .value(res.value)
        .details(&res);
    if !pass {
        c = c.witness(serde_json::json!({ "involution": res.involution.perm(), "value": res.value }));
    }
    report.push(c, dt);
    Ok(())
}

fn involution(a: &InvolutionArgs, report: &mut RunReport) -> CliResult<()> {
    let fields = load_fields(&a.input, report)?;
    report.with_seed(a.seed);
    let method = match a.method {
        SolveMethod::Exact => InvolutionMethod::Exact,
        SolveMethod::Local => InvolutionMethod::Local { restarts: a.restarts },
    };
    push_involution(&fields, method, a.seed, a.tolerance, report)
}

fn push_gap(fields: &FieldTuple, h: &GridHamiltonian, tol: f64, report: &mut RunReport) -> CliResult<()> {
    let ((gap, bar), dt) = {
        let (r, dt) = timed(|| -> ncyclic::Result<(f64, GridHamiltonian)> {
            let bar = antisymmetrize(h)?;
            let id = NInvolution::identity(fields.domain().len(), fields.order());
            Ok((duality_gap(fields, &bar, &id)?, bar))
        });
        (r?, dt)
    };
    report.push(
        Check::new("duality_gap", "transport::duality_gap", gap.abs() <= tol)
            .value(gap)
            .residual(gap.abs())
            .details(serde_json::json!({
                "involution": "identity",
                "antisymmetric_rotation_residual": bar.max_abs_rotation_sum(),
            })),
        dt,
    );
    Ok(())
}

fn duality(a: &DualityArgs, report: &mut RunReport) -> CliResult<()> {
    let fields = load_fields(&a.fields, report)?;
    if let Some(h) = push_maximal_h(&fields, a.tol, a.max_iter, report)? {
        push_gap(&fields, &h, a.tolerance, report)?;
    }
    Ok(())
}

fn stop_if_failed(report: &mut RunReport) -> bool {
    if report.passed {
        return false;
    }
    report.stopped_after = report.checks.last().map(|c| c.name.clone());
    true
}

fn pipeline(a: &PipelineArgs, report: &mut RunReport) -> CliResult<()> {
    let fields = load_fields(&a.input, report)?;
    report.with_seed(a.seed);
    if let Some(n) = a.order {
        if n != fields.order() {
            return Err(CliError(format!(
                "--order {n} does not match the fields file (order {})",
                fields.order()
            )));
        }
    }
    let (v, dt) = timed(|| check_joint(&fields, ncyclic::monotonicity::DEFAULT_TOL));
    report.push(verdict_check("joint_monotone", "monotonicity::check_joint", v?), dt);
    if stop_if_failed(report) {
        return Ok(());
    }

    let (psi, dt) = timed(|| build_psi(&fields));
    let (_, psi) = psi?;
    report.push(
        Check::new("psi", "hamiltonian::build_psi", psi.all_hold())
            .residual(psi.max_rotation_sum.max(0.0))
            .details(&psi),
        dt,
    );
    if stop_if_failed(report) {
        return Ok(());
    }

    let Some(h) = push_maximal_h(&fields, a.tol, a.max_iter, report)? else {
        stop_if_failed(report);
        return Ok(());
    };
    if stop_if_failed(report) {
        return Ok(());
    }

    push_transport(&fields, a.tolerance, None, report)?;
    let method = match a.method {
        PipelineMethod::Exact => InvolutionMethod::Exact,
        PipelineMethod::Local => InvolutionMethod::Local { restarts: a.restarts },
        PipelineMethod::Auto if fields.domain().len() <= EXACT_MAX_POINTS => InvolutionMethod::Exact,
        PipelineMethod::Auto => InvolutionMethod::Local { restarts: a.restarts },
    };
    if fields.domain().is_uniform() {
        push_involution(&fields, method, a.seed, a.tolerance, report)?;
        push_gap(&fields, &h, a.tolerance, report)?;
    }
    Ok(())
}
