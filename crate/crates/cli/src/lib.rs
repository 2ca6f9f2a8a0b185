//! Command-line front end for the g2toolkit library.
//!
//! Exit codes: 0 on success, 1 when a verdict is false or a residual is
//! above threshold, 2 on usage errors.

pub mod output;
pub mod parse;

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use g2toolkit::audit::{run_audit, AuditReport};
use g2toolkit::coflow::{
    self, modified_soliton_residual, soliton_solve, CoclosedParams, FlowOptions, FlowSample, FlowStatus,
    FlowTrajectory, SolitonSolution,
};
use g2toolkit::g2::{closed_triple, erp_residual_with, torsion_report, G2Structure, TorsionReport};
use g2toolkit::liealg::{check_compatible_with, homothety_f, BracketTriple, CompatibilityReport};
use g2toolkit::numberlat::{certify_lattice, examples, LatticeCertificate, QuarticPoly, UnitSpec};
use g2toolkit::numerics::Tolerances;

use output::Format;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] g2toolkit::Error),
    #[error("output: {0}")]
    Output(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Core(_) => 2,
            CliError::Output(_) => 1,
        }
    }
}

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "g2toolkit", version, about = "G2-structures on solvable Lie groups: lattices, torsion, coflow")]
pub struct Cli {
    /// Residual threshold for pass/fail verdicts.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certify that integer unit matrices generate a lattice.
    VerifyLattice(LatticeArgs),
    /// Torsion forms, torsion class and homothety invariant of a structure.
    Torsion(TripleArgs),
    /// Extremally-Ricci-pinched residual of a closed structure.
    ErpCheck(TripleArgs),
    /// Closed-form coflow solitons over a base 4-tuple.
    Soliton(SolitonArgs),
    /// Integrate the coflow on the coclosed family.
    Flow(FlowArgs),
    /// Re-evaluate printed claims and report agreement.
    Audit,
}

#[derive(Debug, Args)]
pub struct LatticeArgs {
    /// Built-in data set: kl-2015 or kl-sqrt3.
    #[arg(long, conflicts_with_all = ["poly", "unit"])]
    pub example: Option<String>,
    /// a0,a1,a2,a3 for t⁴ + a3 t³ + a2 t² + a1 t + a0.
    #[arg(long, allow_hyphen_values = true)]
    pub poly: Option<String>,
    /// q0,q1,q2,q3 for q0 + q1 u + q2 u² + q3 u³; give exactly three.
    #[arg(long, allow_hyphen_values = true)]
    pub unit: Vec<String>,
    /// Square the given units before building matrices.
    #[arg(long)]
    pub square: bool,
}

#[derive(Debug, Args)]
pub struct TripleArgs {
    /// Matrix for e7 (rows ';', entries ','; one row = diagonal).
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    /// a,b,c for the closed diagonal family.
    #[arg(long, allow_hyphen_values = true)]
    pub closed: Option<String>,
    /// a1,a2,b1,b2,c1,c2 for the coclosed family.
    #[arg(long, allow_hyphen_values = true)]
    pub params: Option<String>,
}

#[derive(Debug, Args)]
pub struct SolitonArgs {
    /// a1,a2,b1,b2
    #[arg(long, allow_hyphen_values = true)]
    pub base: String,
    /// Also report the modified-coflow residual for this m.
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    /// a1,a2,b1,b2,c1,c2
    #[arg(long, allow_hyphen_values = true, required_unless_present = "sweep")]
    pub init: Option<String>,
    #[arg(long, default_value_t = 10.0)]
    pub t_max: f64,
    /// File with one initial state per line; runs in parallel.
    #[arg(long, conflicts_with = "init")]
    pub sweep: Option<PathBuf>,
    /// Worker threads for --sweep (default: available cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Trailing window for convergence detection.
    #[arg(long, default_value_t = 10.0)]
    pub window: f64,
}

impl TripleArgs {
    pub fn triple(&self) -> Result<BracketTriple, CliError> {
        let matrices = [&self.a, &self.b, &self.c];
        let given = [matrices.iter().any(|m| m.is_some()), self.closed.is_some(), self.params.is_some()];
        if given.iter().filter(|&&g| g).count() != 1 {
            return Err(CliError::Usage(
                "give exactly one of --a/--b/--c, --closed or --params".to_string(),
            ));
        }
        if let Some(c) = &self.closed {
            let [a, b, c] = parse::floats_n::<3>(c, "--closed")?;
            return Ok(closed_triple(a, b, c));
        }
        if let Some(p) = &self.params {
            return Ok(CoclosedParams::from_array(parse::floats_n::<6>(p, "--params")?).triple());
        }
        let m = |s: &Option<String>, name: &str| match s {
            Some(s) => parse::matrix4(s),
            None => Err(CliError::Usage(format!("missing --{name}"))),
        };
        Ok(BracketTriple::new(m(&self.a, "a")?, m(&self.b, "b")?, m(&self.c, "c")?)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorsionOutput {
    pub closed: bool,
    pub coclosed: bool,
    pub torsion: TorsionReport,
    pub compatibility: CompatibilityReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErpOutput {
    pub residual_norm: f64,
    pub tau_norm_sq: f64,
    #[serde(rename = "F")]
    pub f: Option<f64>,
    pub threshold: f64,
    pub erp: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolitonEntry {
    #[serde(flatten)]
    pub solution: SolitonSolution,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub modified_residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub init: CoclosedParams,
    pub status: FlowStatus,
    #[serde(rename = "final")]
    pub last: FlowSample,
    pub samples: usize,
    pub direction: Option<[f64; 6]>,
    pub window_drift: Option<f64>,
}

/// Rendered output plus the exit code it implies.
struct Rendered {
    body: String,
    code: i32,
}

fn render<T: Serialize>(value: &T, format: Format, text: impl FnOnce() -> String, code: i32) -> Result<Rendered, CliError> {
    let body = match format {
        Format::Json => output::json(value)?,
        Format::Csv => output::csv_generic(value)?,
        Format::Text => text(),
    };
    Ok(Rendered { body, code })
}

fn verify_lattice(args: &LatticeArgs, format: Format) -> Result<Rendered, CliError> {
    let cert: LatticeCertificate = match (&args.example, &args.poly) {
        (Some(name), _) => examples::by_name(name)
            .ok_or_else(|| CliError::Usage(format!("unknown example {name:?} (kl-2015, kl-sqrt3)")))?
            .certify(),
        (None, Some(poly)) => {
            let p = QuarticPoly::new(parse::ints_n::<4>(poly, "--poly")?)?;
            if args.unit.len() != 3 {
                return Err(CliError::Usage(format!("need exactly three --unit values, got {}", args.unit.len())));
            }
            let mut units = [UnitSpec::one(); 3];
            for (slot, raw) in units.iter_mut().zip(&args.unit) {
                let u = UnitSpec(parse::ints_n::<4>(raw, "--unit")?);
                *slot = if args.square { u.mul_mod(&u, &p)? } else { u };
            }
            certify_lattice(&p, &units)
        }
        (None, None) => return Err(CliError::Usage("give --example or --poly with three --unit".to_string())),
    };
    let code = if cert.verdict { 0 } else { 1 };
    render(
        &cert,
        format,
        || {
            let mut s = format!("polynomial coefficients {:?}\n", cert.polynomial);
            for (i, m) in cert.matrices.iter().enumerate() {
                s += &format!("A{} = {:?}  det = {}\n", i + 1, m.0, cert.checks.determinants.get(i).unwrap_or(&0));
            }
            s += &format!(
                "commute: {}  diagonalization residual: {:.3e}  independence rank: {}\n",
                cert.checks.commute, cert.checks.diagonalize_residual, cert.checks.independence_rank
            );
            for f in &cert.failures {
                s += &format!("failure: {f}\n");
            }
            s += &format!("verdict: {}\n", cert.verdict);
            s
        },
        code,
    )
}

fn torsion(args: &TripleArgs, tol: &Tolerances, format: Format) -> Result<Rendered, CliError> {
    let s = G2Structure::new(args.triple()?);
    let out = TorsionOutput {
        closed: s.is_closed(tol),
        coclosed: s.is_coclosed(tol),
        torsion: torsion_report(&s),
        compatibility: check_compatible_with(&s.triple, tol),
    };
    render(
        &out,
        format,
        || {
            let t = &out.torsion;
            format!(
                "class: {}\ntau0 = {:.12e}\n|tau1| = {:.12e}\n|tau2| = {:.12e}\n|tau3| = {:.12e}\n|tau|^2 = {:.12e}\nF = {}\nclosed: {}  coclosed: {}  compatible: {}\n",
                t.class,
                t.tau0,
                t.tau1_norm,
                t.tau2_norm,
                t.tau3_norm,
                t.tau_norm_sq,
                t.f.map(|f| format!("{f:.12}")).unwrap_or_else(|| "undefined (flat)".into()),
                out.closed,
                out.coclosed,
                out.compatibility.compatible()
            )
        },
        0,
    )
}

fn erp_check(args: &TripleArgs, tol: &Tolerances, threshold: f64, format: Format) -> Result<Rendered, CliError> {
    let s = G2Structure::new(args.triple()?);
    let r = match erp_residual_with(&s, tol) {
        Ok(r) => r,
        Err(e @ g2toolkit::Error::NotClosed(_)) => {
            return Ok(Rendered {
                body: format!("{e}\n"),
                code: 1,
            })
        }
        Err(e) => return Err(e.into()),
    };
    let out = ErpOutput {
        residual_norm: r.residual_norm,
        tau_norm_sq: r.tau_norm_sq,
        f: homothety_f(&s.triple).ok(),
        threshold,
        erp: r.residual_norm < threshold,
    };
    let code = if out.erp { 0 } else { 1 };
    render(
        &out,
        format,
        || {
            format!(
                "ERP residual = {:.6e} (threshold {:.1e})\n|tau|^2 = {:.12}\nERP: {}\n",
                out.residual_norm, out.threshold, out.tau_norm_sq, out.erp
            )
        },
        code,
    )
}

fn soliton(args: &SolitonArgs, threshold: f64, format: Format) -> Result<Rendered, CliError> {
    let [a1, a2, b1, b2] = parse::floats_n::<4>(&args.base, "--base")?;
    if args.m == Some(0.0) {
        return Err(CliError::Usage("--m must be non-zero".to_string()));
    }
    let entries: Vec<SolitonEntry> = soliton_solve(a1, a2, b1, b2)
        .into_iter()
        .map(|solution| {
            let modified_residual = args.m.map(|m| modified_soliton_residual(&solution.params, m)).transpose()?;
            Ok(SolitonEntry {
                solution,
                modified_residual,
            })
        })
        .collect::<Result<_, g2toolkit::Error>>()?;
    let code = if entries.iter().all(|e| e.solution.residual < threshold) { 0 } else { 1 };
    render(
        &entries,
        format,
        || {
            if entries.is_empty() {
                return "no solutions (a right-hand side is negative)\n".to_string();
            }
            entries
                .iter()
                .map(|e| {
                    let p = e.solution.params;
                    let mut line = format!(
                        "c1 = {:.12}  c2 = {:.12}  lambda = {:.12}  residual = {:.3e}",
                        p.c1, p.c2, e.solution.lambda, e.solution.residual
                    );
                    if let Some(m) = e.modified_residual {
                        line += &format!("  modified residual = {m:.6e}");
                    }
                    line + "\n"
                })
                .collect()
        },
        code,
    )
}

fn flow_options(args: &FlowArgs) -> Result<FlowOptions, CliError> {
    if !(args.t_max > 0.0 && args.t_max.is_finite()) {
        return Err(CliError::Usage(format!("--t-max must be positive, got {}", args.t_max)));
    }
    if !(args.window > 0.0) {
        return Err(CliError::Usage("--window must be positive".to_string()));
    }
    Ok(FlowOptions {
        window: args.window,
        ..FlowOptions::default()
    })
}

fn sweep_one(p: &CoclosedParams, t_max: f64, opts: &FlowOptions) -> Result<SweepResult, CliError> {
    let traj = coflow::integrate(p, t_max, opts)?;
    let limit = coflow::normalized_limit(&traj, opts.window.min(t_max)).ok();
    Ok(SweepResult {
        init: *p,
        status: traj.status,
        last: *traj.last(),
        samples: traj.samples.len(),
        direction: limit.map(|l| l.direction),
        window_drift: limit.map(|l| l.window_drift),
    })
}

fn flow(args: &FlowArgs, format: Option<Format>) -> Result<Rendered, CliError> {
    let opts = flow_options(args)?;
    if let Some(path) = &args.sweep {
        let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        let inits: Vec<CoclosedParams> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| parse::floats_n::<6>(l, "sweep line").map(CoclosedParams::from_array))
            .collect::<Result<_, _>>()?;
        let mut pool = rayon::ThreadPoolBuilder::new();
        if let Some(j) = args.jobs {
            pool = pool.num_threads(j.max(1));
        }
        let pool = pool.build().map_err(|e| CliError::Output(e.to_string()))?;
        let results: Vec<SweepResult> = pool.install(|| {
            inits
                .par_iter()
                .map(|p| sweep_one(p, args.t_max, &opts))
                .collect::<Result<_, _>>()
        })?;
        let code = if results.iter().any(|r| r.status == FlowStatus::Diverged) { 1 } else { 0 };
        return render(
            &results,
            format.unwrap_or(Format::Json),
            || {
                results
                    .iter()
                    .map(|r| format!("{:?} -> {:?} at t = {} (N = {:.6e})\n", r.init.to_array(), r.status, r.last.t, r.last.n))
                    .collect()
            },
            code,
        );
    }
    let init = args.init.as_deref().expect("clap enforces --init without --sweep");
    let p = CoclosedParams::from_array(parse::floats_n::<6>(init, "--init")?);
    let traj: FlowTrajectory = coflow::integrate(&p, args.t_max, &opts)?;
    let code = if traj.status == FlowStatus::Diverged { 1 } else { 0 };
    let body = match format.unwrap_or(Format::Csv) {
        Format::Csv => output::flow_csv(&traj)?,
        Format::Json => output::json(&traj)?,
        Format::Text => {
            let l = traj.last();
            format!(
                "status: {:?}\nsamples: {}\nfinal t = {}\nfinal state = {:?}\nN = {:.12e}\n",
                traj.status,
                traj.samples.len(),
                l.t,
                l.params.to_array(),
                l.n
            )
        }
    };
    Ok(Rendered { body, code })
}

fn audit(format: Format) -> Result<Rendered, CliError> {
    let report: AuditReport = run_audit();
    let rows = &report.claims;
    let body = match format {
        Format::Json => output::json(&report)?,
        Format::Csv => output::csv_generic(rows)?,
        Format::Text => rows
            .iter()
            .map(|c| {
                format!(
                    "[{}] {}\n  location: {}\n  claimed:  {}\n  computed: {}\n",
                    if c.agrees { "agrees" } else { "DIFFERS" },
                    c.claim_id,
                    c.paper_location,
                    c.paper_value,
                    c.computed_value
                )
            })
            .collect(),
    };
    Ok(Rendered { body, code: 0 })
}

fn dispatch(cli: &Cli) -> Result<Rendered, CliError> {
    let threshold = cli.tol.unwrap_or(DEFAULT_TOL);
    if !(threshold > 0.0 && threshold.is_finite()) {
        return Err(CliError::Usage(format!("--tol must be positive, got {threshold}")));
    }
    let tol = Tolerances::default();
    let format = cli.format.unwrap_or(Format::Json);
    match &cli.command {
        Command::VerifyLattice(a) => verify_lattice(a, format),
        Command::Torsion(a) => torsion(a, &tol, format),
        Command::ErpCheck(a) => erp_check(a, &tol, threshold, format),
        Command::Soliton(a) => soliton(a, threshold, format),
        Command::Flow(a) => flow(a, cli.format),
        Command::Audit => audit(format),
    }
}

/// Runs the tool with explicit output sinks; returns the exit code.
pub fn run_with<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(stdout, "{e}") } else { write!(stderr, "{e}") };
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(r) => {
            let written = match &cli.out {
                Some(path) => fs::write(path, &r.body).map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => stdout.write_all(r.body.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => r.code,
                Err(msg) => {
                    let _ = writeln!(stderr, "error: {msg}");
                    1
                }
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
