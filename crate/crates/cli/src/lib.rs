//! Command-line front end: argument parsing, file formats and reports.
//!
//! Exit codes: 0 when the run proved, certified or completed what it was
//! asked; 1 when it ended undecided, refuted, inconclusive or incomplete;
//! 2 on bad input. Reports are written in the first two cases.

pub mod formats;
pub mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rigor::assembly::{self, AssemblyProblem, BranchConfig, DualityVerdict, VerifyConfig};
use rigor::expr::Evaluator;
use rigor::geom::{self, Verdict};
use rigor::graphgen::{self, GeneratorConfig, Prune};
use rigor::interval::Interval;
use rigor::lp;
use rigor::prover::{prove_negative, ProofReport, ProofStatus, ProverConfig};
use serde_json::{json, Value};

use formats::FormatError;
use report::{num, nums, Manifest};

#[derive(Debug, Parser)]
#[command(name = "rigor", version, about = "Validated inequality proving, LP certificates, assembly bounds, graph enumeration and configuration checks")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Global {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for every random choice; recorded in the report.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Prove f < 0 (or <= -margin) on a box.
    Prove(ProveArgs),
    /// Turn approximate duals into a rigorous LP upper bound.
    LpCertify(LpArgs),
    /// Fit, verify or branch on nonlinear duality certificates.
    Assemble(AssembleArgs),
    /// Enumerate decorated sphere graphs.
    Graphs(GraphArgs),
    /// Point-configuration checks.
    Geom(GeomArgs),
    /// Print the compiled evaluation plan of a task.
    PlanDump(PlanArgs),
}

#[derive(Debug, Args)]
pub struct ProveArgs {
    #[arg(long)]
    pub task: PathBuf,
    #[arg(long)]
    pub max_cells: Option<usize>,
    #[arg(long)]
    pub max_depth: Option<usize>,
    #[arg(long)]
    pub min_width: Option<f64>,
}

#[derive(Debug, Args)]
pub struct LpArgs {
    #[arg(long)]
    pub problem: PathBuf,
    /// Dual file with lines `y ...` and `z ...`.
    #[arg(long)]
    pub dual: Option<PathBuf>,
    /// Compute duals with the built-in simplex.
    #[arg(long)]
    pub solve: bool,
}

#[derive(Debug, Args)]
pub struct AssembleArgs {
    #[command(subcommand)]
    pub action: AssembleAction,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub problem: PathBuf,
    /// Claimed upper bound.
    #[arg(long, allow_hyphen_values = true)]
    pub m: f64,
    /// Comma- or space-separated values, or `@file`.
    #[arg(long, allow_hyphen_values = true)]
    pub x_star: String,
    #[arg(long, default_value_t = 32)]
    pub test_points: usize,
}

#[derive(Debug, Subcommand)]
pub enum AssembleAction {
    /// Fit a candidate certificate for bound M at x*.
    Fit {
        #[command(flatten)]
        fit: FitArgs,
        /// Where to write the certificate.
        #[arg(long)]
        certificate: PathBuf,
    },
    /// Check a certificate rigorously.
    Verify {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        certificate: PathBuf,
        #[arg(long)]
        max_cells: Option<usize>,
    },
    /// Fit and verify, bisecting domain boxes on failure.
    Branch {
        #[command(flatten)]
        fit: FitArgs,
        #[arg(long, default_value_t = 6)]
        max_depth: usize,
    },
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[arg(long)]
    pub max_vertices: usize,
    /// Comma-separated terms, e.g. `all-triangles` or `max-face=4,max-degree=5`.
    #[arg(long)]
    pub prune: Option<String>,
    /// Directory for one file per terminal class.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub max_graphs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GeomArgs {
    #[command(subcommand)]
    pub action: GeomAction,
}

#[derive(Debug, Subcommand)]
pub enum GeomAction {
    /// Interior point at distance >= r from all vertices of a simplex with
    /// edge caps e01 e02 e03 e12 e13 e23.
    Simplex {
        #[arg(long, num_args = 1.., value_delimiter = ',')]
        edges: Vec<String>,
        #[arg(long)]
        r: String,
    },
    /// Planar analog with triangle edge caps e01 e02 e12.
    Face {
        #[arg(long, num_args = 1.., value_delimiter = ',')]
        edges: Vec<String>,
        #[arg(long)]
        r: String,
    },
    /// Segment through a triangle of circumradius <= r1, length <= r2,
    /// endpoints at distance >= r3 from the vertices.
    Segment {
        #[arg(long)]
        r1: String,
        #[arg(long)]
        r2: String,
        #[arg(long)]
        r3: String,
    },
    /// Line through two points crossing a triangle, from a distance spec.
    Linked {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        max_cells: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[arg(long)]
    pub task: PathBuf,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(s) | CliError::Input(s) => write!(f, "{s}"),
        }
    }
}

/// Result of one invocation, without touching the process streams.
#[derive(Debug, Clone, PartialEq)]
pub struct Invocation {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Ctx {
    global: Global,
    inputs: Vec<(String, String)>,
    start: Instant,
}

impl Ctx {
    fn read(&mut self, path: &Path) -> Result<String, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        self.inputs.push((path.display().to_string(), report::digest(&bytes)));
        String::from_utf8(bytes).map_err(|_| CliError::Input(format!("{}: not UTF-8", path.display())))
    }

    fn parse<T>(&mut self, path: &Path, f: impl Fn(&str) -> Result<T, FormatError>) -> Result<T, CliError> {
        let text = self.read(path)?;
        f(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    fn manifest(&self, subcommand: &str, config: Value) -> Manifest {
        Manifest {
            subcommand: subcommand.into(),
            inputs: self.inputs.clone(),
            config,
            seed: self.global.seed,
            threads: self.global.threads.unwrap_or(0),
            wall_time_ms: self.start.elapsed().as_secs_f64() * 1e3,
        }
    }
}

fn literal(s: &str) -> Result<Interval, CliError> {
    Interval::parse_literal(s).map_err(|e| CliError::Input(e.to_string()))
}

fn finite(name: &str, x: f64) -> Result<f64, CliError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Input(format!("--{name} must be finite")))
    }
}

fn prover_config(max_cells: Option<usize>, max_depth: Option<usize>, min_width: Option<f64>) -> ProverConfig {
    let d = ProverConfig::default();
    ProverConfig {
        max_cells: max_cells.unwrap_or(d.max_cells),
        max_depth: max_depth.unwrap_or(d.max_depth),
        min_width: min_width.unwrap_or(d.min_width),
        ..d
    }
}

fn proof_json(r: &ProofReport) -> Value {
    let boxes = |v: &[rigor::taylor::IntervalBox]| Value::Array(v.iter().map(|b| json!(b.to_string())).collect());
    json!({
        "status": r.status.as_str(),
        "cells_processed": r.cells_processed,
        "max_depth_reached": r.max_depth_reached,
        "best_upper_bound_seen": num(r.best_upper_bound_seen),
        "counterexample": r.counterexample.as_ref().map(|c| json!({"point": nums(&c.point), "value": c.value.to_string()})),
        "undecided": boxes(&r.undecided),
        "failed": boxes(&r.failed),
    })
}

fn cmd_prove(ctx: &mut Ctx, a: &ProveArgs) -> Result<(i32, Value, Value), CliError> {
    let task = ctx.parse(&a.task, formats::parse_task)?;
    let cfg = prover_config(a.max_cells, a.max_depth, a.min_width);
    let r = prove_negative(&task, &cfg).map_err(|e| CliError::Input(e.to_string()))?;
    let config = json!({
        "task": a.task.display().to_string(),
        "max_cells": cfg.max_cells,
        "max_depth": cfg.max_depth,
        "min_width": num(cfg.min_width),
        "margin": num(task.margin),
        "strictness": task.strictness.as_str(),
    });
    let code = if r.status == ProofStatus::Proven { 0 } else { 1 };
    Ok((code, config, proof_json(&r)))
}

fn cmd_lp(ctx: &mut Ctx, a: &LpArgs) -> Result<(i32, Value, Value), CliError> {
    let p = ctx.parse(&a.problem, formats::parse_lp)?;
    let (y, z, approx) = match (&a.dual, a.solve) {
        (Some(path), false) => {
            let (y, z) = ctx.parse(path, formats::parse_dual)?;
            (y, z, None)
        }
        (None, true) => {
            let s = lp::solve_approx(&p).map_err(|e| CliError::Input(format!("built-in solver: {e}")))?;
            (s.y.clone(), s.z.clone(), Some(s))
        }
        _ => return Err(CliError::Usage("give exactly one of --dual and --solve".into())),
    };
    let d = lp::clamp_dual(&p, &y, &z).map_err(|e| CliError::Input(e.to_string()))?;
    let cert = lp::certify_upper_bound(&p, &d).map_err(|e| CliError::Input(e.to_string()))?;
    let config = json!({
        "problem": a.problem.display().to_string(),
        "dual": a.dual.as_ref().map(|p| p.display().to_string()),
        "solve": a.solve,
    });
    let result = json!({
        "bound": num(cert.bound),
        "delta_bound": num(cert.delta_bound),
        "residual_max_norm": num(cert.residual_max_norm()),
        "digest": cert.digest,
        "clamped": d.clamped,
        "y": nums(&d.y),
        "z": nums(&d.z),
        "approximate_objective": approx.as_ref().map(|s| num(s.objective)),
    });
    Ok((if cert.bound.is_finite() { 0 } else { 1 }, config, result))
}

fn read_x_star(ctx: &mut Ctx, spec: &str) -> Result<Vec<f64>, CliError> {
    let text = match spec.strip_prefix('@') {
        Some(path) => ctx.read(Path::new(path))?,
        None => spec.to_string(),
    };
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Input(format!("bad x* entry `{t}`")))
        })
        .collect()
}

fn verdict_json(v: &DualityVerdict) -> (i32, Value) {
    match v {
        DualityVerdict::Certified { m } => (0, json!({"verdict": "certified", "m": num(*m)})),
        DualityVerdict::Refuted { domain, report } => (1, json!({"verdict": "refuted", "domain": domain, "proof": proof_json(report)})),
        DualityVerdict::GlobalCheckFailed { lower } => (1, json!({"verdict": "global-check-failed", "lower": num(*lower)})),
    }
}

fn assembly_err(e: assembly::AssemblyError) -> CliError {
    CliError::Input(e.to_string())
}

fn load_problem(ctx: &mut Ctx, path: &Path) -> Result<(AssemblyProblem, String), CliError> {
    let p = ctx.parse(path, formats::parse_asm)?;
    let digest = ctx.inputs.last().expect("just read").1.clone();
    Ok((p, digest))
}

fn cmd_assemble(ctx: &mut Ctx, a: &AssembleArgs) -> Result<(i32, Value, Value), CliError> {
    match &a.action {
        AssembleAction::Fit { fit, certificate } => {
            let (p, digest) = load_problem(ctx, &fit.problem)?;
            let x = read_x_star(ctx, &fit.x_star)?;
            let m = finite("m", fit.m)?;
            let pts = assembly::default_test_points(&p, fit.test_points, ctx.global.seed);
            let cert = assembly::fit_dual(&p, &x, m, &pts, ctx.global.seed).map_err(assembly_err)?;
            let file = formats::CertificateFile::new(&cert, digest);
            std::fs::write(certificate, formats::write_certificate(&file))
                .map_err(|e| CliError::Input(format!("{}: {e}", certificate.display())))?;
            let config = json!({
                "action": "fit",
                "problem": fit.problem.display().to_string(),
                "m": num(m),
                "test_points": fit.test_points,
                "certificate": certificate.display().to_string(),
            });
            let result = json!({
                "t0": num(cert.t0),
                "retained": cert.retained,
                "w": nums(&cert.w),
                "r": cert.r.iter().map(|v| nums(v)).collect::<Vec<_>>(),
            });
            Ok((0, config, result))
        }
        AssembleAction::Verify {
            problem,
            certificate,
            max_cells,
        } => {
            let (p, digest) = load_problem(ctx, problem)?;
            let file = ctx.parse(certificate, formats::parse_certificate)?;
            if file.problem_digest != digest {
                return Err(CliError::Input(format!(
                    "{}: certificate was fitted to a different problem file",
                    certificate.display()
                )));
            }
            let mut cfg = VerifyConfig::default();
            if let Some(k) = max_cells {
                cfg.prover.max_cells = *k;
            }
            let v = assembly::verify_duality(&p, &file.certificate(), &cfg).map_err(assembly_err)?;
            let config = json!({
                "action": "verify",
                "problem": problem.display().to_string(),
                "certificate": certificate.display().to_string(),
                "max_cells": cfg.prover.max_cells,
                "strictness": cfg.strictness.as_str(),
            });
            let (code, result) = verdict_json(&v);
            Ok((code, config, result))
        }
        AssembleAction::Branch { fit, max_depth } => {
            let (p, _) = load_problem(ctx, &fit.problem)?;
            let x = read_x_star(ctx, &fit.x_star)?;
            let m = finite("m", fit.m)?;
            let cfg = BranchConfig {
                max_depth: *max_depth,
                test_points: fit.test_points,
                seed: ctx.global.seed,
                verify: VerifyConfig::default(),
            };
            let out = assembly::certify_with_branching(&p, &x, m, &cfg).map_err(assembly_err)?;
            let config = json!({
                "action": "branch",
                "problem": fit.problem.display().to_string(),
                "m": num(m),
                "max_depth": max_depth,
                "test_points": fit.test_points,
            });
            let result = json!({
                "certified": out.certified,
                "leaves": out.leaves,
                "failed_leaves": out.failed_leaves,
            });
            Ok((if out.certified { 0 } else { 1 }, config, result))
        }
    }
}

fn cmd_graphs(_ctx: &mut Ctx, a: &GraphArgs) -> Result<(i32, Value, Value), CliError> {
    let mut cfg = GeneratorConfig::new(a.max_vertices);
    if let Some(p) = &a.prune {
        cfg.prune = p.parse::<Prune>().map_err(|e| CliError::Input(format!("--prune: {e}")))?;
    }
    if let Some(k) = a.max_graphs {
        cfg.max_graphs = k;
    }
    let out = graphgen::generate(&cfg).map_err(|e| CliError::Input(e.to_string()))?;
    let mut files = Vec::new();
    if let Some(dir) = &a.out {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
        for (k, (_, g)) in out.terminals.iter().enumerate() {
            let name = format!("class_{k:05}.graph");
            std::fs::write(dir.join(&name), formats::write_graph(g))
                .map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
            files.push(name);
        }
    }
    let config = json!({
        "max_vertices": a.max_vertices,
        "prune": a.prune,
        "max_graphs": cfg.max_graphs,
        "out": a.out.as_ref().map(|p| p.display().to_string()),
    });
    let result = json!({
        "complete": out.complete,
        "enqueued": out.enqueued,
        "classes": out.terminals.iter().map(|(c, _)| c.clone()).collect::<Vec<_>>(),
        "files": files,
    });
    Ok((if out.complete { 0 } else { 1 }, config, result))
}

fn geom_verdict(v: &Verdict) -> (i32, Value) {
    match v {
        Verdict::NoSuchConfiguration { reason, witness } => (
            0,
            json!({
                "verdict": "no-such-configuration",
                "reason": format!("{reason:?}"),
                "witness": witness.map(|w| w.to_string()),
            }),
        ),
        Verdict::Inconclusive { reason } => (1, json!({"verdict": "inconclusive", "reason": reason})),
    }
}

fn cmd_geom(ctx: &mut Ctx, a: &GeomArgs) -> Result<(i32, Value, Value), CliError> {
    let geom_err = |e: geom::GeomError| CliError::Input(e.to_string());
    let (config, v) = match &a.action {
        GeomAction::Simplex { edges, r } => {
            let e: Vec<Interval> = edges.iter().map(|s| literal(s)).collect::<Result<_, _>>()?;
            let e: [Interval; 6] = e.try_into().map_err(|_| CliError::Usage("--edges takes 6 values".into()))?;
            let v = geom::check_simplex_interior_point(e, literal(r)?).map_err(geom_err)?;
            (json!({"check": "simplex", "edges": edges, "r": r}), v)
        }
        GeomAction::Face { edges, r } => {
            let e: Vec<Interval> = edges.iter().map(|s| literal(s)).collect::<Result<_, _>>()?;
            let e: [Interval; 3] = e.try_into().map_err(|_| CliError::Usage("--edges takes 3 values".into()))?;
            let v = geom::check_face_escape(e, literal(r)?).map_err(geom_err)?;
            (json!({"check": "face", "edges": edges, "r": r}), v)
        }
        GeomAction::Segment { r1, r2, r3 } => {
            let v = geom::check_segment_through_triangle(literal(r1)?, literal(r2)?, literal(r3)?).map_err(geom_err)?;
            (json!({"check": "segment", "r1": r1, "r2": r2, "r3": r3}), v)
        }
        GeomAction::Linked { spec, max_cells } => {
            let (s, model) = ctx.parse(spec, formats::parse_dspec)?;
            let mut cfg = geom::SweepConfig::default();
            if let Some(k) = max_cells {
                cfg.max_cells = *k;
            }
            let v = geom::check_linked_line(&s, model.as_ref(), &cfg).map_err(geom_err)?;
            (
                json!({"check": "linked", "spec": spec.display().to_string(), "max_cells": cfg.max_cells}),
                v,
            )
        }
    };
    let (code, result) = geom_verdict(&v);
    Ok((code, config, result))
}

fn cmd_plan(ctx: &mut Ctx, a: &PlanArgs) -> Result<(i32, Value, Value), CliError> {
    let task = ctx.parse(&a.task, formats::parse_task)?;
    let ev = Evaluator::compile(&task.expr, task.domain.len()).map_err(|e| CliError::Input(e.to_string()))?;
    let plan: Vec<String> = ev.dump().lines().map(str::to_string).collect();
    Ok((0, json!({"task": a.task.display().to_string()}), json!({"tape_len": ev.tape_len(), "plan": plan})))
}

fn execute(cli: &Cli) -> Result<(i32, String), CliError> {
    if let Some(k) = cli.global.threads {
        if k == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        // Only the first call in a process can size the global pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
    let mut ctx = Ctx {
        global: cli.global.clone(),
        inputs: Vec::new(),
        start: Instant::now(),
    };
    let (name, (code, config, result)) = match &cli.command {
        Command::Prove(a) => ("prove", cmd_prove(&mut ctx, a)?),
        Command::LpCertify(a) => ("lp-certify", cmd_lp(&mut ctx, a)?),
        Command::Assemble(a) => ("assemble", cmd_assemble(&mut ctx, a)?),
        Command::Graphs(a) => ("graphs", cmd_graphs(&mut ctx, a)?),
        Command::Geom(a) => ("geom", cmd_geom(&mut ctx, a)?),
        Command::PlanDump(a) => ("plan-dump", cmd_plan(&mut ctx, a)?),
    };
    let text = report::render(&ctx.manifest(name, config), result);
    Ok((code, text))
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn invoke<I, T>(args: I) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Invocation { code, stdout: text, stderr: String::new() }
            } else {
                Invocation { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(&cli) {
        Ok((code, text)) => match &cli.global.report {
            Some(path) => match std::fs::write(path, &text) {
                Ok(()) => Invocation { code, stdout: String::new(), stderr: String::new() },
                Err(e) => Invocation {
                    code: 2,
                    stdout: String::new(),
                    stderr: format!("error: {}: {e}\n", path.display()),
                },
            },
            None => Invocation { code, stdout: text, stderr: String::new() },
        },
        Err(e) => Invocation {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}
