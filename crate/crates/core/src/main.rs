//! Command-line driver: every harness behind one subcommand each.
//!
//! Exit codes: 0 certified or success, 1 refuted with a witness, 2 hypothesis
//! or precondition failure, 3 internal error, 64 usage error (bad arguments,
//! unreadable or malformed instance file).

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;
use vdsopt::constants::{regime, solve_constants_system};
use vdsopt::evp::evp_vds;
use vdsopt::geometry::Point;
use vdsopt::instances_io::{generate_file, load, to_json, Profile};
use vdsopt::nonsmooth::check_scalarized_nc;
use vdsopt::openness::{directional_openness_harness, necessary_cond_k, necessary_cond_q, openness_hypotheses, validate_nc_k, validate_nc_q};
use vdsopt::reduction::{lift, lifted_openness_harness, lift_point};
use vdsopt::solutions::{certify, Concept, Instance, VdsKind};
use vdsopt::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "vdsopt", version, about = "Approximate nondominated solutions under variable domination structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit the full JSON report.
    #[arg(long, global = true)]
    json: bool,
    /// Add wall-clock timing to the report (breaks byte-identical output).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Args, Debug, Clone)]
struct InstanceArgs {
    /// Instance file (JSON).
    #[arg(long)]
    instance: PathBuf,
    /// "x1,x2;y1,y2" (or just "x" where only x is needed); defaults to the file's candidate.
    #[arg(long)]
    point: Option<String>,
    /// Membership tolerance τ.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a seeded random instance.
    Generate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// grid1d, grid2d, polyhedral2d, polyhedral2d-bii or lifted.
        #[arg(long, default_value = "grid1d")]
        profile: Profile,
        /// Output file (stdout if absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify (ε, δ, k)-nondominatedness of the candidate.
    Certify {
        #[command(flatten)]
        io: InstanceArgs,
    },
    /// Ekeland localization of the candidate x̃.
    Evp {
        #[command(flatten)]
        io: InstanceArgs,
        /// ε′ ∈ (0, ε); defaults to 0.9 ε (1 when ε = ∞).
        #[arg(long)]
        eps_prime: Option<f64>,
    },
    /// Scalarized necessary condition at the Ekeland point.
    Nc32 {
        #[command(flatten)]
        io: InstanceArgs,
        #[arg(long)]
        eps_prime: Option<f64>,
    },
    /// Coderivative necessary condition for K-type instances.
    #[command(alias = "nc-k")]
    Nck {
        #[command(flatten)]
        io: InstanceArgs,
    },
    /// Coderivative necessary condition for Q-type instances.
    #[command(alias = "nc-q")]
    Ncq {
        #[command(flatten)]
        io: InstanceArgs,
    },
    /// Directional openness of F + K + Δ_Ω (or the lifted H for Q-type data).
    Openness {
        #[command(flatten)]
        io: InstanceArgs,
        /// Modulus a ∈ (0, c); defaults to half the injectivity constant.
        #[arg(long)]
        a: Option<f64>,
        /// Number of radii in (0, θ).
        #[arg(long, default_value_t = 4)]
        rhos: usize,
    },
    /// Regime and solution set of the constants system.
    Constants {
        #[arg(long, allow_hyphen_values = true)]
        epsilon: f64,
        #[arg(long, allow_hyphen_values = true)]
        delta: f64,
    },
    /// Lift a Q-type instance to a K-type instance on X × Y.
    Reduce {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// What a subcommand produced.
struct Outcome {
    status: Status,
    result: Value,
    /// Text written instead of a report (generate, reduce without --out).
    raw: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
enum Status {
    Certified,
    Success,
    Refuted,
    HypothesisFailure,
    InternalError,
    /// Unreadable or malformed instance file.
    UsageError,
}

impl Status {
    fn code(self) -> u8 {
        match self {
            Status::Certified | Status::Success => 0,
            Status::Refuted => 1,
            Status::HypothesisFailure => 2,
            Status::InternalError => 3,
            Status::UsageError => 64,
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Numerical(e.to_string()))
}

fn ok(status: Status, v: Value) -> Result<Outcome> {
    Ok(Outcome { status, result: v, raw: None })
}

fn verdict_status(good: bool) -> Status {
    if good {
        Status::Certified
    } else {
        Status::Refuted
    }
}

fn parse_coords(s: &str) -> Result<Point> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Point::new(Vec::new()));
    }
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| Error::InvalidInput(format!("bad coordinate {t:?}: {e}"))))
        .collect::<Result<Vec<_>>>()
        .map(Point::new)
}

/// x and (if given) y from "x;y".
fn parse_point(s: &str) -> Result<(Point, Option<Point>)> {
    match s.split_once(';') {
        Some((x, y)) => Ok((parse_coords(x)?, Some(parse_coords(y)?))),
        None => Ok((parse_coords(s)?, None)),
    }
}

fn open(io: &InstanceArgs) -> Result<Instance> {
    let mut inst = load(&io.instance)?;
    if let Some(t) = io.tol {
        if !(t > 0.0) {
            return Err(Error::InvalidInput("--tol must be positive".into()));
        }
        inst.tolerances.tau = t;
    }
    Ok(inst)
}

/// (x, y) from --point, falling back to the candidate; y defaults to f(x).
fn point(io: &InstanceArgs, inst: &Instance) -> Result<(Point, Point)> {
    let (x, y) = match &io.point {
        Some(p) => parse_point(p)?,
        None => match &inst.candidate {
            Some(c) => (c.x.clone(), Some(c.y.clone())),
            None => return Err(Error::InvalidInput("no --point and no candidate in the instance".into())),
        },
    };
    let y = match y {
        Some(y) => y,
        None => inst.objective.eval(&x)?,
    };
    Ok((x, y))
}

fn eps_prime(inst: &Instance, given: Option<f64>) -> f64 {
    given.unwrap_or(if inst.epsilon.is_finite() { 0.9 * inst.epsilon } else { 1.0 })
}

fn run(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Generate { seed, profile, out } => {
            let p = *profile;
            let text = generate_file(*seed, p)?;
            write_or_raw(text, out.as_ref(), json!({ "seed": seed, "profile": p.to_string() }))
        }
        Command::Certify { io } => {
            let inst = open(io)?;
            let (x, y) = point(io, &inst)?;
            let concept = match inst.vds_kind {
                VdsKind::K => Concept::NondominatedK,
                VdsKind::Q => Concept::NondominatedQ { exclude_zero: true },
            };
            let c = certify(&inst, &x, &y, concept)?;
            ok(verdict_status(c.is_certified()), to_value(&c)?)
        }
        Command::Evp { io, eps_prime: ep } => {
            let inst = open(io)?;
            let (x, _) = point(io, &inst)?;
            let r = evp_vds(&inst, &x, eps_prime(&inst, *ep))?;
            let status = if r.max_residual() <= 1e-9 { Status::Success } else { Status::Refuted };
            ok(status, to_value(&r)?)
        }
        Command::Nc32 { io, eps_prime: ep } => {
            let inst = open(io)?;
            let (x, _) = point(io, &inst)?;
            let r = evp_vds(&inst, &x, eps_prime(&inst, *ep))?;
            let nc = check_scalarized_nc(&inst, &x, &r)?;
            ok(verdict_status(nc.holds), json!({ "evp": to_value(&r)?, "necessary_condition": to_value(&nc)? }))
        }
        Command::Nck { io } => {
            let inst = open(io)?;
            let (x, y) = point(io, &inst)?;
            let b = necessary_cond_k(&inst, &x, &y)?;
            let valid = validate_nc_k(&inst, &x, &y, &b)?;
            ok(verdict_status(valid), json!({ "bundle": to_value(&b)?, "revalidated": valid }))
        }
        Command::Ncq { io } => {
            let inst = open(io)?;
            let (x, y) = point(io, &inst)?;
            let b = necessary_cond_q(&inst, &x, &y)?;
            let valid = validate_nc_q(&inst, &x, &y, &b)?;
            ok(verdict_status(valid), json!({ "bundle": to_value(&b)?, "revalidated": valid }))
        }
        Command::Openness { io, a, rhos } => {
            let inst = open(io)?;
            let (x, y) = point(io, &inst)?;
            let a = match a {
                Some(a) => *a,
                None => {
                    let h = match inst.vds_kind {
                        VdsKind::K => openness_hypotheses(&inst, &x, &y)?,
                        VdsKind::Q => {
                            let mut l = lift(&inst)?.instance;
                            l.ball_coords = None;
                            let (lx, ly) = lift_point(&x, &y);
                            openness_hypotheses(&l, &lx, &ly)?
                        }
                    };
                    0.5 * h.injectivity.c
                }
            };
            let r = match inst.vds_kind {
                VdsKind::K => directional_openness_harness(&inst, &x, &y, a, *rhos)?,
                VdsKind::Q => lifted_openness_harness(&inst, &x, &y, a, *rhos)?,
            };
            ok(verdict_status(r.all_certified()), to_value(&r)?)
        }
        Command::Constants { epsilon, delta } => {
            let reg = regime(*epsilon, *delta);
            let sol = solve_constants_system(*epsilon, *delta)?;
            let status = if sol.is_empty() { Status::HypothesisFailure } else { Status::Success };
            ok(status, json!({ "regime": to_value(&reg.regime)?, "solution": to_value(&sol)? }))
        }
        Command::Reduce { instance, out } => {
            let inst = load(instance)?;
            let l = lift(&inst)?;
            let text = to_json(&l.instance, None)?;
            write_or_raw(text, out.as_ref(), json!({ "x_dim": l.instance.x_dim, "y_dim": l.instance.y_dim }))
        }
    }
}

fn write_or_raw(text: String, out: Option<&PathBuf>, summary: Value) -> Result<Outcome> {
    match out {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            let mut v = summary;
            v["out"] = json!(path.display().to_string());
            ok(Status::Success, v)
        }
        None => Ok(Outcome { status: Status::Success, result: summary, raw: Some(text) }),
    }
}

fn error_status(e: &Error) -> Status {
    match e {
        Error::Schema(_) | Error::Io(_) => Status::UsageError,
        Error::InvalidInput(_) | Error::DimensionMismatch { .. } => Status::HypothesisFailure,
        e if e.is_hypothesis_failure() => Status::HypothesisFailure,
        _ => Status::InternalError,
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Generate { .. } => "generate",
        Command::Certify { .. } => "certify",
        Command::Evp { .. } => "evp",
        Command::Nc32 { .. } => "nc32",
        Command::Nck { .. } => "nck",
        Command::Ncq { .. } => "ncq",
        Command::Openness { .. } => "openness",
        Command::Constants { .. } => "constants",
        Command::Reduce { .. } => "reduce",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let outcome = run(&cli.command);
    let name = command_name(&cli.command);
    let (status, result, raw, message) = match outcome {
        Ok(o) => (o.status, o.result, o.raw, None),
        Err(e) => (error_status(&e), Value::Null, None, Some(e.to_string())),
    };
    let mut out = String::new();
    if let Some(text) = raw {
        out = text;
    } else {
        let mut report = json!({
            "command": name,
            "argv": std::env::args().skip(1).collect::<Vec<_>>(),
            "status": status,
            "exit_code": status.code(),
            "result": result,
        });
        if let Some(m) = &message {
            report["error"] = json!(m);
        }
        if cli.timing {
            report["timing_ms"] = json!(start.elapsed().as_secs_f64() * 1e3);
        }
        if cli.json {
            out = serde_json::to_string_pretty(&report).expect("report serializes");
            out.push('\n');
        } else {
            let label = serde_json::to_value(status).expect("status");
            out.push_str(&format!("{name}: {}\n", label.as_str().unwrap_or("?")));
            if let Some(m) = &message {
                out.push_str(&format!("  {m}\n"));
            }
            if let Some(obj) = report["result"].as_object() {
                for (k, v) in obj {
                    let s = v.to_string();
                    if s.len() <= 120 {
                        out.push_str(&format!("  {k}: {s}\n"));
                    } else {
                        out.push_str(&format!("  {k}: ({} bytes, use --json)\n", s.len()));
                    }
                }
            }
        }
    }
    // A closed pipe is not an error of the computation.
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
    ExitCode::from(status.code())
}
