//! Argument parsing and dispatch for the `conecal` binary.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{
    boundary_domain_probe, verify_fenchel_moreau, verify_gridfn, CatalogFn, Status, VerifyConfig,
};
use crate::cones::{Cone, DEFAULT_TOL};
use crate::conjugate::{
    fast_applicable, fast_conjugate_orthant_onto, monotone_conjugate, GridFn, DEFAULT_DUAL_FACTOR,
};
use crate::error::{Error, Result};
use crate::faces::{audit_face, perfectness_audit};
use crate::grid::build_grid;
use crate::io;
use crate::rng::RngSeed;
use crate::value::ExtReal;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_HYPOTHESIS: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "conecal",
    version,
    about = "Conjugate calculus on self-dual cones"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check f = f** on refining grids and audit the hypotheses.
    Verify(RunSpec),
    /// Write f* as a grid-function CSV.
    Conjugate(RunSpec),
    /// Project a CSV of points onto the cone.
    Project(RunSpec),
    /// Perfectness audit of the cone, or an audit of one face with --face.
    Faces(RunSpec),
    /// Sampled self-duality audit.
    AuditCone(RunSpec),
    /// Naive vs fast transform timings (orthant only).
    Bench(RunSpec),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct RunSpec {
    /// orthant:d, psd:n or lorentz:d
    #[arg(long)]
    pub cone: Option<String>,
    /// catalog:<name>[:<params>] or a grid-function CSV path
    #[arg(long = "fn")]
    #[serde(rename = "fn")]
    pub function: Option<String>,
    #[arg(long)]
    pub radius: Option<String>,
    /// Grid spacing; fractions like 1/63 are accepted.
    #[arg(long = "h")]
    pub spacing: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub levels: usize,
    /// Defaults to twice the radius.
    #[arg(long)]
    pub dual_radius: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Points CSV for `project`.
    #[arg(long)]
    pub points: Option<PathBuf>,
    /// orthant-face:d:S, psd-block:n:m[:rotfile] or lorentz-ray:d:gfile
    #[arg(long)]
    pub face: Option<String>,
    /// Sample count for audits.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
}

/// What a command produced: the report text and the process exit code.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
}

fn need<'a>(v: &'a Option<String>, flag: &str) -> Result<&'a str> {
    v.as_deref()
        .ok_or_else(|| Error::parse(flag, "required flag is missing"))
}

fn positive(v: &Option<String>, flag: &str) -> Result<f64> {
    let x = io::parse_real(need(v, flag)?)?;
    if x <= 0.0 {
        return Err(Error::parse(
            need(v, flag)?,
            format!("{flag} must be positive"),
        ));
    }
    Ok(x)
}

fn cone_of(spec: &RunSpec) -> Result<Cone> {
    need(&spec.cone, "--cone")?.parse()
}

enum FnInput {
    Catalog(CatalogFn),
    File(GridFn),
}

fn fn_input(spec: &RunSpec) -> Result<FnInput> {
    let s = need(&spec.function, "--fn")?;
    if s.starts_with("catalog:") {
        return Ok(FnInput::Catalog(s.parse()?));
    }
    let f = io::read_gridfn(Path::new(s))?;
    if let Some(c) = &spec.cone {
        let c: Cone = c.parse()?;
        if c != f.cone() {
            return Err(Error::ConeMismatch(c.to_string(), f.cone().to_string()));
        }
    }
    Ok(FnInput::File(f))
}

fn sampled(spec: &RunSpec) -> Result<GridFn> {
    match fn_input(spec)? {
        FnInput::File(f) => Ok(f),
        FnInput::Catalog(cf) => {
            let cone = cone_of(spec)?;
            let bound = cf.bind(cone)?;
            let g = build_grid(
                cone,
                positive(&spec.radius, "--radius")?,
                positive(&spec.spacing, "--h")?,
            )?;
            GridFn::from_fn(Arc::new(g), |x| bound.eval(x))
        }
    }
}

fn dual_radius(spec: &RunSpec, primal_radius: f64) -> Result<f64> {
    match &spec.dual_radius {
        Some(_) => positive(&spec.dual_radius, "--dual-radius"),
        None => Ok(DEFAULT_DUAL_FACTOR * primal_radius),
    }
}

fn json_report(
    command: &str,
    spec: &RunSpec,
    provenance: Value,
    result: Value,
    timings: Value,
) -> String {
    let v = json!({
        "command": command,
        "spec": spec,
        "provenance": provenance,
        "result": result,
        "timings": timings,
    });
    let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
    s.push('\n');
    s
}

fn status_code(s: Status) -> i32 {
    match s {
        Status::IdentityHolds => EXIT_OK,
        Status::HypothesisFailed => EXIT_HYPOTHESIS,
        Status::InconclusiveDiscretization => EXIT_INCONCLUSIVE,
    }
}

fn verify(spec: &RunSpec) -> Result<Outcome> {
    let t0 = Instant::now();
    if spec.levels == 0 {
        return Err(Error::parse("--levels", "at least one level is required"));
    }
    let seed = RngSeed(spec.seed);
    if let Some(face_spec) = &spec.face {
        let face = io::parse_face_spec(face_spec, None)?;
        let f = sampled(spec)?;
        let masked = GridFn::new(
            f.grid().clone(),
            (0..f.len())
                .map(|i| {
                    let on = face.member(&f.grid().point(i), DEFAULT_TOL)?;
                    Ok(if on { f.value(i) } else { ExtReal::PosInf })
                })
                .collect::<Result<_>>()?,
        )?;
        let v = boundary_domain_probe(&face, &masked, seed)?;
        let code = if v.holds {
            EXIT_OK
        } else if !v.ambient.gamma_certified {
            EXIT_HYPOTHESIS
        } else {
            EXIT_INCONCLUSIVE
        };
        let prov = json!({ "primal_grid_sha256": v.ambient.final_level().primal_grid_sha256 });
        let output = match spec.format {
            Format::Json => json_report(
                "verify",
                spec,
                prov,
                serde_json::to_value(&v).expect("serializes"),
                json!({ "total_seconds": t0.elapsed().as_secs_f64() }),
            ),
            Format::Csv => v.ambient.trend_csv(),
        };
        return Ok(Outcome { code, output });
    }

    let verdict = match fn_input(spec)? {
        FnInput::File(f) => {
            if spec.levels > 1 {
                return Err(Error::parse(
                    "--levels",
                    "a grid-function file supports a single level",
                ));
            }
            let dr = match &spec.dual_radius {
                Some(_) => Some(positive(&spec.dual_radius, "--dual-radius")?),
                None => None,
            };
            verify_gridfn(&f, dr, seed)?
        }
        FnInput::Catalog(cf) => {
            let cone = cone_of(spec)?;
            let bound = cf.bind(cone)?;
            let radius = positive(&spec.radius, "--radius")?;
            let cfg = VerifyConfig::new(cone, radius, positive(&spec.spacing, "--h")?)
                .levels(spec.levels)
                .dual_radius(dual_radius(spec, radius)?)
                .seed(seed);
            verify_fenchel_moreau(&bound, &cfg)?
        }
    };
    let provenance: Vec<Value> = verdict
        .levels
        .iter()
        .map(|l| json!({ "h": l.h, "primal_grid_sha256": l.primal_grid_sha256, "dual_grid_sha256": l.dual_grid_sha256 }))
        .collect();
    let output = match spec.format {
        Format::Json => json_report(
            "verify",
            spec,
            Value::Array(provenance),
            serde_json::to_value(&verdict).expect("serializes"),
            json!({ "levels": verdict.timings, "total_seconds": t0.elapsed().as_secs_f64() }),
        ),
        Format::Csv => verdict.trend_csv(),
    };
    Ok(Outcome {
        code: status_code(verdict.status),
        output,
    })
}

fn conjugate(spec: &RunSpec) -> Result<Outcome> {
    let f = sampled(spec)?;
    let g = f.grid();
    let dual = Arc::new(build_grid(
        g.cone(),
        dual_radius(spec, g.radius())?,
        g.spacing(),
    )?);
    let fs = if fast_applicable(g, &dual) {
        fast_conjugate_orthant_onto(&f, &dual)?
    } else {
        monotone_conjugate(&f, &dual)?
    };
    Ok(Outcome {
        code: EXIT_OK,
        output: io::write_gridfn_string(&fs),
    })
}

fn project(spec: &RunSpec) -> Result<Outcome> {
    let cone = cone_of(spec)?;
    let path = spec
        .points
        .as_ref()
        .ok_or_else(|| Error::parse("--points", "required flag is missing"))?;
    let pts = io::read_points(path)?;
    let proj = pts
        .iter()
        .map(|p| cone.project(p))
        .collect::<Result<Vec<_>>>()?;
    let output = match spec.format {
        Format::Csv => io::write_points_string(&proj),
        Format::Json => json_report(
            "project",
            spec,
            json!({}),
            json!(proj.iter().map(|p| p.coords().to_vec()).collect::<Vec<_>>()),
            json!({}),
        ),
    };
    Ok(Outcome {
        code: EXIT_OK,
        output,
    })
}

fn json_only(spec: &RunSpec, cmd: &str) -> Result<()> {
    if spec.format != Format::Json {
        return Err(Error::parse(
            "--format",
            format!("`{cmd}` reports JSON only"),
        ));
    }
    Ok(())
}

fn faces(spec: &RunSpec) -> Result<Outcome> {
    json_only(spec, "faces")?;
    let t0 = Instant::now();
    let seed = RngSeed(spec.seed);
    let (result, passed) = match &spec.face {
        Some(fs) => {
            let face = io::parse_face_spec(fs, None)?;
            let a = audit_face(&face, spec.samples, seed);
            let p = a.passed;
            (serde_json::to_value(a).expect("serializes"), p)
        }
        None => {
            let r = perfectness_audit(cone_of(spec)?, spec.samples, seed);
            let p = r.passed;
            (serde_json::to_value(r).expect("serializes"), p)
        }
    };
    Ok(Outcome {
        code: if passed { EXIT_OK } else { EXIT_HYPOTHESIS },
        output: json_report(
            "faces",
            spec,
            json!({}),
            result,
            json!({ "total_seconds": t0.elapsed().as_secs_f64() }),
        ),
    })
}

fn audit_cone(spec: &RunSpec) -> Result<Outcome> {
    json_only(spec, "audit-cone")?;
    let t0 = Instant::now();
    let r = cone_of(spec)?.self_duality_audit(spec.samples.max(1), RngSeed(spec.seed));
    Ok(Outcome {
        code: if r.passed() { EXIT_OK } else { EXIT_HYPOTHESIS },
        output: json_report(
            "audit-cone",
            spec,
            json!({}),
            serde_json::to_value(&r).expect("serializes"),
            json!({ "total_seconds": t0.elapsed().as_secs_f64() }),
        ),
    })
}

#[derive(Serialize)]
struct BenchRow {
    h: f64,
    nodes: usize,
    dual_nodes: usize,
    naive_seconds: f64,
    fast_seconds: f64,
    speedup: f64,
    max_abs_diff: f64,
}

fn bench(spec: &RunSpec) -> Result<Outcome> {
    let cone = cone_of(spec)?;
    if !matches!(cone, Cone::Orthant(_)) {
        return Err(Error::parse(
            cone.to_string(),
            "bench supports orthant cones only",
        ));
    }
    let FnInput::Catalog(cf) = fn_input(spec)? else {
        return Err(Error::parse(
            need(&spec.function, "--fn")?,
            "bench needs a catalog function",
        ));
    };
    let bound = cf.bind(cone)?;
    let radius = positive(&spec.radius, "--radius")?;
    let h0 = positive(&spec.spacing, "--h")?;
    let dr = dual_radius(spec, radius)?;
    let mut rows = Vec::new();
    for l in 0..spec.levels.max(1) {
        let h = h0 / 2f64.powi(l as i32);
        let g = Arc::new(build_grid(cone, radius, h)?);
        let dual = Arc::new(build_grid(cone, dr, h)?);
        let f = GridFn::from_fn(g.clone(), |x| bound.eval(x))?;
        let t = Instant::now();
        let naive = monotone_conjugate(&f, &dual)?;
        let naive_seconds = t.elapsed().as_secs_f64();
        let t = Instant::now();
        let fast = fast_conjugate_orthant_onto(&f, &dual)?;
        let fast_seconds = t.elapsed().as_secs_f64();
        let max_abs_diff = naive
            .values()
            .iter()
            .zip(fast.values())
            .map(|(a, b)| match (a, b) {
                (ExtReal::Finite(a), ExtReal::Finite(b)) => (a - b).abs(),
                (ExtReal::PosInf, ExtReal::PosInf) => 0.0,
                _ => f64::INFINITY,
            })
            .fold(0.0, f64::max);
        rows.push(BenchRow {
            h,
            nodes: g.len(),
            dual_nodes: dual.len(),
            naive_seconds,
            fast_seconds,
            speedup: naive_seconds / fast_seconds.max(1e-12),
            max_abs_diff,
        });
    }
    let output = match spec.format {
        Format::Csv => {
            let mut s = String::from(
                "h,nodes,dual_nodes,naive_seconds,fast_seconds,speedup,max_abs_diff\n",
            );
            for r in &rows {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    r.h,
                    r.nodes,
                    r.dual_nodes,
                    r.naive_seconds,
                    r.fast_seconds,
                    r.speedup,
                    r.max_abs_diff
                ));
            }
            s
        }
        Format::Json => {
            let sizes: Vec<Value> = rows
                .iter()
                .map(|r| json!({ "h": r.h, "nodes": r.nodes, "dual_nodes": r.dual_nodes, "max_abs_diff": r.max_abs_diff }))
                .collect();
            let times: Vec<Value> = rows
                .iter()
                .map(|r| json!({ "naive_seconds": r.naive_seconds, "fast_seconds": r.fast_seconds, "speedup": r.speedup }))
                .collect();
            json_report(
                "bench",
                spec,
                json!({}),
                Value::Array(sizes),
                Value::Array(times),
            )
        }
    };
    Ok(Outcome {
        code: EXIT_OK,
        output,
    })
}

/// Applies `CONECAL_THREADS` (0 or unset = one worker per core) to the global pool.
pub fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("CONECAL_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| Error::parse(v.clone(), "CONECAL_THREADS must be a nonnegative integer"))?;
    // a pool that was already built keeps its size
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

/// Runs one parsed command, writing to `--out` if given and otherwise
/// returning the report text in the outcome.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    let (spec, mut outcome) = match &cli.command {
        Command::Verify(s) => (s, verify(s)?),
        Command::Conjugate(s) => (s, conjugate(s)?),
        Command::Project(s) => (s, project(s)?),
        Command::Faces(s) => (s, faces(s)?),
        Command::AuditCone(s) => (s, audit_cone(s)?),
        Command::Bench(s) => (s, bench(s)?),
    };
    if let Some(path) = &spec.out {
        std::fs::write(path, &outcome.output)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        outcome.output.clear();
    }
    Ok(outcome)
}

/// Full entry point: parse, run, print, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return EXIT_ERROR;
    }
    match execute(&cli) {
        Ok(o) => {
            print!("{}", o.output);
            o.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
