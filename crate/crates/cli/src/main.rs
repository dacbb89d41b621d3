//! `ratmvc`: evaluation, randomized verification, Newton-map tools,
//! fixed-point indices and extremal search.
//!
//! Exit codes: 0 all assertions held, 1 an assertion was violated (witness
//! saved), 2 bad usage or input.

mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use manifest::{RunManifest, Sink};
use ratmvc_core::fixtures::{self, Fixture};
use ratmvc_core::index::{forbidden_check, index_sum_check};
use ratmvc_core::newton::{
    characterize, h_condition_check, newton_map_reduced, DEFAULT_INTEGER_TOL,
};
use ratmvc_core::search::{run_search, witness_archive, SearchConfig};
use ratmvc_core::smale::smale_report;
use ratmvc_core::sphere::DEFAULT_POINT_TOL;
use ratmvc_core::suite::{
    forbidden_suite, index_suite, smale_suite, theorem_suite, SuiteReport, TheoremSuite,
};
use ratmvc_core::{Polynomial, RationalMap, SpherePoint};

#[derive(Parser, Debug)]
#[command(
    name = "ratmvc",
    version,
    about = "Mean value functionals of rational maps"
)]
struct Cli {
    /// Master seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Override the command's main tolerance (point coincidence for smale,
    /// integer detection for newton characterize).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Directory for JSON/CSV outputs and witnesses.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
enum Command {
    /// S(p, x) with its per-critical-point ratios.
    Smale(SmaleArgs),
    /// Randomized suite for one theorem; exit 1 on any violation.
    Verify(VerifyArgs),
    /// Build a Newton map or test whether a map is one.
    #[command(subcommand)]
    Newton(NewtonCommand),
    /// Fixed-point indices, their sum, and the multiplier disc check.
    Index(IndexArgs),
    /// Nelder–Mead search for extremal configurations.
    Search(SearchArgs),
    /// List the built-in maps, or print one.
    Fixtures(FixturesArgs),
}

#[derive(Args, Debug, Serialize)]
struct Source {
    /// JSON file: a polynomial `[[re, im], ...]` or a map `{"num": ..., "den": ...}`.
    #[arg(long, conflicts_with = "fixture")]
    input: Option<PathBuf>,
    /// Built-in fixture: p0:N, quartic, power:N.
    #[arg(long)]
    fixture: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct SmaleArgs {
    #[command(flatten)]
    source: Source,
    /// The point x as `re,im` or `re`.
    #[arg(long, default_value = "0")]
    x: String,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Theorem {
    Thm1,
    Thm2,
    IndexSum,
    Forbidden,
    Smale,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    #[arg(value_enum)]
    theorem: Theorem,
    /// Degrees, e.g. `3` or `2-5` or `2,4`; trials cycle through them.
    #[arg(long, default_value = "3")]
    degree: String,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// For `forbidden`: also check iterates up to this order.
    #[arg(long, default_value_t = 1)]
    max_iterate: usize,
}

#[derive(Subcommand, Debug, Serialize)]
enum NewtonCommand {
    /// Newton map of a polynomial, with the second-derivative condition.
    Build(Source),
    /// Decide whether a map is a Newton map and rebuild g.
    Characterize(Source),
}

#[derive(Args, Debug, Serialize)]
struct IndexArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value_t = 1)]
    max_iterate: usize,
}

#[derive(Args, Debug, Serialize)]
struct SearchArgs {
    /// JSON SearchConfig; `--seed` overrides its seed when given explicitly.
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct FixturesArgs {
    name: Option<String>,
}

enum Status {
    Passed,
    Violated,
}

struct Ctx {
    seed: u64,
    seed_given: bool,
    tol: Option<f64>,
    sink: Sink,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let seed_given = std::env::args().any(|a| a == "--seed" || a.starts_with("--seed="));
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
        {
            eprintln!("error: --jobs: {e}");
            return ExitCode::from(2);
        }
    }
    let ctx = Ctx {
        seed: cli.seed,
        seed_given,
        tol: cli.tol,
        sink: Sink {
            dir: cli.out.clone(),
        },
    };
    match run(&ctx, &cli.command) {
        Ok(Status::Passed) => ExitCode::SUCCESS,
        Ok(Status::Violated) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(ctx: &Ctx, command: &Command) -> Result<Status> {
    let config = serde_json::to_value(command)?;
    match command {
        Command::Smale(a) => cmd_smale(ctx, a, RunManifest::new("smale", config, ctx.seed)),
        Command::Verify(a) => cmd_verify(ctx, a, RunManifest::new("verify", config, ctx.seed)),
        Command::Newton(c) => cmd_newton(ctx, c, RunManifest::new("newton", config, ctx.seed)),
        Command::Index(a) => cmd_index(ctx, a, RunManifest::new("index", config, ctx.seed)),
        Command::Search(a) => cmd_search(ctx, a, RunManifest::new("search", config, ctx.seed)),
        Command::Fixtures(a) => {
            cmd_fixtures(ctx, a, RunManifest::new("fixtures", config, ctx.seed))
        }
    }
}

fn parse_point(s: &str) -> Result<SpherePoint> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("inf") {
        return Ok(SpherePoint::Infinity);
    }
    let parts: Vec<&str> = s.split(',').collect();
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .with_context(|| format!("bad number {t:?} in point {s:?}"))
    };
    let z = match parts.as_slice() {
        [re] => Complex64::new(num(re)?, 0.0),
        [re, im] => Complex64::new(num(re)?, num(im)?),
        _ => bail!("point {s:?} should be `re,im`, `re` or `inf`"),
    };
    if !z.is_finite() {
        bail!("point {s:?} is not finite");
    }
    Ok(SpherePoint::Finite(z))
}

fn parse_degrees(s: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        let bad = || anyhow!("bad degree list {s:?}");
        if let Some((a, b)) = part.split_once('-') {
            let (a, b): (usize, usize) =
                (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
            if a > b {
                return Err(bad());
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    if out.iter().any(|&d| d < 2) {
        bail!("degrees must be at least 2");
    }
    Ok(out)
}

enum Loaded {
    Polynomial(Polynomial),
    Map(RationalMap),
    Fixture(Fixture),
}

impl Loaded {
    fn polynomial(self) -> Result<Polynomial> {
        match self {
            Loaded::Polynomial(p) => Ok(p),
            Loaded::Fixture(Fixture {
                polynomial: Some(p),
                ..
            }) => Ok(p),
            Loaded::Fixture(f) => bail!("fixture {} has no underlying polynomial", f.name),
            Loaded::Map(_) => bail!("expected a polynomial, got a rational map"),
        }
    }

    fn map(self) -> Result<RationalMap> {
        Ok(match self {
            Loaded::Polynomial(p) => RationalMap::polynomial(p)?,
            Loaded::Map(r) => r,
            Loaded::Fixture(f) => f.map,
        })
    }
}

fn load(source: &Source, manifest: &mut RunManifest) -> Result<Loaded> {
    match (&source.input, &source.fixture) {
        (Some(path), _) => parse_input(&manifest.read_input(path)?, path),
        (None, Some(name)) => Ok(Loaded::Fixture(fixtures::by_name(name)?)),
        (None, None) => bail!("give --input FILE or --fixture NAME"),
    }
}

fn parse_input(text: &str, path: &Path) -> Result<Loaded> {
    let value: serde_json::Value = serde_json::from_str(text)
        .with_context(|| format!("{} is not valid JSON", path.display()))?;
    if value.is_array() {
        let p: Polynomial = serde_json::from_value(value)
            .with_context(|| format!("{}: bad polynomial", path.display()))?;
        Ok(Loaded::Polynomial(p))
    } else {
        let r: RationalMap = serde_json::from_value(value)
            .with_context(|| format!("{}: bad rational map", path.display()))?;
        Ok(Loaded::Map(r))
    }
}

fn cmd_smale(ctx: &Ctx, a: &SmaleArgs, mut manifest: RunManifest) -> Result<Status> {
    let p = load(&a.source, &mut manifest)?.polynomial()?;
    let x = parse_point(&a.x)?
        .as_finite()
        .ok_or_else(|| anyhow!("x must be finite"))?;
    let rep = smale_report(&p, x, ctx.tol.unwrap_or(DEFAULT_POINT_TOL))?;
    let holds = rep.value <= rep.bound;
    let result = serde_json::json!({
        "S": rep.value,
        "ratios": rep.ratios.iter().map(|(z, v)| serde_json::json!({ "critical_point": [z.re, z.im], "ratio": v })).collect::<Vec<_>>(),
        "bound": rep.bound,
        "margin": rep.bound - rep.value,
        "bound_holds": holds,
        "conjectured": rep.conjectured,
        "conjectured_margin": rep.conjectured - rep.value,
    });
    ctx.sink.emit("smale", &manifest, &result, None)?;
    if !holds {
        ctx.sink.witness(
            "smale-violation",
            &manifest,
            &serde_json::json!({ "polynomial": p, "x": [x.re, x.im] }),
        )?;
        return Ok(Status::Violated);
    }
    Ok(Status::Passed)
}

fn cmd_verify(ctx: &Ctx, a: &VerifyArgs, manifest: RunManifest) -> Result<Status> {
    let (rep, details): (SuiteReport, Option<Vec<serde_json::Value>>) = match a.theorem {
        Theorem::Forbidden => {
            let (rep, details) =
                forbidden_suite(&fixtures::all_critical_fixed_registry(), a.max_iterate);
            (rep, Some(details))
        }
        other => {
            let degrees = parse_degrees(&a.degree)?;
            if a.trials == 0 {
                bail!("--trials must be positive");
            }
            let rep = match other {
                Theorem::Thm1 => theorem_suite(TheoremSuite::One, &degrees, a.trials, ctx.seed),
                Theorem::Thm2 => theorem_suite(TheoremSuite::Two, &degrees, a.trials, ctx.seed),
                Theorem::IndexSum => index_suite(&degrees, a.trials, ctx.seed),
                Theorem::Smale => smale_suite(&degrees, a.trials, ctx.seed),
                Theorem::Forbidden => unreachable!(),
            };
            (rep, None)
        }
    };
    let name = format!("verify-{}", rep.suite);
    let result = serde_json::json!({
        "suite": rep.suite,
        "trials": rep.trials,
        "violations": rep.violations.len(),
        "skipped": rep.skipped,
        "min": rep.min,
        "max": rep.max,
        "observations": rep.observations,
        "fixtures": details,
        "rows": rep.rows,
    });
    ctx.sink.emit(&name, &manifest, &result, Some(&rep.csv()))?;
    if rep.passed() {
        return Ok(Status::Passed);
    }
    let path = ctx
        .sink
        .witness(&format!("{name}-violations"), &manifest, &rep.violations)?;
    eprintln!(
        "{} violation(s); witnesses in {}",
        rep.violations.len(),
        path.display()
    );
    Ok(Status::Violated)
}

fn cmd_newton(ctx: &Ctx, c: &NewtonCommand, mut manifest: RunManifest) -> Result<Status> {
    match c {
        NewtonCommand::Build(source) => {
            let h = load(source, &mut manifest)?.polynomial()?;
            let red = newton_map_reduced(&h, &Polynomial::one())?;
            let cond = h_condition_check(&h)?;
            let result = serde_json::json!({
                "map": red.map,
                "degree": red.map.degree(),
                "removed_factor": red.removed,
                "h_condition": cond,
            });
            ctx.sink.emit("newton-build", &manifest, &result, None)?;
        }
        NewtonCommand::Characterize(source) => {
            let r = load(source, &mut manifest)?.map()?;
            let ch = characterize(&r, ctx.tol.unwrap_or(DEFAULT_INTEGER_TOL))?;
            ctx.sink.emit("newton-characterize", &manifest, &ch, None)?;
        }
    }
    Ok(Status::Passed)
}

fn cmd_index(ctx: &Ctx, a: &IndexArgs, mut manifest: RunManifest) -> Result<Status> {
    let r = load(&a.source, &mut manifest)?.map()?;
    let sum = index_sum_check(&r)?;
    let forbidden = match forbidden_check(&r, a.max_iterate) {
        Ok(rep) => Some(rep),
        Err(ratmvc_core::Error::Precondition(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let ok = sum.deviation <= ratmvc_core::suite::INDEX_SUM_TOL
        && forbidden.as_ref().is_none_or(|f| f.passed());
    let result = serde_json::json!({ "index_sum": sum, "forbidden": forbidden });
    ctx.sink.emit("index", &manifest, &result, None)?;
    if ok {
        Ok(Status::Passed)
    } else {
        ctx.sink.witness(
            "index-violation",
            &manifest,
            &serde_json::json!({ "map": r }),
        )?;
        Ok(Status::Violated)
    }
}

fn cmd_search(ctx: &Ctx, a: &SearchArgs, mut manifest: RunManifest) -> Result<Status> {
    let text = manifest.read_input(&a.config)?;
    let mut cfg: SearchConfig = serde_json::from_str(&text)
        .with_context(|| format!("{}: bad search config", a.config.display()))?;
    if ctx.seed_given {
        cfg.seed = ctx.seed;
    }
    cfg.validate()?;
    manifest.seed = cfg.seed;
    manifest.config["resolved"] = serde_json::to_value(&cfg)?;
    let res = run_search(&cfg)?;
    ctx.sink
        .emit("search", &manifest, &res, Some(&res.trace_csv()))?;
    let witness_dir = ctx.sink.dir.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&witness_dir)?;
    let path = witness_dir.join("search-witness.json");
    witness_archive(&res, &path)?;
    eprintln!(
        "witness archived at {} (gap to conjectured value {:+.3e})",
        path.display(),
        res.gap
    );
    Ok(if res.bound_violations() == 0 {
        Status::Passed
    } else {
        Status::Violated
    })
}

fn cmd_fixtures(ctx: &Ctx, a: &FixturesArgs, manifest: RunManifest) -> Result<Status> {
    match &a.name {
        Some(name) => ctx
            .sink
            .emit("fixture", &manifest, &fixtures::by_name(name)?, None)?,
        None => {
            let names: Vec<String> = fixtures::all_critical_fixed_registry()
                .into_iter()
                .map(|f| f.name)
                .collect();
            let result = serde_json::json!({
                "patterns": ["p0:N", "quartic", "power:N"],
                "all_critical_fixed": names,
            });
            ctx.sink.emit("fixtures", &manifest, &result, None)?;
        }
    }
    Ok(Status::Passed)
}
