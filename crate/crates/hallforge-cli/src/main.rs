//! `hallforge` — exact verification of Hall-algebra and quiver
//! function-space identities over small prime fields.
//!
//! Exit codes: `0` when every executed check passes, `1` when a check
//! fails, `2` on configuration or usage errors.

use std::env;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use hallforge_core::cache;
use hallforge_core::framed::{highest_weight_dims, FramedSession, Framing};
use hallforge_core::quiver::{self, Quiver};
use hallforge_core::repspace::Session;
use hallforge_core::verify::{self, RunConfig, Suite};
use hallforge_core::{Error, Result};

/// Environment variable naming the classification cache directory.
const CACHE_ENV: &str = "HALLFORGE_CACHE_DIR";

#[derive(Parser)]
#[command(
    name = "hallforge",
    version,
    about = "Exact computations with Hall numbers, quiver representation \
             varieties, and framed function-space modules"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and report every executed check.
    Verify(VerifyArgs),
    /// Weight-space dimensions of a framed function-space module.
    Module(ModuleArgs),
    /// Classify one representation space into isomorphism classes.
    Classes(ClassesArgs),
    /// Inspect or clean the on-disk classification cache.
    Cache(CacheArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Quiver preset (`a1`, `a2`, `kronecker`) or a path to a JSON file.
    #[arg(long, default_value = "a1")]
    quiver: String,
    /// Field size; must be prime.
    #[arg(long, default_value_t = 2)]
    q: u64,
    /// Classification cache directory (overrides HALLFORGE_CACHE_DIR).
    #[arg(long = "cache-dir")]
    cache_dir: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Framing weight as comma-separated entries, one per vertex
    /// (default: all ones).
    #[arg(long)]
    omega: Option<String>,
    /// Defining relation to check: a number 1..6, a comma list, or `all`.
    #[arg(long, default_value = "all")]
    relation: String,
    /// Cap on the total base degree of the swept weights.
    #[arg(long = "max-deg", default_value_t = 3)]
    max_deg: usize,
    /// Lowering depth for the module suite (default: max-deg).
    #[arg(long)]
    depth: Option<usize>,
    /// Suite to run (repeatable): classes, hallnum, fourier, hopf,
    /// relations, module, fiber.  Default: all.
    #[arg(long = "suite")]
    suites: Vec<String>,
    /// Point the framing arrows from the framing vertices into the base.
    #[arg(long = "from-frame")]
    from_frame: bool,
    /// Write the JSON report to this file.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct ModuleArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Framing weight as comma-separated entries (default: all ones).
    #[arg(long)]
    omega: Option<String>,
    /// Maximum lowering degree to compute.
    #[arg(long, default_value_t = 3)]
    depth: usize,
    /// Point the framing arrows from the framing vertices into the base.
    #[arg(long = "from-frame")]
    from_frame: bool,
}

#[derive(Args)]
struct ClassesArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Dimension vector as comma-separated entries, one per vertex.
    #[arg(long)]
    dim: String,
}

#[derive(Args)]
struct CacheArgs {
    #[command(subcommand)]
    action: CacheAction,
}

#[derive(Subcommand)]
enum CacheAction {
    /// List cache entries with their integrity status.
    Inspect {
        /// Cache directory (overrides HALLFORGE_CACHE_DIR).
        #[arg(long)]
        dir: Option<PathBuf>,
    },
    /// Remove entries that fail integrity checks.
    Gc {
        /// Cache directory (overrides HALLFORGE_CACHE_DIR).
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    // Die quietly when a downstream pipe closes instead of panicking on
    // the next write.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::Module(args) => cmd_module(args),
        Command::Classes(args) => cmd_classes(args),
        Command::Cache(args) => cmd_cache(args),
    }
}

fn load_quiver(spec: &str) -> Result<Quiver> {
    match Quiver::preset(spec) {
        Ok(q) => Ok(q),
        Err(_) if spec.contains('.') || spec.contains('/') => {
            let text = fs::read_to_string(spec)?;
            let value: serde_json::Value = serde_json::from_str(&text)?;
            Quiver::from_json(&value)
        }
        Err(e) => Err(e),
    }
}

fn parse_dims(text: &str, n: usize, what: &str) -> Result<Vec<usize>> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != n {
        return Err(Error::InvalidInput(format!(
            "{what} needs {n} comma-separated entries, got {}",
            parts.len()
        )));
    }
    parts
        .iter()
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidInput(format!("bad {what} entry: {s:?}")))
        })
        .collect()
}

fn parse_relations(text: &str) -> Result<Vec<u8>> {
    if text == "all" {
        return Ok((1..=6).collect());
    }
    let mut out = Vec::new();
    for part in text.split(',') {
        let r: u8 = part
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad relation selector: {part:?}")))?;
        if !(1..=6).contains(&r) {
            return Err(Error::InvalidInput(format!(
                "unknown relation number {r} (expected 1..=6 or `all`)"
            )));
        }
        if !out.contains(&r) {
            out.push(r);
        }
    }
    Ok(out)
}

fn parse_suites(args: &[String]) -> Result<Vec<Suite>> {
    if args.is_empty() {
        return Ok(Suite::ALL.to_vec());
    }
    let mut out = Vec::new();
    for raw in args {
        for part in raw.split(',') {
            let suite = Suite::parse(part.trim()).ok_or_else(|| {
                Error::InvalidInput(format!("unknown suite {part:?}"))
            })?;
            if !out.contains(&suite) {
                out.push(suite);
            }
        }
    }
    Ok(out)
}

fn resolve_cache_dir(flag: Option<PathBuf>) -> Option<PathBuf> {
    flag.or_else(|| env::var_os(CACHE_ENV).map(PathBuf::from))
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode> {
    let base = load_quiver(&args.common.quiver)?;
    let n = base.n_vertices();
    let omega = match &args.omega {
        Some(text) => parse_dims(text, n, "omega")?,
        None => vec![1; n],
    };
    let mut config = RunConfig::new(base, args.common.q, omega);
    config.max_degree = args.max_deg;
    config.depth = args.depth.unwrap_or(args.max_deg);
    config.relations = parse_relations(&args.relation)?;
    config.suites = parse_suites(&args.suites)?;
    config.towards_frame = !args.from_frame;
    config.cache_dir = resolve_cache_dir(args.common.cache_dir);
    let report = verify::run(&config)?;
    print!("{}", report.summary());
    if let Some(path) = &args.report {
        let doc = serde_json::to_string_pretty(&report.to_json())?;
        fs::write(path, doc + "\n")?;
        println!("report written to {}", path.display());
    }
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_module(args: ModuleArgs) -> Result<ExitCode> {
    let base = load_quiver(&args.common.quiver)?;
    let n = base.n_vertices();
    let omega = match &args.omega {
        Some(text) => parse_dims(text, n, "omega")?,
        None => vec![1; n],
    };
    let session = match resolve_cache_dir(args.common.cache_dir) {
        Some(dir) => Session::with_cache_dir(args.common.q, dir)?,
        None => Session::new(args.common.q)?,
    };
    let framing = Framing::standard(&base, !args.from_frame);
    let fs_ctx = FramedSession::new(&session, framing);
    let table = highest_weight_dims(&fs_ctx, &omega, args.depth)?;
    println!(
        "module weights: quiver={} p={} omega={} depth={}",
        args.common.quiver,
        args.common.q,
        quiver::dims_label(&omega),
        args.depth
    );
    let mut total = 0usize;
    for (beta, rank) in &table {
        println!("  {:<12} {rank}", quiver::dims_label(beta));
        total += rank;
    }
    println!("total dimension through depth {}: {total}", args.depth);
    let weights: Vec<serde_json::Value> = table
        .iter()
        .map(|(beta, rank)| json!({ "beta": beta, "dim": rank }))
        .collect();
    let doc = json!({
        "quiver": args.common.quiver,
        "p": args.common.q,
        "omega": omega,
        "depth": args.depth,
        "weights": weights,
        "total": total,
    });
    println!("{doc}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_classes(args: ClassesArgs) -> Result<ExitCode> {
    let q = load_quiver(&args.common.quiver)?;
    let dims = parse_dims(&args.dim, q.n_vertices(), "dim")?;
    let session = match resolve_cache_dir(args.common.cache_dir) {
        Some(dir) => Session::with_cache_dir(args.common.q, dir)?,
        None => Session::new(args.common.q)?,
    };
    let table = session.table(&q, &dims)?;
    println!(
        "classes: quiver={} p={} dims={}",
        args.common.quiver,
        args.common.q,
        quiver::dims_label(&dims)
    );
    println!("  {:<6} {:>12} {:>12}", "index", "orbit", "aut");
    let mut total: u128 = 0;
    for (i, cls) in table.classes().iter().enumerate() {
        println!("  {:<6} {:>12} {:>12}", i, cls.orbit_size, cls.aut_order);
        total += cls.orbit_size;
    }
    println!(
        "total classes: {}, total points: {total}, group order: {}",
        table.n_classes(),
        table.group_order()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_cache(args: CacheArgs) -> Result<ExitCode> {
    match args.action {
        CacheAction::Inspect { dir } => {
            let dir = resolve_cache_dir(dir).ok_or_else(|| {
                Error::InvalidInput(format!("no cache directory (pass --dir or set {CACHE_ENV})"))
            })?;
            let entries = cache::inspect(&dir)?;
            if entries.is_empty() {
                println!("cache at {} is empty", dir.display());
                return Ok(ExitCode::SUCCESS);
            }
            for e in &entries {
                println!(
                    "{}  p={} dims={} classes={} bytes={} status={:?}",
                    e.path.display(),
                    e.p,
                    quiver::dims_label(&e.dims),
                    e.n_classes,
                    e.bytes,
                    e.status
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        CacheAction::Gc { dir } => {
            let dir = resolve_cache_dir(dir).ok_or_else(|| {
                Error::InvalidInput(format!("no cache directory (pass --dir or set {CACHE_ENV})"))
            })?;
            let (kept, removed) = cache::gc(&dir)?;
            for e in &removed {
                println!("removed {}", e.path.display());
            }
            println!("kept {} entries, removed {}", kept.len(), removed.len());
            Ok(ExitCode::SUCCESS)
        }
    }
}
