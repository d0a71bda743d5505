mod report;
mod suite;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use fon_core::cache;
use fon_core::qnum::QContext;
use fon_core::rep::default_kmax;
use fon_core::{par, Error, Result};

use report::{Group, JsonReport};
use suite::Ctx;

#[derive(Parser)]
#[command(name = "fon", version, about = "Representation theory and analytic estimates for free orthogonal quantum groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dimensions d_k = U_k(n) for k = 0..=kmax.
    Dims(DimsArgs),
    /// Exact Jones-Wenzl projection p_k as a combination of diagrams.
    Jw(JwArgs),
    /// Intertwiner norms N^{k,l}_m, computed and from the product formula.
    Norms(Common),
    /// Far-apart norms, trace sums and adjoint-coefficient estimates.
    Estimates(Common),
    /// Characters, multipliers, the derivation and its cocycle, conditional negativity.
    Deform(Common),
    /// Every family: structural checks, estimates and deformation checks.
    Verify(Common),
    /// Build or inspect the on-disk tower cache.
    Cache(CacheArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct DimsArgs {
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 8)]
    kmax: usize,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct JwArgs {
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long)]
    k: usize,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Highest tower level (defaults to the per-n cap, at most 7).
    #[arg(long)]
    kmax: Option<usize>,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Directory for the report file; without it only the summary table is printed.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated family names, or `all`.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    family: Vec<String>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value = ".fon-cache")]
    cache_dir: PathBuf,
}

#[derive(Args)]
struct CacheArgs {
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long)]
    kmax: Option<usize>,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value = ".fon-cache")]
    cache_dir: PathBuf,
    /// Print the header of an existing cache file instead of building.
    #[arg(long)]
    inspect: Option<PathBuf>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidArgument(_) | Error::Shape { .. } | Error::Parse(_) => 2,
        Error::Resource { .. } | Error::Cache(_) | Error::Io(_) => 3,
        Error::Degenerate { .. } => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Dims(a) => dims(a),
        Command::Jw(a) => {
            QContext::new(a.n)?;
            let p = fon_core::tl::jones_wenzl(a.k, a.n as i64)?;
            println!("{p}");
            Ok(true)
        }
        Command::Norms(c) => report_command("norms", &c, &["norms"]),
        Command::Estimates(c) => report_command("estimates", &c, suite::ESTIMATE_FAMILIES),
        Command::Deform(c) => report_command("deform", &c, suite::DEFORM_FAMILIES),
        Command::Verify(c) => {
            let all: Vec<&str> =
                [suite::STRUCTURE_FAMILIES, suite::ESTIMATE_FAMILIES, suite::DEFORM_FAMILIES].concat();
            report_command("verify", &c, &all)
        }
        Command::Cache(a) => cache_command(a),
    }
}

fn dims(a: DimsArgs) -> Result<bool> {
    let ctx = QContext::new(a.n)?;
    let values: Vec<String> = (0..=a.kmax).map(|k| ctx.dim_exact(k).to_string()).collect();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match a.format {
        None => writeln!(out, "{}", values.join(", "))?,
        Some(Format::Csv) => {
            writeln!(out, "k,dim")?;
            for (k, v) in values.iter().enumerate() {
                writeln!(out, "{k},{v}")?;
            }
        }
        Some(Format::Json) => writeln!(out, "{{\"n\": {}, \"dims\": [{}]}}", a.n, values.join(", "))?,
    }
    Ok(true)
}

fn validate(c: &Common) -> Result<usize> {
    QContext::new(c.n)?;
    if !(c.tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", c.tol)));
    }
    let cap = default_kmax(c.n);
    let kmax = c.kmax.unwrap_or(cap.min(7));
    if kmax > cap {
        return Err(Error::Resource { what: format!("tower level {kmax} for n = {}", c.n), requested: kmax, cap });
    }
    if kmax < 2 {
        return Err(Error::InvalidArgument("kmax must be at least 2".into()));
    }
    if let Some(t) = c.threads {
        par::set_threads(t)?;
    }
    Ok(kmax)
}

fn select(requested: &[String], available: &[&str]) -> Result<Vec<String>> {
    if requested.iter().any(|f| f == "all") {
        return Ok(available.iter().map(|s| s.to_string()).collect());
    }
    for f in requested {
        if !available.contains(&f.as_str()) {
            return Err(Error::InvalidArgument(format!("unknown family {f:?}; expected one of {}", available.join(", "))));
        }
    }
    // run in the canonical order so output does not depend on flag order
    Ok(available.iter().filter(|a| requested.iter().any(|f| f == *a)).map(|s| s.to_string()).collect())
}

fn report_command(command: &str, c: &Common, available: &[&str]) -> Result<bool> {
    let kmax = validate(c)?;
    let families = select(&c.family, available)?;
    let (tower, hash, _) = cache::load_or_build_tower(&c.cache_dir, c.n, kmax, c.tol)?;
    let needs_alg = families.iter().any(|f| matches!(f.as_str(), "cocycle" | "cnd" | "tau"));
    let alg = if needs_alg && kmax >= 4 {
        Some(cache::load_or_build_cells(&c.cache_dir, &tower, (kmax / 2).min(3), c.tol)?.0)
    } else {
        None
    };
    let ctx = Ctx { n: c.n, kmax, tol: c.tol, seed: c.seed, tower: &tower, alg: alg.as_ref() };
    let mut groups: Vec<Group> = Vec::new();
    for f in &families {
        groups.extend(suite::run_family(f, &ctx)?);
    }
    let pass = groups.iter().all(|g| g.pass);
    report::print_table(&groups, io::stdout().lock())?;
    if let Some(dir) = &c.out {
        std::fs::create_dir_all(dir)?;
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        match c.format {
            Format::Csv => report::write_csv(&groups, create(&dir.join(format!("{command}.csv")))?)?,
            Format::Json => {
                let rep = JsonReport {
                    version: env!("CARGO_PKG_VERSION"),
                    command,
                    n: c.n,
                    kmax,
                    tol: c.tol,
                    seed: c.seed,
                    cache_hash: Some(hash),
                    timestamp,
                    pass,
                    groups: &groups,
                };
                report::write_json(&rep, create(&dir.join(format!("{command}.json")))?)?
            }
        }
    }
    Ok(pass)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn cache_command(a: CacheArgs) -> Result<bool> {
    let path = match a.inspect {
        Some(p) => p,
        None => {
            QContext::new(a.n)?;
            let kmax = a.kmax.unwrap_or(default_kmax(a.n).min(7));
            let (_, _, reused) = cache::load_or_build_tower(&a.cache_dir, a.n, kmax, a.tol)?;
            println!("{}", if reused { "reused" } else { "built" });
            cache::tower_path(&a.cache_dir, a.n, kmax)
        }
    };
    let (h, hash) = cache::inspect(&path)?;
    println!("path: {}", path.display());
    println!("kind: {:?}", h.kind);
    println!("format version: {}", h.version);
    println!("n: {}", h.n);
    println!("kmax: {}", h.kmax);
    println!("tol: {:e}", h.tol);
    println!("entries: {}", h.entries);
    println!("sha256: {hash}");
    Ok(true)
}
