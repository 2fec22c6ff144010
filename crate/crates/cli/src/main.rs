mod batch;
mod cache;
mod compute;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context as _;
use clap::{Args, Parser, Subcommand, ValueEnum};
use vkinv_core::algebra::GradedPolynomial;
use vkinv_core::genus::CoefficientRegistry;
use vkinv_core::homology::{self, Flavor, HomologyError, DEFAULT_MAX_CROSSINGS};
use vkinv_core::knotio::{gauss_to_pd, parse_gauss, parse_pd, serialize_pd, DiagramError, PlanarDiagram};

use cache::Cache;
use compute::{compute, Options, ResultRecord, ENGINE_VERSION, INVARIANTS};

#[derive(Parser)]
#[command(name = "vkinv", version, about = "Invariants of virtual knots and links")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one invariant of one diagram.
    Compute {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(INVARIANTS))]
        invariant: String,
        #[command(flatten)]
        common: Common,
    },
    /// Compute invariants for every row of a `name<TAB>diagram` table.
    Batch {
        table: PathBuf,
        /// Comma-separated or repeated.
        #[arg(long, required = true, value_delimiter = ',', value_parser = clap::builder::PossibleValuesParser::new(INVARIANTS))]
        invariant: Vec<String>,
        /// Records go here as JSON lines; the summary goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Genus lower bounds of one diagram.
    Genus {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
    },
    /// Quick built-in sanity checks.
    Selftest,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Input {
    #[arg(long)]
    pd: Option<String>,
    #[arg(long)]
    gauss: Option<String>,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    parity_level: u32,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Extra graphical coefficient entries, on top of the built-in ones.
    #[arg(long)]
    registry: Option<PathBuf>,
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Compare values up to mirror image in batch summaries.
    #[arg(long)]
    mirror_tolerant: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_CROSSINGS)]
    max_crossings: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug)]
enum Failure {
    Parse(String),
    SizeLimit(String),
    Other(anyhow::Error),
}

impl Failure {
    fn exit(self) -> ExitCode {
        let (msg, code) = match self {
            Failure::Parse(m) => (m, 2),
            Failure::SizeLimit(m) => (m, 3),
            Failure::Other(e) => (format!("{e:#}"), 1),
        };
        eprintln!("vkinv: {msg}");
        ExitCode::from(code)
    }
}

impl From<DiagramError> for Failure {
    fn from(e: DiagramError) -> Self {
        Failure::Parse(e.to_string())
    }
}

impl From<HomologyError> for Failure {
    fn from(e: HomologyError) -> Self {
        match e {
            HomologyError::SizeLimit { .. } => Failure::SizeLimit(e.to_string()),
            other => Failure::Other(other.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

fn read_input(input: &Input) -> Result<PlanarDiagram, DiagramError> {
    match (&input.pd, &input.gauss) {
        (Some(pd), _) => parse_pd(pd),
        (None, Some(g)) => gauss_to_pd(&parse_gauss(g)?),
        (None, None) => unreachable!("clap requires one input"),
    }
}

fn load_registry(path: Option<&PathBuf>) -> Result<CoefficientRegistry, Failure> {
    let mut r = CoefficientRegistry::builtin();
    if let Some(p) = path {
        let text = std::fs::read_to_string(p).with_context(|| format!("reading registry {}", p.display()))?;
        let extra = CoefficientRegistry::parse(&text).map_err(|e| Failure::Parse(format!("{}: {e}", p.display())))?;
        r.merge(extra).map_err(|e| Failure::Parse(format!("{}: {e}", p.display())))?;
    }
    Ok(r)
}

fn options(c: &Common) -> Options {
    Options { parity_level: c.parity_level as usize, max_crossings: c.max_crossings }
}

fn open_cache(c: &Common) -> Cache {
    c.cache.as_deref().map_or_else(Cache::disabled, Cache::open)
}

/// Compute through the cache. A hit skips the computation entirely.
pub(crate) fn run_cached(
    d: &PlanarDiagram,
    invariant: &str,
    opts: &Options,
    registry: &CoefficientRegistry,
    cache: &Cache,
) -> Result<ResultRecord, HomologyError> {
    let input = serialize_pd(d);
    // genus bounds read the registry, so its contents are part of the key
    let mut option_key = opts.key(invariant);
    if invariant == "genus-bounds" {
        option_key.push_str(&registry.to_text());
    }
    let key = Cache::key(&input, invariant, &option_key, ENGINE_VERSION);
    if let Some(rec) = cache.get(&key) {
        if rec.input == input && rec.invariant == invariant && rec.version == ENGINE_VERSION {
            log::debug!("cache hit {key}");
            return Ok(rec);
        }
    }
    let start = Instant::now();
    let rec = compute(d, invariant, opts, registry)?;
    log::info!("{invariant} of {input} in {:.3}s", start.elapsed().as_secs_f64());
    cache.put(&key, &rec);
    Ok(rec)
}

fn emit(rec: &ResultRecord, format: Format, registry: &CoefficientRegistry) {
    match format {
        Format::Json => println!("{}", serde_json::to_string(rec).expect("records serialize")),
        Format::Text => print!("{}", rec.to_text(registry)),
    }
}

fn single(input: &Input, invariant: &str, common: &Common) -> Result<(), Failure> {
    let d = read_input(input)?;
    let registry = load_registry(common.registry.as_ref())?;
    let rec = run_cached(&d, invariant, &options(common), &registry, &open_cache(common))?;
    emit(&rec, common.format, &registry);
    Ok(())
}

fn batch(table: &PathBuf, invariants: &[String], out: Option<&PathBuf>, common: &Common) -> Result<(), Failure> {
    let text = std::fs::read_to_string(table).map_err(|e| Failure::Parse(format!("{}: {e}", table.display())))?;
    let rows = batch::parse_table(&text).map_err(|e| Failure::Parse(format!("{}: {e:#}", table.display())))?;
    let registry = load_registry(common.registry.as_ref())?;
    let (lines, summary) =
        batch::run_batch(&rows, invariants, &options(common), &registry, &open_cache(common), common.mirror_tolerant);
    let jsonl = batch::to_jsonl(&lines);
    match out {
        Some(p) => std::fs::write(p, jsonl).with_context(|| format!("writing {}", p.display()))?,
        None => eprint!("{jsonl}"),
    }
    match common.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes")),
        Format::Text => {
            println!("rows: {}  records: {}  failures: {}", summary.rows, summary.records, summary.failures);
            for (inv, classes) in &summary.classes {
                println!("{inv}: {} distinct value(s)", classes.len());
                for c in classes {
                    println!("  {}", c.join(" "));
                }
            }
            for p in &summary.distinguishing_pairs {
                println!("{} / {}: equal {}, unequal {}", p.rows[0], p.rows[1], p.equal, p.unequal);
            }
        }
    }
    Ok(())
}

fn selftest() -> Result<(), Failure> {
    let check = |name: &str, ok: bool| {
        println!("{} {name}", if ok { "ok  " } else { "FAIL" });
        ok
    };
    let p = |s: &str| GradedPolynomial::parse(s).expect("built-in polynomial parses");
    let d = gauss_to_pd(&parse_gauss("O1-,O2-,U1-,O3+,U2-,U3+")?)?;
    let unknot = PlanarDiagram::unknot();
    let mut all = true;
    all &= check("unknot kh", homology::kh(&unknot)? == GradedPolynomial::unknot_homology());
    all &= check("3.1 kh", homology::kh(&d)? == p("q + q^-1").into_dimension().expect("nonnegative"));
    all &= check("3.1 arrow", vkinv_core::skein::normalized_arrow(&d) == p("-K[1]^2 A^2 - K[2] A^4"));
    all &= check("3.1 parity", d.parity().iter().map(|c| c.name()).collect::<Vec<_>>() == ["odd", "even", "odd"]);
    for f in [Flavor::Khovanov, Flavor::ArrowFull, Flavor::ArrowSimple] {
        let c = homology::build_cube(&d, f, DEFAULT_MAX_CROSSINGS)?;
        all &= check(&format!("3.1 d^2 = 0 ({})", f.name()), c.check_square_zero().is_ok());
    }
    if all {
        Ok(())
    } else {
        Err(Failure::Other(anyhow::anyhow!("self test failed")))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Compute { input, invariant, common } => single(input, invariant, common),
        Command::Genus { input, common } => single(input, "genus-bounds", common),
        Command::Batch { table, invariant, out, common } => batch(table, invariant, out.as_ref(), common),
        Command::Selftest => selftest(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.exit(),
    }
}
