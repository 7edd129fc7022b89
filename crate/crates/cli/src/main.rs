//! `contig`: build complexes, count contiguity classes of circle maps
//! exactly or by randomized walks, reproduce the class-count table, and run
//! the persistence pipelines. Every run emits a report embedding the code
//! version and the fully resolved configuration; runs with identical
//! configuration are byte-identical in single-worker mode.

mod report;
mod spec;

use std::env;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use contig_core::walk::DEFAULT_SCHEDULE;
use contig_core::{
    betti_numbers, circle_doubling_collapse, circle_step_collapse, estimate_class_count,
    exact_class_count, persistent_contiguity_h0, persistent_subdivision_h0, rips_complex,
    rips_h0_barcode, Barcode, BarcodeData, ComplexData, FiniteMetricSpace, PrimeField,
    SimplicialComplex, SimplicialMap, StandardComplex, WalkConfig,
};

use report::Report;

#[derive(Parser)]
#[command(name = "contig", version, about = "Contiguity classes of simplicial maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a complex and report simplex counts per dimension.
    Complex(ComplexArgs),
    /// Count contiguity classes of maps from a k-vertex circle into a target.
    Count(CountArgs),
    /// Estimate the (T, P, T/k^2, P/k^2) class-count table across k and seeds.
    Table1(Table1Args),
    /// Barcode pipelines: Rips H0, map-class H0 along scale or subdivision,
    /// and plain homology.
    Persist(PersistArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "lower")]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "lower")]
enum CountMode {
    Exact,
    Estimate,
}

#[derive(Args)]
struct ComplexArgs {
    /// Standard complex name (point, simplex<d>, boundary<d>, circle<k>,
    /// torus_T, pinched_P).
    #[arg(long, conflicts_with = "facets")]
    standard: Option<String>,
    /// JSON facet file: {"vertex_count": n, "facets": [[..], ..]}.
    #[arg(long)]
    facets: Option<PathBuf>,
    /// Size for families whose name does not carry one (circle --k 12).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct CountArgs {
    /// Target complex: standard name or facet file path.
    #[arg(long)]
    target: String,
    /// Number of vertices of the circle domain.
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value_t = CountMode::Exact)]
    mode: CountMode,
    /// Acceptance probability for distance-worsening walk steps.
    #[arg(long, default_value_t = 0.1)]
    kappa: f64,
    /// Iteration budget per comparison walk.
    #[arg(long, default_value_t = 500_000)]
    max_iters: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads for the estimator; defaults to available parallelism.
    #[arg(long)]
    workers: Option<usize>,
    /// Enumeration cap for exact mode.
    #[arg(long, default_value_t = 1_000_000)]
    cap: usize,
    /// Pin domain vertex 0 to codomain vertex 0 (default).
    #[arg(long, conflicts_with = "unbased")]
    based: bool,
    /// Count unbased classes (exact mode only).
    #[arg(long)]
    unbased: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct Table1Args {
    /// Comma-separated circle sizes; empty for a header-only table.
    #[arg(long, default_value = "9,12,15,18,21")]
    k: String,
    /// Comma-separated seeds; one estimate per (target, k, seed).
    #[arg(long, default_value = "0")]
    seeds: String,
    #[arg(long, default_value_t = 0.1)]
    kappa: f64,
    #[arg(long, default_value_t = 500_000)]
    max_iters: u64,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Pipeline {
    /// Degree-0 bars of the Rips filtration of a point cloud.
    #[value(name = "rips-h0")]
    RipsH0,
    /// Contiguity classes of maps into the Rips filtration, tracked by scale.
    #[value(name = "contiguity-h0")]
    ContiguityH0,
    /// Contiguity classes along a tower of circle collapses.
    #[value(name = "subdivision-h0")]
    SubdivisionH0,
    /// Betti numbers of one complex over a prime field.
    #[value(name = "homology")]
    Homology,
}

#[derive(Args)]
struct PersistArgs {
    #[arg(long, value_enum)]
    pipeline: Pipeline,
    /// Point cloud CSV (one point per row).
    #[arg(long, conflicts_with = "distances")]
    points: Option<PathBuf>,
    /// Distance matrix CSV.
    #[arg(long)]
    distances: Option<PathBuf>,
    /// Standard complex (homology pipeline).
    #[arg(long, conflicts_with = "facets")]
    standard: Option<String>,
    /// Facet file (homology pipeline).
    #[arg(long)]
    facets: Option<PathBuf>,
    /// Domain tower, e.g. circle:3 or circle:3,6,12.
    #[arg(long)]
    x: Option<String>,
    /// Codomain complex name (subdivision-h0 pipeline).
    #[arg(long)]
    y: Option<String>,
    /// Size helper for --standard families.
    #[arg(long)]
    k: Option<usize>,
    /// Field characteristic for homology.
    #[arg(long, default_value_t = 2)]
    field: u64,
    /// Scale cutoff: contiguity-h0 stops at the last grade <= epsilon;
    /// homology-of-a-cloud builds the Rips complex at this scale.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Rips dimension cap when building a complex from a cloud.
    #[arg(long, default_value_t = 2)]
    max_dim: usize,
    #[arg(long, conflicts_with = "unbased")]
    based: bool,
    #[arg(long)]
    unbased: bool,
    /// Map-enumeration cap per stage.
    #[arg(long, default_value_t = 1_000_000)]
    cap: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

/// Structured error: `{"error": {"kind": ..., "message": ...}}` on stderr,
/// exit 1. Clap usage errors keep clap's own exit code.
pub struct CliError {
    kind: String,
    message: String,
}

impl CliError {
    fn new(kind: &str, message: String) -> Self {
        CliError {
            kind: kind.into(),
            message,
        }
    }

    pub fn usage(message: String) -> Self {
        Self::new("usage", message)
    }

    pub fn io(message: String) -> Self {
        Self::new("io", message)
    }

    pub fn parse(message: String) -> Self {
        Self::new("parse", message)
    }

    fn to_json(&self) -> String {
        serde_json::json!({ "error": { "kind": self.kind, "message": self.message } }).to_string()
    }
}

impl From<contig_core::Error> for CliError {
    fn from(e: contig_core::Error) -> Self {
        let debug = format!("{e:?}");
        let kind = debug
            .split(|c: char| c == '(' || c == ' ' || c == '{')
            .next()
            .unwrap_or("Error");
        CliError::new(kind, e.to_string())
    }
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Complex(args) => cmd_complex(args),
        Command::Count(args) => cmd_count(args),
        Command::Table1(args) => cmd_table1(args),
        Command::Persist(args) => cmd_persist(args),
    };
    if let Err(err) = outcome {
        eprintln!("{}", err.to_json());
        std::process::exit(1);
    }
}

fn resolve_workers(flag: Option<usize>) -> usize {
    flag.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1)
}

fn cache_dir() -> Option<PathBuf> {
    env::var_os("CONTIG_CACHE_DIR").map(PathBuf::from)
}

fn based_pair(based: bool, unbased: bool) -> Option<(usize, usize)> {
    // --based is the default; --unbased opts out
    let _ = based;
    (!unbased).then_some((0, 0))
}

// ---------------------------------------------------------------------------
// complex

#[derive(Serialize)]
struct ComplexConfig {
    command: &'static str,
    standard: Option<String>,
    facets: Option<PathBuf>,
    k: Option<usize>,
    out: Option<PathBuf>,
    format: &'static str,
}

#[derive(Serialize)]
struct ComplexResult {
    name: String,
    /// Simplex counts per dimension, vertices first.
    counts: Vec<usize>,
    complex: ComplexData,
}

fn cmd_complex(args: ComplexArgs) -> Result<(), CliError> {
    let (complex, name) = match (&args.standard, &args.facets) {
        (Some(name), None) => {
            let standard = spec::parse_standard(name, args.k)?;
            (standard.build()?, standard.name())
        }
        (None, Some(path)) => (spec::load_facets(path)?, path.display().to_string()),
        _ => {
            return Err(CliError::usage(
                "give exactly one of --standard or --facets".into(),
            ))
        }
    };
    let result = ComplexResult {
        name,
        counts: complex.f_vector(),
        complex: complex.to_data(),
    };
    let config = ComplexConfig {
        command: "complex",
        standard: args.standard.clone(),
        facets: args.facets.clone(),
        k: args.k,
        out: args.out.clone(),
        format: format_name(args.format),
    };
    let report = Report::new(config, result);
    let rendered = match args.format {
        Format::Json => report.to_json(),
        Format::Csv => {
            let mut s = String::from("dim,count\n");
            for (dim, count) in report.result.counts.iter().enumerate() {
                s.push_str(&format!("{dim},{count}\n"));
            }
            s
        }
        Format::Text => {
            let mut s = format!("{}\n", report.result.name);
            for (dim, count) in report.result.counts.iter().enumerate() {
                s.push_str(&format!("dim {dim}: {count}\n"));
            }
            s
        }
    };
    report::emit(&report, rendered, args.out.as_deref())
}

// ---------------------------------------------------------------------------
// count

#[derive(Serialize)]
struct CountConfig {
    command: &'static str,
    target: String,
    k: usize,
    mode: &'static str,
    kappa: f64,
    max_iters: u64,
    seed: u64,
    workers: usize,
    cap: usize,
    based: bool,
    schedule: Vec<u64>,
    cache_dir: Option<PathBuf>,
    out: Option<PathBuf>,
    format: &'static str,
}

#[derive(Serialize)]
struct CountResult {
    count: usize,
    count_per_k2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    class_sizes: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    estimator: Option<EstimatorResult>,
}

#[derive(Serialize)]
struct EstimatorResult {
    trials: u64,
    stabilized: bool,
    /// Catalog size after each budget round.
    rounds: Vec<(u64, usize)>,
    /// Trial index at which each representative entered the catalog.
    admitted_at: Vec<u64>,
    walks: u64,
    walk_iters: u64,
}

fn cmd_count(args: CountArgs) -> Result<(), CliError> {
    let (target, target_name) = spec::parse_target(&args.target)?;
    let based = based_pair(args.based, args.unbased);
    let workers = resolve_workers(args.workers);
    let cache = cache_dir();

    let result = match args.mode {
        CountMode::Exact => {
            let domain = Arc::new(StandardComplex::Circle(args.k).build()?);
            let partition = exact_class_count(&domain, &target, based, args.cap)?;
            CountResult {
                count: partition.class_count(),
                count_per_k2: partition.class_count() as f64 / (args.k * args.k) as f64,
                class_sizes: Some(partition.class_sizes()),
                estimator: None,
            }
        }
        CountMode::Estimate => {
            if args.unbased {
                return Err(CliError::usage(
                    "estimate mode samples based walks; unbased estimation is not available"
                        .into(),
                ));
            }
            let cfg = WalkConfig {
                kappa: args.kappa,
                max_iters: args.max_iters,
                seed: args.seed,
                cache_dir: cache.clone(),
                ..WalkConfig::default()
            };
            let state = estimate_class_count(&target, args.k, &cfg, &DEFAULT_SCHEDULE, workers)?;
            CountResult {
                count: state.class_count(),
                count_per_k2: state.class_count() as f64 / (args.k * args.k) as f64,
                class_sizes: None,
                estimator: Some(EstimatorResult {
                    trials: state.trials,
                    stabilized: state.stabilized,
                    rounds: state.round_sizes,
                    admitted_at: state.admitted_at,
                    walks: state.walks,
                    walk_iters: state.walk_iters,
                }),
            }
        }
    };

    let config = CountConfig {
        command: "count",
        target: target_name,
        k: args.k,
        mode: match args.mode {
            CountMode::Exact => "exact",
            CountMode::Estimate => "estimate",
        },
        kappa: args.kappa,
        max_iters: args.max_iters,
        seed: args.seed,
        workers,
        cap: args.cap,
        based: based.is_some(),
        schedule: DEFAULT_SCHEDULE.to_vec(),
        cache_dir: cache,
        out: args.out.clone(),
        format: format_name(args.format),
    };
    let report = Report::new(config, result);
    let rendered = match args.format {
        Format::Json => report.to_json(),
        Format::Csv => format!(
            "k,count,count_per_k2\n{},{},{:.3}\n",
            args.k, report.result.count, report.result.count_per_k2
        ),
        Format::Text => format!(
            "{} classes of circle{} maps into {} ({:.3} per k^2)\n",
            report.result.count, args.k, report.config.target, report.result.count_per_k2
        ),
    };
    report::emit(&report, rendered, args.out.as_deref())
}

// ---------------------------------------------------------------------------
// table1

#[derive(Serialize)]
struct Table1Config {
    command: &'static str,
    k: Vec<usize>,
    seeds: Vec<u64>,
    kappa: f64,
    max_iters: u64,
    workers: usize,
    schedule: Vec<u64>,
    cache_dir: Option<PathBuf>,
    out: Option<PathBuf>,
    format: &'static str,
}

#[derive(Serialize)]
struct SeedSpread {
    per_seed: Vec<usize>,
    mean: f64,
    min: usize,
    max: usize,
}

impl SeedSpread {
    fn new(per_seed: Vec<usize>) -> Self {
        let mean = per_seed.iter().sum::<usize>() as f64 / per_seed.len() as f64;
        let min = *per_seed.iter().min().expect("at least one seed");
        let max = *per_seed.iter().max().expect("at least one seed");
        SeedSpread {
            per_seed,
            mean,
            min,
            max,
        }
    }
}

#[derive(Serialize)]
struct Table1Row {
    k: usize,
    t: SeedSpread,
    p: SeedSpread,
    t_per_k2: f64,
    p_per_k2: f64,
}

#[derive(Serialize)]
struct Table1Result {
    rows: Vec<Table1Row>,
    csv: String,
}

fn cmd_table1(args: Table1Args) -> Result<(), CliError> {
    let ks = spec::parse_usize_list(&args.k)?;
    let seeds = spec::parse_u64_list(&args.seeds)?;
    if seeds.is_empty() {
        return Err(CliError::usage("need at least one seed".into()));
    }
    let workers = resolve_workers(args.workers);
    let cache = cache_dir();

    let torus = Arc::new(StandardComplex::TorusT.build()?);
    let pinched = Arc::new(StandardComplex::PinchedP.build()?);

    let estimate = |target: &Arc<SimplicialComplex>, k: usize, seed: u64| {
        let cfg = WalkConfig {
            kappa: args.kappa,
            max_iters: args.max_iters,
            seed,
            cache_dir: cache.clone(),
            ..WalkConfig::default()
        };
        estimate_class_count(target, k, &cfg, &DEFAULT_SCHEDULE, workers)
            .map(|state| state.class_count())
    };

    let mut rows = Vec::with_capacity(ks.len());
    for &k in &ks {
        let t_counts: Vec<usize> = seeds
            .iter()
            .map(|&s| estimate(&torus, k, s))
            .collect::<Result<_, _>>()?;
        let p_counts: Vec<usize> = seeds
            .iter()
            .map(|&s| estimate(&pinched, k, s))
            .collect::<Result<_, _>>()?;
        let (t, p) = (SeedSpread::new(t_counts), SeedSpread::new(p_counts));
        let k2 = (k * k) as f64;
        rows.push(Table1Row {
            k,
            t_per_k2: t.mean / k2,
            p_per_k2: p.mean / k2,
            t,
            p,
        });
    }

    let mut csv = String::from("k,T,P,T_per_k2,P_per_k2\n");
    for row in &rows {
        csv.push_str(&format!(
            "{},{:.1},{:.1},{:.3},{:.3}\n",
            row.k, row.t.mean, row.p.mean, row.t_per_k2, row.p_per_k2
        ));
    }

    let config = Table1Config {
        command: "table1",
        k: ks,
        seeds,
        kappa: args.kappa,
        max_iters: args.max_iters,
        workers,
        schedule: DEFAULT_SCHEDULE.to_vec(),
        cache_dir: cache,
        out: args.out.clone(),
        format: format_name(args.format),
    };
    let report = Report::new(config, Table1Result { rows, csv });
    let rendered = match args.format {
        Format::Json => report.to_json(),
        Format::Csv | Format::Text => report.result.csv.clone(),
    };
    report::emit(&report, rendered, args.out.as_deref())
}

// ---------------------------------------------------------------------------
// persist

#[derive(Serialize)]
struct PersistConfig {
    command: &'static str,
    pipeline: &'static str,
    points: Option<PathBuf>,
    distances: Option<PathBuf>,
    standard: Option<String>,
    facets: Option<PathBuf>,
    x: Option<String>,
    y: Option<String>,
    k: Option<usize>,
    field: u64,
    epsilon: Option<f64>,
    max_dim: usize,
    based: bool,
    cap: usize,
    out: Option<PathBuf>,
    format: &'static str,
}

#[derive(Serialize)]
struct PersistResult {
    #[serde(skip_serializing_if = "Option::is_none")]
    betti: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    barcode: Option<BarcodeData>,
    /// Bars alive at each stage (barcode pipelines).
    #[serde(skip_serializing_if = "Option::is_none")]
    alive: Option<Vec<usize>>,
}

fn load_space(args: &PersistArgs) -> Result<Arc<FiniteMetricSpace>, CliError> {
    let read = |path: &PathBuf| {
        std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("reading {}: {e}", path.display())))
    };
    match (&args.points, &args.distances) {
        (Some(path), None) => {
            let points = contig_core::parse_point_csv(&read(path)?)?;
            Ok(Arc::new(FiniteMetricSpace::from_points(&points)?))
        }
        (None, Some(path)) => Ok(Arc::new(contig_core::parse_distance_csv(&read(path)?)?)),
        _ => Err(CliError::usage(
            "this pipeline needs exactly one of --points or --distances".into(),
        )),
    }
}

/// Stage grades of the Rips filtration: distinct distances with a leading 0.
fn stage_values(space: &FiniteMetricSpace) -> Vec<f64> {
    let mut values = space.critical_values();
    if values.first() != Some(&0.0) {
        values.insert(0, 0.0);
    }
    values
}

fn barcode_result(barcode: Barcode) -> PersistResult {
    let alive = (0..barcode.grades.len()).map(|s| barcode.alive_at(s)).collect();
    PersistResult {
        betti: None,
        barcode: Some(barcode.to_data()),
        alive: Some(alive),
    }
}

fn cmd_persist(args: PersistArgs) -> Result<(), CliError> {
    let based = based_pair(args.based, args.unbased);
    let (result, barcode_text) = match args.pipeline {
        Pipeline::RipsH0 => {
            let space = load_space(&args)?;
            let barcode = rips_h0_barcode(&space);
            let text = barcode.render_text();
            (barcode_result(barcode), Some(text))
        }
        Pipeline::ContiguityH0 => {
            let space = load_space(&args)?;
            let tower = spec::parse_tower(args.x.as_deref().ok_or_else(|| {
                CliError::usage("contiguity-h0 needs a domain, e.g. --x circle:3".into())
            })?)?;
            if tower.ks.len() != 1 {
                return Err(CliError::usage(
                    "contiguity-h0 takes a single domain size, e.g. --x circle:3".into(),
                ));
            }
            let k = tower.ks[0];
            let z = Arc::new(StandardComplex::Circle(k).build()?);
            let stage_range = match args.epsilon {
                None => None,
                Some(eps) => {
                    let values = stage_values(&space);
                    let hi = values.iter().rposition(|&v| v <= eps).ok_or_else(|| {
                        CliError::usage(format!("no stage at or below epsilon {eps}"))
                    })?;
                    Some((0, hi))
                }
            };
            let barcode = persistent_contiguity_h0(&z, &space, stage_range, based, args.cap)?;
            let text = barcode.render_text();
            (barcode_result(barcode), Some(text))
        }
        Pipeline::SubdivisionH0 => {
            let tower = spec::parse_tower(args.x.as_deref().ok_or_else(|| {
                CliError::usage("subdivision-h0 needs a tower, e.g. --x circle:3,6".into())
            })?)?;
            let y_name = args.y.as_deref().ok_or_else(|| {
                CliError::usage("subdivision-h0 needs a codomain, e.g. --y boundary2".into())
            })?;
            let y = Arc::new(spec::parse_standard(y_name, args.k)?.build()?);
            let stages: Vec<Arc<SimplicialComplex>> = tower
                .ks
                .iter()
                .map(|&k| StandardComplex::Circle(k).build().map(Arc::new))
                .collect::<Result<_, _>>()?;
            let connecting: Vec<SimplicialMap> = tower
                .ks
                .windows(2)
                .map(|w| match (w[0], w[1]) {
                    (a, b) if b == 2 * a => circle_doubling_collapse(a).map_err(CliError::from),
                    (a, b) if b == a + 1 => circle_step_collapse(a).map_err(CliError::from),
                    (a, b) => Err(CliError::usage(format!(
                        "no collapse map for circle sizes {a} -> {b}; consecutive sizes must double or increase by one"
                    ))),
                })
                .collect::<Result<_, _>>()?;
            let barcode = persistent_subdivision_h0(&stages, &connecting, &y, based, args.cap)?;
            let text = barcode.render_text();
            (barcode_result(barcode), Some(text))
        }
        Pipeline::Homology => {
            let field = PrimeField::new(args.field)?;
            let complex = match (&args.standard, &args.facets) {
                (Some(name), None) => Arc::new(spec::parse_standard(name, args.k)?.build()?),
                (None, Some(path)) => Arc::new(spec::load_facets(path)?),
                (None, None) => {
                    let space = load_space(&args)?;
                    let eps = args.epsilon.ok_or_else(|| {
                        CliError::usage(
                            "homology of a cloud needs --epsilon for the Rips scale".into(),
                        )
                    })?;
                    let rips = rips_complex(&space, eps, args.max_dim);
                    rips.complex().clone()
                }
                _ => {
                    return Err(CliError::usage(
                        "give one of --standard, --facets, or a point cloud".into(),
                    ))
                }
            };
            let betti = betti_numbers(&complex, &field);
            (
                PersistResult {
                    betti: Some(betti),
                    barcode: None,
                    alive: None,
                },
                None,
            )
        }
    };

    let config = PersistConfig {
        command: "persist",
        pipeline: match args.pipeline {
            Pipeline::RipsH0 => "rips-h0",
            Pipeline::ContiguityH0 => "contiguity-h0",
            Pipeline::SubdivisionH0 => "subdivision-h0",
            Pipeline::Homology => "homology",
        },
        points: args.points.clone(),
        distances: args.distances.clone(),
        standard: args.standard.clone(),
        facets: args.facets.clone(),
        x: args.x.clone(),
        y: args.y.clone(),
        k: args.k,
        field: args.field,
        epsilon: args.epsilon,
        max_dim: args.max_dim,
        based: based.is_some(),
        cap: args.cap,
        out: args.out.clone(),
        format: format_name(args.format),
    };
    let report = Report::new(config, result);
    let rendered = match args.format {
        Format::Json => report.to_json(),
        Format::Csv => match (&report.result.barcode, &report.result.betti) {
            (Some(data), _) => {
                let mut s = String::from("birth,death\n");
                for &(b, d) in &data.bars {
                    s.push_str(&data.grades[b]);
                    s.push(',');
                    if let Some(d) = d {
                        s.push_str(&data.grades[d]);
                    }
                    s.push('\n');
                }
                s
            }
            (None, Some(betti)) => {
                let mut s = String::from("dim,betti\n");
                for (dim, b) in betti.iter().enumerate() {
                    s.push_str(&format!("{dim},{b}\n"));
                }
                s
            }
            (None, None) => String::new(),
        },
        Format::Text => match (&barcode_text, &report.result.betti) {
            (Some(text), _) => text.clone(),
            (None, Some(betti)) => format!(
                "betti over F{}: {}\n",
                args.field,
                betti.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
            ),
            (None, None) => String::new(),
        },
    };
    report::emit(&report, rendered, args.out.as_deref())
}

fn format_name(f: Format) -> &'static str {
    match f {
        Format::Json => "json",
        Format::Csv => "csv",
        Format::Text => "text",
    }
}
