//! `pathtriple`: load N-Triples into a hybrid store and query it.

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use pathtriple_core::bench::{run_suite, BenchConfig, BenchQuery, BenchReport, LoadRow};
use pathtriple_core::error::{IngestError, RunError, StoreError};
use pathtriple_core::ingest::{load_into, LoadReport, ParseMode, PartitionConfig};
use pathtriple_core::planner::{
    prepare, run_query, BindingTable, CostModelParams, Estimator, ExecStats, OrderMode, PClampPolicy, QueryOptions,
    DEFAULT_L_MAX,
};
use pathtriple_core::sparql::default_prefixes;
use pathtriple_core::store::{DiskStore, DEFAULT_DENSIFICATION};
use pathtriple_core::synth::{generate, SynthGraphSpec};
use pathtriple_core::topology::TopologyGraph;
use pathtriple_core::Dictionary;

#[derive(Parser)]
#[command(name = "pathtriple", version, about = "Hybrid RDF store with in-memory property-path traversal")]
struct Cli {
    /// Store directory.
    #[arg(long, global = true, env = "PATHTRIPLE_STORE")]
    store: Option<PathBuf>,
    /// Partition config: `topology <iri>`, `attribute <iri>`, `default topology|attribute` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Abort a load on the first malformed line instead of skipping it.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load an N-Triples file into a new store and print the load report.
    Load {
        file: PathBuf,
        /// Replace an existing store.
        #[arg(long)]
        force: bool,
    },
    /// Run a SELECT query and print its rows.
    Query {
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long, value_enum, default_value_t = Format::Tsv)]
        format: Format,
    },
    /// Print store statistics as JSON.
    Stats,
    /// Print the ordered plan with its estimates.
    Explain {
        #[command(flatten)]
        query: QueryArgs,
    },
    /// Time a query suite in every mode.
    Bench(BenchArgs),
    /// Write a synthetic social graph as N-Triples.
    Generate {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, short)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct QueryArgs {
    /// Query text.
    #[arg(required_unless_present = "file", conflicts_with = "file")]
    text: Option<String>,
    /// Read the query from a file.
    #[arg(long)]
    file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Mode::Cost)]
    mode: Mode,
    /// Path length assumed for `*` and `+` in estimates.
    #[arg(long, default_value_t = DEFAULT_L_MAX)]
    lmax: u32,
    /// Densification constant, 1 < c <= 2.
    #[arg(long, default_value_t = DEFAULT_DENSIFICATION)]
    c: f64,
    /// `one`, or an upper bound in (0, 1] for the edge-density ratio.
    #[arg(long, default_value = "one")]
    p_policy: String,
}

#[derive(Args)]
struct BenchArgs {
    /// TOML file of `[[query]]` tables with `id` and `text`.
    #[arg(long)]
    suite: PathBuf,
    /// Build the store from a generated graph first.
    #[arg(long)]
    generate: bool,
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, default_value_t = 10)]
    runs: u32,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    format: Format,
    /// Also write the JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Replace an existing store when generating.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct SpecArgs {
    /// Start from the 26% social or the 25% bibliographic topology share.
    #[arg(long, value_enum, default_value_t = Preset::Bibliographic)]
    preset: Preset,
    #[arg(long)]
    nodes: Option<u64>,
    #[arg(long)]
    out_degree: Option<f64>,
    #[arg(long)]
    predicates: Option<u32>,
    #[arg(long)]
    attributes: Option<u32>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Social,
    Bibliographic,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Cost,
    Noce,
}

/// A failure with its exit code.
enum Failure {
    Query(String),
    Store(String),
    Config(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Query(_) => 2,
            Failure::Store(_) => 3,
            Failure::Config(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Query(m) | Failure::Store(m) | Failure::Config(m) => m,
        }
    }
}

impl From<StoreError> for Failure {
    fn from(e: StoreError) -> Self {
        Failure::Store(e.to_string())
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Query(q) => Failure::Query(q.to_string()),
            RunError::Exec(x) => Failure::Store(x.to_string()),
        }
    }
}

impl From<IngestError> for Failure {
    fn from(e: IngestError) -> Self {
        match e {
            IngestError::Syntax(_) | IngestError::Dictionary { .. } => Failure::Query(e.to_string()),
            other => Failure::Store(other.to_string()),
        }
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure::Store(format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let mode = if cli.strict { ParseMode::Strict } else { ParseMode::Lenient };
    match &cli.command {
        Command::Load { file, force } => {
            let config = partition_config(cli)?;
            let input = BufReader::new(File::open(file).map_err(|e| io_failure(file, e))?);
            let loaded = load_into(store_dir(cli)?, input, &config, mode, *force)?;
            print_json(&loaded.report)
        }
        Command::Query { query, format } => {
            let (store, graph) = open(cli)?;
            let opts = query_options(query)?;
            let out = run_query(&query_text(query)?, &default_prefixes(), &store, &graph, &opts)?;
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            let rows = decode_sorted(&out.table, store.dictionary());
            match format {
                Format::Tsv => write_tsv(&mut w, &out.table.columns, &rows),
                Format::Json => {
                    let doc = QueryJson {
                        vars: &out.table.columns,
                        rows: &rows,
                        stats: out.stats,
                    };
                    serde_json::to_writer_pretty(&mut w, &doc).map_err(io::Error::from).and_then(|_| writeln!(w))
                }
            }
            .and_then(|_| w.flush())
            .map_err(|e| Failure::Store(format!("writing results: {e}")))
        }
        Command::Stats => {
            let store = DiskStore::open(store_dir(cli)?)?;
            let cat = store.catalog();
            let mut doc = serde_json::to_value(cat).expect("catalog serializes");
            doc["topologyRatio"] = cat.topology_ratio().into();
            doc["diskBytes"] = store.disk_bytes().into();
            print_json(&doc)
        }
        Command::Explain { query } => {
            let store = DiskStore::open(store_dir(cli)?)?;
            let opts = query_options(query)?;
            let plan = prepare(&query_text(query)?, &default_prefixes(), &store, &opts)?;
            print!("{}", Estimator::new(store.catalog(), &opts.params).explain(&plan));
            Ok(())
        }
        Command::Bench(args) => bench(cli, args, mode),
        Command::Generate { spec, out } => {
            let spec = synth_spec(spec)?;
            let file = File::create(out).map_err(|e| io_failure(out, e))?;
            let mut w = BufWriter::new(file);
            let summary = generate(&spec, &mut w).and_then(|s| w.flush().map(|_| s)).map_err(|e| io_failure(out, e))?;
            print_json(&summary)
        }
    }
}

fn store_dir(cli: &Cli) -> Result<&Path, Failure> {
    cli.store
        .as_deref()
        .ok_or_else(|| Failure::Config("no store directory; pass --store or set PATHTRIPLE_STORE".into()))
}

fn partition_config(cli: &Cli) -> Result<PartitionConfig, Failure> {
    let Some(path) = &cli.config else {
        return Ok(PartitionConfig::default());
    };
    let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    PartitionConfig::parse(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

/// Opens the store and rebuilds its topology graph.
fn open(cli: &Cli) -> Result<(DiskStore, TopologyGraph), Failure> {
    let store = DiskStore::open(store_dir(cli)?)?;
    let graph = TopologyGraph::from_store(&store)?;
    Ok((store, graph))
}

fn query_text(q: &QueryArgs) -> Result<String, Failure> {
    match (&q.text, &q.file) {
        (Some(t), _) => Ok(t.clone()),
        (None, Some(path)) => fs::read_to_string(path).map_err(|e| Failure::Query(format!("{}: {e}", path.display()))),
        (None, None) => Err(Failure::Query("no query given".into())),
    }
}

fn parse_policy(text: &str) -> Result<PClampPolicy, Failure> {
    match text {
        "one" | "clamp-to-one" => Ok(PClampPolicy::ClampToOne),
        other => other
            .trim_start_matches("clamp-to-")
            .parse::<f64>()
            .map(PClampPolicy::ClampTo)
            .map_err(|_| Failure::Config(format!("--p-policy must be 'one' or a number in (0, 1], got '{other}'"))),
    }
}

fn query_options(q: &QueryArgs) -> Result<QueryOptions, Failure> {
    let params =
        CostModelParams::new(q.c, q.lmax, parse_policy(&q.p_policy)?).map_err(|e| Failure::Config(e.to_string()))?;
    Ok(QueryOptions {
        mode: match q.mode {
            Mode::Cost => OrderMode::CostBased,
            Mode::Noce => OrderMode::NoCE,
        },
        params,
        ..QueryOptions::default()
    })
}

/// IRIs print bare, other terms in N-Triples form, unbound cells empty.
fn decode_sorted(table: &BindingTable, dict: &Dictionary) -> Vec<Vec<String>> {
    let mut rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|c| match c {
                    Some(id) => dict.resolve(*id).map_or_else(|_| id.to_string(), |t| t.display_value()),
                    None => String::new(),
                })
                .collect()
        })
        .collect();
    rows.sort();
    rows
}

fn write_tsv(w: &mut impl Write, columns: &[String], rows: &[Vec<String>]) -> io::Result<()> {
    let header: Vec<String> = columns.iter().map(|c| format!("?{c}")).collect();
    writeln!(w, "{}", header.join("\t"))?;
    for r in rows {
        writeln!(w, "{}", r.join("\t"))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct QueryJson<'a> {
    vars: &'a [String],
    rows: &'a [Vec<String>],
    stats: ExecStats,
}

fn print_json(value: &impl Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Store(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn synth_spec(a: &SpecArgs) -> Result<SynthGraphSpec, Failure> {
    let base = match a.preset {
        Preset::Social => SynthGraphSpec::social(1000, a.seed),
        Preset::Bibliographic => SynthGraphSpec::bibliographic(1000, a.seed),
    };
    let spec = SynthGraphSpec {
        n_nodes: a.nodes.unwrap_or(base.n_nodes),
        target_out_degree: a.out_degree.unwrap_or(base.target_out_degree),
        n_topology_predicates: a.predicates.unwrap_or(base.n_topology_predicates),
        attribute_triples_per_entity: a.attributes.unwrap_or(base.attribute_triples_per_entity),
        seed: a.seed,
    };
    spec.validate().map_err(Failure::Config)?;
    Ok(spec)
}

#[derive(Deserialize)]
struct Suite {
    #[serde(default)]
    query: Vec<BenchQuery>,
}

fn bench(cli: &Cli, args: &BenchArgs, mode: ParseMode) -> Result<(), Failure> {
    let suite_text =
        fs::read_to_string(&args.suite).map_err(|e| Failure::Config(format!("{}: {e}", args.suite.display())))?;
    let suite: Suite =
        toml::from_str(&suite_text).map_err(|e| Failure::Config(format!("{}: {e}", args.suite.display())))?;
    let dir = store_dir(cli)?;

    let (store, graph, load_row) = if args.generate {
        let spec = synth_spec(&args.spec)?;
        let mut data = Vec::new();
        generate(&spec, &mut data).map_err(|e| Failure::Config(e.to_string()))?;
        let loaded = load_into(dir, data.as_slice(), &partition_config(cli)?, mode, args.force)?;
        let id = format!("synthetic-n{}-s{}", spec.n_nodes, spec.seed);
        let row = LoadRow::new(id, &loaded.report, &loaded.store, &loaded.graph);
        (loaded.store, loaded.graph, row)
    } else {
        // An existing store: the measured time is open plus graph rebuild.
        let started = Instant::now();
        let (store, graph) = open(cli)?;
        let report = LoadReport {
            elapsed: started.elapsed(),
            ..LoadReport::default()
        };
        let id = dir.file_name().map_or_else(|| dir.display().to_string(), |n| n.to_string_lossy().into_owned());
        let row = LoadRow::new(id, &report, &store, &graph);
        (store, graph, row)
    };

    let config = BenchConfig {
        runs: args.runs,
        ..BenchConfig::default()
    };
    let report = BenchReport {
        loads: vec![load_row],
        queries: run_suite(&store, &graph, &default_prefixes(), &suite.query, &config),
    };
    for id in report.mode_mismatches() {
        eprintln!("warning: result counts differ across modes for query '{id}'");
    }
    if let Some(path) = &args.json {
        let text = serde_json::to_string_pretty(&report).expect("report serializes");
        fs::write(path, text + "\n").map_err(|e| io_failure(path, e))?;
    }
    match args.format {
        Format::Tsv => print!("{}", report.to_tsv()),
        Format::Json => print_json(&report)?,
    }
    Ok(())
}
