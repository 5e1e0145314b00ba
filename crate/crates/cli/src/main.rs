//! `dualgraph` — run graph algorithms under the dual-module execution
//! strategies, compare their work counters, and inspect edge-block
//! partitions.
//!
//! Reports go to stdout as JSON (or to `--json PATH`); human-oriented status
//! lines go to stderr so pipelines stay clean.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use dualgraph_core::graph_io::{
    build_csr, looks_like_cache, parse_edge_list, raw_from_csr, read_csr_cache, write_csr_cache,
};
use dualgraph_core::harness::{block_report_csv, CompareSpec};
use dualgraph_core::synth::{power_law_graph, uniform_graph};
use dualgraph_core::{
    compare, run, AlgoKind, AlgoResult, EdgeBlockConfig, GraphData, RawEdgeList, RunConfig,
    Strategy,
};

#[derive(Parser)]
#[command(
    name = "dualgraph",
    version,
    about = "Dual-mode graph analytics: vertex-centric push + edge-block pull with a runtime dispatcher"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm under one strategy and emit the run report.
    Run(RunArgs),
    /// Run one algorithm under several strategies/partitionings and
    /// tabulate the work counters.
    Compare(CompareArgs),
    /// Emit the edge-block partition table for a graph.
    BlockReport(BlockReportArgs),
    /// Generate a synthetic edge list.
    Synth(SynthArgs),
    /// Preprocess a text edge list into the binary CSR cache.
    Cache(CacheArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoChoice {
    Bfs,
    Pr,
    Wcc,
}

#[derive(Args)]
struct GraphArgs {
    /// Input graph: SNAP-style text edge list ("src dst [weight]", '#'
    /// comments) or a binary CSR cache (auto-detected).
    #[arg(long)]
    graph: PathBuf,
    /// Treat text input as undirected: each line yields both directions.
    #[arg(long)]
    undirected: bool,
}

#[derive(Args)]
struct AlgoArgs {
    /// Algorithm to run.
    #[arg(long, value_enum)]
    algo: AlgoChoice,
    /// BFS source vertex.
    #[arg(long, default_value_t = 0)]
    source: u32,
    /// PageRank damping factor.
    #[arg(long, default_value_t = 0.85)]
    damping: f64,
    /// PageRank per-vertex convergence threshold.
    #[arg(long, default_value_t = 1e-9)]
    epsilon: f64,
    /// PageRank iteration cap.
    #[arg(long, default_value_t = 100)]
    max_iters: u32,
}

impl AlgoArgs {
    fn kind(&self) -> Result<AlgoKind> {
        Ok(match self.algo {
            AlgoChoice::Bfs => AlgoKind::Bfs {
                source: self.source,
            },
            AlgoChoice::Pr => {
                if !(0.0..1.0).contains(&self.damping) {
                    bail!("--damping must lie in [0, 1), got {}", self.damping);
                }
                if self.epsilon <= 0.0 {
                    bail!("--epsilon must be positive, got {}", self.epsilon);
                }
                AlgoKind::PageRank {
                    damping: self.damping,
                    epsilon: self.epsilon,
                    max_iters: self.max_iters,
                }
            }
            AlgoChoice::Wcc => AlgoKind::Wcc,
        })
    }
}

#[derive(Args)]
struct TuningArgs {
    /// Active/inactive vertex ratio bound for switching to HighParallel.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Active block ratio bound for switching to LowParallel.
    #[arg(long, default_value_t = 0.05)]
    beta: f64,
    /// Idle-flag fraction over large blocks for switching to LowParallel.
    #[arg(long, default_value_t = 0.9)]
    gamma: f64,
    /// Out-degree from which a vertex counts as a hub.
    #[arg(long, default_value_t = 2048)]
    hub_threshold: u32,
    /// Use the literal inequality directions in the switch rules instead of
    /// the prose-consistent ones.
    #[arg(long)]
    literal_ineq: bool,
    /// Destination-range width exponent (block width 8^n); auto-sized from
    /// the edge count when omitted.
    #[arg(long)]
    group_power: Option<u32>,
    /// Pipeline depth D used by the width auto-sizing rule.
    #[arg(long, default_value_t = 512)]
    pipeline_depth: u32,
    /// Pipeline count P used by the width auto-sizing rule.
    #[arg(long, default_value_t = 3)]
    pipeline_count: u32,
    /// Worker threads for the push engine (0 = $DUALGRAPH_WORKERS, then
    /// available cores).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Dispatcher-to-pipeline pipe bound, in blocks.
    #[arg(long, default_value_t = 64)]
    pipe_capacity: usize,
    /// Feed the engines every vertex/block instead of the active sets; the
    /// results must not change.
    #[arg(long)]
    full_scan: bool,
}

impl TuningArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        cfg.dispatcher.alpha = self.alpha;
        cfg.dispatcher.beta = self.beta;
        cfg.dispatcher.gamma = self.gamma;
        cfg.dispatcher.hub_degree_threshold = self.hub_threshold;
        cfg.dispatcher.literal_inequalities = self.literal_ineq;
        cfg.blocks.group_power = self.group_power;
        cfg.blocks.pipeline_depth = self.pipeline_depth;
        cfg.blocks.pipeline_count = self.pipeline_count;
        cfg.workers = self.workers;
        cfg.pipe_capacity = self.pipe_capacity;
        cfg.full_scan = self.full_scan;
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    algo: AlgoArgs,
    /// Execution strategy.
    #[arg(long, value_parser = parse_strategy)]
    strategy: Strategy,
    #[command(flatten)]
    tuning: TuningArgs,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Also write per-iteration metrics as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    algo: AlgoArgs,
    /// Comma-separated strategies (at least two entries overall).
    #[arg(long, value_delimiter = ',', value_parser = parse_strategy)]
    strategies: Vec<Strategy>,
    /// Optional comma-separated group powers; each strategy is run at each.
    #[arg(long, value_delimiter = ',')]
    group_powers: Vec<u32>,
    #[command(flatten)]
    tuning: TuningArgs,
    /// PageRank per-vertex tolerance for the cross-strategy result check.
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
    /// Write the comparison as CSV (plot-ready).
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write the comparison as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct BlockReportArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Destination-range width exponent; auto-sized when omitted.
    #[arg(long)]
    group_power: Option<u32>,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SynthKind {
    PowerLaw,
    Uniform,
}

#[derive(Args)]
struct SynthArgs {
    /// Degree distribution of the generated graph.
    #[arg(long, value_enum, default_value = "power-law")]
    kind: SynthKind,
    #[arg(long)]
    vertices: u32,
    #[arg(long)]
    edges: usize,
    /// Zipf exponent for power-law destinations.
    #[arg(long, default_value_t = 1.5)]
    exponent: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Lay down a random attachment tree so vertex 0 reaches everything.
    #[arg(long)]
    connected: bool,
    /// Output edge-list path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CacheArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Output path for the binary CSR cache.
    #[arg(long)]
    out: PathBuf,
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse()
}

fn load_graph(args: &GraphArgs) -> Result<RawEdgeList> {
    let path: &Path = &args.graph;
    let raw = if looks_like_cache(path) {
        let (csr, directed) = read_csr_cache(path)
            .with_context(|| format!("reading CSR cache {}", path.display()))?;
        raw_from_csr(&csr, directed)
    } else {
        parse_edge_list(path, !args.undirected)
            .with_context(|| format!("parsing edge list {}", path.display()))?
    };
    Ok(raw)
}

fn dataset_label(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn write_or_print(path: Option<&PathBuf>, content: &str, what: &str) -> Result<()> {
    match path {
        Some(p) => {
            fs::write(p, content).with_context(|| format!("writing {what} to {}", p.display()))?;
            eprintln!("{what} written to {}", p.display());
        }
        None => println!("{content}"),
    }
    Ok(())
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let algo = args.algo.kind()?;
    let raw = load_graph(&args.graph)?;
    let mut cfg = RunConfig::new(args.strategy);
    args.tuning.apply(&mut cfg);
    cfg.dataset = dataset_label(&args.graph.graph);
    let data = GraphData::build(raw, &cfg.blocks);
    let outcome = run(&data, &algo, &cfg)?;

    let report = &outcome.report;
    eprintln!(
        "{} [{}] on {}: {} iterations, {} edges examined, {:.2} MTEPS, {} mode switches",
        report.algorithm,
        report.strategy,
        report.dataset,
        report.totals.iterations,
        report.totals.edges_examined,
        report.totals.mteps,
        report.mode_switches.len(),
    );
    if let AlgoResult::PageRank {
        converged: false, ..
    } = outcome.result
    {
        eprintln!(
            "warning: PageRank hit the iteration cap ({}) before converging",
            args.algo.max_iters
        );
    }
    write_or_print(args.json.as_ref(), &report.to_json_string(), "report")?;
    if let Some(csv) = &args.csv {
        fs::write(csv, report.iterations_csv())
            .with_context(|| format!("writing CSV to {}", csv.display()))?;
        eprintln!("iteration CSV written to {}", csv.display());
    }
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> Result<()> {
    let algo = args.algo.kind()?;
    let mut specs: Vec<CompareSpec> = Vec::new();
    for &strategy in &args.strategies {
        if args.group_powers.is_empty() {
            specs.push(CompareSpec {
                strategy,
                group_power: None,
            });
        } else {
            for &p in &args.group_powers {
                specs.push(CompareSpec {
                    strategy,
                    group_power: Some(p),
                });
            }
        }
    }
    if specs.len() < 2 {
        bail!(
            "compare needs at least two runs; got {} (use --strategies and/or --group-powers)",
            specs.len()
        );
    }

    let raw = load_graph(&args.graph)?;
    let mut base = RunConfig::new(args.strategies[0]);
    args.tuning.apply(&mut base);
    base.dataset = dataset_label(&args.graph.graph);
    let outcome = compare(&raw, &algo, &base, &specs, args.tolerance)?;

    println!(
        "{:<12} {:>5} {:>6} {:>14} {:>14} {:>12} {:>8} {:>11} {:>9}",
        "label",
        "width",
        "iters",
        "edges_examined",
        "edges_streamed",
        "loop_total",
        "switches",
        "seconds",
        "mteps"
    );
    for row in &outcome.rows {
        println!(
            "{:<12} {:>5} {:>6} {:>14} {:>14} {:>12} {:>8} {:>11.6} {:>9.2}",
            row.label,
            8u64.pow(row.group_power),
            row.iterations,
            row.edges_examined,
            row.edges_streamed,
            row.loop_total,
            row.mode_switches,
            row.wall_seconds,
            row.mteps,
        );
    }
    println!("results match: {}", outcome.results_match);

    if let Some(csv) = &args.csv {
        let mut out = String::from(
            "label,strategy,group_power,iterations,edges_examined,edges_streamed,\
             loop_total,mode_switches,wall_seconds,mteps\n",
        );
        for row in &outcome.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{:.9},{:.6}\n",
                row.label,
                row.strategy,
                row.group_power,
                row.iterations,
                row.edges_examined,
                row.edges_streamed,
                row.loop_total,
                row.mode_switches,
                row.wall_seconds,
                row.mteps,
            ));
        }
        fs::write(csv, out).with_context(|| format!("writing CSV to {}", csv.display()))?;
        eprintln!("comparison CSV written to {}", csv.display());
    }
    if let Some(json) = &args.json {
        let text = serde_json::to_string_pretty(&outcome)?;
        fs::write(json, text).with_context(|| format!("writing JSON to {}", json.display()))?;
        eprintln!("comparison JSON written to {}", json.display());
    }
    Ok(())
}

fn cmd_block_report(args: BlockReportArgs) -> Result<()> {
    let raw = load_graph(&args.graph)?;
    let blocks = EdgeBlockConfig {
        group_power: args.group_power,
        ..EdgeBlockConfig::default()
    };
    let index = dualgraph_core::edge_block::build_edge_blocks(&raw, &blocks);
    let [small, middle, large] = index.class_histogram();
    eprintln!(
        "group power {} (width {}), {} blocks: {} small, {} middle, {} large",
        index.group_power,
        8u64.pow(index.group_power),
        index.block_count(),
        small,
        middle,
        large,
    );
    let csv = block_report_csv(&index);
    match &args.csv {
        Some(p) => {
            fs::write(p, &csv).with_context(|| format!("writing CSV to {}", p.display()))?;
            eprintln!("block report written to {}", p.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    let raw = match args.kind {
        SynthKind::PowerLaw => power_law_graph(
            args.vertices,
            args.edges,
            args.exponent,
            args.seed,
            args.connected,
        ),
        SynthKind::Uniform => uniform_graph(args.vertices, args.edges, args.seed),
    };
    let mut out = String::with_capacity(raw.edges.len() * 12 + 64);
    out.push_str(&format!(
        "# synthetic {} graph: {} vertices, {} edges, seed {}\n",
        match args.kind {
            SynthKind::PowerLaw => "power-law",
            SynthKind::Uniform => "uniform",
        },
        raw.vertex_count,
        raw.edge_count(),
        args.seed,
    ));
    for &(u, v) in &raw.edges {
        out.push_str(&format!("{u} {v}\n"));
    }
    fs::write(&args.out, out)
        .with_context(|| format!("writing edge list to {}", args.out.display()))?;
    eprintln!(
        "wrote {} edges over {} vertices to {}",
        raw.edge_count(),
        raw.vertex_count,
        args.out.display()
    );
    Ok(())
}

fn cmd_cache(args: CacheArgs) -> Result<()> {
    let raw = load_graph(&args.graph)?;
    let csr = build_csr(&raw);
    write_csr_cache(&csr, raw.directed, &args.out)
        .with_context(|| format!("writing cache to {}", args.out.display()))?;
    eprintln!(
        "cached {} vertices / {} edges to {}",
        csr.vertex_count,
        csr.edge_count(),
        args.out.display()
    );
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run(args) => cmd_run(args),
        Command::Compare(args) => cmd_compare(args),
        Command::BlockReport(args) => cmd_block_report(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Cache(args) => cmd_cache(args),
    }
}
